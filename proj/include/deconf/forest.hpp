#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace deconf {

struct ForestParams {
  int n_trees = 50;
  int max_depth = -1;        // -1 = unlimited
  double max_samples = 1.0;  // fraction of rows drawn per tree, in (0, 1]
  int m_try = 0;             // features tried per node; 0 = ceil(q/3)
  bool m_try_all = false;
  bool bootstrap = true;     // with replacement iff true
  int min_leaf = 5;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct ForestModel {
  std::vector<std::vector<TreeNode>> trees;
  int n_features = 0;
  ForestParams params;

  double predict_row(const double* x) const;
  // rows of x are observations
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

// CART regression forest: axis-aligned splits minimizing within-node variance,
// exact split search over m_try features drawn per node, one subsample of
// ceil(max_samples * n) rows per tree.  Fully deterministic given the seed.
ForestModel rf_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                   const ForestParams& params, std::uint64_t seed);

}  // namespace deconf
