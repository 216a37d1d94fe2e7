#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "deconf/forest.hpp"

namespace deconf {

enum class LearnerKind { ols, ridge, knn, random_forest, zero };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::ols;
  double lambda = 0.0;  // ridge penalty (intercept unpenalized)
  int k = 5;            // knn neighbours
  ForestParams forest;
  std::uint64_t seed = 0;
};

std::string learner_kind_name(LearnerKind k);

struct CrossFitPlan {
  int n_folds = 0;
  std::vector<int> fold_assignment;
  std::uint64_t seed = 0;

  // Uniform random permutation split into nearly equal blocks.
  static CrossFitPlan kfold(int n, int folds, std::uint64_t seed);
  // Single fold fitted and evaluated on the same rows.  Not valid for
  // inference; exists for oracle/equivalence checks.
  static CrossFitPlan insample(int n);

  bool non_inferential() const { return n_folds <= 1; }
  int n_rows() const { return static_cast<int>(fold_assignment.size()); }
  void validate() const;
};

class FitModel {
 public:
  virtual ~FitModel() = default;
  // rows of `features` are observations; returns one column per target
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const = 0;
};

// Fit one learner on all rows.  ols/ridge include an internal intercept;
// a numerically singular Gram matrix falls back to a ridge penalty of
// 1e-10 * trace(F'F)/q.  Forests fit one forest per target column.
std::unique_ptr<FitModel> fit_learner(const Eigen::MatrixXd& features,
                                      const Eigen::MatrixXd& targets,
                                      const LearnerSpec& spec);

// Out-of-fold predictions: row i is predicted by the model trained on the
// folds other than fold(i).  A single-fold plan fits and predicts in-sample.
Eigen::MatrixXd fit_predict_crossfit(const Eigen::MatrixXd& features,
                                     const Eigen::MatrixXd& targets,
                                     const LearnerSpec& spec,
                                     const CrossFitPlan& plan);

struct GridCellResult {
  double cv_mse = 0.0;
  bool failed = false;
  std::string error;
};

// Spec with the smallest cross-validated MSE averaged over target columns;
// ties keep the earliest grid entry.  Failing cells are recorded and skipped.
LearnerSpec grid_select(const Eigen::MatrixXd& features,
                        const Eigen::MatrixXd& targets,
                        const std::vector<LearnerSpec>& grid,
                        const CrossFitPlan& plan,
                        std::vector<GridCellResult>* report = nullptr);

}  // namespace deconf
