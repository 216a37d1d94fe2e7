#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "deconf/dataset.hpp"

namespace deconf {

enum class EmbedMethod { pca, ruv, external };

struct PreprocessStep {
  enum class Op { library_size_normalize, log1p, center, scale };
  Op op;
  double target_total = 1e4;  // library_size_normalize only
};

struct EmbedConfig {
  EmbedMethod method = EmbedMethod::pca;
  int rank = 1;
  std::vector<PreprocessStep> preprocessing;
  // Fraction of leading rows used to fit the embedding map; 0 fits and
  // applies on the same data.
  double split_fraction = 0.0;
};

struct EmbeddingResult {
  Eigen::MatrixXd u_hat;     // n x r principal-component scores
  Eigen::MatrixXd loadings;  // |C| x r right singular vectors
  EmbedMethod method = EmbedMethod::pca;
  EmbedConfig config;
  int fit_rows = 0;  // rows used to fit the map (= n when split_fraction == 0)
};

// Preprocessing steps applied in declared order.  Rows with nonpositive sum
// are left unchanged by library-size normalization.
Eigen::MatrixXd apply_preprocessing(const Eigen::MatrixXd& m,
                                    const std::vector<PreprocessStep>& steps);

// Scores of the first `rank` principal components of the preprocessed,
// column-centered control outcomes (left singular vectors scaled by singular
// values).  Sign convention: the largest-magnitude entry of each loading
// column is nonnegative, ties resolved at the lowest index.
EmbeddingResult pca_embed(const Dataset& ds, const EmbedConfig& cfg);

// PCA of the control outcomes after projecting off the column space of
// [1, X].
EmbeddingResult ruv_embed(const Dataset& ds, const EmbedConfig& cfg);

// Operator norm of the difference of the orthogonal projectors onto the two
// column spans; equals the sine of the largest principal angle when the ranks
// agree.  Inputs must have full column rank.
double projection_gap(const Eigen::MatrixXd& u_true, const Eigen::MatrixXd& u_est);

std::string embed_method_name(EmbedMethod m);

}  // namespace deconf
