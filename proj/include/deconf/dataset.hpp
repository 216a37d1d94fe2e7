#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace deconf {

// Covariates X (n x d), outcomes Y (n x p) and the surrogate control set C
// (sorted column indices into Y).  Immutable after construction; all fields
// validated by make_dataset.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  std::vector<int> control_idx;
  std::vector<std::string> outcome_names;

  int n() const { return static_cast<int>(y.rows()); }
  int d() const { return static_cast<int>(x.cols()); }
  int p() const { return static_cast<int>(y.cols()); }

  bool is_control(int j) const;
  // complement of the control set, ascending
  std::vector<int> tested_idx() const;
  // Y restricted to the control columns, in control_idx order
  Eigen::MatrixXd y_controls() const;
};

// Validates shapes, finiteness, and the control set (sorted, deduplicated,
// in range, with a nonempty complement).
Dataset make_dataset(Eigen::MatrixXd x, Eigen::MatrixXd y,
                     std::vector<int> control_idx,
                     std::vector<std::string> outcome_names = {});

// CSV loading: x and y need a header row; the controls file holds one outcome
// name or zero-based index per line (resolved against y's header).
Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                     const std::optional<std::string>& controls_path = {});

void save_dataset(const Dataset& ds, const std::string& x_path,
                  const std::string& y_path,
                  const std::optional<std::string>& controls_path = {});

enum class StandardizeMode { center, center_scale, none };

struct ColumnTransform {
  StandardizeMode mode = StandardizeMode::none;
  Eigen::VectorXd means;
  Eigen::VectorXd scales;                // 1.0 where scaling was skipped
  std::vector<int> degenerate_columns;   // zero-sd columns that fell back to center
};

// Column centering/scaling; constant columns fall back to center-only and are
// flagged in the transform record.
std::pair<Eigen::MatrixXd, ColumnTransform> column_standardize(
    const Eigen::MatrixXd& m, StandardizeMode mode);

Eigen::MatrixXd invert_standardize(const Eigen::MatrixXd& m,
                                   const ColumnTransform& t);

}  // namespace deconf
