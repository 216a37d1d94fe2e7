#include "deconf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "deconf/csv.hpp"
#include "deconf/error.hpp"

namespace deconf {

bool Dataset::is_control(int j) const {
  return std::binary_search(control_idx.begin(), control_idx.end(), j);
}

std::vector<int> Dataset::tested_idx() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(p()) - control_idx.size());
  for (int j = 0; j < p(); ++j) {
    if (!is_control(j)) out.push_back(j);
  }
  return out;
}

Eigen::MatrixXd Dataset::y_controls() const {
  Eigen::MatrixXd yc(n(), static_cast<Eigen::Index>(control_idx.size()));
  for (std::size_t c = 0; c < control_idx.size(); ++c) {
    yc.col(static_cast<Eigen::Index>(c)) = y.col(control_idx[c]);
  }
  return yc;
}

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* name) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!std::isfinite(m(r, c))) {
        throw ValidationError(std::string(name) + ": non-finite entry at (" +
                              std::to_string(r + 1) + "," + std::to_string(c + 1) +
                              ")");
      }
    }
  }
}

}  // namespace

Dataset make_dataset(Eigen::MatrixXd x, Eigen::MatrixXd y,
                     std::vector<int> control_idx,
                     std::vector<std::string> outcome_names) {
  if (y.rows() < 2) throw ValidationError("dataset: need n >= 2 rows");
  if (x.cols() < 1) throw ValidationError("dataset: need d >= 1 covariates");
  if (y.cols() < 1) throw ValidationError("dataset: need p >= 1 outcomes");
  if (x.rows() != y.rows()) {
    throw ValidationError("dataset: x has " + std::to_string(x.rows()) +
                          " rows but y has " + std::to_string(y.rows()));
  }
  std::sort(control_idx.begin(), control_idx.end());
  if (std::adjacent_find(control_idx.begin(), control_idx.end()) !=
      control_idx.end()) {
    throw ValidationError("dataset: duplicate control index");
  }
  for (int j : control_idx) {
    if (j < 0 || j >= y.cols()) {
      throw ValidationError("dataset: control index " + std::to_string(j) +
                            " out of range [0," + std::to_string(y.cols() - 1) +
                            "]");
    }
  }
  if (static_cast<Eigen::Index>(control_idx.size()) >= y.cols()) {
    throw ValidationError("dataset: empty complement; every outcome is a control");
  }
  if (!outcome_names.empty() &&
      static_cast<Eigen::Index>(outcome_names.size()) != y.cols()) {
    throw ValidationError("dataset: outcome_names size does not match p");
  }
  check_finite(x, "x");
  check_finite(y, "y");
  Dataset ds;
  ds.x = std::move(x);
  ds.y = std::move(y);
  ds.control_idx = std::move(control_idx);
  ds.outcome_names = std::move(outcome_names);
  return ds;
}

namespace {

std::vector<int> read_controls_file(const std::string& path,
                                    const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open controls file: " + path);
  std::vector<int> controls;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int idx = -1;
    const char* first = line.data();
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, idx);
    if (ec == std::errc() && ptr == last) {
      controls.push_back(idx);
      continue;
    }
    const auto it = std::find(names.begin(), names.end(), line);
    if (it == names.end()) {
      throw ValidationError("controls file: unknown control name '" + line + "'");
    }
    controls.push_back(static_cast<int>(it - names.begin()));
  }
  return controls;
}

}  // namespace

Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                     const std::optional<std::string>& controls_path) {
  csv::Table xt = csv::read_table(x_path);
  csv::Table yt = csv::read_table(y_path);
  std::vector<int> controls;
  if (controls_path) controls = read_controls_file(*controls_path, yt.columns);
  return make_dataset(std::move(xt.values), std::move(yt.values),
                      std::move(controls), std::move(yt.columns));
}

void save_dataset(const Dataset& ds, const std::string& x_path,
                  const std::string& y_path,
                  const std::optional<std::string>& controls_path) {
  std::vector<std::string> xcols;
  for (int c = 0; c < ds.d(); ++c) xcols.push_back("x" + std::to_string(c));
  csv::write_table(x_path, ds.x, xcols);
  std::vector<std::string> ycols = ds.outcome_names;
  if (ycols.empty()) {
    for (int c = 0; c < ds.p(); ++c) ycols.push_back("y" + std::to_string(c));
  }
  csv::write_table(y_path, ds.y, ycols);
  if (controls_path) {
    std::ofstream out(*controls_path);
    if (!out) throw ValidationError("cannot write controls file: " + *controls_path);
    for (int j : ds.control_idx) out << j << '\n';
  }
}

std::pair<Eigen::MatrixXd, ColumnTransform> column_standardize(
    const Eigen::MatrixXd& m, StandardizeMode mode) {
  ColumnTransform t;
  t.mode = mode;
  t.means = Eigen::VectorXd::Zero(m.cols());
  t.scales = Eigen::VectorXd::Ones(m.cols());
  if (mode == StandardizeMode::none) return {m, t};
  check_finite(m, "column_standardize input");
  Eigen::MatrixXd out = m;
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double mean = m.col(c).mean();
    t.means[c] = mean;
    out.col(c).array() -= mean;
    if (mode == StandardizeMode::center_scale) {
      const double ss = out.col(c).squaredNorm();
      const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      if (sd > 0.0) {
        t.scales[c] = sd;
        out.col(c) /= sd;
      } else {
        t.degenerate_columns.push_back(static_cast<int>(c));
      }
    }
  }
  return {out, t};
}

Eigen::MatrixXd invert_standardize(const Eigen::MatrixXd& m,
                                   const ColumnTransform& t) {
  if (t.mode == StandardizeMode::none) return m;
  Eigen::MatrixXd out = m;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out.col(c) = m.col(c) * t.scales[c];
    out.col(c).array() += t.means[c];
  }
  return out;
}

}  // namespace deconf
