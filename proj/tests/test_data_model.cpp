#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "deconf/csv.hpp"
#include "deconf/dataset.hpp"
#include "deconf/error.hpp"
#include "deconf/rng.hpp"

using namespace deconf;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "deconf_test_data";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("load_dataset parses x, y and controls") {
  const auto dir = temp_dir();
  write_file(dir / "x.csv", "x0\n1\n2\n3\n");
  write_file(dir / "y.csv", "a,b\n1,4\n2,5\n3,6\n");
  write_file(dir / "controls.txt", "0\n");
  const Dataset ds = load_dataset((dir / "x.csv").string(), (dir / "y.csv").string(),
                                  (dir / "controls.txt").string());
  CHECK(ds.n() == 3);
  CHECK(ds.d() == 1);
  CHECK(ds.p() == 2);
  CHECK(ds.control_idx == std::vector<int>{0});
  CHECK(ds.tested_idx() == std::vector<int>{1});
  CHECK(ds.y(1, 1) == 5.0);

  // name-based control resolution, exact match
  write_file(dir / "controls_by_name.txt", "b\n");
  const Dataset ds2 = load_dataset((dir / "x.csv").string(), (dir / "y.csv").string(),
                                   (dir / "controls_by_name.txt").string());
  CHECK(ds2.control_idx == std::vector<int>{1});
  write_file(dir / "controls_bad.txt", "B\n");
  CHECK_THROWS_AS(load_dataset((dir / "x.csv").string(), (dir / "y.csv").string(),
                               (dir / "controls_bad.txt").string()),
                  ValidationError);
}

TEST_CASE("load_dataset rejects malformed inputs") {
  const auto dir = temp_dir();
  write_file(dir / "x.csv", "x0\n1\n2\n3\n");
  write_file(dir / "y_nan.csv", "a,b\n1,4\nnan,5\n3,6\n");
  CHECK_THROWS_WITH_AS(
      load_dataset((dir / "x.csv").string(), (dir / "y_nan.csv").string(), {}),
      doctest::Contains("non-finite entry at (2,1)"), ValidationError);

  write_file(dir / "y_text.csv", "a,b\n1,4\n2,oops\n3,6\n");
  CHECK_THROWS_AS(
      load_dataset((dir / "x.csv").string(), (dir / "y_text.csv").string(), {}),
      ValidationError);

  write_file(dir / "x_short.csv", "x0\n1\n2\n");
  write_file(dir / "y.csv", "a,b\n1,4\n2,5\n3,6\n");
  CHECK_THROWS_AS(
      load_dataset((dir / "x_short.csv").string(), (dir / "y.csv").string(), {}),
      ValidationError);

  // all outcomes as controls -> empty complement
  write_file(dir / "controls_all.txt", "0\n1\n");
  CHECK_THROWS_WITH_AS(
      load_dataset((dir / "x.csv").string(), (dir / "y.csv").string(),
                   (dir / "controls_all.txt").string()),
      doctest::Contains("empty complement"), ValidationError);
}

TEST_CASE("csv round-trip is bit exact") {
  const auto dir = temp_dir();
  rng::Stream s(42);
  Eigen::MatrixXd m(17, 5);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m(r, c) = s.normal() * std::pow(10.0, static_cast<double>(s.uniform_int(12)) - 6.0);
    }
  }
  m(0, 0) = 0.1;
  m(1, 1) = -1e-300;
  m(2, 2) = 1e300;
  std::vector<std::string> cols{"a", "b", "c", "d", "e"};
  csv::write_table((dir / "m.csv").string(), m, cols);
  const auto back = csv::read_table((dir / "m.csv").string());
  REQUIRE(back.values.rows() == m.rows());
  REQUIRE(back.values.cols() == m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      CHECK(back.values(r, c) == m(r, c));
    }
  }
  CHECK(back.columns == cols);
}

TEST_CASE("dataset save/load round-trip preserves numeric content") {
  const auto dir = temp_dir();
  rng::Stream s(7);
  Eigen::MatrixXd x(6, 2);
  Eigen::MatrixXd y(6, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = s.normal();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = s.normal();
  const Dataset ds = make_dataset(x, y, {1, 3});
  save_dataset(ds, (dir / "rx.csv").string(), (dir / "ry.csv").string(),
               (dir / "rc.txt").string());
  const Dataset back = load_dataset((dir / "rx.csv").string(), (dir / "ry.csv").string(),
                                    (dir / "rc.txt").string());
  CHECK(back.x == ds.x);
  CHECK(back.y == ds.y);
  CHECK(back.control_idx == ds.control_idx);
}

TEST_CASE("splitting by control set and reconcatenating reproduces y") {
  rng::Stream s(9);
  Eigen::MatrixXd x(5, 1);
  Eigen::MatrixXd y(5, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = s.normal();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = s.normal();
  const Dataset ds = make_dataset(x, y, {0, 2, 5});
  const Eigen::MatrixXd yc = ds.y_controls();
  const auto tested = ds.tested_idx();
  Eigen::MatrixXd rebuilt(5, 6);
  for (std::size_t c = 0; c < ds.control_idx.size(); ++c) {
    rebuilt.col(ds.control_idx[c]) = yc.col(static_cast<Eigen::Index>(c));
  }
  for (std::size_t c = 0; c < tested.size(); ++c) {
    rebuilt.col(tested[c]) = ds.y.col(tested[c]);
  }
  CHECK(rebuilt == ds.y);
}

TEST_CASE("dataset invariant violations") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 1);
  Eigen::MatrixXd y = Eigen::MatrixXd::Ones(3, 2);
  CHECK_THROWS_AS(make_dataset(x, y, {0, 0}), ValidationError);
  CHECK_THROWS_AS(make_dataset(x, y, {2}), ValidationError);
  CHECK_THROWS_AS(make_dataset(x, y, {-1}), ValidationError);
  CHECK_THROWS_AS(make_dataset(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 2), {}),
                  ValidationError);
}

TEST_CASE("column_standardize center") {
  Eigen::MatrixXd m(3, 1);
  m << 1, 2, 3;
  const auto [out, t] = column_standardize(m, StandardizeMode::center);
  CHECK(out(0, 0) == doctest::Approx(-1.0));
  CHECK(out(1, 0) == doctest::Approx(0.0));
  CHECK(out(2, 0) == doctest::Approx(1.0));
  CHECK(t.means[0] == doctest::Approx(2.0));
  const Eigen::MatrixXd back = invert_standardize(out, t);
  CHECK(back.isApprox(m, 1e-15));
}

TEST_CASE("column_standardize constant column falls back to center") {
  Eigen::MatrixXd m(3, 2);
  m << 5, 1, 5, 2, 5, 3;
  const auto [out, t] = column_standardize(m, StandardizeMode::center_scale);
  CHECK(out.col(0).isZero(0.0));
  CHECK(t.scales[0] == 1.0);
  CHECK(t.degenerate_columns == std::vector<int>{0});
  // non-degenerate column has unit sample sd
  const double sd = std::sqrt(out.col(1).squaredNorm() / 2.0);
  CHECK(sd == doctest::Approx(1.0));
}

TEST_CASE("column_standardize none is the identity") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  const auto [out, t] = column_standardize(m, StandardizeMode::none);
  CHECK(out == m);
  CHECK(invert_standardize(out, t) == m);
}
