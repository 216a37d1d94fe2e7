#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "deconf/kernels.hpp"
#include "deconf/rng.hpp"

using namespace deconf;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = s.normal();
  return v;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("scalar reductions match simple formulas") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, -1.0, 0.5};
  CHECK(kern::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(3.5));
  CHECK(kern::scalar::sum(a.data(), 3) == doctest::Approx(6.0));
  CHECK(kern::scalar::sumsq(a.data(), 3) == doctest::Approx(14.0));
  CHECK(kern::scalar::sq_dist(a.data(), b.data(), 3) == doctest::Approx(9.0 + 9.0 + 6.25));
  CHECK(kern::scalar::dot_sq(a.data(), b.data(), 3) ==
        doctest::Approx(16.0 + 4.0 + 2.25));
}

#if defined(DECONF_X86)
TEST_CASE("avx2 kernels agree with scalar reference") {
  if (kern::active_isa() != kern::Isa::avx2) {
    MESSAGE("avx2 not available at runtime; skipping equivalence checks");
    return;
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1000u, 1003u}) {
    const auto a = random_vec(n, 11 + n);
    const auto b = random_vec(n, 77 + n);
    const double scale = std::max(1.0, std::abs(kern::scalar::sumsq(a.data(), n)));
    CHECK(kern::avx2::dot(a.data(), b.data(), n) ==
          doctest::Approx(kern::scalar::dot(a.data(), b.data(), n)).epsilon(1e-12));
    CHECK(kern::avx2::sum(a.data(), n) ==
          doctest::Approx(kern::scalar::sum(a.data(), n)).scale(scale).epsilon(1e-12));
    CHECK(kern::avx2::sumsq(a.data(), n) ==
          doctest::Approx(kern::scalar::sumsq(a.data(), n)).epsilon(1e-12));
    CHECK(kern::avx2::sq_dist(a.data(), b.data(), n) ==
          doctest::Approx(kern::scalar::sq_dist(a.data(), b.data(), n)).epsilon(1e-12));
    CHECK(kern::avx2::dot_sq(a.data(), b.data(), n) ==
          doctest::Approx(kern::scalar::dot_sq(a.data(), b.data(), n)).epsilon(1e-12));

    std::vector<double> out_s(n), out_v(n);
    kern::scalar::sub(a.data(), b.data(), out_s.data(), n);
    kern::avx2::sub(a.data(), b.data(), out_v.data(), n);
    CHECK(out_s == out_v);

    auto ys = a;
    auto yv = a;
    kern::scalar::axpy(0.37, b.data(), ys.data(), n);
    kern::avx2::axpy(0.37, b.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(ys[i] == doctest::Approx(yv[i]).epsilon(1e-14));

    auto cs = a;
    auto cv = a;
    kern::scalar::clip(cs.data(), -0.5, 0.5, n);
    kern::avx2::clip(cv.data(), -0.5, 0.5, n);
    CHECK(cs == cv);
  }
}

TEST_CASE("avx2 best_split is bit-identical to scalar") {
  if (kern::active_isa() != kern::Isa::avx2) return;
  rng::Stream s(123);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + s.uniform_int(60);
    const std::size_t min_leaf = 1 + s.uniform_int(4);
    std::vector<double> prefix(n + 1, 0.0);
    std::vector<double> penalty(n + 1, -kInf);
    for (std::size_t i = 0; i < n; ++i) {
      // heavy ties both in targets and in admissibility
      const double y = std::floor(3.0 * s.unif());
      prefix[i + 1] = prefix[i] + y;
      if (i >= 1) penalty[i] = s.unif() < 0.7 ? 0.0 : -kInf;
    }
    const auto r1 = kern::scalar::best_split(prefix.data(), penalty.data(), n, min_leaf);
    const auto r2 = kern::avx2::best_split(prefix.data(), penalty.data(), n, min_leaf);
    CHECK(r1.index == r2.index);
    CHECK(r1.score == r2.score);
  }
}
#endif

TEST_CASE("best_split finds the hand-checked cut") {
  // targets sorted by feature: step function 0,0,1,1 -> cut in the middle
  const std::vector<double> prefix{0.0, 0.0, 0.0, 1.0, 2.0};
  std::vector<double> penalty{-kInf, 0.0, 0.0, 0.0, -kInf};
  const auto r = kern::best_split(prefix.data(), penalty.data(), 4, 1);
  CHECK(r.index == 2);
  CHECK(r.score == doctest::Approx(0.0 + 4.0 / 2.0));
}

TEST_CASE("best_split honours min_leaf and admissibility") {
  const std::vector<double> prefix{0.0, 1.0, 1.0, 1.0, 2.0};
  std::vector<double> penalty{-kInf, 0.0, 0.0, 0.0, -kInf};
  auto r = kern::best_split(prefix.data(), penalty.data(), 4, 2);
  CHECK(r.index == 2);
  // no admissible cut at all
  std::vector<double> blocked{-kInf, -kInf, -kInf, -kInf, -kInf};
  r = kern::best_split(prefix.data(), blocked.data(), 4, 1);
  CHECK(r.index == -1);
  // too small for min_leaf
  r = kern::best_split(prefix.data(), penalty.data(), 4, 3);
  CHECK(r.index == -1);
}

TEST_CASE("best_split keeps the lowest index on exact ties") {
  // symmetric targets: cuts at 1 and 3 score identically; index 1 must win
  const std::vector<double> prefix{0.0, 1.0, 1.0, 1.0, 2.0};
  std::vector<double> penalty{-kInf, 0.0, -kInf, 0.0, -kInf};
  const auto r = kern::best_split(prefix.data(), penalty.data(), 4, 1);
  CHECK(r.index == 1);
}
