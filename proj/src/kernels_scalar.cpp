#include "deconf/kernels.hpp"

#include <algorithm>

namespace deconf::kern::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double sumsq(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double dot_sq(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a[i] * b[i];
    s += p * p;
  }
  return s;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void clip(double* x, double lo, double hi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::min(std::max(x[i], lo), hi);
}

SplitResult best_split(const double* prefix, const double* penalty,
                       std::size_t n, std::size_t min_leaf) {
  SplitResult best;
  const std::size_t ml = std::max<std::size_t>(min_leaf, 1);
  if (n < 2 * ml) return best;
  const std::size_t lo = ml;
  const std::size_t hi = n - ml;
  const double total = prefix[n];
  double best_score = -1.0;
  std::ptrdiff_t best_idx = -1;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double l = prefix[i];
    const double r = total - l;
    const double score =
        l * l / static_cast<double>(i) + r * r / static_cast<double>(n - i) +
        penalty[i];
    if (score > best_score) {
      best_score = score;
      best_idx = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (best_idx >= 0) {
    best.index = best_idx;
    best.score = best_score;
  }
  return best;
}

}  // namespace deconf::kern::scalar
