#include "deconf/kernels.hpp"

#if defined(DECONF_X86)

#include <immintrin.h>

#include <algorithm>

namespace deconf::kern::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i];
  return s;
}

double sumsq(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(a + i);
    const __m256d v1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

double dot_sq(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(p, p, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double p = a[i] * b[i];
    s += p * p;
  }
  return s;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void clip(double* x, double lo, double hi, std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    v = _mm256_min_pd(_mm256_max_pd(v, vlo), vhi);
    _mm256_storeu_pd(x + i, v);
  }
  for (; i < n; ++i) x[i] = std::min(std::max(x[i], lo), hi);
}

SplitResult best_split(const double* prefix, const double* penalty,
                       std::size_t n, std::size_t min_leaf) {
  SplitResult best;
  const std::size_t ml = std::max<std::size_t>(min_leaf, 1);
  if (n < 2 * ml) return best;
  const std::size_t lo = ml;
  const std::size_t hi = n - ml;

  const double total = prefix[n];
  const __m256d vtotal = _mm256_set1_pd(total);
  const __m256d vn = _mm256_set1_pd(static_cast<double>(n));
  const __m256d step = _mm256_set1_pd(4.0);

  __m256d best_score = _mm256_set1_pd(-1.0);
  __m256d best_idx = _mm256_set1_pd(-1.0);
  __m256d vi = _mm256_setr_pd(static_cast<double>(lo), static_cast<double>(lo + 1),
                              static_cast<double>(lo + 2), static_cast<double>(lo + 3));

  std::size_t i = lo;
  for (; i + 4 <= hi + 1; i += 4) {
    const __m256d l = _mm256_loadu_pd(prefix + i);
    const __m256d r = _mm256_sub_pd(vtotal, l);
    const __m256d nr = _mm256_sub_pd(vn, vi);
    // score = l*l/i + r*r/(n-i) + penalty[i]; same element-wise arithmetic as
    // the scalar path, so scores are bit-identical across backends.
    const __m256d score =
        _mm256_add_pd(_mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(l, l), vi),
                                    _mm256_div_pd(_mm256_mul_pd(r, r), nr)),
                      _mm256_loadu_pd(penalty + i));
    // strict > keeps the first (lowest-index) best within each lane
    const __m256d mask = _mm256_cmp_pd(score, best_score, _CMP_GT_OQ);
    best_score = _mm256_blendv_pd(best_score, score, mask);
    best_idx = _mm256_blendv_pd(best_idx, vi, mask);
    vi = _mm256_add_pd(vi, step);
  }

  alignas(32) double scores[4];
  alignas(32) double idxs[4];
  _mm256_store_pd(scores, best_score);
  _mm256_store_pd(idxs, best_idx);
  double bscore = -1.0;
  std::ptrdiff_t bidx = -1;
  for (int lane = 0; lane < 4; ++lane) {
    if (idxs[lane] < 0.0) continue;
    const auto idx = static_cast<std::ptrdiff_t>(idxs[lane]);
    // lanes hold each class's first best; prefer the lower index on exact ties
    if (scores[lane] > bscore || (scores[lane] == bscore && idx < bidx)) {
      bscore = scores[lane];
      bidx = idx;
    }
  }
  for (; i <= hi; ++i) {
    const double l = prefix[i];
    const double r = total - l;
    const double score =
        l * l / static_cast<double>(i) + r * r / static_cast<double>(n - i) +
        penalty[i];
    if (score > bscore) {
      bscore = score;
      bidx = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (bidx >= 0 && bscore > -1.0) {
    best.index = bidx;
    best.score = bscore;
  }
  return best;
}

}  // namespace deconf::kern::avx2

#endif  // DECONF_X86
