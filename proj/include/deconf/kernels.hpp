#pragma once

#include <cstddef>
#include <string>

// Low-level numeric kernels used by the hot loops (tree split search,
// residual/influence reductions, nearest-neighbour distances).  Every kernel
// has a scalar reference implementation and, on x86-64, an AVX2 variant; the
// top-level entry points dispatch at runtime.  Reductions may differ from the
// scalar reference in the last few ulps (different accumulation order);
// best_split is bit-identical across backends because each candidate score is
// evaluated with the same per-element arithmetic.

namespace deconf::kern {

enum class Isa { scalar, avx2 };

// Backend selected at startup: AVX2 when the CPU supports it, overridable
// with DECONF_KERNEL_ISA=scalar|avx2.
Isa active_isa();
std::string isa_name(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
// sum_i (a_i * b_i)^2
double dot_sq(const double* a, const double* b, std::size_t n);
// squared Euclidean distance
double sq_dist(const double* a, const double* b, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void clip(double* x, double lo, double hi, std::size_t n);

struct SplitResult {
  std::ptrdiff_t index = -1;  // split after this many elements; -1 = none
  double score = 0.0;         // left_sum^2/n_left + right_sum^2/n_right
};

// Best variance-reduction split over a pre-sorted segment of n targets.
// prefix has n+1 entries with prefix[i] = sum of the first i targets.
// penalty[i] is 0.0 where a cut between positions i-1 and i is admissible
// (distinct feature values) and -inf otherwise; candidate i ranges over
// [max(1,min_leaf), n-min_leaf].  Ties keep the lowest index, matching a
// first-best scalar scan.
SplitResult best_split(const double* prefix, const double* penalty,
                       std::size_t n, std::size_t min_leaf);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double dot_sq(const double* a, const double* b, std::size_t n);
double sq_dist(const double* a, const double* b, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void clip(double* x, double lo, double hi, std::size_t n);
SplitResult best_split(const double* prefix, const double* penalty,
                       std::size_t n, std::size_t min_leaf);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define DECONF_X86 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
double dot_sq(const double* a, const double* b, std::size_t n);
double sq_dist(const double* a, const double* b, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void clip(double* x, double lo, double hi, std::size_t n);
SplitResult best_split(const double* prefix, const double* penalty,
                       std::size_t n, std::size_t min_leaf);
}  // namespace avx2
#endif

}  // namespace deconf::kern
