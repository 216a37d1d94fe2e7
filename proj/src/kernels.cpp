#include "deconf/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace deconf::kern {

namespace {

Isa detect_isa() {
  const char* env = std::getenv("DECONF_KERNEL_ISA");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(DECONF_X86)
    if (std::strcmp(env, "avx2") == 0) return Isa::avx2;
#endif
  }
#if defined(DECONF_X86)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Isa::avx2;
  }
#endif
  return Isa::scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect_isa();
  return isa;
}

std::string isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

#if defined(DECONF_X86)
#define DECONF_DISPATCH(fn, ...) \
  return active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#define DECONF_DISPATCH_VOID(fn, ...)            \
  if (active_isa() == Isa::avx2) {               \
    avx2::fn(__VA_ARGS__);                       \
  } else {                                       \
    scalar::fn(__VA_ARGS__);                     \
  }
#else
#define DECONF_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#define DECONF_DISPATCH_VOID(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) {
  DECONF_DISPATCH(dot, a, b, n);
}
double sum(const double* a, std::size_t n) { DECONF_DISPATCH(sum, a, n); }
double sumsq(const double* a, std::size_t n) { DECONF_DISPATCH(sumsq, a, n); }
double dot_sq(const double* a, const double* b, std::size_t n) {
  DECONF_DISPATCH(dot_sq, a, b, n);
}
double sq_dist(const double* a, const double* b, std::size_t n) {
  DECONF_DISPATCH(sq_dist, a, b, n);
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  DECONF_DISPATCH_VOID(sub, a, b, out, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  DECONF_DISPATCH_VOID(axpy, alpha, x, y, n);
}
void clip(double* x, double lo, double hi, std::size_t n) {
  DECONF_DISPATCH_VOID(clip, x, lo, hi, n);
}
SplitResult best_split(const double* prefix, const double* penalty,
                       std::size_t n, std::size_t min_leaf) {
  DECONF_DISPATCH(best_split, prefix, penalty, n, min_leaf);
}

}  // namespace deconf::kern
