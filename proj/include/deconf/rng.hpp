#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams.  A stream is a (key, counter) pair; the key is
// derived from a seed plus a chain of role/index ids, so any variable of a
// simulation can be regenerated in isolation and results do not depend on
// thread scheduling.

namespace deconf::rng {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derive a child key from a parent key and an id.
inline std::uint64_t derive(std::uint64_t key, std::uint64_t id) {
  return mix64(key + kGolden * (id + 1));
}

inline std::uint64_t derive(std::uint64_t key, std::uint64_t id1,
                            std::uint64_t id2) {
  return derive(derive(key, id1), id2);
}

inline std::uint64_t derive(std::uint64_t key, std::uint64_t id1,
                            std::uint64_t id2, std::uint64_t id3) {
  return derive(derive(derive(key, id1), id2), id3);
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++ + kGolden)); }

  // uniform on [0, 1)
  double unif() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1]
  double unif_open0() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double unif_pm1() { return 2.0 * unif() - 1.0; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = unif_open0();
    const double u2 = unif();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  bool bernoulli(double p) { return unif() < p; }

  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace deconf::rng
