#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ineq {

/// Replays an identical stream for identical (value, stream_id), independent of
/// worker scheduling. Parallel sweeps take disjoint stream ids.
struct Seed {
  std::uint64_t value = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(Seed s) {
    std::uint64_t st = s.value;
    std::uint64_t a = detail::splitmix64(st);
    st ^= 0x5851f42d4c957f2dULL * (s.stream_id + 1);
    std::uint64_t b = detail::splitmix64(st);
    eng_.seed(a ^ (b << 1));
  }

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  double normal() {
    // Marsaglia polar, cached mate.
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  std::uint64_t bits() { return eng_(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Seed for the k-th independent sub-task of a job.
inline Seed derive_seed(Seed s, std::uint64_t k) {
  return Seed{s.value, s.stream_id * 0x100000001b3ULL + 0x9e3779b9ULL + k};
}

}  // namespace ineq
