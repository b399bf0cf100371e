#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace lexirl {

/// Deterministic random source. The helpers below avoid std::*_distribution,
/// whose output is implementation-defined; draws here are bit-identical for a
/// given seed on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 bits of entropy.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t pick(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  std::uint64_t raw() { return gen_(); }

  std::string state() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> gen_;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lexirl
