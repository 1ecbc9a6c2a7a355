#pragma once

#include <cmath>
#include <cstdint>

namespace asymdet {

// Counter-based splittable stream. Each stream is the SplitMix64 sequence
// seeded by a key; child streams derive fresh keys by hashing, so the draw
// order of one stream never affects another. A (seed, trial, matrix, entry)
// chain gives every matrix entry its own stream, which makes sampling
// reproducible under any parallel schedule.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  RngStream child(std::uint64_t id) const {
    return RngStream(mix(state_ ^ mix(id + kGamma)));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on the open interval (0,1); safe as a log/pow argument.
  double next_u01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller, one deviate per call.
  double next_gaussian() {
    const double u = next_u01();
    const double v = next_u01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
  }

  // Student's t via Bailey's polar transform: for W,V iid uniform(0,1),
  // sqrt(nu (W^{-2/nu} - 1)) cos(2 pi V) is t-distributed with nu dof.
  double next_student_t(double nu) {
    const double w = next_u01();
    const double v = next_u01();
    return std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0)) * std::cos(2.0 * kPi * v);
  }

  double next_rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace asymdet
