#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dlsq {

/// Input/configuration rejected before any integration started.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Integration aborted (non-finite state); carries the diagnostic time.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double t)
      : std::runtime_error(what + " at t=" + std::to_string(t)), time(t) {}
  double time;
};

/// mt19937_64 with a fixed 53-bit uniform so traces are reproducible
/// across standard libraries (std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

 private:
  // xorshift-multiply seeding, then a 64-bit LCG-free generator: we keep a
  // tiny splitmix64 stream; quality is plenty for test fixtures and noise.
  static std::uint64_t splitmix(std::uint64_t x) { return x + 0x9e3779b97f4a7c15ULL; }
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

}  // namespace dlsq
