#pragma once

#include <cstdint>
#include <random>

namespace stabletail {

// Pseudo-random stream keyed by (seed, stream index); distinct indices give
// independent substreams, so results do not depend on how work is scheduled.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t bits() { return engine_(); }
  double uniform();                      // open interval (0, 1)
  double uniform(double lo, double hi);  // open interval (lo, hi)
  double exponential();                  // rate 1
  double normal();                       // standard normal
  int sign() { return (engine_() >> 63) ? 1 : -1; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace stabletail
