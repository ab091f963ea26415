#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/random/sobol.hpp>

namespace bidgame {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Sobol points in [0, 1)^dimension with a seeded Cranley-Patterson rotation,
// so different seeds give different but equally well spread streams.
class LowDiscrepancySampler {
 public:
  LowDiscrepancySampler(std::size_t dimension, std::uint64_t seed);

  std::size_t dimension() const { return shift_.size(); }
  std::vector<double> next();

 private:
  boost::random::sobol engine_;
  std::vector<double> shift_;
};

// Affine map of a unit coordinate onto [lo, hi].
inline double lerp_unit(double u, double lo, double hi) {
  return lo + u * (hi - lo);
}

}  // namespace bidgame
