#include "bidgame/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bidgame {

LowDiscrepancySampler::LowDiscrepancySampler(std::size_t dimension,
                                             std::uint64_t seed)
    : engine_(dimension == 0 ? 1 : dimension), shift_(dimension) {
  if (dimension == 0) {
    throw std::invalid_argument("LowDiscrepancySampler: dimension is zero");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double& s : shift_) s = unit(rng);
}

std::vector<double> LowDiscrepancySampler::next() {
  std::vector<double> point(shift_.size());
  for (std::size_t k = 0; k < point.size(); ++k) {
    const double u = std::ldexp(static_cast<double>(engine_() >> 11), -53);
    double v = u + shift_[k];
    if (v >= 1.0) v -= 1.0;
    point[k] = v;
  }
  return point;
}

}  // namespace bidgame
