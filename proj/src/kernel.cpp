#include "bidgame/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace bidgame {

double KernelModel::partial_own(double own, std::span<const double> opp) const {
  const double h = 1e-6 * std::max(1.0, std::abs(own));
  return (eval(own + h, opp) - eval(own - h, opp)) / (2.0 * h);
}

bool KernelModel::smooth_at(double, std::span<const double>) const {
  return true;
}

std::optional<PayoffPartials> KernelModel::payoff_partials(
    double, std::span<const double>, double) const {
  return std::nullopt;
}

bool KernelModel::payoff_concave_on(double, double, double, double,
                                    double) const {
  return false;
}

double kernel_F(double x, double y, double demand, double loss_coeff) {
  if (!(loss_coeff > 0.0)) {
    throw DomainError("kernel_F: loss coefficient must be positive");
  }
  const double sum = x + y;
  if (!(sum > 0.0)) {
    throw DomainError("kernel_F: x + y must be strictly positive");
  }
  const double u = (x - y) / sum;
  return demand + u * u / (2.0 * loss_coeff) - u / loss_coeff;
}

double kernel_qbar(double demand, double loss_coeff) {
  if (!(loss_coeff > 0.0) || demand < 0.0) {
    throw DomainError("kernel_qbar: need d >= 0 and r > 0");
  }
  const double two_dr = 2.0 * demand * loss_coeff;
  if (two_dr > 1.0) {
    throw DomainError("kernel_qbar: 2 d r exceeds 1");
  }
  // 2 (1 - s) / r rewritten as 4 d / (1 + s) to avoid cancellation as r -> 0.
  return 4.0 * demand / (1.0 + std::sqrt(1.0 - two_dr));
}

ElectricityKernel::ElectricityKernel(double demand, double loss_coeff)
    : demand_(demand),
      loss_coeff_(loss_coeff),
      qbar_(kernel_qbar(demand, loss_coeff)) {
  if (!(demand > 0.0)) {
    throw DomainError("ElectricityKernel: demand must be positive");
  }
}

double ElectricityKernel::single_opponent(std::span<const double> opp) const {
  if (opp.size() != 1) {
    throw std::invalid_argument(
        "ElectricityKernel: exactly one opponent bid expected");
  }
  return opp[0];
}

KernelBranch ElectricityKernel::branch(double own, double opp) const {
  if (kernel_F(own, opp, demand_, loss_coeff_) < 0.0) {
    return KernelBranch::kPricedOut;
  }
  if (kernel_F(opp, own, demand_, loss_coeff_) < 0.0) {
    return KernelBranch::kCorner;
  }
  return KernelBranch::kInterior;
}

double ElectricityKernel::eval(double own, std::span<const double> opp) const {
  const double y = single_opponent(opp);
  const double f_own = kernel_F(own, y, demand_, loss_coeff_);
  if (f_own < 0.0) return 0.0;
  if (kernel_F(y, own, demand_, loss_coeff_) < 0.0) return qbar_;
  return std::min(f_own, qbar_);
}

double ElectricityKernel::partial_own(double own,
                                      std::span<const double> opp) const {
  const double y = single_opponent(opp);
  if (branch(own, y) != KernelBranch::kInterior) return 0.0;
  const double s = own + y;
  return -4.0 * y * y / (loss_coeff_ * s * s * s);
}

bool ElectricityKernel::smooth_at(double own,
                                  std::span<const double> opp) const {
  const double y = single_opponent(opp);
  return kernel_F(own, y, demand_, loss_coeff_) > 0.0 &&
         kernel_F(y, own, demand_, loss_coeff_) > 0.0;
}

std::optional<PayoffPartials> ElectricityKernel::payoff_partials(
    double own, std::span<const double> opp, double cost) const {
  const double y = single_opponent(opp);
  if (branch(own, y) != KernelBranch::kInterior) {
    // Constant kernel branches make the payoff affine in the own bid.
    return PayoffPartials{};
  }
  const double x = own;
  const double s = x + y;
  const double s3 = s * s * s;
  const double s4 = s3 * s;
  const double r = loss_coeff_;
  PayoffPartials p;
  p.xy = 4.0 * y / (r * s4) * (x * (2.0 * y - x) + cost * (2.0 * x - y));
  p.xx = 4.0 * y * y / (r * s4) * (x - 3.0 * cost - 2.0 * y);
  p.xc = 4.0 * y * y / (r * s3);
  return p;
}

bool ElectricityKernel::payoff_concave_on(double own_lo, double own_hi,
                                          double opp_lo, double opp_hi,
                                          double cost) const {
  if (!(own_lo <= own_hi) || !(opp_lo <= opp_hi) || !(own_lo > 0.0) ||
      !(opp_lo > 0.0)) {
    return false;
  }
  // No priced-out branch anywhere on the box.
  if (kernel_F(own_hi, opp_lo, demand_, loss_coeff_) < 0.0) return false;
  // The corner-to-interior kink is concave only where the margin is
  // nonnegative; otherwise the corner branch must be absent too.
  if (own_lo < cost &&
      kernel_F(opp_hi, own_lo, demand_, loss_coeff_) < 0.0) {
    return false;
  }
  return own_hi - 3.0 * cost - 2.0 * opp_lo < 0.0;
}

}  // namespace bidgame
