#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace bidgame {

// Thrown when a closed-form quantity is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Second-order partials of the pointwise payoff (own - cost) * K(own, opp)
// with respect to own bid (x), a single opponent bid (y) and the cost (c).
struct PayoffPartials {
  double xy = 0.0;
  double xx = 0.0;
  double xc = 0.0;
};

// Market response K^i: quantity delivered by a bidder given its own bid and
// the bids of every opponent. Implementations must be deterministic and
// return values in [0, upper_bound()].
class KernelModel {
 public:
  virtual ~KernelModel() = default;

  virtual double eval(double own, std::span<const double> opp) const = 0;

  // Partial derivative with respect to the own bid. The default is a central
  // finite difference; closed-form kernels override it.
  virtual double partial_own(double own, std::span<const double> opp) const;

  // K+ in the game definition.
  virtual double upper_bound() const = 0;

  // True where the kernel is differentiable (no branch switch in a
  // neighbourhood). Used to restrict derivative certificates.
  virtual bool smooth_at(double own, std::span<const double> opp) const;

  // Closed-form payoff partials when the kernel has them.
  virtual std::optional<PayoffPartials> payoff_partials(
      double own, std::span<const double> opp, double cost) const;

  // Sufficient condition for b -> (b - cost) K(b, y) to be concave on
  // [own_lo, own_hi] for every opponent bid y in [opp_lo, opp_hi].
  // Kernels without a certificate answer false.
  virtual bool payoff_concave_on(double own_lo, double own_hi, double opp_lo,
                                 double opp_hi, double cost) const;

  virtual std::string name() const = 0;

  double eval(double own, double opp) const {
    return eval(own, std::span<const double>(&opp, 1));
  }
  double partial_own(double own, double opp) const {
    return partial_own(own, std::span<const double>(&opp, 1));
  }
  bool smooth_at(double own, double opp) const {
    return smooth_at(own, std::span<const double>(&opp, 1));
  }
  std::optional<PayoffPartials> payoff_partials(double own, double opp,
                                                double cost) const {
    return payoff_partials(own, std::span<const double>(&opp, 1), cost);
  }
};

// F(x, y) = d + (1/2r) u^2 - (1/r) u with u = (x - y) / (x + y).
double kernel_F(double x, double y, double demand, double loss_coeff);

// Corner allocation 2 (1 - sqrt(1 - 2 d r)) / r.
double kernel_qbar(double demand, double loss_coeff);

enum class KernelBranch { kInterior, kPricedOut, kCorner };

// Two-node market with quadratic line losses r h^2 and inelastic demand d at
// each node. Two players only: opp must hold exactly one bid.
class ElectricityKernel final : public KernelModel {
 public:
  ElectricityKernel(double demand, double loss_coeff);

  double eval(double own, std::span<const double> opp) const override;
  double partial_own(double own, std::span<const double> opp) const override;
  double upper_bound() const override { return qbar_; }
  bool smooth_at(double own, std::span<const double> opp) const override;
  std::optional<PayoffPartials> payoff_partials(
      double own, std::span<const double> opp, double cost) const override;
  bool payoff_concave_on(double own_lo, double own_hi, double opp_lo,
                         double opp_hi, double cost) const override;
  std::string name() const override { return "electricity_two_node"; }

  KernelBranch branch(double own, double opp) const;

  double demand() const { return demand_; }
  double loss_coeff() const { return loss_coeff_; }

  using KernelModel::eval;
  using KernelModel::partial_own;
  using KernelModel::payoff_partials;
  using KernelModel::smooth_at;

 private:
  double single_opponent(std::span<const double> opp) const;

  double demand_;
  double loss_coeff_;
  double qbar_;
};

inline double kernel_eval(const KernelModel& model, double own, double opp) {
  return model.eval(own, opp);
}

inline double kernel_partial_own(const KernelModel& model, double own,
                                 double opp) {
  return model.partial_own(own, opp);
}

}  // namespace bidgame
