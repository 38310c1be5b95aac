#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "kms/testfn.hpp"
#include "kms/weyl_core.hpp"

namespace kms::distlab {

using cplx = std::complex<double>;
using testfn::Profile;
using testfn::RealTestFunction;
using weyl::ThermalState;

// Strictly decreasing positive regulators.
class EpsSchedule {
 public:
  EpsSchedule() = default;
  explicit EpsSchedule(std::vector<double> values);
  static EpsSchedule default_schedule();

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct DistributionalLimitResult {
  cplx limit;
  double error_estimate = 0.0;
  std::optional<double> fitted_rate;
  EpsSchedule schedule_used;
};

// J(alpha, f, eps) = int [sh(x - i eps)^{-alpha} - e^{-i pi alpha sgn x} sh(-x - i eps)^{-alpha}] f(x) dx,
// with sh(t) = sh(pi t/beta). For integer alpha this is sh(x - i eps)^{-alpha} - sh(x + i eps)^{-alpha}.
cplx sh_jump_integral(double alpha, const Profile& f, double eps, const ThermalState& state);
cplx sh_jump_integral(double alpha, const RealTestFunction& f, double eps, const ThermalState& state);

// Richardson extrapolation of J to eps -> 0 over the schedule. Integer alpha assumes an
// expansion in integer powers of eps; otherwise the powers 1 - alpha + k are added.
DistributionalLimitResult extrapolate_limit(double alpha, const Profile& f,
                                            const EpsSchedule& schedule,
                                            const ThermalState& state);
DistributionalLimitResult extrapolate_limit(double alpha, const RealTestFunction& f,
                                            const EpsSchedule& schedule,
                                            const ThermalState& state);

// Least-squares slope of log|J| against log eps; requires 0 < alpha < 1 and f(0) != 0.
double rate_fit(double alpha, const RealTestFunction& f, const EpsSchedule& schedule,
                const ThermalState& state);

// Coefficients of the alpha = 3 jump: limit = second * f''(0) + point * f(0).
struct DeltaStructure {
  cplx second;
  cplx point;
};
DeltaStructure alpha3_structure(const ThermalState& state, const EpsSchedule& schedule);

// 1 - |x - y|/eps on [x - eps, x + eps].
Profile triangle_profile(double x, double eps);

struct ReconstructionCheck {
  cplx reconstructed;
  cplx reference;
};

// Difference quotient of normalized Weyl operators around a narrow triangle at x,
// against i <g|delta_x> omega(e^{i j(g)}).
ReconstructionCheck current_reconstruction_check(const RealTestFunction& g, double x,
                                                 double eps_split, double alpha,
                                                 const ThermalState& state);

}  // namespace kms::distlab
