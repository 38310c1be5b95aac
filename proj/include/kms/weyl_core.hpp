#pragma once

#include <complex>
#include <vector>

#include "kms/testfn.hpp"

namespace kms::weyl {

using cplx = std::complex<double>;
using testfn::Profile;
using testfn::RealTestFunction;
using testfn::SmearingKernel;

// Inverse temperature and the imaginary shift used for boundary values.
// eps == 0 selects the boundary value itself (the eps -> 0+ limit).
struct ThermalState {
  double beta = testfn::kPi;
  double eps = 0.0;

  void validate() const;
};

// Principal Log of sh(pi (t - i eps)/beta) for real t; continuous in t.
cplx log_sh(double t, const ThermalState& state);
// Principal Log of sh(pi z/beta) for complex z, without any shift.
cplx log_sh(cplx z, const ThermalState& state);

// w(z) = -[2 beta sh(pi (z - i eps)/beta)]^{-2}; the shift applies only when z is real.
cplx kernel_w(cplx z, const ThermalState& state);

// sigma(f, g) = (1/4pi) int (f' g - f g').
double symplectic_form(const Profile& f, const Profile& g);
double symplectic_form(const RealTestFunction& f, const RealTestFunction& g);
// sigma(f * h, g * h), computed through the autocorrelation of h.
double symplectic_smeared(const RealTestFunction& f, const RealTestFunction& g,
                          const SmearingKernel& h);

struct PairingResult {
  cplx value;
  double abs_error_estimate = 0.0;
};

// <f|g> = int int f(x) w(x - y) g(y) dx dy.
PairingResult pairing(const Profile& f, const Profile& g, const ThermalState& state);
PairingResult pairing(const RealTestFunction& f, const RealTestFunction& g,
                      const ThermalState& state);
// <g|delta_x> = int g(y) w(y - x) dy.
PairingResult pairing_with_point(const RealTestFunction& g, double x, const ThermalState& state);

// omega(e^{i j(f_1)} ... e^{i j(f_n)}).
cplx weyl_expectation(const std::vector<Profile>& fs, const ThermalState& state);
cplx weyl_expectation(const std::vector<RealTestFunction>& fs, const ThermalState& state);

// Phase in e^{i j(f)} e^{i j(g)} = e^{i phase} e^{i j(f + g)}.
double product_phase(const Profile& f, const Profile& g);
double product_phase(const RealTestFunction& f, const RealTestFunction& g);

}  // namespace kms::weyl
