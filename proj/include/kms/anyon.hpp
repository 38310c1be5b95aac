#pragma once

#include <complex>
#include <vector>

#include "kms/testfn.hpp"
#include "kms/weyl_core.hpp"

namespace kms::anyon {

using cplx = std::complex<double>;
using testfn::SmearingKernel;
using weyl::ThermalState;

// sign +1 is a creation (Psi*), -1 an annihilation (Psi).
struct AnyonInsertion {
  double position = 0.0;
  int sign = 1;
};

struct CorrelatorSpec {
  double alpha = 1.0;
  ThermalState state;
  std::vector<AnyonInsertion> insertions;
  double min_separation = 1e-6;

  // Throws on bad alpha, signs or coincident points.
  void validate() const;
  bool neutral() const;
  // All creations first, then annihilations.
  bool canonical() const;
  std::size_t pairs() const { return insertions.size() / 2; }
};

// Pairing of two unit-height truncated steps Theta(x_k - y) on [x_k - delta, x_k]
// and Theta(x_m - y) on [x_m - delta, x_m], both smeared by h.
cplx step_pairing(double xk, double xm, double delta, const SmearingKernel& h,
                  const ThermalState& state);

struct RenormConstant {
  double eta = 0.0;
  cplx value;
};

// c(eta) with c^{-1} = exp(-2 pi^2 <Theta|Theta>_eta) stripped of its truncation divergence.
RenormConstant renorm_c(double eta, const ThermalState& state);

// omega(prod_k e^{i j(F_k)}) for mollified, truncated steps in the order given.
cplx finite_weyl_correlator(const CorrelatorSpec& spec, double delta, const SmearingKernel& h);
// (2 i beta)^{-n alpha}, the field normalization relating Weyl products to field correlators.
cplx field_normalization(const CorrelatorSpec& spec);
// field_normalization * c(eta)^{2 n alpha} * finite_weyl_correlator.
cplx renormalized_weyl_correlator(const CorrelatorSpec& spec, double delta,
                                  const SmearingKernel& h);

// omega(Psi*(x) Psi(0)) = (2 i beta sh(pi (x - i eps)/beta))^{-alpha}, principal branch per factor.
cplx two_point(double alpha, const ThermalState& state, double x);
// Analytic continuation to complex x (no shift applied).
cplx two_point(double alpha, const ThermalState& state, cplx z);

// Correlator of a neutral spec in any ordering.
cplx correlator(const CorrelatorSpec& spec);
// Requires a neutral spec in canonical ordering.
cplx n_point_product(const CorrelatorSpec& spec);
// (2 i beta)^{-n alpha} det[1/sh(pi (x_i - y_j)/beta)]^alpha; exact for integer alpha.
cplx n_point_determinant(const CorrelatorSpec& spec);

// det[1/sh(x_i - y_j)] and the product formula it should equal (beta scales the arguments).
cplx cauchy_determinant(const std::vector<double>& xs, const std::vector<double>& ys, double beta);
cplx cauchy_product(const std::vector<double>& xs, const std::vector<double>& ys, double beta);

struct ExchangeCheck {
  cplx original;
  cplx swapped;
  cplx phase;  // predicted: original = phase * swapped
  double residual = 0.0;
};

// Swap insertions k and k+1 and compare with the exchange phase.
ExchangeCheck exchange_phase_check(const CorrelatorSpec& spec, std::size_t k);

}  // namespace kms::anyon
