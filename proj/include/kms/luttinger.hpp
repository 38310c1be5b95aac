#pragma once

#include <complex>

#include "kms/anyon.hpp"
#include "kms/error.hpp"
#include "kms/testfn.hpp"

namespace kms::luttinger {

using cplx = std::complex<double>;
using testfn::RealTestFunction;

// Gaussian potential v(p) = strength * exp(-(p * width)^2).
struct Potential {
  double strength = 1.0;
  double width = 1.0;

  double operator()(double p) const;
  void validate() const;
};

enum class InteractionCase { One = 1, Two = 2, Three = 3 };

struct Dispersion {
  InteractionCase kind = InteractionCase::Three;
  double lambda = 0.0;
  Potential potential;
};

class PositivityViolation : public Error {
 public:
  explicit PositivityViolation(double p);
  double momentum() const { return momentum_; }

 private:
  double momentum_;
};

// eps(p) as written for each case; throws PositivityViolation where the radicand or factor fails.
double dispersion_eval(const Dispersion& d, double p);
// Mode frequency entering the thermal density: sgn(p) eps(|p|) in cases 1 and 2, eps(p) in case 3.
double mode_frequency(const Dispersion& d, double p);
// Scans the momenta that enter the kernel; throws PositivityViolation at the first failure.
void check_admissible(const Dispersion& d);

// p / (1 - e^{-beta omega(p)}), continuous through p = 0.
double thermal_density(double p, double beta, const Dispersion& d);

// (1/4 pi^2) int density(p) conj(f~(p)) g~(p) dp with f~(p) = int f e^{ipt}.
cplx pairing_momentum(const RealTestFunction& f, const RealTestFunction& g, double beta,
                      const Dispersion& d);

// Interacting corrections computed from the density difference, which is even in p.
class InteractingKernel {
 public:
  InteractingKernel(const Dispersion& d, double beta);

  // (w_{beta,v} - w_beta)(x) = (1/2 pi^2) int_0^inf [density_v - density_free] cos(p x) dp.
  double difference(double x) const;
  // Gamma(x) = 4 int_0^inf [density_v - density_free] sin^2(p x/2)/p^2 dp, with Gamma'' = 4 pi^2 difference.
  double exponent(double x) const;
  cplx kernel(double x) const;

  const Dispersion& dispersion() const { return d_; }
  double beta() const { return beta_; }

 private:
  double density_difference(double p) const;
  template <class F>
  double momentum_integral(F&& integrand, double x) const;

  Dispersion d_;
  double beta_;
  double cutoff_;
};

cplx kernel_interacting(double x, double beta, const Dispersion& d);

// Free two-point times exp(-alpha Gamma(x)).
cplx two_point_interacting(double alpha, const anyon::ThermalState& state, double x,
                           const Dispersion& d);
// Free correlator times prod_{a<b} exp(alpha s_a s_b Gamma(p_a - p_b)); any ordering of a neutral spec.
cplx correlator_interacting(const anyon::CorrelatorSpec& spec, const Dispersion& d);
// The same for a canonical spec.
cplx n_point_interacting(const anyon::CorrelatorSpec& spec, const Dispersion& d);
// det[S_{1,v}(x_i - y_j)]^alpha, for comparison with the product form.
cplx n_point_interacting_determinant(const anyon::CorrelatorSpec& spec, const Dispersion& d);

struct CarCheck {
  cplx jump;
  cplx reference;
  double error_estimate = 0.0;
};

// int [S_{1,v}(x) + S_{1,v}(-x)] f(x) dx in the eps -> 0 limit, against f(0).
CarCheck car_check_interacting(double beta, const Dispersion& d, const RealTestFunction& f);

}  // namespace kms::luttinger
