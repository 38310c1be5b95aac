#include "kms/luttinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "kms/distlab.hpp"
#include "kms/quadrature.hpp"

namespace kms::luttinger {

namespace {

constexpr double kPi = testfn::kPi;

// x / (1 - e^{-x}), equal to 1 at x = 0.
double bose_factor(double x) {
  if (x == 0.0) return 1.0;
  return x / -std::expm1(-x);
}

// omega(p)/p for p != 0, and its limit at p = 0 (infinite when omega ~ sqrt|p|).
double frequency_ratio(const Dispersion& d, double p) {
  const double v = d.potential(p);
  switch (d.kind) {
    case InteractionCase::One:
      return std::sqrt(1.0 - d.lambda * d.lambda * v * v);
    case InteractionCase::Two:
      if (p == 0.0) return d.lambda * v == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
      return std::sqrt(1.0 + 2.0 * d.lambda * v / std::abs(p));
    case InteractionCase::Three:
      return 1.0 + d.lambda * v;
  }
  return 1.0;
}

double free_density(double p, double beta) { return bose_factor(beta * p) / beta; }

}  // namespace

double Potential::operator()(double p) const { return strength * std::exp(-(p * width) * (p * width)); }

void Potential::validate() const {
  if (!std::isfinite(strength) || !(width > 0.0) || !std::isfinite(width))
    throw Error(ErrorKind::InvalidArgument, "potential needs finite strength and width > 0");
}

PositivityViolation::PositivityViolation(double p)
    : Error(ErrorKind::PositivityViolated, "positivity violated at p = " + std::to_string(p)),
      momentum_(p) {}

double dispersion_eval(const Dispersion& d, double p) {
  d.potential.validate();
  const double v = d.potential(p);
  switch (d.kind) {
    case InteractionCase::One: {
      const double r = 1.0 - d.lambda * d.lambda * v * v;
      if (!(r > 0.0)) throw PositivityViolation(p);
      return std::abs(p) * std::sqrt(r);
    }
    case InteractionCase::Two: {
      const double r = p * p + 2.0 * d.lambda * p * v;
      if (!(r >= 0.0)) throw PositivityViolation(p);
      return std::sqrt(r);
    }
    case InteractionCase::Three: {
      const double r = 1.0 + d.lambda * v;
      if (!(r > 0.0)) throw PositivityViolation(p);
      return p * r;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown interaction case");
}

double mode_frequency(const Dispersion& d, double p) {
  if (d.kind == InteractionCase::Three) return dispersion_eval(d, p);
  const double e = dispersion_eval(d, std::abs(p));
  return p < 0.0 ? -e : e;
}

void check_admissible(const Dispersion& d) {
  d.potential.validate();
  if (!std::isfinite(d.lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
  // omega(p) = p (1 + 2 lambda v/p)^{1/2} near 0+: needs lambda v(0) >= 0.
  if (d.kind == InteractionCase::Two && d.lambda * d.potential(0.0) < 0.0) throw PositivityViolation(0.0);
  // The potential decays monotonically in |p|; beyond 20 every case is free to double precision.
  for (int i = 0; i <= 2000; ++i) {
    const double p = 0.01 * i;
    mode_frequency(d, p);
    if (d.kind == InteractionCase::Three) mode_frequency(d, -p);
  }
}

double thermal_density(double p, double beta, const Dispersion& d) {
  const double ratio = frequency_ratio(d, p);
  if (std::isinf(ratio)) return 0.0;
  if (p == 0.0) return 1.0 / (beta * ratio);
  const double omega = mode_frequency(d, p);
  return bose_factor(beta * omega) / (beta * (omega / p));
}

cplx pairing_momentum(const RealTestFunction& f, const RealTestFunction& g, double beta,
                      const Dispersion& d) {
  check_admissible(d);
  double narrowest = std::numeric_limits<double>::infinity();
  for (const auto* fn : {&f, &g})
    for (const auto& t : fn->terms()) narrowest = std::min(narrowest, t.width);
  // Test-function transforms decay like exp(-sqrt(2 |p| width)); the density like e^{-beta |p|} for p < 0.
  const double upper = 220.0 / narrowest;
  const double lower = -std::min(upper, 45.0 / beta + 10.0);
  auto integrand = [&](double p) -> cplx {
    return thermal_density(p, beta, d) * std::conj(testfn::fourier(f, p)) * testfn::fourier(g, p);
  };
  // The density can behave like sqrt|p| at 0; tanh-sinh handles the two pieces touching it.
  const double near = 0.25;
  std::vector<double> cuts;
  for (double p = near; p < upper; p += 0.5) cuts.push_back(p);
  for (double p = -near; p > lower; p -= 0.5) cuts.push_back(p);
  cplx total = quad::gl_pieces(integrand, quad::cuts_within(lower, -near, cuts)) +
               quad::gl_pieces(integrand, quad::cuts_within(near, upper, cuts));
  total += quad::ts(integrand, -near, 0.0, 1e-13).value + quad::ts(integrand, 0.0, near, 1e-13).value;
  return total / (4.0 * kPi * kPi);
}

InteractingKernel::InteractingKernel(const Dispersion& d, double beta) : d_(d), beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorKind::InvalidArgument, "beta must be positive and finite");
  check_admissible(d_);
  // Beyond this momentum the potential is below e^{-64} of its strength.
  cutoff_ = 8.0 / d_.potential.width;
}

double InteractingKernel::density_difference(double p) const {
  if (d_.lambda == 0.0) return 0.0;
  return thermal_density(p, beta_, d_) - free_density(p, beta_);
}

template <class F>
double InteractingKernel::momentum_integral(F&& integrand, double x) const {
  // Pieces short against both the oscillation period 2 pi/|x| and the potential width;
  // the first piece uses tanh-sinh for the possible sqrt|p| behaviour at 0.
  const double step = std::min({0.5, 1.5 / std::max(std::abs(x), 1e-9), d_.potential.width});
  std::vector<double> cuts;
  for (double p = step; p < cutoff_; p += step) cuts.push_back(p);
  return quad::ts(integrand, 0.0, step, 1e-13).value +
         quad::gl_pieces(integrand, quad::cuts_within(step, cutoff_, cuts));
}

double InteractingKernel::difference(double x) const {
  if (d_.lambda == 0.0) return 0.0;
  auto integrand = [&](double p) { return density_difference(p) * std::cos(p * x); };
  return momentum_integral(integrand, x) / (2.0 * kPi * kPi);
}

double InteractingKernel::exponent(double x) const {
  if (d_.lambda == 0.0 || x == 0.0) return 0.0;
  auto integrand = [&](double p) {
    const double s = p == 0.0 ? 0.5 * x : std::sin(0.5 * p * x) / p;
    return 4.0 * density_difference(p) * s * s;
  };
  return momentum_integral(integrand, x);
}

cplx InteractingKernel::kernel(double x) const {
  return weyl::kernel_w(x, weyl::ThermalState{beta_, 0.0}) + difference(x);
}

cplx kernel_interacting(double x, double beta, const Dispersion& d) {
  return InteractingKernel(d, beta).kernel(x);
}

cplx two_point_interacting(double alpha, const anyon::ThermalState& state, double x,
                           const Dispersion& d) {
  const InteractingKernel k(d, state.beta);
  return anyon::two_point(alpha, state, x) * std::exp(-alpha * k.exponent(x));
}

cplx correlator_interacting(const anyon::CorrelatorSpec& spec, const Dispersion& d) {
  const cplx free = anyon::correlator(spec);
  const InteractingKernel k(d, spec.state.beta);
  const auto& ins = spec.insertions;
  double exponent = 0.0;
  for (std::size_t a = 0; a < ins.size(); ++a)
    for (std::size_t b = a + 1; b < ins.size(); ++b)
      exponent += ins[a].sign * ins[b].sign * k.exponent(ins[a].position - ins[b].position);
  return free * std::exp(spec.alpha * exponent);
}

cplx n_point_interacting(const anyon::CorrelatorSpec& spec, const Dispersion& d) {
  if (!spec.canonical())
    throw Error(ErrorKind::InvalidArgument, "spec must list creations before annihilations");
  return correlator_interacting(spec, d);
}

cplx n_point_interacting_determinant(const anyon::CorrelatorSpec& spec, const Dispersion& d) {
  spec.validate();
  if (!spec.neutral()) throw Error(ErrorKind::NonNeutral, "non-neutral spec");
  if (!spec.canonical())
    throw Error(ErrorKind::InvalidArgument, "spec must list creations before annihilations");
  const std::size_t n = spec.pairs();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = spec.insertions[i].position;
      const double y = spec.insertions[2 * n - 1 - j].position;
      m(i, j) = two_point_interacting(1.0, spec.state, x - y, d);
    }
  return std::exp(spec.alpha * std::log(m.determinant()));
}

CarCheck car_check_interacting(double beta, const Dispersion& d, const RealTestFunction& f) {
  const InteractingKernel k(d, beta);
  testfn::Profile weighted = f.profile();
  weighted.value = [f, k](double x) {
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * std::exp(-k.exponent(x));
  };
  const weyl::ThermalState state{beta, 0.0};
  const auto r = distlab::extrapolate_limit(1.0, weighted, distlab::EpsSchedule::default_schedule(), state);
  const cplx scale = 1.0 / cplx(0.0, 2.0 * beta);
  return {scale * r.limit, f(0.0), std::abs(scale) * r.error_estimate};
}

}  // namespace kms::luttinger
