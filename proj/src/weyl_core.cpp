#include "kms/weyl_core.hpp"

#include <cmath>

#include "kms/error.hpp"
#include "kms/quadrature.hpp"

namespace kms::weyl {

namespace {

constexpr double kPi = testfn::kPi;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPairingBudget = 1e-7;

// Log sh(z) that survives |Re z| beyond the overflow range of sinh.
cplx log_sinh(cplx z) {
  const double a = z.real(), b = z.imag();
  if (a > 300.0) return cplx(a - kLn2, b);
  if (a < -300.0) {
    const bool upper = b > 0.0 || (b == 0.0 && !std::signbit(b));
    return cplx(-a - kLn2, upper ? kPi - b : -kPi - b);
  }
  return std::log(std::sinh(z));
}

// Inner integral of the integrated-by-parts pairing: int g'(y) Log sh(x - y - i eps) dy.
quad::Result<cplx> inner_log_integral(const Profile& g, double x, const ThermalState& st) {
  auto pts = g.breakpoints;
  pts.push_back(x);
  const auto cuts = quad::cuts_within(g.lo, g.hi, pts);
  auto integrand = [&](double y) -> cplx {
    const double gp = g.slope(y);
    if (gp == 0.0 || (x == y && st.eps == 0.0)) return 0.0;
    return gp * log_sh(x - y, st);
  };
  return quad::ts_pieces(integrand, cuts, 1e-11);
}

}  // namespace

void ThermalState::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw Error(ErrorKind::InvalidArgument, "beta must be positive and finite");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw Error(ErrorKind::InvalidArgument, "eps must be non-negative and finite");
}

cplx log_sh(double t, const ThermalState& st) {
  // eps == 0 keeps a signed zero so the branch is taken from below the real axis.
  const double shift = st.eps > 0.0 ? -kPi * st.eps / st.beta : -0.0;
  return log_sinh(cplx(kPi * t / st.beta, shift));
}

cplx log_sh(cplx z, const ThermalState& st) { return log_sinh(kPi * z / st.beta); }

cplx kernel_w(cplx z, const ThermalState& st) {
  st.validate();
  cplx arg = kPi * z / st.beta;
  if (z.imag() == 0.0) arg = cplx(arg.real(), st.eps > 0.0 ? -kPi * st.eps / st.beta : -0.0);
  const cplx sh = std::sinh(arg);
  if (sh == 0.0) throw Error(ErrorKind::NonFinite, "kernel evaluated at its pole");
  return -1.0 / (4.0 * st.beta * st.beta * sh * sh);
}

double symplectic_form(const Profile& f, const Profile& g) {
  const double lo = std::max(f.lo, g.lo), hi = std::min(f.hi, g.hi);
  if (!(hi > lo)) return 0.0;
  std::vector<double> pts = f.breakpoints;
  pts.insert(pts.end(), g.breakpoints.begin(), g.breakpoints.end());
  auto integrand = [&](double t) { return f.slope(t) * g.value(t) - f.value(t) * g.slope(t); };
  return quad::gk_pieces(integrand, quad::cuts_within(lo, hi, pts), 1e-13).value / (4.0 * kPi);
}

double symplectic_form(const RealTestFunction& f, const RealTestFunction& g) {
  const double lo = std::max(f.support_lo(), g.support_lo());
  const double hi = std::min(f.support_hi(), g.support_hi());
  if (!(hi > lo)) return 0.0;
  // Bumps are smooth up to their flat edges: 16 fixed panels between consecutive breakpoints.
  std::vector<double> pts = f.profile().cuts();
  const auto gc = g.profile().cuts();
  pts.insert(pts.end(), gc.begin(), gc.end());
  const auto coarse = quad::cuts_within(lo, hi, pts);
  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i)
    for (int k = 0; k < 16; ++k) cuts.push_back(coarse[i] + (coarse[i + 1] - coarse[i]) * k / 16.0);
  cuts.push_back(hi);
  auto integrand = [&](double t) { return f.derivative(t, 1) * g(t) - f(t) * g.derivative(t, 1); };
  return quad::gl_pieces(integrand, cuts) / (4.0 * kPi);
}

double symplectic_smeared(const RealTestFunction& f, const RealTestFunction& g,
                          const SmearingKernel& h) {
  const double eta = h.eta();
  auto integrand = [&](double z) {
    return h.autocorrelation(z) * symplectic_form(f.shifted(z), g);
  };
  // The weight is smooth and compactly supported, so fixed panels suffice.
  std::vector<double> cuts;
  for (int k = -8; k <= 8; ++k) cuts.push_back(0.25 * k * eta);
  return quad::gl_pieces(integrand, cuts);
}

PairingResult pairing(const Profile& f, const Profile& g, const ThermalState& st) {
  st.validate();
  std::vector<double> pts = f.breakpoints;
  pts.insert(pts.end(), g.breakpoints.begin(), g.breakpoints.end());
  const auto outer_cuts = quad::cuts_within(f.lo, f.hi, pts);
  double inner_err = 0.0;
  auto outer = [&](double x) -> cplx {
    const double fp = f.slope(x);
    if (fp == 0.0) return 0.0;
    auto r = inner_log_integral(g, x, st);
    inner_err = std::max(inner_err, r.error);
    return fp * r.value;
  };
  auto r = quad::gk_pieces(outer, outer_cuts, 1e-10);
  const double scale = -1.0 / (4.0 * kPi * kPi);
  PairingResult out{scale * r.value, std::abs(scale) * (r.error + inner_err * (f.hi - f.lo))};
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()) ||
      out.abs_error_estimate > kPairingBudget * std::max(1.0, std::abs(out.value)))
    throw Error(ErrorKind::NotConverged, "pairing did not converge (error " + std::to_string(out.abs_error_estimate) + ")");
  return out;
}

PairingResult pairing(const RealTestFunction& f, const RealTestFunction& g,
                      const ThermalState& st) {
  return pairing(f.profile(), g.profile(), st);
}

PairingResult pairing_with_point(const RealTestFunction& g, double x, const ThermalState& st) {
  st.validate();
  auto pts = g.profile().breakpoints;
  pts.push_back(x);
  auto integrand = [&](double y) -> cplx {
    const double g2 = g.derivative(y, 2);
    if (g2 == 0.0 || (x == y && st.eps == 0.0)) return 0.0;
    return g2 * log_sh(y - x, st);
  };
  auto r = quad::ts_pieces(integrand, quad::cuts_within(g.support_lo(), g.support_hi(), pts), 1e-12);
  const double scale = 1.0 / (4.0 * kPi * kPi);
  return {scale * r.value, scale * r.error};
}

cplx weyl_expectation(const std::vector<Profile>& fs, const ThermalState& st) {
  cplx exponent = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    exponent += pairing(fs[k], fs[k], st).value;
    for (std::size_t m = k + 1; m < fs.size(); ++m) exponent += 2.0 * pairing(fs[k], fs[m], st).value;
  }
  return std::exp(-0.5 * exponent);
}

cplx weyl_expectation(const std::vector<RealTestFunction>& fs, const ThermalState& st) {
  std::vector<Profile> ps;
  for (const auto& f : fs) ps.push_back(f.profile());
  return weyl_expectation(ps, st);
}

double product_phase(const Profile& f, const Profile& g) { return 0.5 * symplectic_form(f, g); }

double product_phase(const RealTestFunction& f, const RealTestFunction& g) {
  return product_phase(f.profile(), g.profile());
}

}  // namespace kms::weyl
