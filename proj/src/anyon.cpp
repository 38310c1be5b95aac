#include "kms/anyon.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_complex.hpp>

#include "kms/error.hpp"
#include "kms/quadrature.hpp"

namespace kms::anyon {

namespace {

constexpr double kPi = testfn::kPi;
const cplx kI(0.0, 1.0);

// Log(2 i beta) on the principal branch.
cplx log_prefactor(const ThermalState& st) { return cplx(std::log(2.0 * st.beta), 0.5 * kPi); }

// int hhat(z) Log sh(pi (t - z - i eps)/beta) dz over [-2 eta, 2 eta].
cplx smeared_log(double t, const SmearingKernel& h, const ThermalState& st) {
  const double reach = 2.0 * h.eta();
  auto integrand = [&](double z) -> cplx {
    if (z == t && st.eps == 0.0) return 0.0;
    return h.autocorrelation(z) * weyl::log_sh(t - z, st);
  };
  auto r = quad::ts_pieces(integrand, quad::cuts_within(-reach, reach, {t, 0.0}), 1e-12);
  return r.value;
}

// Matrices of 1/sh are exponentially ill-conditioned once pi |x_i - y_j|/beta is large,
// so entries and elimination are carried in 100 digits.
using wide = boost::multiprecision::cpp_complex<100>;

cplx sh_inverse_determinant(const std::vector<double>& xs, const std::vector<double>& ys, double beta,
                            double eps) {
  const std::size_t n = xs.size();
  const wide scale = boost::math::constants::pi<boost::multiprecision::cpp_bin_float_100>() / beta;
  std::vector<std::vector<wide>> a(n, std::vector<wide>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const wide arg = scale * wide(wide::value_type(xs[i]) - ys[j], -eps);
      a[i][j] = wide(1) / sinh(arg);
    }
  wide det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (abs(a[i][k]) > abs(a[p][k])) p = i;
    if (a[p][k] == wide(0)) return 0.0;
    if (p != k) {
      std::swap(a[p], a[k]);
      det = -det;
    }
    det *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const wide f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return {static_cast<double>(det.real()), static_cast<double>(det.imag())};
}

void check_neutral_canonical(const CorrelatorSpec& spec) {
  spec.validate();
  if (!spec.neutral()) throw Error(ErrorKind::NonNeutral, "non-neutral spec");
  if (!spec.canonical())
    throw Error(ErrorKind::InvalidArgument, "spec must list creations before annihilations");
}

// Split a canonical spec into x_1..x_n and y_1..y_n (annihilations are listed y_n..y_1).
void split_canonical(const CorrelatorSpec& spec, std::vector<double>& xs, std::vector<double>& ys) {
  const std::size_t n = spec.pairs();
  xs.clear();
  ys.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) xs.push_back(spec.insertions[i].position);
  for (std::size_t j = 0; j < n; ++j) ys[n - 1 - j] = spec.insertions[n + j].position;
}

}  // namespace

void CorrelatorSpec::validate() const {
  state.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  for (const auto& ins : insertions) {
    if (ins.sign != 1 && ins.sign != -1)
      throw Error(ErrorKind::InvalidArgument, "insertion sign must be +1 or -1");
    if (!std::isfinite(ins.position)) throw Error(ErrorKind::InvalidArgument, "non-finite position");
  }
  for (std::size_t a = 0; a < insertions.size(); ++a)
    for (std::size_t b = a + 1; b < insertions.size(); ++b)
      if (std::abs(insertions[a].position - insertions[b].position) < min_separation)
        throw Error(ErrorKind::CoincidentPoints, "coincident points");
}

bool CorrelatorSpec::neutral() const {
  int total = 0;
  for (const auto& ins : insertions) total += ins.sign;
  return total == 0 && !insertions.empty();
}

bool CorrelatorSpec::canonical() const {
  const std::size_t n = insertions.size() / 2;
  for (std::size_t i = 0; i < insertions.size(); ++i)
    if (insertions[i].sign != (i < n ? 1 : -1)) return false;
  return insertions.size() % 2 == 0;
}

cplx step_pairing(double xk, double xm, double delta, const SmearingKernel& h,
                  const ThermalState& st) {
  st.validate();
  const double d = xk - xm;
  if (!(delta > std::abs(d) + 2.0 * h.eta()))
    throw Error(ErrorKind::TruncationTooSmall, "truncation too small");
  const double reach = 2.0 * h.eta();
  auto integrand = [&](double z) -> cplx {
    const double w = h.autocorrelation(z);
    if (w == 0.0) return 0.0;
    cplx v = weyl::log_sh(d + delta - z, st) + weyl::log_sh(d - delta - z, st);
    if (!(z == d && st.eps == 0.0)) v -= 2.0 * weyl::log_sh(d - z, st);
    return w * v;
  };
  auto r = quad::ts_pieces(integrand, quad::cuts_within(-reach, reach, {d, 0.0}), 1e-12);
  return r.value / (4.0 * kPi * kPi);
}

RenormConstant renorm_c(double eta, const ThermalState& st) {
  st.validate();
  SmearingKernel h(eta);
  return {eta, std::exp(-0.5 * smeared_log(0.0, h, st))};
}

cplx finite_weyl_correlator(const CorrelatorSpec& spec, double delta, const SmearingKernel& h) {
  spec.validate();
  const auto& ins = spec.insertions;
  // Steps of height 2 pi sqrt(alpha/2); the pairing is quadratic in the height.
  cplx sum = static_cast<double>(ins.size()) *
             step_pairing(0.0, 0.0, delta, h, spec.state);
  for (std::size_t k = 0; k < ins.size(); ++k)
    for (std::size_t m = k + 1; m < ins.size(); ++m)
      sum += 2.0 * ins[k].sign * ins[m].sign *
             step_pairing(ins[k].position, ins[m].position, delta, h, spec.state);
  return std::exp(-kPi * kPi * spec.alpha * sum);
}

cplx field_normalization(const CorrelatorSpec& spec) {
  const double n = static_cast<double>(spec.insertions.size()) / 2.0;
  return std::exp(-n * spec.alpha * log_prefactor(spec.state));
}

cplx renormalized_weyl_correlator(const CorrelatorSpec& spec, double delta,
                                  const SmearingKernel& h) {
  const double n = static_cast<double>(spec.insertions.size()) / 2.0;
  const cplx log_c = -0.5 * smeared_log(0.0, h, spec.state);
  return field_normalization(spec) * std::exp(2.0 * n * spec.alpha * log_c) *
         finite_weyl_correlator(spec, delta, h);
}

cplx two_point(double alpha, const ThermalState& st, double x) {
  st.validate();
  return std::exp(-alpha * (log_prefactor(st) + weyl::log_sh(x, st)));
}

cplx two_point(double alpha, const ThermalState& st, cplx z) {
  st.validate();
  if (z.imag() == 0.0) return two_point(alpha, st, z.real());
  return std::exp(-alpha * (log_prefactor(st) + weyl::log_sh(z, st)));
}

cplx correlator(const CorrelatorSpec& spec) {
  spec.validate();
  if (!spec.neutral()) throw Error(ErrorKind::NonNeutral, "non-neutral spec");
  const auto& ins = spec.insertions;
  cplx exponent = 0.0;
  for (std::size_t a = 0; a < ins.size(); ++a)
    for (std::size_t b = a + 1; b < ins.size(); ++b)
      exponent += static_cast<double>(ins[a].sign * ins[b].sign) *
                  weyl::log_sh(ins[a].position - ins[b].position, spec.state);
  return field_normalization(spec) * std::exp(spec.alpha * exponent);
}

cplx n_point_product(const CorrelatorSpec& spec) {
  check_neutral_canonical(spec);
  return correlator(spec);
}

cplx n_point_determinant(const CorrelatorSpec& spec) {
  check_neutral_canonical(spec);
  std::vector<double> xs, ys;
  split_canonical(spec, xs, ys);
  const cplx det = sh_inverse_determinant(xs, ys, spec.state.beta, spec.state.eps);
  if (det == 0.0) throw Error(ErrorKind::NonFinite, "singular Cauchy matrix");
  return field_normalization(spec) * std::exp(spec.alpha * std::log(det));
}

cplx cauchy_determinant(const std::vector<double>& xs, const std::vector<double>& ys, double beta) {
  if (xs.size() != ys.size() || xs.empty())
    throw Error(ErrorKind::InvalidArgument, "Cauchy matrix needs equal, non-empty point sets");
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  return sh_inverse_determinant(xs, ys, beta, 0.0);
}

cplx cauchy_product(const std::vector<double>& xs, const std::vector<double>& ys, double beta) {
  if (xs.size() != ys.size() || xs.empty())
    throw Error(ErrorKind::InvalidArgument, "Cauchy matrix needs equal, non-empty point sets");
  const std::size_t n = xs.size();
  auto sh = [beta](double t) { return std::sinh(kPi * t / beta); };
  double value = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) value *= sh(xs[j] - xs[i]) * sh(ys[i] - ys[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) value /= sh(xs[i] - ys[j]);
  return value;
}

ExchangeCheck exchange_phase_check(const CorrelatorSpec& spec, std::size_t k) {
  if (k + 1 >= spec.insertions.size())
    throw Error(ErrorKind::InvalidArgument, "exchange index out of range");
  CorrelatorSpec swapped = spec;
  std::swap(swapped.insertions[k], swapped.insertions[k + 1]);
  const auto& a = spec.insertions[k];
  const auto& b = spec.insertions[k + 1];
  const double sgn = a.position > b.position ? 1.0 : -1.0;
  ExchangeCheck out;
  out.original = correlator(spec);
  out.swapped = correlator(swapped);
  out.phase = std::exp(kI * (kPi * spec.alpha * a.sign * b.sign * sgn));
  out.residual = std::abs(out.original - out.phase * out.swapped) /
                 std::max(std::abs(out.original), 1e-300);
  return out;
}

}  // namespace kms::anyon
