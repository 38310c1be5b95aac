#include "kms/distlab.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "kms/error.hpp"
#include "kms/quadrature.hpp"

namespace kms::distlab {

namespace {

constexpr double kPi = testfn::kPi;
constexpr double kRateFloor = 1e-14;
const cplx kI(0.0, 1.0);

bool is_integer(double a) { return std::abs(a - std::round(a)) < 1e-12; }

std::vector<double> expansion_powers(double alpha, std::size_t count) {
  std::vector<double> powers;
  for (int j = 1; j <= static_cast<int>(count); ++j) powers.push_back(j);
  if (!is_integer(alpha))
    for (int k = 0; k <= static_cast<int>(count); ++k) powers.push_back(1.0 - alpha + k);
  std::sort(powers.begin(), powers.end());
  powers.resize(count);
  return powers;
}

// Fits J_i = L + sum_k a_k eps_i^{p_k} exactly on the given points and returns L.
cplx richardson(const std::vector<double>& eps, const std::vector<cplx>& values,
                const std::vector<double>& powers) {
  const auto n = static_cast<Eigen::Index>(eps.size());
  const double scale = eps.front();
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXcd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index k = 1; k < n; ++k) a(i, k) = std::pow(eps[i] / scale, powers[k - 1]);
    b(i) = values[i];
  }
  Eigen::VectorXcd x = a.cast<cplx>().colPivHouseholderQr().solve(b);
  return x(0);
}

}  // namespace

EpsSchedule::EpsSchedule(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::InvalidArgument, "empty eps schedule");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw Error(ErrorKind::InvalidArgument, "eps values must be positive");
    if (i > 0 && !(values_[i] < values_[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "eps schedule must be strictly decreasing");
  }
}

EpsSchedule EpsSchedule::default_schedule() {
  return EpsSchedule({1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5});
}

cplx sh_jump_integral(double alpha, const Profile& f, double eps, const ThermalState& state) {
  state.validate();
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  const ThermalState shifted{state.beta, eps};
  // With w = sh(x - i eps): the kernel is w^{-alpha} (1 - e^{i theta}),
  // theta = 2 alpha (arg w + pi [x < 0]), which is small away from x = 0.
  auto kernel = [&](double x) -> cplx {
    const cplx lw = weyl::log_sh(x, shifted);
    const double theta = 2.0 * alpha * (lw.imag() + (x < 0.0 ? kPi : 0.0));
    const double s = std::sin(0.5 * theta);
    const cplx one_minus = cplx(2.0 * s * s, -std::sin(theta));
    return std::exp(-alpha * lw) * one_minus;
  };
  auto integrand = [&](double x) -> cplx {
    const double fx = f.value(x);
    return fx == 0.0 ? cplx(0.0) : fx * kernel(x);
  };
  std::vector<double> pts = f.breakpoints;
  pts.push_back(0.0);
  for (double r = 10.0 * eps; r < 10.0 * std::max(std::abs(f.lo), std::abs(f.hi)); r *= 8.0) {
    pts.push_back(r);
    pts.push_back(-r);
  }
  return quad::ts_pieces(integrand, quad::cuts_within(f.lo, f.hi, pts), 1e-14).value;
}

cplx sh_jump_integral(double alpha, const RealTestFunction& f, double eps, const ThermalState& state) {
  return sh_jump_integral(alpha, f.profile(), eps, state);
}

DistributionalLimitResult extrapolate_limit(double alpha, const Profile& f,
                                            const EpsSchedule& schedule,
                                            const ThermalState& state) {
  const auto& eps = schedule.values();
  if (eps.size() < 3)
    throw Error(ErrorKind::InvalidArgument, "extrapolation needs at least three eps values");
  std::vector<cplx> values;
  for (double e : eps) values.push_back(sh_jump_integral(alpha, f, e, state));

  // Two overlapping windows: all but the last point, and all but the first.
  const std::size_t m = eps.size() - 1;
  const auto powers = expansion_powers(alpha, m - 1);
  const std::vector<double> e0(eps.begin(), eps.end() - 1), e1(eps.begin() + 1, eps.end());
  const std::vector<cplx> v0(values.begin(), values.end() - 1), v1(values.begin() + 1, values.end());
  const cplx l0 = richardson(e0, v0, powers);
  const cplx l1 = richardson(e1, v1, powers);

  DistributionalLimitResult out;
  out.limit = l1;
  out.error_estimate = std::abs(l1 - l0);
  out.schedule_used = schedule;
  if (!std::isfinite(out.error_estimate) ||
      out.error_estimate > 1e-3 * std::max(1.0, std::abs(out.limit)))
    throw Error(ErrorKind::ScheduleTooCoarse, "extrapolation tail not settled; schedule too coarse");
  return out;
}

DistributionalLimitResult extrapolate_limit(double alpha, const RealTestFunction& f,
                                            const EpsSchedule& schedule,
                                            const ThermalState& state) {
  auto out = extrapolate_limit(alpha, f.profile(), schedule, state);
  if (alpha > 0.0 && alpha < 1.0 && f(0.0) != 0.0) out.fitted_rate = rate_fit(alpha, f, schedule, state);
  return out;
}

double rate_fit(double alpha, const RealTestFunction& f, const EpsSchedule& schedule,
                const ThermalState& state) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "rate fit needs 0 < alpha < 1");
  if (f(0.0) == 0.0) throw Error(ErrorKind::InvalidArgument, "rate fit needs f(0) != 0");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(schedule.size());
  for (double e : schedule.values()) {
    const double mag = std::abs(sh_jump_integral(alpha, f, e, state));
    if (!(mag > kRateFloor)) throw Error(ErrorKind::SignalBelowFloor, "signal below floor");
    const double x = std::log(e), y = std::log(mag);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DeltaStructure alpha3_structure(const ThermalState& state, const EpsSchedule& schedule) {
  const auto f1 = RealTestFunction::bump(0.0, 0.8);
  const auto f2 = RealTestFunction::bump(0.0, 1.3);
  const cplx l1 = extrapolate_limit(3.0, f1.profile(), schedule, state).limit;
  const cplx l2 = extrapolate_limit(3.0, f2.profile(), schedule, state).limit;
  const double a11 = f1.derivative(0.0, 2), a12 = f1(0.0);
  const double a21 = f2.derivative(0.0, 2), a22 = f2(0.0);
  const double det = a11 * a22 - a12 * a21;
  return {(l1 * a22 - l2 * a12) / det, (a11 * l2 - a21 * l1) / det};
}

Profile triangle_profile(double x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "triangle width must be positive");
  Profile p;
  p.value = [x, eps](double y) { return std::max(0.0, 1.0 - std::abs(x - y) / eps); };
  p.slope = [x, eps](double y) {
    if (std::abs(x - y) >= eps) return 0.0;
    return y < x ? 1.0 / eps : -1.0 / eps;
  };
  p.lo = x - eps;
  p.hi = x + eps;
  p.breakpoints = {x - eps, x, x + eps};
  return p;
}

ReconstructionCheck current_reconstruction_check(const RealTestFunction& g, double x,
                                                 double eps_split, double alpha,
                                                 const ThermalState& state) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  const Profile f = triangle_profile(x, eps_split);
  const Profile gp = g.profile();
  const double mass = eps_split;  // integral of the triangle
  // Weyl operators normalized by their own expectation, e^{i a j(f)} / omega(e^{i a j(f)}).
  const cplx norm = weyl::weyl_expectation(std::vector<Profile>{f.scaled(alpha)}, state);
  const cplx plus = weyl::weyl_expectation(std::vector<Profile>{gp, f.scaled(alpha)}, state);
  const cplx minus = weyl::weyl_expectation(std::vector<Profile>{gp, f.scaled(-alpha)}, state);
  ReconstructionCheck out;
  out.reconstructed = (plus - minus) / (norm * 2.0 * kI * alpha * mass);
  out.reference = kI * weyl::pairing_with_point(g, x, state).value *
                  weyl::weyl_expectation(std::vector<Profile>{gp}, state);
  return out;
}

}  // namespace kms::distlab
