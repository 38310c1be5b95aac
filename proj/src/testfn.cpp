#include "kms/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "kms/error.hpp"
#include "kms/quadrature.hpp"

namespace kms::testfn {

namespace {

using Poly = std::vector<double>;

Poly poly_derivative(const Poly& q) {
  Poly d(q.size() > 1 ? q.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < q.size(); ++i) d[i - 1] = static_cast<double>(i) * q[i];
  return d;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

double poly_eval(const Poly& q, double t) {
  double r = 0.0;
  for (auto it = q.rbegin(); it != q.rend(); ++it) r = r * t + *it;
  return r;
}

// b^(n)(t) = Q_n(t) (1-t^2)^(-2n) b(t), with
// Q_{n+1} = Q_n' (1-t^2)^2 + 4 n t (1-t^2) Q_n - 2 t Q_n.
const Poly& derivative_poly(int n) {
  static std::mutex mu;
  static std::vector<Poly> table{Poly{1.0}};
  std::lock_guard lock(mu);
  while (static_cast<int>(table.size()) <= n) {
    const int k = static_cast<int>(table.size()) - 1;
    const Poly& q = table.back();
    const Poly one_minus_t2{1.0, 0.0, -1.0};
    Poly next = poly_mul(poly_derivative(q), poly_mul(one_minus_t2, one_minus_t2));
    next = poly_add(next, poly_mul(Poly{0.0, 4.0 * k}, poly_mul(one_minus_t2, q)));
    next = poly_add(next, poly_mul(Poly{0.0, -2.0}, q));
    table.push_back(std::move(next));
  }
  return table[n];
}

}  // namespace

double bump(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double bump_derivative(int n, double t) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  if (!(std::abs(t) < 1.0)) return 0.0;
  const double s = 1.0 - t * t;
  if (n == 0) return std::exp(-1.0 / s);
  return poly_eval(derivative_poly(n), t) * std::exp(-1.0 / s - 2.0 * n * std::log(s));
}

double bump_cdf(double u) {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (u > 0.0) return 1.0 - bump_cdf(-u);
  return quad::ts(bump, -1.0, u, 1e-14).value / kBumpMass;
}

double bump_cosine_transform(double k) {
  auto integrand = [k](double t) { return bump(t) * std::cos(k * t); };
  // Fixed 30-point Gauss-Legendre panels, each spanning well under one period.
  const int panels = 8 + static_cast<int>(std::abs(k) / 4.0);
  double total = 0.0;
  for (int i = 0; i < panels; ++i)
    total += boost::math::quadrature::gauss<double, 30>::integrate(integrand, double(i) / panels,
                                                                   double(i + 1) / panels);
  return 2.0 * total;
}

double Profile::integral() const { return quad::gk_pieces(value, cuts(), 1e-13).value; }

Profile Profile::shifted(double tau) const {
  Profile p;
  p.value = [v = value, tau](double t) { return v(t - tau); };
  p.slope = [s = slope, tau](double t) { return s(t - tau); };
  p.lo = lo + tau;
  p.hi = hi + tau;
  for (double b : breakpoints) p.breakpoints.push_back(b + tau);
  return p;
}

Profile Profile::scaled(double c) const {
  Profile p = *this;
  p.value = [v = value, c](double t) { return c * v(t); };
  p.slope = [s = slope, c](double t) { return c * s(t); };
  return p;
}

std::vector<double> Profile::cuts() const { return quad::cuts_within(lo, hi, breakpoints); }

RealTestFunction::RealTestFunction(std::vector<BumpTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (!(t.width > 0.0) || !std::isfinite(t.center) || !std::isfinite(t.amplitude))
      throw Error(ErrorKind::InvalidArgument, "bump width must be positive and finite");
}

RealTestFunction RealTestFunction::bump(double center, double width, double amplitude) {
  return RealTestFunction({BumpTerm{amplitude, center, width}});
}

double RealTestFunction::derivative(double t, int order) const {
  double sum = 0.0;
  for (const auto& term : terms_)
    sum += term.amplitude * std::pow(term.width, -order) *
           bump_derivative(order, (t - term.center) / term.width);
  return sum;
}

double RealTestFunction::support_lo() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) lo = std::min(lo, t.center - t.width);
  return terms_.empty() ? 0.0 : lo;
}

double RealTestFunction::support_hi() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) hi = std::max(hi, t.center + t.width);
  return terms_.empty() ? 0.0 : hi;
}

RealTestFunction RealTestFunction::shifted(double tau) const {
  auto terms = terms_;
  for (auto& t : terms) t.center += tau;
  return RealTestFunction(std::move(terms));
}

Profile RealTestFunction::profile() const {
  Profile p;
  p.value = [f = *this](double t) { return f.derivative(t, 0); };
  p.slope = [f = *this](double t) { return f.derivative(t, 1); };
  p.lo = support_lo();
  p.hi = support_hi();
  for (const auto& t : terms_) {
    p.breakpoints.push_back(t.center - t.width);
    p.breakpoints.push_back(t.center);
    p.breakpoints.push_back(t.center + t.width);
  }
  return p;
}

RealTestFunction operator+(const RealTestFunction& a, const RealTestFunction& b) {
  auto terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return RealTestFunction(std::move(terms));
}

RealTestFunction operator*(double c, const RealTestFunction& f) {
  auto terms = f.terms_;
  for (auto& t : terms) t.amplitude *= c;
  return RealTestFunction(std::move(terms));
}

double eval(const RealTestFunction& f, double t) { return f(t); }

std::function<double(double)> derivative(const RealTestFunction& f, int order) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  return [f, order](double t) { return f.derivative(t, order); };
}

SmearingKernel::SmearingKernel(double eta) : eta_(eta) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw Error(ErrorKind::InvalidArgument, "smearing scale must be positive");
}

double SmearingKernel::operator()(double t) const { return bump(t / eta_) / (eta_ * kBumpMass); }

double SmearingKernel::autocorrelation(double z) const {
  const double s = std::abs(z) / eta_;
  if (s >= 2.0) return 0.0;
  return unit_autocorrelation_table(s) / eta_;
}

double unit_autocorrelation(double s) {
  s = std::abs(s);
  if (s >= 2.0) return 0.0;
  auto integrand = [s](double t) { return bump(t) * bump(t + s); };
  return quad::ts(integrand, -1.0, 1.0 - s, 1e-14).value / (kBumpMass * kBumpMass);
}

double unit_autocorrelation_table(double s) {
  static const auto spline = [] {
    constexpr std::size_t n = 4001;
    const double step = 2.0 / (n - 1);
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = unit_autocorrelation(i * step);
    // A''(0) = -int b'^2 / mass^2; every derivative vanishes at s = 2.
    auto slope_sq = [](double t) { return std::pow(bump_derivative(1, t), 2); };
    const double curvature =
        -2.0 * quad::ts(slope_sq, 0.0, 1.0, 1e-14).value / (kBumpMass * kBumpMass);
    return boost::math::interpolators::cardinal_quintic_b_spline<double>(
        data.data(), n, 0.0, step, {0.0, curvature}, {0.0, 0.0});
  }();
  return spline(std::abs(s));
}

double StepProfile::height() const { return sign * std::sqrt(alpha) * 2.0 * kPi; }

Profile mollify(const RealTestFunction& f, const SmearingKernel& h) {
  const double eta = h.eta();
  auto conv = [f, h, eta](double t, int order) {
    auto integrand = [&](double s) { return f.derivative(t - s, order) * h(s); };
    return quad::gk(integrand, -eta, 0.0, 1e-13).value + quad::gk(integrand, 0.0, eta, 1e-13).value;
  };
  Profile p;
  p.value = [conv](double t) { return conv(t, 0); };
  p.slope = [conv](double t) { return conv(t, 1); };
  p.lo = f.support_lo() - eta;
  p.hi = f.support_hi() + eta;
  for (const auto& t : f.terms()) {
    p.breakpoints.push_back(t.center - t.width - eta);
    p.breakpoints.push_back(t.center);
    p.breakpoints.push_back(t.center + t.width + eta);
  }
  return p;
}

Profile mollify(const StepProfile& s, const SmearingKernel& h) {
  if (!std::isfinite(s.delta))
    throw Error(ErrorKind::NotIntegrable, "untruncated step not integrable");
  if (!(s.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "truncation length must be positive");
  if (!(s.alpha > 0.0) || (s.sign != 1 && s.sign != -1))
    throw Error(ErrorKind::InvalidArgument, "step needs alpha > 0 and sign +-1");
  const double eta = h.eta();
  const double height = s.height();
  Profile p;
  p.value = [s, eta, height](double y) {
    return height * (bump_cdf((s.x - y) / eta) - bump_cdf((s.x - s.delta - y) / eta));
  };
  p.slope = [s, h, height](double y) { return height * (-h(s.x - y) + h(s.x - s.delta - y)); };
  p.lo = s.x - s.delta - eta;
  p.hi = s.x + eta;
  p.breakpoints = {s.x - s.delta - eta, s.x - s.delta + eta, s.x - eta, s.x + eta};
  return p;
}

std::complex<double> fourier(const RealTestFunction& f, double p) {
  std::complex<double> sum = 0.0;
  for (const auto& t : f.terms())
    sum += t.amplitude * t.width * std::polar(1.0, p * t.center) *
           bump_cosine_transform(p * t.width);
  return sum;
}

}  // namespace kms::testfn
