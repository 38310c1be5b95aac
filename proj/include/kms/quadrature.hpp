#pragma once

// Thin wrappers over Boost.Math quadrature that also report an error estimate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace kms::quad {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
};

// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
auto gk(F&& f, double a, double b, double tol = 1e-12, unsigned depth = 15) {
  using T = decltype(f(a));
  Result<T> r;
  if (!(b > a)) return r;
  double err = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol, &err);
  r.error = err * std::max(1.0, std::abs(r.value));
  return r;
}

// Tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
template <class F>
auto ts(F&& f, double a, double b, double tol = 1e-12) {
  using T = decltype(f(a));
  Result<T> r;
  if (!(b > a)) return r;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double err = 0.0;
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, b, tol, &err, &l1);
  r.error = err * std::max(1.0, l1);
  return r;
}

// Sorted, deduplicated cut points restricted to [a, b], endpoints included.
inline std::vector<double> cuts_within(double a, double b, std::vector<double> pts) {
  pts.push_back(a);
  pts.push_back(b);
  std::erase_if(pts, [&](double p) { return !(p >= a && p <= b); });
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts)
    if (out.empty() || p - out.back() > 1e-14 * std::max(1.0, std::abs(p))) out.push_back(p);
  return out;
}

template <class F>
auto gk_pieces(F&& f, const std::vector<double>& cuts, double tol = 1e-12) {
  using T = decltype(f(0.0));
  Result<T> total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto r = gk(f, cuts[i], cuts[i + 1], tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

template <class F>
auto ts_pieces(F&& f, const std::vector<double>& cuts, double tol = 1e-12) {
  using T = decltype(f(0.0));
  Result<T> total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto r = ts(f, cuts[i], cuts[i + 1], tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

// Fixed 30-point Gauss-Legendre on each piece; for smooth integrands on short pieces
// where an absolute rather than relative accuracy is wanted.
template <class F>
auto gl_pieces(F&& f, const std::vector<double>& cuts) {
  using T = decltype(f(0.0));
  T total{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += boost::math::quadrature::gauss<double, 30>::integrate(f, cuts[i], cuts[i + 1]);
  return total;
}

}  // namespace kms::quad
