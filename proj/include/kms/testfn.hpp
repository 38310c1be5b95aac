#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace kms::testfn {

inline constexpr double kPi = 3.14159265358979323846;

// b(t) = exp(-1/(1-t^2)) on (-1,1), zero elsewhere.
double bump(double t);
// n-th derivative of b.
double bump_derivative(int n, double t);
// Integral of b over the line.
inline constexpr double kBumpMass = 0.443993816168079437823;
// Cumulative distribution of the normalized bump b/kBumpMass.
double bump_cdf(double u);
// Autocorrelation of the normalized bump, int h(t) h(t+s) dt, by direct quadrature.
double unit_autocorrelation(double s);
// The same function read from a precomputed quintic spline.
double unit_autocorrelation_table(double s);
// Cosine transform of b: int b(t) cos(k t) dt.
double bump_cosine_transform(double k);

// A real-valued compactly supported function together with its slope.
// Breakpoints mark places where the function or its slope is not smooth.
struct Profile {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> breakpoints;

  double operator()(double t) const { return value(t); }
  double integral() const;
  Profile shifted(double tau) const;
  Profile scaled(double c) const;
  std::vector<double> cuts() const;
};

struct BumpTerm {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
};

// Finite sum of scaled, translated bumps.
class RealTestFunction {
 public:
  RealTestFunction() = default;
  explicit RealTestFunction(std::vector<BumpTerm> terms);

  static RealTestFunction bump(double center, double width, double amplitude = 1.0);

  const std::vector<BumpTerm>& terms() const { return terms_; }
  double operator()(double t) const { return derivative(t, 0); }
  double derivative(double t, int order) const;
  double support_lo() const;
  double support_hi() const;
  RealTestFunction shifted(double tau) const;
  Profile profile() const;

  friend RealTestFunction operator+(const RealTestFunction& a, const RealTestFunction& b);
  friend RealTestFunction operator*(double c, const RealTestFunction& f);
  friend RealTestFunction operator-(const RealTestFunction& f) { return -1.0 * f; }

 private:
  std::vector<BumpTerm> terms_;
};

double eval(const RealTestFunction& f, double t);
std::function<double(double)> derivative(const RealTestFunction& f, int order);

// h_eta(t) = b(t/eta)/(eta * kBumpMass); unit mass, support [-eta, eta].
class SmearingKernel {
 public:
  explicit SmearingKernel(double eta);
  double eta() const { return eta_; }
  double operator()(double t) const;
  // Autocorrelation int h(t) h(t+z) dt, supported on [-2 eta, 2 eta].
  double autocorrelation(double z) const;

 private:
  double eta_;
};

// The field profile s*sqrt(alpha)*2*pi*Theta(x - y) truncated to [x - delta, x].
struct StepProfile {
  double x = 0.0;
  double alpha = 1.0;
  int sign = 1;
  double delta = std::numeric_limits<double>::infinity();

  double height() const;
};

Profile mollify(const RealTestFunction& f, const SmearingKernel& h);
Profile mollify(const StepProfile& s, const SmearingKernel& h);

// int f(t) e^{i p t} dt.
std::complex<double> fourier(const RealTestFunction& f, double p);

}  // namespace kms::testfn
