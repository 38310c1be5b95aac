// Acceptance battery: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"

#include "kms/anyon.hpp"
#include "kms/distlab.hpp"
#include "kms/error.hpp"
#include "kms/luttinger.hpp"
#include "kms/weyl_core.hpp"

using namespace kms;
using cplx = std::complex<double>;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = oracle::kPi;
const cplx kI(0.0, 1.0);

// Collects sub-check outcomes; the criterion passes when all of them do.
struct Criterion {
  std::vector<std::string> failures;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool close(cplx value, cplx expected, double rel, double abs) {
  const double d = std::abs(value - expected);
  return d <= abs || d <= rel * std::abs(expected);
}

anyon::CorrelatorSpec canonical(double alpha, double beta, const std::vector<double>& xs,
                                const std::vector<double>& ys) {
  anyon::CorrelatorSpec s;
  s.alpha = alpha;
  s.state = {beta, 0.0};
  for (double x : xs) s.insertions.push_back({x, 1});
  for (auto it = ys.rbegin(); it != ys.rend(); ++it) s.insertions.push_back({*it, -1});
  return s;
}

void cauchy(Criterion& c) {
  oracle::Rng rng(1001);
  const double betas[] = {1.0, kPi, 5.0};
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      const auto pts = oracle::separated_points(rng, 2 * n, -3.0, 3.0, 0.1);
      const std::vector<double> xs(pts.begin(), pts.begin() + n), ys(pts.begin() + n, pts.end());
      const double beta = betas[trial % 3];
      worst = std::max(worst, oracle::rel_err(anyon::cauchy_determinant(xs, ys, beta),
                                              anyon::cauchy_product(xs, ys, beta)));
    }
  c.require(worst <= 1e-10, "determinant/product mismatch");
  c.detail << "worst rel err " << sci(worst) << " over 100 configs";
}

void two_point_triple(Criterion& c) {
  double herm = 0.0, comm = 0.0, kms = 0.0;
  for (double alpha : {0.25, 0.5, 1.0, 2.0, 3.0})
    for (double beta : {1.0, kPi, 5.0})
      for (int i = 0; i <= 28; ++i) {
        const double x = 0.2 + 2.8 * i / 28.0;
        const anyon::ThermalState st{beta, 0.0};
        const cplx s = anyon::two_point(alpha, st, x), m = anyon::two_point(alpha, st, -x);
        herm = std::max(herm, oracle::rel_err(std::conj(s), m));
        comm = std::max(comm, oracle::rel_err(m, std::polar(1.0, kPi * alpha) * s));
        kms = std::max(kms, oracle::rel_err(anyon::two_point(alpha, st, cplx(-x, beta)), s));
      }
  c.require(herm <= 1e-12, "hermiticity");
  c.require(comm <= 1e-12, "alpha-commutativity");
  c.require(kms <= 1e-12, "KMS shift");
  c.detail << "rel err hermiticity " << sci(herm) << ", phase " << sci(comm) << ", KMS " << sci(kms);
}

void wick(Criterion& c) {
  oracle::Rng rng(1003);
  double worst = 0.0;
  for (int n = 2; n <= 3; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      const auto pts = oracle::separated_points(rng, 2 * n, -3.0, 3.0, 0.1);
      const auto spec = canonical(1.0, kPi, {pts.begin(), pts.begin() + n}, {pts.begin() + n, pts.end()});
      worst = std::max(worst, oracle::rel_err(anyon::n_point_product(spec), anyon::n_point_determinant(spec)));
    }
  c.require(worst <= 1e-10, "alpha = 1 product against determinant");

  // Smallest relative distance from the alpha = 2 four-point function to any Wick combination.
  const auto spec = canonical(2.0, kPi, {0.0, 1.0}, {2.0, 3.0});
  const cplx full = anyon::n_point_product(spec);
  auto s = [](double x) { return anyon::two_point(2.0, anyon::ThermalState{kPi, 0.0}, x); };
  const cplx direct = s(-2.0) * s(-2.0), crossed = s(-3.0) * s(-1.0);
  double margin = INFINITY;
  for (double a : {-1.0, 0.0, 1.0})
    for (double b : {-1.0, 0.0, 1.0})
      if (a != 0.0 || b != 0.0) margin = std::min(margin, oracle::rel_err(a * direct + b * crossed, full));
  c.require(margin > 1e-3, "alpha = 2 non-factorization margin");
  c.require(std::abs(margin - 17.0487827643) <= 1e-8 * 17.0487827643, "frozen margin regression");
  c.detail << "alpha=1 worst rel err " << sci(worst) << ", alpha=2 margin " << margin;
}

void ladder(Criterion& c) {
  const auto f = testfn::RealTestFunction::bump(0.2, 1.0);
  const auto sched = distlab::EpsSchedule::default_schedule();
  const anyon::ThermalState st{kPi, 0.0};
  const cplx refs[] = {2.0 * kPi * kI * f(0.0), 2.0 * kPi * kI * f.derivative(0.0, 1),
                       kPi * kI * (f.derivative(0.0, 2) - f(0.0))};
  for (int n = 1; n <= 3; ++n) {
    const cplx limit = distlab::extrapolate_limit(n, f, sched, st).limit;
    c.require(close(limit, refs[n - 1], 1e-5, 1e-6), "alpha = " + std::to_string(n));
    c.detail << "a" << n << " err " << sci(std::abs(limit - refs[n - 1])) << "; ";
  }
  double worst = 0.0;
  for (double alpha : {0.25, 0.5, 1.5, 2.5})
    worst = std::max(worst, std::abs(distlab::extrapolate_limit(alpha, f, sched, st).limit));
  c.require(worst < 1e-6, "non-integer limits");
  c.detail << "non-integer max |limit| " << sci(worst);
}

void rate(Criterion& c) {
  const auto f = testfn::RealTestFunction::bump(0.0, 1.0);
  for (double alpha : {0.25, 0.5, 0.9}) {
    const double r = distlab::rate_fit(alpha, f, distlab::EpsSchedule::default_schedule(), {kPi, 0.0});
    c.require(std::abs(r - (1.0 - alpha)) <= 0.05, "rate at alpha = " + sci(alpha));
    c.detail << "a" << alpha << " slope " << r << "; ";
  }
}

void finite_to_limit(Criterion& c) {
  const testfn::SmearingKernel h(0.02);
  anyon::CorrelatorSpec spec;
  spec.alpha = 1.0;
  spec.state = {kPi, 0.0};
  spec.insertions = {{1.0, 1}, {0.0, -1}};

  // Least-squares slope of log|error| against delta, with delta = 14 as the reference.
  const cplx ref = anyon::renormalized_weyl_correlator(spec, 14.0, h);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double deltas[] = {2.0, 3.0, 4.0, 5.0};
  for (double d : deltas) {
    const double y = std::log(std::abs(anyon::renormalized_weyl_correlator(spec, d, h) - ref));
    sx += d, sy += y, sxx += d * d, sxy += d * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  c.require(std::abs(slope + 2.0) <= 0.15 * 2.0, "delta slope");

  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    spec.alpha = alpha;
    worst = std::max(worst, oracle::rel_err(anyon::renormalized_weyl_correlator(spec, 10.0, h),
                                            anyon::two_point(alpha, spec.state, 1.0)));
  }
  c.require(worst <= 1e-4, "agreement at eta = 0.02");
  c.detail << "delta slope " << slope << " (target -2), worst rel err at delta=10 " << sci(worst);
}

void alpha3_temperature(Criterion& c) {
  const auto sched = distlab::EpsSchedule::default_schedule();
  const auto a = distlab::alpha3_structure({kPi, 0.0}, sched);
  const auto b = distlab::alpha3_structure({2.0 * kPi, 0.0}, sched);
  const double ratio = std::abs(b.point / b.second) / std::abs(a.point / a.second);
  c.require(std::abs(ratio - 0.25) <= 0.05 * 0.25, "pi^2/beta^2 scaling");
  c.detail << "coefficient ratio " << ratio << " (target 0.25)";
}

void luttinger_battery(Criterion& c) {
  using luttinger::Dispersion;
  using luttinger::InteractionCase;
  const double beta = kPi;
  const anyon::ThermalState st{beta, 0.0};
  const luttinger::Potential pot{1.0, 1.0};

  double reduction = 0.0;
  for (auto kind : {InteractionCase::One, InteractionCase::Two, InteractionCase::Three}) {
    const Dispersion free{kind, 0.0, pot};
    for (double x : {0.3, 1.0, 2.5, 5.0}) {
      reduction = std::max(reduction, oracle::rel_err(luttinger::kernel_interacting(x, beta, free),
                                                      weyl::kernel_w(cplx(x), {beta, 0.0})));
      reduction = std::max(reduction, oracle::rel_err(luttinger::two_point_interacting(0.5, st, x, free),
                                                      anyon::two_point(0.5, st, x)));
    }
  }
  c.require(reduction <= 1e-6, "lambda = 0 reductions");

  double asym = 0.0;
  for (auto kind : {InteractionCase::One, InteractionCase::Two, InteractionCase::Three})
    for (double width : {0.5, 1.0, 2.0}) {
      const Dispersion d{kind, 0.1, {1.0, width}};
      asym = std::max(asym, std::abs(luttinger::dispersion_eval(d, 12.0) / 12.0 - 1.0));
    }
  c.require(asym < 1e-10, "asymptotics at p = 12");

  const Dispersion d{InteractionCase::Three, 0.1, pot};
  double ratio_err = 0.0;
  for (double x : {-5.0, 5.0})
    ratio_err = std::max(ratio_err, std::abs(luttinger::kernel_interacting(x, beta, d) /
                                                 weyl::kernel_w(cplx(x), {beta, 0.0}) -
                                             1.0));
  c.require(ratio_err <= 1e-3, "kernel ratio at |x| = 5");

  double car = 0.0;
  const auto f = testfn::RealTestFunction::bump(0.1, 0.9);
  for (double lambda : {0.0, 0.05, 0.1}) {
    const auto r = luttinger::car_check_interacting(beta, {InteractionCase::Three, lambda, pot}, f);
    car = std::max(car, std::abs(r.jump - r.reference));
  }
  c.require(car <= 1e-4, "alpha = 1 jump interaction independence");

  bool raised = false;
  try {
    luttinger::check_admissible({InteractionCase::One, 2.0, pot});
  } catch (const luttinger::PositivityViolation&) {
    raised = true;
  }
  c.require(raised, "case-1 overcoupling");

  c.detail << "reductions " << sci(reduction) << ", asymptotics " << sci(asym) << ", |ratio - 1| at |x|=5 "
           << sci(ratio_err) << ", CAR " << sci(car) << ", overcoupling " << (raised ? "raised" : "not raised");
}

void current(Criterion& c) {
  const auto g = testfn::RealTestFunction::bump(0.3, 1.2, 0.8);
  std::vector<double> limits;
  for (double alpha : {0.5, 1.0, 2.0}) {
    double prev = INFINITY;
    cplx last;
    for (double split : {0.4, 0.2, 0.1, 0.05}) {
      const auto r = distlab::current_reconstruction_check(g, 0.1, split, alpha, {kPi, 0.0});
      const double err = std::abs(r.reconstructed - r.reference);
      c.require(err < prev, "monotone approach at alpha = " + sci(alpha));
      prev = err;
      last = r.reconstructed;
    }
    limits.push_back(std::abs(last));
  }
  const double spread = std::max(std::abs(limits[0] - limits[1]), std::abs(limits[2] - limits[1])) / limits[1];
  c.require(spread <= 1e-4, "alpha independence");
  c.detail << "relative spread across alpha " << sci(spread);
}

struct Run {
  int code;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run kmscorr(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + KMSCORR_BIN + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

bool schema_valid(const json& report) {
  if (!report.is_object() || !report.contains("seed") || !report.contains("summary") || !report.contains("results"))
    return false;
  const std::set<std::string> statuses = {"pass", "fail", "skip"};
  std::size_t counted = 0;
  for (const auto& r : report["results"]) {
    for (const char* key : {"test_id", "status", "value", "reference", "abs_err", "rel_err", "tol", "runtime_ms"})
      if (!r.contains(key)) return false;
    if (!r["test_id"].is_string() || !statuses.count(r["status"].get<std::string>())) return false;
    if (!r["value"].is_array() || r["value"].size() != 2 || !r["tol"].contains("abs") || !r["tol"].contains("rel"))
      return false;
    ++counted;
  }
  const auto& s = report["summary"];
  return counted > 0 && s["pass"].get<std::size_t>() + s["fail"].get<std::size_t>() + s["skip"].get<std::size_t>() ==
                            counted;
}

void cli_contract(Criterion& c) {
  const fs::path work = KMS_CLI_WORK;
  const fs::path data = KMS_CLI_DATA;
  fs::create_directories(work);

  const auto a = kmscorr("suite --format json", work / "suite_a.json");
  const auto b = kmscorr("suite --format json", work / "suite_b.json");
  c.require(a.code == 0, "default suite exit code");
  c.require(a.out == b.out && !a.out.empty(), "deterministic report");
  bool valid = false;
  try {
    valid = schema_valid(json::parse(a.out));
  } catch (const std::exception&) {
  }
  c.require(valid, "report schema");

  const auto csv = kmscorr("suite --format csv", work / "suite.csv");
  c.require(csv.out.rfind("test_id,status,value_re,value_im,reference_re,reference_im,abs_err,rel_err,tol_abs,"
                          "tol_rel,runtime_ms,note\n",
                          0) == 0,
            "CSV header");

  const int unknown = kmscorr("suite --config \"" + (data / "unknown_key.json").string() + "\"", work / "x").code;
  const int empty = kmscorr("jump --config \"" + (data / "empty_schedule.json").string() + "\"", work / "x").code;
  c.require(unknown == 2 && empty == 2, "invalid config exit code");

  const auto forced = kmscorr("suite --format json --tolerance-abs 0 --tolerance-rel 0", work / "forced.json");
  c.require(forced.code == 1, "injected failure exit code");
  bool forced_valid = false;
  try {
    forced_valid = schema_valid(json::parse(forced.out));
  } catch (const std::exception&) {
  }
  c.require(forced_valid, "report schema under failure");

  c.detail << "default exit " << a.code << ", invalid exits " << unknown << "/" << empty << ", forced exit "
           << forced.code;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"Cauchy determinant identity", cauchy},
      {"two-point property triple", two_point_triple},
      {"Wick factorization at alpha = 1", wick},
      {"distributional ladder", ladder},
      {"vanishing rate", rate},
      {"finite-to-limit convergence", finite_to_limit},
      {"alpha = 3 temperature dependence", alpha3_temperature},
      {"Luttinger battery", luttinger_battery},
      {"current reconstruction", current},
      {"CLI contract", cli_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("threw: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::string why;
    for (const auto& f : c.failures) why += (why.empty() ? "" : ", ") + f;
    std::printf("criterion %2zu %s  %s: %s%s%s\n", i + 1, ok ? "PASS" : "FAIL", criteria[i].first.c_str(),
                c.detail.str().c_str(), ok ? "" : " | failed: ", why.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
