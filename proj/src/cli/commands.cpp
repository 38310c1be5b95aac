#include "kms/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include "kms/anyon.hpp"
#include "kms/distlab.hpp"
#include "kms/error.hpp"
#include "kms/luttinger.hpp"

namespace kms::cli {

namespace {

using cplx = std::complex<double>;
using testfn::RealTestFunction;
constexpr double kPi = testfn::kPi;
const cplx kI(0.0, 1.0);

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a, double b) { return a + (b - a) * static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // 2n points in [lo, hi] with pairwise gaps of at least gap.
  std::vector<double> separated(int count, double lo, double hi, double gap) {
    for (;;) {
      std::vector<double> pts;
      for (int i = 0; i < count; ++i) pts.push_back(uniform(lo, hi));
      bool ok = true;
      for (int i = 0; i < count && ok; ++i)
        for (int j = i + 1; j < count; ++j) ok = ok && std::abs(pts[i] - pts[j]) >= gap;
      if (ok) return pts;
    }
  }

 private:
  std::mt19937_64 gen_;
};

anyon::CorrelatorSpec canonical(double alpha, double beta, const std::vector<double>& pts) {
  const std::size_t n = pts.size() / 2;
  anyon::CorrelatorSpec s;
  s.alpha = alpha;
  s.state = {beta, 0.0};
  for (std::size_t i = 0; i < n; ++i) s.insertions.push_back({pts[i], 1});
  for (std::size_t i = 0; i < n; ++i) s.insertions.push_back({pts[2 * n - 1 - i], -1});
  return s;
}

// Known eps -> 0 limits of the integer-alpha jump at inverse temperature beta.
std::optional<cplx> ladder_reference(double alpha, const RealTestFunction& f, double beta) {
  const double r = beta / kPi;
  if (alpha == 1.0) return 2.0 * kPi * kI * r * f(0.0);
  if (alpha == 2.0) return 2.0 * kPi * kI * r * r * f.derivative(0.0, 1);
  if (alpha == 3.0) return kPi * kI * (r * r * r * f.derivative(0.0, 2) - r * f(0.0));
  return std::nullopt;
}

bool is_integer(double a) { return a == std::floor(a); }

// Whether the gaussian potential makes the dispersion fail somewhere, from the closed-form bounds.
bool predicted_inadmissible(const luttinger::Dispersion& d) {
  const double lv = d.lambda * d.potential.strength;
  switch (d.kind) {
    case luttinger::InteractionCase::One: return std::abs(lv) >= 1.0;
    case luttinger::InteractionCase::Two: return lv < 0.0;
    case luttinger::InteractionCase::Three: return lv <= -1.0;
  }
  return true;
}

class SuiteBuilder {
 public:
  SuiteBuilder(const RunConfig& c, const Options& o) : config_(c), options_(o) {
    if (c.tolerances) {
      abs_ = c.tolerances->abs;
      rel_ = c.tolerances->rel;
    }
    if (o.tol_abs) abs_ = o.tol_abs;
    if (o.tol_rel) rel_ = o.tol_rel;
    report_.seed = o.seed;
  }

  // Runs body, which returns (value, reference), against the item's own tolerances unless overridden.
  void check(const std::string& id, double tol_abs, double tol_rel, const std::function<std::pair<cplx, cplx>()>& body,
             const std::string& note = "") {
    const auto start = std::chrono::steady_clock::now();
    SuiteItem item;
    try {
      const auto [value, reference] = body();
      item = compare(id, value, reference, abs_.value_or(tol_abs), rel_.value_or(tol_rel));
      item.note = note;
    } catch (const std::exception& e) {
      item.test_id = id;
      item.status = Status::Fail;
      item.value = item.reference = NAN;
      item.abs_err = item.rel_err = NAN;
      item.tol_abs = abs_.value_or(tol_abs);
      item.tol_rel = rel_.value_or(tol_rel);
      item.note = e.what();
    }
    finish(item, start);
  }

  void skip(const std::string& id, const std::string& why) {
    SuiteItem item;
    item.test_id = id;
    item.status = Status::Skip;
    item.note = why;
    report_.items.push_back(item);
  }

  SuiteReport take() {
    report_.sort();
    return report_;
  }

 private:
  void finish(SuiteItem& item, std::chrono::steady_clock::time_point start) {
    if (options_.timing)
      item.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                            .count();
    report_.items.push_back(item);
  }

  const RunConfig& config_;
  const Options& options_;
  std::optional<double> abs_, rel_;
  SuiteReport report_;
};

void anyon_items(SuiteBuilder& s, const RunConfig& config, Generator& gen) {
  const std::vector<double> betas =
      config.beta ? std::vector<double>{*config.beta} : std::vector<double>{1.0, kPi, 5.0};

  for (int n = 2; n <= 6; ++n)
    s.check("anyon.cauchy.n" + std::to_string(n), 0.0, 1e-10, [&] {
      std::pair<cplx, cplx> worst{0.0, 1.0};
      double worst_err = -1.0;
      for (int trial = 0; trial < 20; ++trial) {
        const auto pts = gen.separated(2 * n, -3.0, 3.0, 0.1);
        const std::vector<double> xs(pts.begin(), pts.begin() + n), ys(pts.begin() + n, pts.end());
        const double beta = betas[trial % betas.size()];
        const cplx det = anyon::cauchy_determinant(xs, ys, beta), prod = anyon::cauchy_product(xs, ys, beta);
        const double err = std::abs(det - prod) / std::abs(prod);
        if (err > worst_err) worst_err = err, worst = {det, prod};
      }
      return worst;
    });

  // Worst relative mismatch over x in [0.2, 3] and the configured temperatures.
  auto over_grid = [&](double alpha, auto&& pair_at) {
    std::pair<cplx, cplx> worst{0.0, 1.0};
    double worst_err = -1.0;
    for (double beta : betas)
      for (int i = 0; i <= 14; ++i) {
        const double x = 0.2 + 2.8 * i / 14.0;
        const auto [v, r] = pair_at(alpha, anyon::ThermalState{beta, 0.0}, x);
        const double err = std::abs(v - r) / std::abs(r);
        if (err > worst_err) worst_err = err, worst = {v, r};
      }
    return worst;
  };
  for (double alpha : config.alphas_or({0.25, 0.5, 1.0, 2.0, 3.0})) {
    const std::string a = ".a" + num(alpha);
    s.check("anyon.two_point.hermiticity" + a, 0.0, 1e-12, [&] {
      return over_grid(alpha, [](double al, const anyon::ThermalState& st, double x) {
        return std::pair{std::conj(anyon::two_point(al, st, x)), anyon::two_point(al, st, -x)};
      });
    });
    s.check("anyon.two_point.commutativity" + a, 0.0, 1e-12, [&] {
      return over_grid(alpha, [](double al, const anyon::ThermalState& st, double x) {
        return std::pair{anyon::two_point(al, st, -x), std::polar(1.0, kPi * al) * anyon::two_point(al, st, x)};
      });
    });
    s.check("anyon.two_point.kms" + a, 0.0, 1e-12, [&] {
      return over_grid(alpha, [](double al, const anyon::ThermalState& st, double x) {
        return std::pair{anyon::two_point(al, st, cplx(-x, st.beta)), anyon::two_point(al, st, x)};
      });
    });
    s.check("anyon.exchange" + a, 0.0, 1e-12, [&] {
      const auto pts = gen.separated(4, -3.0, 3.0, 0.1);
      const auto r = anyon::exchange_phase_check(canonical(alpha, kPi, pts), 1);
      return std::pair{r.original, r.phase * r.swapped};
    });
  }

  for (int n = 2; n <= 3; ++n)
    s.check("anyon.wick.n" + std::to_string(n), 0.0, 1e-10, [&] {
      const auto spec = canonical(1.0, kPi, gen.separated(2 * n, -3.0, 3.0, 0.1));
      return std::pair{anyon::n_point_product(spec), anyon::n_point_determinant(spec)};
    });
  s.check("anyon.non_quasifree.a2", 0.0, 1e-6, [] {
    const auto spec = canonical(2.0, kPi, {0.0, 1.0, 2.0, 3.0});
    const cplx full = anyon::n_point_product(spec);
    auto st = [](double x) { return anyon::two_point(2.0, anyon::ThermalState{kPi, 0.0}, x); };
    const cplx direct = st(-2.0) * st(-2.0), crossed = st(-3.0) * st(-1.0);
    double margin = INFINITY;
    for (double a : {-1.0, 0.0, 1.0})
      for (double b : {-1.0, 0.0, 1.0})
        if (a != 0.0 || b != 0.0) margin = std::min(margin, std::abs(a * direct + b * crossed - full) / std::abs(full));
    return std::pair<cplx, cplx>{margin, 17.0487827643};
  }, "smallest distance to a Wick combination; frozen regression margin");

  const testfn::SmearingKernel h(0.02);
  for (double alpha : {0.5, 1.0, 2.0})
    s.check("anyon.finite_to_limit.a" + num(alpha), 0.0, 1e-4, [&] {
      anyon::CorrelatorSpec spec;
      spec.alpha = alpha;
      spec.insertions = {{1.0, 1}, {0.0, -1}};
      return std::pair{anyon::renormalized_weyl_correlator(spec, 10.0, h), anyon::two_point(alpha, spec.state, 1.0)};
    });
}

void distlab_items(SuiteBuilder& s, const RunConfig& config) {
  const double beta = config.beta_or_default();
  const anyon::ThermalState st{beta, 0.0};
  const auto f = config.function_or(RealTestFunction::bump(0.2, 1.0));
  const auto sched = config.schedule();
  for (double alpha : config.alphas_or({0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})) {
    const auto ref = ladder_reference(alpha, f, beta);
    if (!ref && is_integer(alpha)) continue;
    s.check("distlab.jump.a" + num(alpha), 1e-6, ref ? 1e-5 : 0.0, [&] {
      return std::pair{distlab::extrapolate_limit(alpha, f, sched, st).limit, ref.value_or(0.0)};
    });
  }
  const auto g = f(0.0) != 0.0 ? f : RealTestFunction::bump(0.0, 1.0);
  for (double alpha : {0.25, 0.5, 0.9})
    s.check("distlab.rate.a" + num(alpha), 0.05, 0.0, [&] {
      return std::pair<cplx, cplx>{distlab::rate_fit(alpha, g, sched, st), 1.0 - alpha};
    });
  s.check("distlab.alpha3_temperature", 0.0, 0.05, [&] {
    const auto a = distlab::alpha3_structure({kPi, 0.0}, sched);
    const auto b = distlab::alpha3_structure({2.0 * kPi, 0.0}, sched);
    const double ratio = std::abs(b.point / b.second) / std::abs(a.point / a.second);
    return std::pair<cplx, cplx>{ratio, 0.25};
  }, "(point/second) at beta = 2 pi over beta = pi");

  const auto current = RealTestFunction::bump(0.3, 1.2, 0.8);
  const cplx base = distlab::current_reconstruction_check(current, 0.1, 0.05, 1.0, st).reconstructed;
  for (double alpha : {0.5, 2.0})
    s.check("distlab.current.a" + num(alpha), 0.0, 1e-4, [&] {
      return std::pair{distlab::current_reconstruction_check(current, 0.1, 0.05, alpha, st).reconstructed, base};
    }, "against alpha = 1 at eps_split = 0.05");
}

void luttinger_items(SuiteBuilder& s, const RunConfig& config) {
  const double beta = config.beta_or_default();
  const auto d = config.dispersion();

  s.check("luttinger.free_pairing", 0.0, 1e-6, [&] {
    const auto f = RealTestFunction::bump(0.0, 1.0), g = RealTestFunction::bump(0.5, 0.8);
    luttinger::Dispersion free = d;
    free.lambda = 0.0;
    return std::pair{luttinger::pairing_momentum(f, g, beta, free),
                     weyl::pairing(f, g, weyl::ThermalState{beta, 0.0}).value};
  });

  const bool expected = predicted_inadmissible(d);
  std::optional<double> violated_at;
  try {
    luttinger::check_admissible(d);
  } catch (const luttinger::PositivityViolation& e) {
    violated_at = e.momentum();
  }
  std::string note = violated_at ? "positivity violated at p = " + num(*violated_at) : "admissible";
  if (expected) note += " (expected)";
  s.check("luttinger.admissibility", 0.0, 0.0, [&] {
    return std::pair<cplx, cplx>{violated_at ? 1.0 : 0.0, expected ? 1.0 : 0.0};
  }, note);

  const char* dependent[] = {"luttinger.asymptotics", "luttinger.car", "luttinger.detailed_balance",
                             "luttinger.leading_singularity"};
  if (violated_at) {
    for (const char* id : dependent) s.skip(id, "dispersion not admissible");
    return;
  }
  s.check(dependent[0], 1e-10, 0.0, [&] {
    return std::pair<cplx, cplx>{luttinger::dispersion_eval(d, 12.0) / 12.0, 1.0};
  });
  s.check(dependent[1], 1e-4, 0.0, [&] {
    const auto r = luttinger::car_check_interacting(beta, d, RealTestFunction::bump(0.1, 0.9));
    return std::pair{r.jump, r.reference};
  });
  s.check(dependent[2], 0.0, 1e-12, [&] {
    std::pair<cplx, cplx> worst{0.0, 1.0};
    double worst_err = -1.0;
    for (double p : {0.05, 0.4, 1.0, 3.0, 8.0}) {
      const double lhs = luttinger::thermal_density(-p, beta, d);
      const double rhs = luttinger::thermal_density(p, beta, d) * std::exp(-beta * luttinger::mode_frequency(d, p));
      const double err = std::abs(lhs - rhs) / std::abs(rhs);
      if (err > worst_err) worst_err = err, worst = {lhs, rhs};
    }
    return worst;
  });
  s.check(dependent[3], 0.0, 1e-4, [&] {
    const luttinger::InteractingKernel k(d, beta);
    return std::pair{k.kernel(0.02), weyl::kernel_w(cplx(0.02), weyl::ThermalState{beta, 0.0})};
  }, "w_v/w_free at x = 0.02");
}

std::string resolve_format(const RunConfig& c, const Options& o) {
  const std::string f = o.format ? *o.format : (c.output && c.output->format ? *c.output->format : "csv");
  if (f != "csv" && f != "json") throw Error(ErrorKind::InvalidConfig, "format must be csv or json");
  return f;
}

template <class Write>
void emit(const RunConfig& c, const Options& o, Write&& write) {
  const std::optional<std::string> path = o.output ? o.output : (c.output ? c.output->path : std::nullopt);
  if (!path) {
    write(std::cout);
    return;
  }
  std::ofstream out(*path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write output file '" + *path + "'");
  write(out);
}

void emit_tables(const RunConfig& c, const Options& o, const std::vector<Table>& tables) {
  const std::string format = resolve_format(c, o);
  emit(c, o, [&](std::ostream& out) {
    if (format == "json")
      out << tables_to_json(tables).dump(2) << '\n';
    else
      write_tables_csv(out, tables);
  });
}

anyon::CorrelatorSpec spec_from(const std::vector<InsertionConfig>& ins, double alpha, double beta) {
  anyon::CorrelatorSpec s;
  s.alpha = alpha;
  s.state = {beta, 0.0};
  for (const auto& i : ins) s.insertions.push_back({i.x, i.sign});
  return s;
}

}  // namespace

SuiteReport build_suite(const RunConfig& config, const Options& options) {
  SuiteBuilder s(config, options);
  Generator gen(options.seed);
  anyon_items(s, config, gen);
  distlab_items(s, config);
  luttinger_items(s, config);
  return s.take();
}

std::vector<Table> npoint_tables(const RunConfig& config) {
  const double beta = config.beta_or_default();
  std::vector<anyon::CorrelatorSpec> specs;
  for (double alpha : config.alphas_or({1.0})) {
    if (config.insertions) {
      specs.push_back(spec_from(*config.insertions, alpha, beta));
    } else {
      const Grid grid = config.grid.value_or(Grid{0.5, 3.0, 11});
      for (double x : grid.points()) specs.push_back(spec_from({{x, 1}, {0.0, -1}}, alpha, beta));
    }
  }
  Table t{"npoint", {"config_id", "product_re", "product_im", "det_re", "det_im", "rel_diff"}, {}};
  for (std::size_t id = 0; id < specs.size(); ++id) {
    const auto& spec = specs[id];
    spec.validate();
    if (!spec.neutral())
      throw Error(ErrorKind::NonNeutral,
                  "insertion signs must sum to zero: the Weyl expectation of a charged product vanishes "
                  "(selection rule)");
    if (!spec.canonical())
      throw Error(ErrorKind::InvalidConfig, "insertions must list all creations (+1) before annihilations (-1)");
    const cplx p = anyon::n_point_product(spec), d = anyon::n_point_determinant(spec);
    t.rows.push_back({static_cast<double>(id), p.real(), p.imag(), d.real(), d.imag(), std::abs(p - d) / std::abs(p)});
  }
  return {t};
}

std::vector<Table> jump_tables(const RunConfig& config, const Options& options, int& failures) {
  const double beta = config.beta_or_default();
  const anyon::ThermalState st{beta, 0.0};
  const auto f = config.function_or(RealTestFunction::bump(0.2, 1.0));
  const auto sched = config.schedule();
  double tol_abs = 1e-6, tol_rel = 1e-5;
  if (config.tolerances) {
    tol_abs = config.tolerances->abs.value_or(tol_abs);
    tol_rel = config.tolerances->rel.value_or(tol_rel);
  }
  tol_abs = options.tol_abs.value_or(tol_abs);
  tol_rel = options.tol_rel.value_or(tol_rel);
  failures = 0;
  Table t{"jump", {"alpha", "limit_re", "limit_im", "error_estimate", "fitted_rate"}, {}};
  for (double alpha : config.alphas_or({0.5, 1.0, 2.0, 3.0})) {
    const auto r = distlab::extrapolate_limit(alpha, f, sched, st);
    t.rows.push_back({alpha, r.limit.real(), r.limit.imag(), r.error_estimate, r.fitted_rate});
    const auto ref = ladder_reference(alpha, f, beta);
    if (ref) {
      const double err = std::abs(r.limit - *ref);
      if (!(err <= tol_abs || err <= tol_rel * std::abs(*ref))) ++failures;
    } else if (!is_integer(alpha) && !(std::abs(r.limit) <= tol_abs)) {
      ++failures;
    }
  }
  return {t};
}

std::vector<Table> kernel_tables(const RunConfig& config) {
  const weyl::ThermalState st{config.beta_or_default(), 0.0};
  const Grid grid = config.grid.value_or(Grid{0.5, 5.0, 10});
  Table t{"kernel", {"x", "w_re", "w_im"}, {}};
  for (double x : grid.points()) {
    if (x == 0.0) throw Error(ErrorKind::InvalidConfig, "grid hits the kernel's pole at x = 0");
    const cplx w = weyl::kernel_w(cplx(x), st);
    t.rows.push_back({x, w.real(), w.imag()});
  }
  return {t};
}

std::vector<Table> luttinger_tables(const RunConfig& config) {
  const double beta = config.beta_or_default();
  const auto d = config.dispersion();
  const luttinger::InteractingKernel k(d, beta);
  const Grid grid = config.grid.value_or(Grid{0.5, 5.0, 10});
  Table disp{"dispersion", {"p", "eps_p"}, {}};
  Table kern{"kernel", {"x", "w_free_re", "w_free_im", "w_int_re", "w_int_im", "ratio"}, {}};
  for (double v : grid.points()) {
    disp.rows.push_back({v, luttinger::dispersion_eval(d, v)});
    if (v == 0.0) throw Error(ErrorKind::InvalidConfig, "grid hits the kernel's pole at x = 0");
    const cplx free = weyl::kernel_w(cplx(v), weyl::ThermalState{beta, 0.0});
    const cplx inter = k.kernel(v);
    kern.rows.push_back({v, free.real(), free.imag(), inter.real(), inter.imag(), (inter / free).real()});
  }
  return {disp, kern};
}

int cmd_suite(const RunConfig& config, const Options& options) {
  const std::string format = resolve_format(config, options);
  const SuiteReport report = build_suite(config, options);
  emit(config, options, [&](std::ostream& out) {
    if (format == "json")
      out << report.to_json().dump(2) << '\n';
    else
      report.write_csv(out);
  });
  return report.all_pass() ? kExitPass : kExitFail;
}

int cmd_npoint(const RunConfig& config, const Options& options) {
  emit_tables(config, options, npoint_tables(config));
  return kExitPass;
}

int cmd_jump(const RunConfig& config, const Options& options) {
  int failures = 0;
  const auto tables = jump_tables(config, options, failures);
  emit_tables(config, options, tables);
  if (failures > 0) std::cerr << failures << " jump limit(s) outside tolerance\n";
  return failures > 0 ? kExitFail : kExitPass;
}

int cmd_kernel(const RunConfig& config, const Options& options) {
  emit_tables(config, options, kernel_tables(config));
  return kExitPass;
}

int cmd_luttinger(const RunConfig& config, const Options& options) {
  emit_tables(config, options, luttinger_tables(config));
  return kExitPass;
}

int run_guarded(int (*command)(const RunConfig&, const Options&), const RunConfig& config, const Options& options,
                std::ostream& err) {
  try {
    return command(config, options);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InvalidConfig:
      case ErrorKind::InvalidArgument:
      case ErrorKind::NonNeutral:
      case ErrorKind::CoincidentPoints:
      case ErrorKind::PositivityViolated:
      case ErrorKind::TruncationTooSmall:
        return kExitInvalid;
      default:
        return kExitFail;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace kms::cli
