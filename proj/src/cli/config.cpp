#include "kms/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "kms/error.hpp"

namespace kms::cli {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); }

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) invalid("unknown key '" + key + "' in " + where);
}

double real(const json& j, const std::string& key) {
  if (!j.is_number()) invalid("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid("'" + key + "' must be finite");
  return v;
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) invalid("'" + key + "' must be an integer");
  return j.get<int>();
}

std::vector<double> reals(const json& j, const std::string& key) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(real(j, key));
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(real(v, key));
  } else {
    invalid("'" + key + "' must be a number or a list of numbers");
  }
  return out;
}

}  // namespace

std::vector<double> Grid::points() const {
  if (count == 1) return {min};
  std::vector<double> pts;
  for (int i = 0; i < count; ++i) pts.push_back(min + (max - min) * i / (count - 1));
  return pts;
}

double RunConfig::beta_or_default() const { return beta.value_or(testfn::kPi); }

std::vector<double> RunConfig::alphas_or(std::vector<double> fallback) const {
  return alpha ? *alpha : fallback;
}

distlab::EpsSchedule RunConfig::schedule() const {
  return eps_schedule ? distlab::EpsSchedule(*eps_schedule) : distlab::EpsSchedule::default_schedule();
}

luttinger::Dispersion RunConfig::dispersion() const {
  luttinger::Dispersion d;
  d.kind = static_cast<luttinger::InteractionCase>(interaction_case.value_or(3));
  d.lambda = lambda.value_or(0.1);
  if (potential) d.potential = {potential->strength, potential->width};
  return d;
}

testfn::RealTestFunction RunConfig::function_or(const testfn::RealTestFunction& fallback) const {
  if (!test_function) return fallback;
  std::vector<testfn::BumpTerm> terms;
  for (const auto& b : *test_function) terms.push_back({b.amplitude, b.center, b.width});
  return testfn::RealTestFunction(terms);
}

RunConfig parse_config(const json& j) {
  only_keys(j, "config", {"alpha", "beta", "eps_schedule", "insertions", "potential", "case", "lambda", "grid",
                          "tolerances", "output", "test_function"});
  RunConfig c;
  if (j.contains("alpha")) {
    c.alpha = reals(j["alpha"], "alpha");
    if (c.alpha->empty()) invalid("'alpha' must not be empty");
    for (double a : *c.alpha)
      if (!(a > 0.0)) invalid("'alpha' values must be positive");
  }
  if (j.contains("beta")) {
    c.beta = real(j["beta"], "beta");
    if (!(*c.beta > 0.0)) invalid("'beta' must be positive");
  }
  if (j.contains("eps_schedule")) {
    if (!j["eps_schedule"].is_array()) invalid("'eps_schedule' must be a list");
    c.eps_schedule = reals(j["eps_schedule"], "eps_schedule");
    try {
      distlab::EpsSchedule check(*c.eps_schedule);
    } catch (const Error& e) {
      invalid(std::string("'eps_schedule': ") + e.what());
    }
  }
  if (j.contains("insertions")) {
    if (!j["insertions"].is_array()) invalid("'insertions' must be a list");
    std::vector<InsertionConfig> ins;
    for (const auto& item : j["insertions"]) {
      only_keys(item, "insertion", {"x", "sign"});
      if (!item.contains("x") || !item.contains("sign")) invalid("an insertion needs 'x' and 'sign'");
      InsertionConfig i{real(item["x"], "x"), integer(item["sign"], "sign")};
      if (i.sign != 1 && i.sign != -1) invalid("insertion sign must be +1 or -1");
      ins.push_back(i);
    }
    if (ins.empty()) invalid("'insertions' must not be empty");
    c.insertions = ins;
  }
  if (j.contains("potential")) {
    const auto& p = j["potential"];
    only_keys(p, "potential", {"family", "strength", "width"});
    PotentialConfig pc;
    if (p.contains("family")) {
      if (!p["family"].is_string()) invalid("'family' must be a string");
      pc.family = p["family"].get<std::string>();
    }
    if (pc.family != "gaussian") invalid("unsupported potential family '" + pc.family + "'");
    if (p.contains("strength")) pc.strength = real(p["strength"], "strength");
    if (p.contains("width")) pc.width = real(p["width"], "width");
    if (!(pc.width > 0.0)) invalid("potential width must be positive");
    c.potential = pc;
  }
  if (j.contains("case")) {
    c.interaction_case = integer(j["case"], "case");
    if (*c.interaction_case < 1 || *c.interaction_case > 3) invalid("'case' must be 1, 2 or 3");
  }
  if (j.contains("lambda")) c.lambda = real(j["lambda"], "lambda");
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    only_keys(g, "grid", {"min", "max", "count"});
    if (!g.contains("min") || !g.contains("max") || !g.contains("count"))
      invalid("'grid' needs 'min', 'max' and 'count'");
    Grid grid{real(g["min"], "min"), real(g["max"], "max"), integer(g["count"], "count")};
    if (grid.count < 1) invalid("grid count must be at least 1");
    if (grid.max < grid.min) invalid("grid max must not be below min");
    c.grid = grid;
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    only_keys(t, "tolerances", {"abs", "rel"});
    Tolerances tol;
    if (t.contains("abs")) tol.abs = real(t["abs"], "abs");
    if (t.contains("rel")) tol.rel = real(t["rel"], "rel");
    if ((tol.abs && *tol.abs < 0.0) || (tol.rel && *tol.rel < 0.0)) invalid("tolerances must be non-negative");
    c.tolerances = tol;
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    only_keys(o, "output", {"format", "path"});
    OutputConfig out;
    if (o.contains("format")) {
      if (!o["format"].is_string()) invalid("'format' must be a string");
      out.format = o["format"].get<std::string>();
      if (*out.format != "csv" && *out.format != "json") invalid("'format' must be csv or json");
    }
    if (o.contains("path")) {
      if (!o["path"].is_string()) invalid("'path' must be a string");
      out.path = o["path"].get<std::string>();
    }
    c.output = out;
  }
  if (j.contains("test_function")) {
    if (!j["test_function"].is_array()) invalid("'test_function' must be a list of bumps");
    std::vector<BumpConfig> bumps;
    for (const auto& item : j["test_function"]) {
      only_keys(item, "test_function bump", {"amplitude", "center", "width"});
      BumpConfig b;
      if (item.contains("amplitude")) b.amplitude = real(item["amplitude"], "amplitude");
      if (item.contains("center")) b.center = real(item["center"], "center");
      if (item.contains("width")) b.width = real(item["width"], "width");
      if (!(b.width > 0.0)) invalid("bump width must be positive");
      bumps.push_back(b);
    }
    if (bumps.empty()) invalid("'test_function' must not be empty");
    c.test_function = bumps;
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j = json::object();
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.beta) j["beta"] = *c.beta;
  if (c.eps_schedule) j["eps_schedule"] = *c.eps_schedule;
  if (c.insertions) {
    j["insertions"] = json::array();
    for (const auto& i : *c.insertions) j["insertions"].push_back({{"x", i.x}, {"sign", i.sign}});
  }
  if (c.potential)
    j["potential"] = {{"family", c.potential->family}, {"strength", c.potential->strength}, {"width", c.potential->width}};
  if (c.interaction_case) j["case"] = *c.interaction_case;
  if (c.lambda) j["lambda"] = *c.lambda;
  if (c.grid) j["grid"] = {{"min", c.grid->min}, {"max", c.grid->max}, {"count", c.grid->count}};
  if (c.tolerances) {
    json t = json::object();
    if (c.tolerances->abs) t["abs"] = *c.tolerances->abs;
    if (c.tolerances->rel) t["rel"] = *c.tolerances->rel;
    j["tolerances"] = t;
  }
  if (c.output) {
    json o = json::object();
    if (c.output->format) o["format"] = *c.output->format;
    if (c.output->path) o["path"] = *c.output->path;
    j["output"] = o;
  }
  if (c.test_function) {
    j["test_function"] = json::array();
    for (const auto& b : *c.test_function)
      j["test_function"].push_back({{"amplitude", b.amplitude}, {"center", b.center}, {"width", b.width}});
  }
  return j;
}

}  // namespace kms::cli
