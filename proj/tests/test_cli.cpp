#include "doctest.h"
#include "oracles.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kms/cli/commands.hpp"
#include "kms/cli/config.hpp"
#include "kms/error.hpp"

using namespace kms;
using namespace kms::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = KMS_CLI_DATA;
const fs::path kWork = fs::path(KMS_CLI_WORK);

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the built binary with the given arguments; stdout and stderr go through files.
Run kmscorr(const std::string& args) {
  fs::create_directories(kWork);
  const auto out = kWork / "stdout.txt";
  const auto err = kWork / "stderr.txt";
  const std::string cmd =
      std::string("\"") + KMSCORR_BIN + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return "\"" + (kData / name).string() + "\""; }

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_config(json::parse(text));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config was accepted: " << text);
  return ErrorKind::InvalidConfig;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("config round trip") {
  const auto full = load_config((kData / "full.json").string());
  CHECK(full.alpha == std::vector<double>{0.5, 1.0});
  CHECK(full.interaction_case == 2);
  CHECK(full.grid->points().size() == 5u);
  CHECK(parse_config(to_json(full)) == full);
  CHECK(parse_config(to_json(RunConfig{})) == RunConfig{});

  // Seeded random configurations over every key.
  oracle::Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c;
    if (rng.below(2)) c.alpha = std::vector<double>{rng.uniform(0.1, 4.0), rng.uniform(0.1, 4.0)};
    if (rng.below(2)) c.beta = rng.uniform(0.2, 8.0);
    if (rng.below(2)) c.eps_schedule = std::vector<double>{1e-2, rng.uniform(1e-4, 9e-3), 1e-5};
    if (rng.below(2)) c.insertions = std::vector<InsertionConfig>{{rng.uniform(-3, 3), 1}, {rng.uniform(-3, 3), -1}};
    if (rng.below(2)) c.potential = PotentialConfig{"gaussian", rng.uniform(-2, 2), rng.uniform(0.1, 3)};
    if (rng.below(2)) c.interaction_case = 1 + static_cast<int>(rng.below(3));
    if (rng.below(2)) c.lambda = rng.uniform(-1, 1);
    if (rng.below(2)) c.grid = Grid{-rng.uniform(0, 2), rng.uniform(0, 2), 1 + static_cast<int>(rng.below(40))};
    if (rng.below(2)) c.tolerances = Tolerances{rng.uniform(0, 1e-3), std::nullopt};
    if (rng.below(2)) c.output = OutputConfig{rng.below(2) ? "csv" : "json", std::nullopt};
    if (rng.below(2)) c.test_function = std::vector<BumpConfig>{{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.7}};
    const auto text = to_json(c).dump();
    CHECK(parse_config(json::parse(text)) == c);
  }
}

TEST_CASE("config validation") {
  const char* bad[] = {
      R"({"temperature": 1})",
      R"({"grid": {"min": 0, "max": 1, "count": 3, "step": 0.5}})",
      R"({"eps_schedule": []})",
      R"({"eps_schedule": [0.01, 0.02]})",
      R"({"alpha": []})",
      R"({"alpha": -1})",
      R"({"beta": 0})",
      R"({"beta": "hot"})",
      R"({"case": 4})",
      R"({"case": 1.5})",
      R"({"insertions": [{"x": 0, "sign": 2}]})",
      R"({"potential": {"family": "yukawa"}})",
      R"({"tolerances": {"abs": -1}})",
      R"({"output": {"format": "xml"}})",
      R"([1, 2])",
  };
  for (const char* text : bad) CHECK(parse_error_kind(text) == ErrorKind::InvalidConfig);
  CHECK_THROWS_AS(load_config((kWork / "missing.json").string()), Error);
}

TEST_CASE("exit codes for invalid input") {
  CHECK(kmscorr("suite --config " + data("unknown_key.json")).code == kExitInvalid);
  CHECK(kmscorr("jump --config " + data("empty_schedule.json")).code == kExitInvalid);
  CHECK(kmscorr("kernel --format xml").code == kExitInvalid);
  CHECK(kmscorr("teleport").code == kExitInvalid);
  CHECK(kmscorr("suite --tolerance-abs -1").code == kExitInvalid);

  const auto charged = kmscorr("npoint --config " + data("charged.json"));
  CHECK(charged.code == kExitInvalid);
  CHECK(charged.err.find("selection rule") != std::string::npos);

  const auto over = kmscorr("luttinger --config " + data("overcoupled.json"));
  CHECK(over.code == kExitInvalid);
  CHECK(over.err.find("p =") != std::string::npos);
}

TEST_CASE("npoint command") {
  const auto grid = kmscorr("npoint --format csv");
  REQUIRE(grid.code == kExitPass);
  CHECK(first_line(grid.out) == "config_id,product_re,product_im,det_re,det_im,rel_diff");

  // |S| on the default two-point grid decays monotonically.
  const auto j = kmscorr("npoint --format json");
  REQUIRE(j.code == kExitPass);
  const auto rows = json::parse(j.out)["npoint"];
  REQUIRE(rows.size() == 11u);
  double prev = INFINITY;
  for (const auto& r : rows) {
    const double mod = std::hypot(r["product_re"].get<double>(), r["product_im"].get<double>());
    CHECK(mod < prev);
    prev = mod;
  }

  const auto four = kmscorr("npoint --format json --config " + data("four_point.json"));
  REQUIRE(four.code == kExitPass);
  const auto row = json::parse(four.out)["npoint"].at(0);
  CHECK(row["rel_diff"].get<double>() <= 1e-10);
}

TEST_CASE("jump command") {
  const auto ladder = kmscorr("jump --format csv");
  CHECK(ladder.code == kExitPass);
  CHECK(first_line(ladder.out) == "alpha,limit_re,limit_im,error_estimate,fitted_rate");

  std::ofstream(kWork / "half_odd.json") << R"({"alpha": 2.5})";
  const auto odd = kmscorr("jump --format json --config \"" + (kWork / "half_odd.json").string() + "\"");
  CHECK(odd.code == kExitPass);
  const auto row = json::parse(odd.out)["jump"].at(0);
  CHECK(std::hypot(row["limit_re"].get<double>(), row["limit_im"].get<double>()) < 1e-6);
}

TEST_CASE("kernel and luttinger commands") {
  const auto kernel = kmscorr("kernel --format csv");
  CHECK(kernel.code == kExitPass);
  CHECK(first_line(kernel.out) == "x,w_re,w_im");

  const auto free = kmscorr("luttinger --format csv --config " + data("free_luttinger.json"));
  REQUIRE(free.code == kExitPass);
  CHECK(first_line(free.out) == "p,eps_p");
  const auto second = free.out.substr(free.out.find("\n\n") + 2);
  CHECK(first_line(second) == "x,w_free_re,w_free_im,w_int_re,w_int_im,ratio");

  const auto j = kmscorr("luttinger --format json --config " + data("free_luttinger.json"));
  REQUIRE(j.code == kExitPass);
  const auto doc = json::parse(j.out);
  for (const auto& r : doc["kernel"]) CHECK(std::abs(r["ratio"].get<double>() - 1.0) <= 1e-10);
}

TEST_CASE("output file and determinism") {
  const auto a = kWork / "npoint_a.json";
  const auto b = kWork / "npoint_b.json";
  REQUIRE(kmscorr("npoint --format json --seed 9 --output \"" + a.string() + "\"").code == kExitPass);
  REQUIRE(kmscorr("npoint --format json --seed 9 --output \"" + b.string() + "\"").code == kExitPass);
  CHECK(!slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("suite exit codes") {
  const auto strict = kmscorr("suite --format json --tolerance-abs 0 --tolerance-rel 0");
  CHECK(strict.code == kExitFail);
  const auto report = json::parse(strict.out);
  CHECK(report["summary"]["fail"].get<int>() > 0);
  CHECK(report["seed"].get<int>() == 1);

  const auto over = kmscorr("suite --format json --config " + data("overcoupled.json"));
  CHECK(over.code == kExitPass);
  bool admissibility = false;
  const auto doc = json::parse(over.out);
  for (const auto& r : doc["results"]) {
    if (r["test_id"] == "luttinger.admissibility") {
      admissibility = true;
      CHECK(r["status"] == "pass");
    }
  }
  CHECK(admissibility);
}
