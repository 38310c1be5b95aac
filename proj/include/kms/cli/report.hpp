#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace kms::cli {

enum class Status { Pass, Fail, Skip };
std::string to_string(Status s);

struct SuiteItem {
  std::string test_id;
  Status status = Status::Skip;
  std::complex<double> value;
  std::complex<double> reference;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tol_abs = 0.0;
  double tol_rel = 0.0;
  std::int64_t runtime_ms = 0;
  std::string note;
};

// Fills the errors and sets status = pass iff abs_err <= tol_abs or rel_err <= tol_rel.
SuiteItem compare(std::string id, std::complex<double> value, std::complex<double> reference, double tol_abs,
                  double tol_rel);

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<SuiteItem> items;

  void sort();
  bool all_pass() const;
  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

// A named table of numeric cells; empty cells print as blank (CSV) or null (JSON).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

void write_tables_csv(std::ostream& out, const std::vector<Table>& tables);
nlohmann::json tables_to_json(const std::vector<Table>& tables);

std::string format_real(double v);

}  // namespace kms::cli
