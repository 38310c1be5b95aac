#include "kms/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>

namespace kms::cli {

using nlohmann::json;

namespace {

json real_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json pair_json(std::complex<double> z) { return json::array({real_json(z.real()), real_json(z.imag())}); }

// CSV fields here never contain separators except the free-text note.
std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Skip: return "skip";
  }
  return "fail";
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest text that reads back to the same double.
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

SuiteItem compare(std::string id, std::complex<double> value, std::complex<double> reference, double tol_abs,
                  double tol_rel) {
  SuiteItem item;
  item.test_id = std::move(id);
  item.value = value;
  item.reference = reference;
  item.abs_err = std::abs(value - reference);
  item.rel_err = std::abs(reference) > 0.0 ? item.abs_err / std::abs(reference)
                                           : (item.abs_err == 0.0 ? 0.0 : INFINITY);
  item.tol_abs = tol_abs;
  item.tol_rel = tol_rel;
  const bool ok = item.abs_err <= tol_abs || item.rel_err <= tol_rel;
  item.status = ok ? Status::Pass : Status::Fail;
  return item;
}

void SuiteReport::sort() {
  std::stable_sort(items.begin(), items.end(),
                   [](const SuiteItem& a, const SuiteItem& b) { return a.test_id < b.test_id; });
}

bool SuiteReport::all_pass() const {
  return std::none_of(items.begin(), items.end(), [](const SuiteItem& i) { return i.status == Status::Fail; });
}

json SuiteReport::to_json() const {
  json results = json::array();
  std::size_t pass = 0, fail = 0, skip = 0;
  for (const auto& i : items) {
    (i.status == Status::Pass ? pass : i.status == Status::Fail ? fail : skip)++;
    json row = {{"test_id", i.test_id},
                {"status", to_string(i.status)},
                {"value", pair_json(i.value)},
                {"reference", pair_json(i.reference)},
                {"abs_err", real_json(i.abs_err)},
                {"rel_err", real_json(i.rel_err)},
                {"tol", {{"abs", real_json(i.tol_abs)}, {"rel", real_json(i.tol_rel)}}},
                {"runtime_ms", i.runtime_ms}};
    if (!i.note.empty()) row["note"] = i.note;
    results.push_back(row);
  }
  return {{"seed", seed},
          {"summary", {{"pass", pass}, {"fail", fail}, {"skip", skip}}},
          {"results", results}};
}

void SuiteReport::write_csv(std::ostream& out) const {
  out << "test_id,status,value_re,value_im,reference_re,reference_im,abs_err,rel_err,tol_abs,tol_rel,"
         "runtime_ms,note\n";
  for (const auto& i : items)
    out << quoted(i.test_id) << ',' << to_string(i.status) << ',' << format_real(i.value.real()) << ','
        << format_real(i.value.imag()) << ',' << format_real(i.reference.real()) << ','
        << format_real(i.reference.imag()) << ',' << format_real(i.abs_err) << ',' << format_real(i.rel_err)
        << ',' << format_real(i.tol_abs) << ',' << format_real(i.tol_rel) << ',' << i.runtime_ms << ','
        << quoted(i.note) << '\n';
}

void write_tables_csv(std::ostream& out, const std::vector<Table>& tables) {
  for (std::size_t t = 0; t < tables.size(); ++t) {
    if (t > 0) out << '\n';
    const auto& table = tables[t];
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        if (row[c]) out << format_real(*row[c]);
      }
      out << '\n';
    }
  }
}

json tables_to_json(const std::vector<Table>& tables) {
  json out = json::object();
  for (const auto& table : tables) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::object();
      for (std::size_t c = 0; c < row.size(); ++c) r[table.columns[c]] = row[c] ? real_json(*row[c]) : json(nullptr);
      rows.push_back(r);
    }
    out[table.name] = rows;
  }
  return out;
}

}  // namespace kms::cli
