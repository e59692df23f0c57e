#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "copula/audits.hpp"
#include "copula/birkhoff.hpp"
#include "copula/blocking.hpp"
#include "copula/discrete_copula.hpp"
#include "copula/permutation.hpp"

namespace copula {

using json = nlohmann::json;

/// CSV layout: a header line "n,<n>" followed by the n+1 rows of the
/// (n+1)x(n+1) copula table.
inline std::string copula_to_csv(const DiscreteCopula& c) {
  std::ostringstream out;
  out << "n," << c.n << "\n";
  for (std::int64_t a = 0; a <= c.n; ++a) {
    for (std::int64_t b = 0; b <= c.n; ++b) out << (b ? "," : "") << c.C(a, b);
    out << "\n";
  }
  return out.str();
}

inline DiscreteCopula copula_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,", 0) != 0)
    throw std::invalid_argument("copula csv: missing 'n,<n>' header");
  DiscreteCopula c;
  c.n = std::stoll(line.substr(2));
  if (c.n < 1) throw std::invalid_argument("copula csv: n must be >= 1");
  c.C.assign(static_cast<std::size_t>(c.n + 1), static_cast<std::size_t>(c.n + 1), 0);
  for (std::int64_t a = 0; a <= c.n; ++a) {
    if (!std::getline(in, line)) throw std::invalid_argument("copula csv: truncated");
    std::istringstream row(line);
    std::string cell;
    for (std::int64_t b = 0; b <= c.n; ++b) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("copula csv: short row");
      c.C(a, b) = static_cast<std::int32_t>(std::stol(cell));
    }
  }
  return c;
}

inline std::string birkhoff_to_csv(const BirkhoffCopula& c) {
  std::ostringstream out;
  out << "n," << c.n << "\n";
  char buf[40];
  for (std::int64_t a = 0; a <= c.n; ++a) {
    for (std::int64_t b = 0; b <= c.n; ++b) {
      std::snprintf(buf, sizeof(buf), "%.17g", c.C(a, b));
      out << (b ? "," : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

inline json permutation_to_json(const Permutation& p) {
  return json{{"n", p.n}, {"sigma", p.sigma}};
}

inline Permutation permutation_from_json(const json& j) {
  Permutation p;
  p.n = j.at("n").get<std::int64_t>();
  p.sigma = j.at("sigma").get<std::vector<std::int32_t>>();
  validate_permutation(p);
  return p;
}

/// Grid blocking JSON: {"n":..., "a":[0,...,n], "b":[0,...,n],
/// "cdot":[[...],...]} with I x J box counts.
inline GridBlocking grid_blocking_from_json(const json& j) {
  GridBlocking gb;
  gb.grid.n = j.at("n").get<std::int64_t>();
  gb.grid.a = j.at("a").get<std::vector<std::int64_t>>();
  gb.grid.b = j.at("b").get<std::vector<std::int64_t>>();
  auto rows = j.at("cdot").get<std::vector<std::vector<std::int64_t>>>();
  gb.cdot.assign(rows.size(), rows.empty() ? 0 : rows[0].size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != gb.cdot.cols())
      throw std::invalid_argument("grid blocking json: ragged cdot");
    for (std::size_t k = 0; k < rows[i].size(); ++k) gb.cdot(i, k) = rows[i][k];
  }
  validate_grid_blocking(gb);
  return gb;
}

inline json report_to_json(const TestReport& r) {
  return json{{"test", r.test},     {"params", r.params},         {"statistic", r.statistic},
              {"threshold", r.threshold}, {"pass", r.pass},       {"runtime_ms", r.runtime_ms},
              {"seed", r.seed},     {"note", r.note}};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace copula
