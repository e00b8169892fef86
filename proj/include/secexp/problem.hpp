#pragma once

#include "secexp/exponent.hpp"
#include "secexp/rational.hpp"
#include "secexp/simplex.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace secexp {

constexpr int kSpecVersion = 1;
constexpr const char* kToolVersion = "secexp 1.0.0";

// One problem instance as read from a JSON document. Matrices and levels are
// exact; "1/3" style strings are accepted wherever a number is.
struct ProblemSpec {
  std::string scenario = "nokey";  // nokey | keyed | perfect
  std::vector<Rational> source;
  std::size_t nx = 0, ny = 0, nv = 0;
  std::optional<std::vector<Rational>> d;  // nx x ny, row-major; absent only for perfect
  Rational D;
  std::vector<Rational> de;  // nx x nv
  Rational De;
  std::optional<double> R, r;
  double alpha = kInf;
  double delta = 0;
  double epsilon = 0.5;
  SearchOptions search;

  Dist dist() const;
  DistortionSpec spec_d() const;
  DistortionSpec spec_e() const;
};

// Parse and validate; errors name the offending field.
ProblemSpec problem_from_json(const nlohmann::json& j);
ProblemSpec problem_from_text(const std::string& text);
// Canonical form: every field present, rationals as reduced fraction strings.
nlohmann::json problem_to_json(const ProblemSpec& p);
// FNV-1a 64 of the compact canonical dump, as 16 hex digits.
std::string problem_digest(const ProblemSpec& p);

struct RunRecord {
  std::string digest;
  std::string command;
  nlohmann::json outputs;
  double wall_seconds = 0;
  std::string version = kToolVersion;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

std::string fnv1a_hex(const std::string& s);

// Full-precision numeric cell: 17 significant digits, "inf"/"-inf"/"nan".
std::string csv_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// "a:b:s" -> a, a+s, ..., up to b inclusive (within s/1e6).
std::vector<double> parse_grid(const std::string& s);
// "4,8,12" -> {4, 8, 12}.
std::vector<int> parse_int_list(const std::string& s);

}  // namespace secexp
