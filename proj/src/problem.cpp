#include "secexp/problem.hpp"

#include "secexp/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace secexp {

using nlohmann::json;

namespace {

std::string where(const std::string& field) { return "spec field '" + field + "'"; }

Rational to_rational(const json& v, const std::string& field) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number()) {
      double x = v.get<double>();
      require(std::isfinite(x), where(field) + ": must be finite");
      return rationalize(x);
    }
  } catch (const ValidationError& e) {
    throw ValidationError(where(field) + ": " + e.what());
  }
  throw ValidationError(where(field) + ": expected a number or a fraction string");
}

double to_real(const json& v, const std::string& field, bool allow_inf = false) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (allow_inf && (s == "inf" || s == "+inf" || s == "infinity")) return kInf;
    return to_double(to_rational(v, field));
  }
  require(v.is_number(), where(field) + ": expected a number");
  return v.get<double>();
}

// Either "hamming" (square) or an array of equal-length rows.
std::vector<Rational> to_matrix(const json& v, const std::string& field, std::size_t rows,
                                std::size_t& cols) {
  std::vector<Rational> m;
  if (v.is_string()) {
    require(v.get<std::string>() == "hamming", where(field) + ": the only named matrix is \"hamming\"");
    cols = rows;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < rows; ++j) m.push_back(i == j ? 0 : 1);
    return m;
  }
  require(v.is_array(), where(field) + ": expected \"hamming\" or an array of rows");
  require(v.size() == rows, where(field) + ": has " + std::to_string(v.size()) + " rows, source has " +
                                std::to_string(rows) + " letters");
  cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = v[i];
    require(row.is_array() && !row.empty(), where(field) + ": row " + std::to_string(i) + " is not a non-empty array");
    if (i == 0) cols = row.size();
    require(row.size() == cols, where(field) + ": row " + std::to_string(i) + " has " +
                                    std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string cell = field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      Rational x = to_rational(row[j], cell);
      if (x < 0) throw ValidationError(where(cell) + " = " + to_string(x) + " is negative");
      m.push_back(x);
    }
  }
  return m;
}

json matrix_json(const std::vector<Rational>& m, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t i = 0; i < rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < cols; ++j) row.push_back(to_string(m[i * cols + j]));
    out.push_back(row);
  }
  return out;
}

DistortionSpec make_spec(const std::vector<Rational>& m, std::size_t rows, std::size_t cols,
                         const Rational& level) {
  return DistortionSpec(rows, cols, m, level);
}

void check_level(const std::vector<Rational>& m, std::size_t rows, std::size_t cols,
                 const Rational& level, const std::string& field, const std::string& matrix) {
  Rational dmin = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    Rational lo = m[i * cols];
    for (std::size_t j = 1; j < cols; ++j) lo = std::min(lo, m[i * cols + j]);
    dmin = std::max(dmin, lo);
  }
  if (level < dmin)
    throw ValidationError(where(field) + " = " + to_string(level) + " is below the smallest attainable level " +
                          to_string(dmin) + " of " + matrix);
}

const std::vector<std::string> kKnownKeys = {"version", "scenario", "source", "alphabets", "d", "D", "d_e",
                                             "D_e", "R", "r", "alpha", "delta", "options"};
const std::vector<std::string> kOptionKeys = {"seed", "random_starts", "refine_starts", "q_grid_step",
                                              "q_coarse_step", "q_random_starts", "epsilon",
                                              "rd_gap_tol", "rd_distortion_tol", "rd_max_iterations"};

}  // namespace

Dist ProblemSpec::dist() const {
  std::vector<double> p;
  for (const auto& q : source) p.push_back(to_double(q));
  return Dist(std::move(p));
}

DistortionSpec ProblemSpec::spec_d() const {
  require(d.has_value(), "spec: scenario has no legitimate distortion matrix");
  return make_spec(*d, nx, ny, D);
}

DistortionSpec ProblemSpec::spec_e() const { return make_spec(de, nx, nv, De); }

ProblemSpec problem_from_json(const json& j) {
  require(j.is_object(), "spec: top level must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), it.key()) == kKnownKeys.end())
      throw ValidationError("spec: unknown field '" + it.key() + "'");
  if (j.contains("version"))
    require(j["version"] == kSpecVersion, where("version") + ": unsupported version");

  ProblemSpec p;
  if (j.contains("scenario")) {
    require(j["scenario"].is_string(), where("scenario") + ": expected a string");
    p.scenario = j["scenario"].get<std::string>();
  }
  require(p.scenario == "nokey" || p.scenario == "keyed" || p.scenario == "perfect",
          where("scenario") + ": must be nokey, keyed or perfect, got '" + p.scenario + "'");

  require(j.contains("source"), where("source") + ": missing");
  const json& src = j["source"];
  require(src.is_array() && !src.empty(), where("source") + ": expected a non-empty array");
  Rational total = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::string f = "source[" + std::to_string(i) + "]";
    Rational q = to_rational(src[i], f);
    if (q <= 0) throw ValidationError(where(f) + " = " + to_string(q) + " must be positive");
    p.source.push_back(q);
    total += q;
  }
  if (std::fabs(to_double(total) - 1) > 1e-9)
    throw ValidationError(where("source") + ": probabilities sum to " + to_string(total) + ", not 1");
  if (total != 1)
    for (auto& q : p.source) {
      q /= total;
      q.canonicalize();
    }
  p.nx = p.source.size();

  if (j.contains("d")) {
    p.d = to_matrix(j["d"], "d", p.nx, p.ny);
    require(j.contains("D"), where("D") + ": missing");
    p.D = to_rational(j["D"], "D");
    require(p.D >= 0, where("D") + ": must be >= 0");
    check_level(*p.d, p.nx, p.ny, p.D, "D", "d");
  } else {
    require(p.scenario == "perfect", where("d") + ": required for scenario " + p.scenario);
    require(!j.contains("D"), where("D") + ": given without a matrix d");
  }
  require(j.contains("d_e"), where("d_e") + ": missing");
  p.de = to_matrix(j["d_e"], "d_e", p.nx, p.nv);
  require(j.contains("D_e"), where("D_e") + ": missing");
  p.De = to_rational(j["D_e"], "D_e");
  require(p.De >= 0, where("D_e") + ": must be >= 0");
  check_level(p.de, p.nx, p.nv, p.De, "D_e", "d_e");

  if (j.contains("alphabets")) {
    const json& a = j["alphabets"];
    require(a.is_object(), where("alphabets") + ": expected an object");
    auto check = [&](const char* k, std::size_t have) {
      if (!a.contains(k)) return;
      require(a[k].is_number_unsigned() && a[k].get<std::size_t>() == have,
              where(std::string("alphabets.") + k) + ": does not match the matrices (" + std::to_string(have) + ")");
    };
    check("X", p.nx);
    if (p.d) check("Y", p.ny);
    check("V", p.nv);
  }

  if (j.contains("R")) {
    p.R = to_real(j["R"], "R");
    require(*p.R >= 0, where("R") + ": must be >= 0");
  }
  if (j.contains("r")) {
    p.r = to_real(j["r"], "r");
    require(*p.r >= 0, where("r") + ": must be >= 0");
  }
  if (j.contains("alpha")) {
    p.alpha = to_real(j["alpha"], "alpha", true);
    require(p.alpha > 0, where("alpha") + ": must be > 0 or \"inf\"");
  }
  if (j.contains("delta")) {
    p.delta = to_real(j["delta"], "delta");
    require(p.delta >= 0, where("delta") + ": must be >= 0");
  }
  if (p.scenario == "keyed") {
    require(p.R.has_value(), where("R") + ": required for scenario keyed");
    require(p.r.has_value(), where("r") + ": required for scenario keyed");
  }

  if (j.contains("options")) {
    const json& o = j["options"];
    require(o.is_object(), where("options") + ": expected an object");
    for (auto it = o.begin(); it != o.end(); ++it)
      if (std::find(kOptionKeys.begin(), kOptionKeys.end(), it.key()) == kOptionKeys.end())
        throw ValidationError("spec: unknown option '" + it.key() + "'");
    auto integer = [&](const char* k, auto& dst, long lo) {
      if (!o.contains(k)) return;
      require(o[k].is_number_integer() && o[k].get<long>() >= lo,
              where(std::string("options.") + k) + ": expected an integer >= " + std::to_string(lo));
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(o[k].get<long>());
    };
    auto positive = [&](const char* k, double& dst) {
      if (!o.contains(k)) return;
      dst = to_real(o[k], std::string("options.") + k);
      require(dst > 0, where(std::string("options.") + k) + ": must be > 0");
    };
    if (o.contains("seed")) {
      require(o["seed"].is_number_unsigned(), where("options.seed") + ": expected a non-negative integer");
      p.search.seed = o["seed"].get<std::uint64_t>();
    }
    integer("random_starts", p.search.random_starts, 0);
    integer("refine_starts", p.search.refine_starts, 1);
    integer("q_random_starts", p.search.q_random_starts, 0);
    integer("rd_max_iterations", p.search.rd.max_iterations, 1);
    positive("q_grid_step", p.search.q_grid_step);
    positive("q_coarse_step", p.search.q_coarse_step);
    positive("epsilon", p.epsilon);
    positive("rd_gap_tol", p.search.rd.gap_tol);
    positive("rd_distortion_tol", p.search.rd.distortion_tol);
  }
  // Surface matrix problems through the library's own checks too.
  (void)p.spec_e();
  if (p.d) (void)p.spec_d();
  return p;
}

ProblemSpec problem_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec: JSON parse error: ") + e.what());
  }
  return problem_from_json(j);
}

json problem_to_json(const ProblemSpec& p) {
  json j;
  j["version"] = kSpecVersion;
  j["scenario"] = p.scenario;
  json src = json::array();
  for (const auto& q : p.source) src.push_back(to_string(q));
  j["source"] = src;
  j["alphabets"] = {{"X", p.nx}, {"V", p.nv}};
  if (p.d) {
    j["alphabets"]["Y"] = p.ny;
    j["d"] = matrix_json(*p.d, p.nx, p.ny);
    j["D"] = to_string(p.D);
  }
  j["d_e"] = matrix_json(p.de, p.nx, p.nv);
  j["D_e"] = to_string(p.De);
  if (p.R) j["R"] = *p.R;
  if (p.r) j["r"] = *p.r;
  j["alpha"] = std::isinf(p.alpha) ? json("inf") : json(p.alpha);
  j["delta"] = p.delta;
  j["options"] = {{"seed", p.search.seed},
                  {"random_starts", p.search.random_starts},
                  {"refine_starts", p.search.refine_starts},
                  {"q_grid_step", p.search.q_grid_step},
                  {"q_coarse_step", p.search.q_coarse_step},
                  {"q_random_starts", p.search.q_random_starts},
                  {"epsilon", p.epsilon},
                  {"rd_gap_tol", p.search.rd.gap_tol},
                  {"rd_distortion_tol", p.search.rd.distortion_tol},
                  {"rd_max_iterations", p.search.rd.max_iterations}};
  return j;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string problem_digest(const ProblemSpec& p) { return fnv1a_hex(problem_to_json(p).dump()); }

json RunRecord::to_json() const {
  return {{"digest", digest}, {"command", command}, {"outputs", outputs},
          {"wall_seconds", wall_seconds}, {"version", version}, {"seed", seed}};
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add(std::vector<std::string> row) {
  require(row.size() == header_.size(), "CsvTable: row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto cell = [&](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
      os << s;
      return;
    }
    os << '"';
    for (char c : s) os << (c == '"' ? "\"\"" : std::string(1, c));
    os << '"';
  };
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      cell(r[i]);
    }
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<double> parse_grid(const std::string& s) {
  const auto a = s.find(':'), b = s.rfind(':');
  require(a != std::string::npos && b != a, "grid '" + s + "': expected start:stop:step");
  // Exact arithmetic so that 0:0.5:0.1 ends exactly at 0.5.
  const Rational lo = parse_rational(s.substr(0, a));
  const Rational hi = parse_rational(s.substr(a + 1, b - a - 1));
  const Rational step = parse_rational(s.substr(b + 1));
  require(step > 0 && hi >= lo, "grid '" + s + "': need step > 0 and stop >= start");
  require(to_double((hi - lo) / step) <= 1e6, "grid '" + s + "': more than 10^6 points");
  std::vector<double> out;
  for (Rational v = lo; v <= hi; v += step) out.push_back(to_double(v));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == tok.size() && !tok.empty(), "list '" + s + "': '" + tok + "' is not an integer");
    out.push_back(v);
  }
  require(!out.empty(), "list '" + s + "': empty");
  return out;
}

}  // namespace secexp
