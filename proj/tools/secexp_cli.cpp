// secexp: command-line front end for the exponent solvers, the finite-n
// simulators and the property suites.
//
//   secexp exponent --spec p.json
//   secexp crd --spec p.json --grid 0:0.5:0.05
//   secexp simulate --spec p.json --n 4,8,12 --strategies map,two-stage
//   secexp verify --suite lemma3
//
// Exit codes: 0 ok, 2 validation error, 3 guard exceeded, 4 suite failure.

#include "secexp/cipher.hpp"
#include "secexp/error.hpp"
#include "secexp/exponent.hpp"
#include "secexp/problem.hpp"
#include "secexp/rd.hpp"
#include "secexp/types.hpp"
#include "secexp/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>

using namespace secexp;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;
constexpr int kExitSuite = 4;

struct SuiteFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string spec_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string n_list;
  std::string grid;
  std::string suite;
  std::string format = "csv";
  std::string strategies;
  std::string param = "De";
  std::string channel = "rd";
  std::optional<double> theory;
  bool list = false;
};

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json dist_json(const Dist& d) {
  json a = json::array();
  for (double v : d.probs()) a.push_back(v);
  return a;
}

json diag_json(const std::map<std::string, double>& m) {
  json o = json::object();
  for (const auto& [k, v] : m) o[k] = num(v);
  return o;
}

std::string counts_str(const std::vector<int>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + std::to_string(c[i]);
  return s;
}

ProblemSpec load_spec(const Common& c) {
  require(!c.spec_path.empty(), "--spec is required for this command");
  ProblemSpec p = problem_from_text(read_file(c.spec_path));
  if (c.seed) p.search.seed = *c.seed;
  return p;
}

// Collected outputs of one command: named files plus what goes to stdout.
class Emitter {
 public:
  Emitter(const Common& c, std::string command) : c_(c), command_(std::move(command)) {}

  void csv(const std::string& name, const CsvTable& t) {
    files_.push_back({name + ".csv", t.str()});
    if (c_.format == "csv") stdout_ += (stdout_.empty() ? "" : "\n") + t.str();
  }
  void json_doc(const std::string& name, const json& j) {
    files_.push_back({name + ".json", j.dump(2) + "\n"});
    if (c_.format == "json") stdout_ += j.dump(2) + "\n";
    outputs_[name] = j;
  }

  // Files are written once, after all computation, each atomically.
  void finish(const std::string& digest, std::uint64_t seed, double seconds) {
    if (c_.out_dir.empty()) {
      std::cout << stdout_;
      return;
    }
    RunRecord rec;
    rec.digest = digest;
    rec.command = command_;
    rec.outputs = outputs_;
    rec.wall_seconds = seconds;
    rec.seed = seed;
    for (const auto& [name, body] : files_)
      write_file_atomic((std::filesystem::path(c_.out_dir) / name).string(), body);
    write_file_atomic((std::filesystem::path(c_.out_dir) / "run.json").string(), rec.to_json().dump(2) + "\n");
    for (const auto& [name, body] : files_) std::cout << "wrote " << c_.out_dir << "/" << name << "\n";
  }

 private:
  const Common& c_;
  std::string command_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::string stdout_;
  json outputs_ = json::object();
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- exponent -----------------------------------------------------------------

ExponentResult run_exponent(const ProblemSpec& p) {
  if (p.scenario == "perfect") return exponent_perfect(p.dist(), p.spec_e(), p.search);
  if (p.scenario == "nokey") return exponent_nokey(p.dist(), p.spec_d(), p.spec_e(), p.search);
  return exponent_key(p.dist(), p.spec_d(), p.spec_e(), *p.R, *p.r, p.alpha, p.search);
}

json exponent_json(const ExponentResult& e) {
  return {{"value", num(e.value)}, {"argmin_q", dist_json(e.argmin_q)}, {"branch", e.branch},
          {"diagnostics", diag_json(e.diagnostics)}};
}

int cmd_exponent(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec p = load_spec(c);
  ExponentResult e = run_exponent(p);
  json doc = exponent_json(e);
  doc["scenario"] = p.scenario;
  doc["spec"] = problem_to_json(p);

  std::ostringstream human;
  human << "scenario   " << p.scenario << "\n"
        << "exponent   " << csv_number(e.value) << "\n"
        << "branch     " << e.branch << "\n"
        << "argmin Q   (";
  for (std::size_t i = 0; i < e.argmin_q.size(); ++i) human << (i ? ", " : "") << e.argmin_q[i];
  human << ")\n";
  for (const auto& [k, v] : e.diagnostics) human << "  " << k << " = " << csv_number(v) << "\n";

  Emitter out(c, "exponent");
  CsvTable t({"scenario", "value", "branch", "argmin_q"});
  std::string q;
  for (std::size_t i = 0; i < e.argmin_q.size(); ++i) q += (i ? " " : "") + csv_number(e.argmin_q[i]);
  t.add({p.scenario, csv_number(e.value), e.branch, q});
  if (c.format == "csv") std::cerr << human.str();
  out.csv("exponent", t);
  out.json_doc("exponent", doc);
  out.finish(problem_digest(p), p.search.seed, seconds_since(t0));
  return 0;
}

// --- crd ----------------------------------------------------------------------

// Second differences on a uniform grid; tolerance covers the solver accuracy.
void assert_monotone_convex(const std::vector<double>& x, const std::vector<double>& v) {
  constexpr double tol = 1e-6;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] + tol)
      throw SuiteFailure("crd: value increases from D_e = " + csv_number(x[i - 1]) + " to " + csv_number(x[i]));
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > 0.5 * (v[i - 1] + v[i + 1]) + tol)
      throw SuiteFailure("crd: convexity fails at D_e = " + csv_number(x[i]));
}

int cmd_crd(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec p = load_spec(c);
  const DistortionSpec de = p.spec_e();
  std::vector<double> grid = c.grid.empty() ? std::vector<double>{de.level()} : parse_grid(c.grid);
  for (double g : grid)
    require(g >= de.d_min() - 1e-12 && g <= de.d_max() + 1e-12,
            "crd: grid value " + csv_number(g) + " outside [" + csv_number(de.d_min()) + ", " +
                csv_number(de.d_max()) + "]");

  // Side information: the rate-distortion channel at (d, D), or the worst
  // case channel at the spec level when --channel worst.
  Channel w;
  if (c.channel == "worst")
    w = r_blur(p.dist(), p.spec_d(), de, p.search).argmax_channel;
  else
    w = rd_function(p.dist(), p.spec_d(), p.search.rd).argmin_channel;
  const Joint2 j = Joint2::compose(p.dist(), w);

  std::vector<double> vals(grid.size());
  std::vector<CondRDResult> res(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    res[i] = conditional_rd(j, de.with_level(rationalize(grid[i])), p.search.rd);
    vals[i] = res[i].value;
  }
  assert_monotone_convex(grid, vals);

  CsvTable t({"D_e", "D_e_exact", "crd", "achieved_distortion", "converged"});
  json rows = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.add({csv_number(grid[i]), to_string(rationalize(grid[i])), csv_number(vals[i]),
           csv_number(res[i].achieved_distortion), res[i].converged ? "1" : "0"});
    rows.push_back({{"D_e", grid[i]}, {"crd", num(vals[i])}, {"converged", res[i].converged}});
  }
  Emitter out(c, "crd");
  out.csv("crd", t);
  out.json_doc("crd", {{"channel", c.channel}, {"rows", rows}});
  out.finish(problem_digest(p), p.search.seed, seconds_since(t0));
  return 0;
}

// --- rd -----------------------------------------------------------------------

int cmd_rd(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec p = load_spec(c);
  const DistortionSpec d = p.d ? p.spec_d() : p.spec_e();
  std::vector<double> grid = c.grid.empty() ? std::vector<double>{d.level()} : parse_grid(c.grid);
  CsvTable t({"D", "D_exact", "rate", "lagrange_slope", "achieved_distortion", "converged"});
  json rows = json::array();
  for (double g : grid) {
    require(g >= d.d_min() - 1e-12, "rd: grid value " + csv_number(g) + " is below d_min = " + csv_number(d.d_min()));
    RDResult r = rd_function(p.dist(), d.with_level(rationalize(g)), p.search.rd);
    t.add({csv_number(g), to_string(rationalize(g)), csv_number(r.value), csv_number(r.lagrange_slope),
           csv_number(r.achieved_distortion), r.converged ? "1" : "0"});
    rows.push_back({{"D", g}, {"rate", num(r.value)}, {"lagrange_slope", num(r.lagrange_slope)},
                    {"converged", r.converged}});
  }
  Emitter out(c, "rd");
  out.csv("rd", t);
  out.json_doc("rd", {{"matrix", p.d ? "d" : "d_e"}, {"rows", rows}});
  out.finish(problem_digest(p), p.search.seed, seconds_since(t0));
  return 0;
}

// --- simulate -----------------------------------------------------------------

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Largest r_disc <= r with 2^{n r_disc} an integer.
double key_rate_at(double r, int n) { return std::floor(n * r + 1e-9) / n; }

AdversaryReport simulate_one(const ProblemSpec& p, const std::string& strategy, int n) {
  if (strategy == "blind") return blind_adversary(p.dist(), n, p.spec_e());
  if (strategy == "keyed-map" || strategy == "key-guess") {
    require(p.scenario == "keyed", "simulate: strategy '" + strategy + "' needs scenario keyed");
    KeyedOptions ko;
    ko.epsilon = p.epsilon;
    ko.seed = p.search.seed;
    KeyedSystem s = build_keyed_system(p.dist(), n, p.spec_d(), p.spec_e(), *p.R, key_rate_at(*p.r, n),
                                       p.alpha, p.delta, ko);
    return strategy == "keyed-map" ? keyed_map_adversary(s) : key_guess_adversary(s, p.search.seed);
  }
  require(p.scenario != "perfect", "simulate: strategy '" + strategy + "' needs the legitimate distortion d");
  BlurSystem s = build_blur_system(p.dist(), n, p.spec_d(), p.spec_e());
  if (strategy == "map") return map_adversary(s);
  if (strategy == "genie") return genie_map_adversary(s);
  if (strategy == "two-stage") {
    TwoStageOptions o;
    o.seed = p.search.seed;
    return two_stage_adversary(s, o);
  }
  throw ValidationError("simulate: unknown strategy '" + strategy +
                        "' (map, genie, two-stage, blind, keyed-map, key-guess)");
}

double theory_for(const ProblemSpec& p, const std::string& strategy) {
  if (strategy == "blind") return exponent_perfect(p.dist(), p.spec_e(), p.search).value;
  return run_exponent(p).value;
}

int cmd_simulate(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec p = load_spec(c);
  require(!c.n_list.empty(), "simulate: --n is required");
  const std::vector<int> ns = parse_int_list(c.n_list);
  std::vector<std::string> strategies = split(c.strategies);
  if (strategies.empty())
    strategies = p.scenario == "keyed" ? std::vector<std::string>{"keyed-map"}
                 : p.scenario == "perfect" ? std::vector<std::string>{"blind"}
                                           : std::vector<std::string>{"map", "two-stage"};

  CsvTable reports({"strategy", "n", "success_num", "success_den", "success_float", "exact", "monte_carlo",
                    "ci_radius", "samples", "empirical_exponent"});
  json rep_json = json::array();
  std::map<std::string, std::map<int, AdversaryReport>> got;
  for (const auto& st : strategies)
    for (int n : ns) {
      AdversaryReport r = simulate_one(p, st, n);
      const bool exact = r.exact.has_value();
      reports.add({st, std::to_string(n), exact ? r.exact->get_num().get_str() : "",
                   exact ? r.exact->get_den().get_str() : "", csv_number(r.success), exact ? "1" : "0",
                   r.monte_carlo ? "1" : "0", csv_number(r.ci_radius), std::to_string(r.samples),
                   csv_number(r.empirical_exponent)});
      json j = {{"strategy", st}, {"n", n}, {"success", num(r.success)},
                {"exact", exact ? json(to_string(*r.exact)) : json(nullptr)}, {"monte_carlo", r.monte_carlo},
                {"ci_radius", r.ci_radius}, {"samples", r.samples},
                {"empirical_exponent", num(r.empirical_exponent)}, {"diagnostics", diag_json(r.diagnostics)}};
      if (!r.message_bounds.empty()) {
        long bad = 0;
        for (const auto& mb : r.message_bounds) bad += !mb.holds;
        j["message_bound_violations"] = bad;
      }
      rep_json.push_back(j);
      got[st][n] = std::move(r);
    }

  Emitter out(c, "simulate");
  out.csv("reports", reports);
  json doc = {{"spec", problem_to_json(p)}, {"reports", rep_json}};
  if (ns.size() > 1) {
    json trends = json::object();
    for (const auto& st : strategies) {
      const double theory = c.theory ? *c.theory : theory_for(p, st);
      Trend tr = exponent_trend([&](int n) { return got[st].at(n); }, ns, theory);
      CsvTable t({"n", "success_num", "success_den", "success_float", "empirical_exponent", "theory_exponent",
                  "gap"});
      for (const auto& row : tr.rows)
        t.add({std::to_string(row.n), row.exact ? row.exact->get_num().get_str() : "",
               row.exact ? row.exact->get_den().get_str() : "", csv_number(row.success), csv_number(row.exponent),
               csv_number(row.theory), csv_number(row.gap)});
      out.csv("trend_" + st, t);
      trends[st] = {{"theory_exponent", num(theory)}, {"exponent_increasing", tr.exponent_increasing},
                    {"gap_decreasing", tr.gap_decreasing}, {"below_theory", tr.below_theory}};
    }
    doc["trends"] = trends;
  }
  out.json_doc("simulate", doc);
  out.finish(problem_digest(p), p.search.seed, seconds_since(t0));
  return 0;
}

// --- types --------------------------------------------------------------------

int cmd_types(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec p = load_spec(c);
  require(!c.n_list.empty(), "types: --n is required");
  const std::vector<int> ns = parse_int_list(c.n_list);
  require(ns.size() == 1, "types: --n takes a single blocklength");
  const int n = ns[0];
  require(n >= 1, "types: n must be >= 1");
  const Dist src = p.dist();
  const auto types = enum_types(n, p.nx);

  struct Row {
    TypeVec q;
    BigInt size;
    double kl = 0, pstar = 0, contribution = 0;
    std::string joint, digest;
  };
  std::vector<Row> rows;
  std::size_t best = 0;
  for (const auto& q : types) {
    Row r;
    r.q = q;
    r.size = type_class_size(q);
    r.kl = kl_divergence(q.dist(), src);
    if (p.d) {
      TypeOptimum o = qstar(q, p.spec_d(), p.spec_e());
      r.pstar = o.pstar_value;
      r.joint = counts_str(o.joint.counts());
      r.digest = fnv1a_hex(r.joint);
    } else {
      // Without d the eavesdropper sees nothing: the extension of the
      // degenerate joint type with a single Y symbol.
      JointTypeVec jt({p.nx, 1}, q.counts());
      JointTypeVec ext = pstar_n(jt, p.spec_e());
      r.pstar = type_conditional_mi(ext);
      r.joint = counts_str(jt.counts());
      r.digest = fnv1a_hex(r.joint);
    }
    r.contribution = r.kl + r.pstar;
    if (rows.empty() || r.contribution < rows[best].contribution - 1e-12) best = rows.size();
    rows.push_back(std::move(r));
  }

  CsvTable t({"type", "class_size", "kl_divergence", "qstar_joint", "qstar_digest", "pstar_value", "contribution",
              "dominant"});
  json arr = json::array();
  BigInt total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    total += r.size;
    t.add({counts_str(r.q.counts()), r.size.get_str(), csv_number(r.kl), r.joint, r.digest, csv_number(r.pstar),
           csv_number(r.contribution), i == best ? "1" : "0"});
    arr.push_back({{"type", r.q.counts()}, {"class_size", r.size.get_str()}, {"kl_divergence", num(r.kl)},
                   {"qstar_digest", r.digest}, {"pstar_value", num(r.pstar)},
                   {"contribution", num(r.contribution)}, {"dominant", i == best}});
  }
  Emitter out(c, "types");
  out.csv("types", t);
  out.json_doc("types", {{"n", n}, {"total_class_size", total.get_str()}, {"rows", arr}});
  out.finish(problem_digest(p), p.search.seed, seconds_since(t0));
  return 0;
}

// --- verify -------------------------------------------------------------------

int cmd_verify(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  if (c.list || c.suite.empty()) {
    for (const auto& s : verify::list_suites()) std::cout << s.name << "  " << s.description << "\n";
    if (c.suite.empty() && !c.list) throw ValidationError("verify: --suite is required");
    return 0;
  }
  const std::uint64_t seed = c.seed.value_or(1);
  std::vector<verify::Check> checks = verify::run_suite(c.suite, seed);
  CsvTable t({"suite", "property", "pass", "cases", "violations", "worst", "seconds", "detail", "counterexample"});
  json arr = json::array();
  bool ok = true;
  for (const auto& ch : checks) {
    ok = ok && ch.pass();
    t.add({c.suite, ch.property, ch.pass() ? "1" : "0", std::to_string(ch.cases), std::to_string(ch.violations),
           csv_number(ch.worst), csv_number(ch.seconds), ch.detail, ch.counterexample});
    arr.push_back({{"property", ch.property}, {"pass", ch.pass()}, {"cases", ch.cases},
                   {"violations", ch.violations}, {"worst", num(ch.worst)}, {"detail", ch.detail},
                   {"counterexample", ch.counterexample}, {"metrics", diag_json(ch.metrics)}});
  }
  Emitter out(c, "verify");
  out.csv("verify_" + c.suite, t);
  out.json_doc("verify_" + c.suite, {{"suite", c.suite}, {"seed", seed}, {"pass", ok}, {"checks", arr}});
  out.finish("", seed, seconds_since(t0));
  if (!ok) throw SuiteFailure("suite '" + c.suite + "' failed");
  return 0;
}

// --- sweep --------------------------------------------------------------------

ProblemSpec with_param(ProblemSpec p, const std::string& name, double v) {
  if (name == "D") {
    p.D = rationalize(v);
  } else if (name == "De") {
    p.De = rationalize(v);
  } else if (name == "R") {
    p.R = v;
  } else if (name == "r") {
    p.r = v;
  } else if (name == "alpha") {
    p.alpha = v;
  } else {
    throw ValidationError("sweep: unknown --param '" + name + "' (D, De, R, r, alpha)");
  }
  // Re-validate through the parser so a grid point gets the same checks as a file.
  return problem_from_json(problem_to_json(p));
}

int cmd_sweep(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec base = load_spec(c);
  require(!c.grid.empty(), "sweep: --grid is required");
  const std::vector<double> grid = parse_grid(c.grid);
  std::vector<ProblemSpec> specs;
  for (double g : grid) specs.push_back(with_param(base, c.param, g));

  std::vector<std::future<ExponentResult>> jobs;
  for (const auto& s : specs) jobs.push_back(std::async(std::launch::async, [&s] { return run_exponent(s); }));
  std::vector<ExponentResult> res;
  for (auto& j : jobs) res.push_back(j.get());

  CsvTable t({c.param, "value", "branch", "argmin_q"});
  json arr = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::string q;
    for (std::size_t k = 0; k < res[i].argmin_q.size(); ++k) q += (k ? " " : "") + csv_number(res[i].argmin_q[k]);
    t.add({csv_number(grid[i]), csv_number(res[i].value), res[i].branch, q});
    json row = exponent_json(res[i]);
    row[c.param] = grid[i];
    arr.push_back(row);
  }
  Emitter out(c, "sweep");
  out.csv("sweep", t);
  out.json_doc("sweep", {{"param", c.param}, {"spec", problem_to_json(base)}, {"rows", arr}});
  out.finish(problem_digest(base), base.search.seed, seconds_since(t0));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secrecy exponents and finite-n simulators"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* s, bool needs_spec) {
    auto* o = s->add_option("--spec", c.spec_path, "problem JSON");
    if (needs_spec) o->required()->check(CLI::ExistingFile);
    s->add_option("--out", c.out_dir, "output directory (default: stdout)");
    s->add_option("--seed", c.seed, "overrides options.seed");
    s->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* exponent = app.add_subcommand("exponent", "secrecy exponent for the spec's scenario");
  add_common(exponent, true);
  auto* crd = app.add_subcommand("crd", "conditional rate-distortion over a D_e grid");
  add_common(crd, true);
  crd->add_option("--grid", c.grid, "start:stop:step over D_e");
  crd->add_option("--channel", c.channel, "side information channel")->check(CLI::IsMember({"rd", "worst"}));
  auto* rd = app.add_subcommand("rd", "rate-distortion function over a D grid");
  add_common(rd, true);
  rd->add_option("--grid", c.grid, "start:stop:step over D");
  auto* sim = app.add_subcommand("simulate", "exact finite-n adversary success");
  add_common(sim, true);
  sim->add_option("--n", c.n_list, "blocklength or comma list")->required();
  sim->add_option("--strategies", c.strategies, "map,genie,two-stage,blind,keyed-map,key-guess");
  sim->add_option("--theory", c.theory, "asymptotic exponent for the trend table (computed if absent)");
  auto* types = app.add_subcommand("types", "per-type table at blocklength n");
  add_common(types, true);
  types->add_option("--n", c.n_list, "blocklength")->required();
  auto* ver = app.add_subcommand("verify", "run a property suite");
  add_common(ver, false);
  ver->add_option("--suite", c.suite, "suite name");
  ver->add_flag("--list", c.list, "list the suites");
  auto* sweep = app.add_subcommand("sweep", "exponent over a parameter grid");
  add_common(sweep, true);
  sweep->add_option("--grid", c.grid, "start:stop:step")->required();
  sweep->add_option("--param", c.param, "D, De, R, r or alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*exponent) return cmd_exponent(c);
    if (*crd) return cmd_crd(c);
    if (*rd) return cmd_rd(c);
    if (*sim) return cmd_simulate(c);
    if (*types) return cmd_types(c);
    if (*ver) return cmd_verify(c);
    if (*sweep) return cmd_sweep(c);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GuardError& e) {
    std::cerr << "guard exceeded: " << e.what() << "\n"
              << "reduce n or the alphabet sizes; exact evaluation grows as |X|^n |V|^n\n";
    return kExitGuard;
  } catch (const SuiteFailure& e) {
    std::cerr << "property failure: " << e.what() << "\n";
    return kExitSuite;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
