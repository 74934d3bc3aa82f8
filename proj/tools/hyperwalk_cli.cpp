// hyperwalk: command-line front end.
//
// Exit codes: 0 success, 1 acceptance failure, 2 usage error, 3 runtime fault.
// Errors are one line on stderr: "error: <kind>: <message>".

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hyperwalk.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace hyperwalk;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::optional<std::int64_t> n;
  std::optional<int> r;
  std::optional<double> eps;
  std::optional<double> lambda;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  std::optional<std::string> out;
  std::optional<std::string> report;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<std::string> mode;
  std::optional<double> omega;
  std::optional<std::string> stop;
  std::optional<double> C;
  std::vector<std::int64_t> L;
  std::vector<double> omegas;
  std::vector<int> only;
  bool doob = false;
  std::string config;
  json cells;  // mc plans from a config file
};

std::string one_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

// flags > config file > defaults
void apply_config(Settings& s) {
  if (s.config.empty()) return;
  std::ifstream in(s.config);
  if (!in) throw UsageError("cannot read config file " + s.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  static const std::set<std::string> known = {"n",    "r",      "eps",   "lambda", "p",     "seed",  "replicates",
                                              "out",  "report", "format", "threads", "mode", "omega", "stop",
                                              "C",    "L",      "omegas", "only",  "doob",  "cells"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
  }
  const bool param_flag = s.eps || s.lambda || s.p;
  try {
    auto fill = [&j](auto& field, const char* key) {
      using T = typename std::decay_t<decltype(field)>::value_type;
      if (!field && j.contains(key)) field = j[key].template get<T>();
    };
    fill(s.n, "n");
    fill(s.r, "r");
    if (!param_flag) {
      fill(s.eps, "eps");
      fill(s.lambda, "lambda");
      fill(s.p, "p");
    }
    fill(s.seed, "seed");
    fill(s.replicates, "replicates");
    fill(s.out, "out");
    fill(s.report, "report");
    fill(s.format, "format");
    fill(s.threads, "threads");
    fill(s.mode, "mode");
    fill(s.omega, "omega");
    fill(s.stop, "stop");
    fill(s.C, "C");
    if (s.L.empty() && j.contains("L")) s.L = j["L"].get<std::vector<std::int64_t>>();
    if (s.omegas.empty() && j.contains("omegas")) s.omegas = j["omegas"].get<std::vector<double>>();
    if (s.only.empty() && j.contains("only")) s.only = j["only"].get<std::vector<int>>();
    if (!s.doob && j.contains("doob")) s.doob = j["doob"].get<bool>();
    if (j.contains("cells")) s.cells = j["cells"];
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

template <typename T>
const T& need(const std::optional<T>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required ") + flag);
  return *v;
}

std::int64_t need_n(const Settings& s) {
  const auto n = need(s.n, "--n");
  if (n < 1 || n > (std::int64_t{1} << 31)) throw UsageError("--n must lie in [1, 2^31]");
  return n;
}

int need_r(const Settings& s) {
  const int r = need(s.r, "--r");
  if (r < kMinUniformity || r > kMaxUniformity) throw UsageError("--r must lie in [2, 10]");
  return r;
}

void check_common(const Settings& s) {
  const int given = (s.eps ? 1 : 0) + (s.lambda ? 1 : 0) + (s.p ? 1 : 0);
  if (given != 1) throw UsageError("exactly one of --eps, --lambda, --p is required");
  if (s.eps && !(std::isfinite(*s.eps) && *s.eps > -1.0)) throw UsageError("--eps must be finite and > -1");
  if (s.lambda && !(std::isfinite(*s.lambda) && *s.lambda > 0.0)) throw UsageError("--lambda must be > 0");
  if (s.p && !(*s.p > 0.0 && *s.p < 1.0)) throw UsageError("--p must lie in (0, 1)");
  if (s.replicates && *s.replicates < 1) throw UsageError("--replicates must be >= 1");
  if (s.omega && !(std::isfinite(*s.omega) && *s.omega > 0.0)) throw UsageError("--omega must be > 0");
  if (s.C && !(std::isfinite(*s.C) && *s.C > 0.0)) throw UsageError("--C must be > 0");
  if (s.format && *s.format != "csv" && *s.format != "json") throw UsageError("--format must be csv or json");
  if (s.mode && *s.mode != "implicit" && *s.mode != "explicit") throw UsageError("--mode must be implicit or explicit");
  for (auto L : s.L) {
    if (L < 1) throw UsageError("--L values must be >= 1");
  }
}

double lambda_of(const Settings& s, std::optional<std::int64_t> n, int r) {
  if (s.eps) return 1.0 + *s.eps;
  if (s.lambda) return *s.lambda;
  if (!n) throw UsageError("--p needs --n to define lambda");
  return branching_from_probability(*n, r, *s.p);
}

double p_of(const Settings& s, std::int64_t n, int r) {
  if (s.p) return *s.p;
  const double p = edge_probability(n, r, lambda_of(s, n, r));
  if (!(p > 0.0 && p < 1.0)) throw UsageError("edge probability " + std::to_string(p) + " outside (0, 1)");
  return p;
}

double eps_of(const Settings& s, std::optional<std::int64_t> n, int r) {
  return s.eps ? *s.eps : lambda_of(s, n, r) - 1.0;
}

EdgeMode mode_of(const Settings& s) {
  return s.mode && *s.mode == "explicit" ? EdgeMode::materialized : EdgeMode::implicit;
}

std::string fmt_of(const Settings& s, const char* fallback) { return s.format.value_or(fallback); }

// Writes to --out when given, else stdout.
void emit(const Settings& s, const std::string& text) {
  if (!s.out) {
    std::cout << text;
    return;
  }
  std::ofstream f(*s.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + *s.out + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + *s.out + " failed");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_theory(const Settings& s) {
  check_common(s);
  const int r = need_r(s);
  std::optional<std::int64_t> n;
  if (s.n) n = need_n(s);
  const double lambda = lambda_of(s, n, r);
  if (!(lambda > 1.0)) throw UsageError("theory needs a supercritical parameter (lambda > 1)");
  const auto dc = derive_constants(BranchingParams::from_lambda(r, lambda));
  json j;
  j["r"] = r;
  j["lambda"] = lambda;
  j["eps"] = eps_of(s, n, r);
  j["rho_lambda"] = dc.rho_lambda;
  j["lambda_star"] = dc.lambda_star;
  j["rho_r"] = dc.rho_r;
  j["rho_star"] = dc.rho_star;
  if (n) {
    const auto t = clt_targets(*n, r, lambda - 1.0);
    j["n"] = *n;
    j["clt"] = {{"mean_L1", t.mean_L1}, {"sd_L1", t.sd_L1}, {"mean_N1", t.mean_N1},
                {"sd_N1", t.sd_N1},     {"corr", t.corr}};
  }
  if (fmt_of(s, "json") == "json") {
    emit(s, dump(j));
  } else {
    std::ostringstream o;
    o << "key,value\n";
    for (const auto& [k, v] : j.items()) {
      if (v.is_object()) {
        for (const auto& [k2, v2] : v.items()) o << k << '.' << k2 << ',' << format_real(v2.get<double>()) << '\n';
      } else {
        o << k << ',' << format_real(v.get<double>()) << '\n';
      }
    }
    emit(s, o.str());
  }
  return 0;
}

StopRule parse_stop(const Settings& s, std::int64_t n, double lambda) {
  const std::string stop = s.stop.value_or("full");
  if (stop == "full") return StopRule::full();
  const std::string prefix = "giant:";
  if (stop.rfind(prefix, 0) != 0) throw UsageError("--stop must be full or giant:MARGIN");
  std::int64_t margin = 0;
  try {
    std::size_t used = 0;
    margin = std::stoll(stop.substr(prefix.size()), &used);
    if (used != stop.size() - prefix.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("--stop giant:MARGIN needs an integer margin");
  }
  if (margin < 0) throw UsageError("--stop margin must be >= 0");
  if (!(lambda > 1.0)) throw UsageError("--stop giant needs lambda > 1");
  return StopRule::after_first_giant(initial_cutoff(n, lambda - 1.0, s.omega.value_or(4.0)), margin);
}

int cmd_run(const Settings& s) {
  check_common(s);
  const auto n = need_n(s);
  const int r = need_r(s);
  if (fmt_of(s, "csv") != "csv") throw UsageError("run writes csv only");
  ExplorationConfig cfg;
  cfg.n = n;
  cfg.r = r;
  cfg.p = p_of(s, n, r);
  cfg.seed = s.seed.value_or(0);
  cfg.mode = mode_of(s);
  const double lambda = branching_from_probability(n, r, cfg.p);
  cfg.stop = parse_stop(s, n, lambda);
  cfg.validate();
  std::optional<DriftSequences> seq;
  std::int64_t t1 = 0;
  if (s.doob) {
    t1 = lambda > 1.0 ? std::min(n, giant_time(n, r, lambda)) : 0;
    seq = drift_sequences(n, r, cfg.p, t1);
  }

  const auto trace = explore(cfg);
  std::ostringstream tr;
  std::ostringstream comp;
  std::ostringstream doob;
  write_trace_csv(tr, trace);
  write_components_csv(comp, trace);
  if (seq) {
    const auto d = decompose(trace, *seq, {t1, lambda - 1.0, 0.1});
    write_doob_csv(doob, d, approx_gap(trace, d));
  }
  if (s.out) {
    const std::filesystem::path dir(*s.out);
    std::filesystem::create_directories(dir);
    write_file(dir / "trace.csv", tr.str());
    write_file(dir / "components.csv", comp.str());
    if (seq) write_file(dir / "doob.csv", doob.str());
  } else {
    std::cout << tr.str() << '\n' << comp.str();
    if (seq) std::cout << '\n' << doob.str();
  }
  return 0;
}

std::vector<Cell> plan_cells(const Settings& s) {
  std::vector<Cell> cells;
  if (!s.cells.is_null()) {
    if (!s.cells.is_array() || s.cells.empty()) throw UsageError("config cells must be a non-empty array");
    try {
      for (const auto& c : s.cells) {
        Settings one;
        one.n = c.at("n").get<std::int64_t>();
        one.r = c.at("r").get<int>();
        if (c.contains("eps")) one.eps = c["eps"].get<double>();
        if (c.contains("lambda")) one.lambda = c["lambda"].get<double>();
        if (c.contains("p")) one.p = c["p"].get<double>();
        if (c.contains("mode")) one.mode = c["mode"].get<std::string>();
        check_common(one);
        const auto n = need_n(one);
        const int r = need_r(one);
        cells.push_back({n, r, eps_of(one, n, r), mode_of(one)});
      }
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad cell in config: ") + e.what());
    }
    return cells;
  }
  check_common(s);
  const auto n = need_n(s);
  const int r = need_r(s);
  cells.push_back({n, r, eps_of(s, n, r), mode_of(s)});
  return cells;
}

json mc_report(const ExperimentPlan& plan, const std::vector<CellReport>& reports) {
  json j;
  j["seed"] = plan.master_seed;
  j["replicates"] = plan.replicates;
  j["omega"] = plan.omega;
  bool all = true;
  json cells = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    json c;
    c["cell"] = i;
    c["n"] = rep.cell.n;
    c["r"] = rep.cell.r;
    c["eps"] = rep.cell.eps;
    c["mode"] = to_string(rep.cell.mode);
    c["R"] = rep.replicates;
    c["ties"] = rep.agg.ties;
    if (rep.targets) {
      c["targets"] = {{"mean_L1", rep.targets->mean_L1}, {"sd_L1", rep.targets->sd_L1},
                      {"mean_N1", rep.targets->mean_N1}, {"sd_N1", rep.targets->sd_N1},
                      {"corr", rep.targets->corr}};
    }
    json verdicts = json::array();
    bool pass = true;
    for (const auto& v : clt_verdicts(rep)) {
      verdicts.push_back({{"name", v.name}, {"value", v.value}, {"pass", v.pass}});
      pass = pass && v.pass;
    }
    c["verdicts"] = verdicts;
    // null when the cell has no CLT targets or too few replicates
    c["pass"] = verdicts.empty() ? json(nullptr) : json(pass);
    c["warnings"] = rep.warnings;
    all = all && pass;
    cells.push_back(c);
  }
  j["cells"] = cells;
  j["pass"] = all;
  return j;
}

int cmd_mc(const Settings& s) {
  if (s.cells.is_null()) check_common(s);
  ExperimentPlan plan;
  plan.cells = plan_cells(s);
  plan.replicates = s.replicates.value_or(100);
  plan.master_seed = s.seed.value_or(0);
  plan.omega = s.omega.value_or(4.0);
  plan.threads = s.threads.value_or(0);
  plan.validate();
  const auto reports = run_experiment(plan);
  const json report = mc_report(plan, reports);
  if (fmt_of(s, "csv") == "json") {
    emit(s, dump(report));
  } else {
    std::ostringstream o;
    write_mc_csv(o, reports);
    emit(s, o.str());
  }
  if (s.report) write_file(*s.report, dump(report));
  return 0;
}

json tails_json(const TailReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.rows) {
    rows.push_back({{"L", row.L},
                    {"exceed_count", row.exceed},
                    {"R", row.R},
                    {"p_hat", row.p_hat},
                    {"wilson_lo", row.wilson.lo},
                    {"wilson_hi", row.wilson.hi},
                    {"bound", row.bound}});
  }
  json j;
  j["rows"] = rows;
  if (rep.fit) j["fit"] = {{"slope", rep.fit->slope}, {"intercept", rep.fit->intercept}, {"r2", rep.fit->r2}};
  j["strictly_decreasing"] = rep.strictly_decreasing;
  j["below_bound"] = rep.below_bound;
  j["measurable"] = rep.measurable;
  j["notes"] = rep.notes;
  return j;
}

int cmd_tails(const Settings& s) {
  check_common(s);
  const auto n = need_n(s);
  const int r = need_r(s);
  const double eps = eps_of(s, n, r);
  if (eps == 0.0) throw UsageError("tails needs lambda != 1");
  const std::uint64_t R = s.replicates.value_or(1000);
  std::vector<std::int64_t> grid = s.L;
  if (grid.empty()) {
    for (double t : {3.0, 4.5, 6.0, 8.0}) grid.push_back(std::max<std::int64_t>(1, std::llround(t / (eps * eps))));
  }
  const TailOptions opt{s.seed.value_or(0), s.C.value_or(10.0), s.threads.value_or(0), 0};
  json j;
  TailReport rows;
  if (eps < 0.0) {
    if (!(eps > -1.0)) throw UsageError("subcritical tails need lambda in (0, 1)");
    rows = tail_subcritical(n, r, -eps, grid, R, opt);
    j = tails_json(rows);
    j["regime"] = "subcritical";
    j["statistic"] = "L1";
  } else {
    const std::vector<double> omegas = s.omegas.empty() ? std::vector<double>{2, 3, 4, 5} : s.omegas;
    const auto rep = tail_supercritical(n, r, eps, omegas, grid, R, opt);
    rows = rep.l2;
    j = tails_json(rows);
    j["regime"] = "supercritical";
    j["statistic"] = "L2";
    json conc = json::array();
    for (const auto& c : rep.concentration) {
      conc.push_back({{"omega", c.omega}, {"exceed_count", c.exceed}, {"R", c.R}, {"p_hat", c.p_hat},
                      {"wilson_lo", c.wilson.lo}, {"wilson_hi", c.wilson.hi}});
    }
    j["concentration"] = conc;
    j["non_increasing"] = rep.non_increasing;
  }
  if (fmt_of(s, "csv") == "json") {
    emit(s, dump(j));
  } else {
    std::ostringstream o;
    write_tails_csv(o, rows);
    emit(s, o.str());
  }
  return 0;
}

int cmd_verify(const Settings& s) {
  VerifyOptions opt;
  if (s.seed) opt.seed = *s.seed;
  opt.threads = s.threads.value_or(0);
  opt.only = s.only;
  for (int id : opt.only) {
    if (id < 1 || id > static_cast<int>(criteria().size())) throw UsageError("--only ids must lie in [1, 11]");
  }
  const bool as_json = fmt_of(s, "csv") == "json";
  std::ostringstream text;
  const auto results = run_acceptance(opt, [&](const CriterionResult& r) {
    if (!as_json && !s.out) std::cout << format_result(r) << std::endl;
    text << format_result(r) << '\n';
  });
  bool all = true;
  json arr = json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds}, {"detail", r.detail}});
  }
  if (as_json) {
    emit(s, dump(json{{"pass", all}, {"criteria", arr}}));
  } else if (s.out) {
    emit(s, text.str());
  }
  return all ? 0 : 1;
}

int cmd_oracle(const Settings& s) {
  check_common(s);
  const auto n = need_n(s);
  const int r = need_r(s);
  const double p = s.p ? *s.p : edge_probability(n, r, lambda_of(s, n, r));
  const auto d = enumerate_all(n, r, p);
  if (fmt_of(s, "json") == "json") {
    json support = json::array();
    for (const auto& o : d.support) {
      support.push_back({{"L1", o.L1}, {"N1", o.N1}, {"L2", o.L2}, {"probability", o.probability}});
    }
    json j;
    j["n"] = n;
    j["r"] = r;
    j["p"] = p;
    j["support"] = support;
    j["l1_law"] = d.l1_law();
    j["mean_L1"] = d.mean_L1();
    j["total"] = d.total();
    emit(s, dump(j));
  } else {
    std::ostringstream o;
    o << "L1,N1,L2,probability\n";
    for (const auto& x : d.support) o << x.L1 << ',' << x.N1 << ',' << x.L2 << ',' << format_real(x.probability) << '\n';
    emit(s, o.str());
  }
  return 0;
}

void add_model_flags(CLI::App* app, Settings& s) {
  app->add_option("--n", s.n, "number of vertices");
  app->add_option("--r", s.r, "uniformity, 2..10");
  app->add_option("--eps", s.eps, "lambda = 1 + eps");
  app->add_option("--lambda", s.lambda, "branching parameter");
  app->add_option("--p", s.p, "edge probability");
  app->add_option("--config", s.config, "JSON config file (flags take precedence)");
  app->add_option("--format", s.format, "csv or json");
  app->add_option("--out", s.out, "output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exploration of random r-uniform hypergraphs near criticality", "hyperwalk"};
  app.require_subcommand(1);
  Settings s;

  auto* theory = app.add_subcommand("theory", "derived constants and CLT targets as JSON");
  add_model_flags(theory, s);

  auto* run = app.add_subcommand("run", "one exploration: trace, component table, optional Doob dump");
  add_model_flags(run, s);
  run->add_option("--seed", s.seed, "seed");
  run->add_option("--mode", s.mode, "implicit or explicit");
  run->add_option("--stop", s.stop, "full or giant:MARGIN");
  run->add_option("--omega", s.omega, "window width for the giant stop");
  run->add_flag("--doob", s.doob, "also write the Doob decomposition");

  auto* mc = app.add_subcommand("mc", "Monte Carlo over a plan of cells");
  add_model_flags(mc, s);
  mc->add_option("--seed", s.seed, "master seed");
  mc->add_option("--replicates", s.replicates, "replicates per cell");
  mc->add_option("--threads", s.threads, "worker threads (0 = all)");
  mc->add_option("--mode", s.mode, "implicit or explicit");
  mc->add_option("--omega", s.omega, "window width");
  mc->add_option("--report", s.report, "JSON report path");

  auto* tails = app.add_subcommand("tails", "tail probabilities with Wilson intervals");
  add_model_flags(tails, s);
  tails->add_option("--seed", s.seed, "master seed");
  tails->add_option("--replicates", s.replicates, "replicates");
  tails->add_option("--threads", s.threads, "worker threads (0 = all)");
  tails->add_option("--L", s.L, "L grid")->delimiter(',');
  tails->add_option("--omega", s.omegas, "omega grid (supercritical)")->delimiter(',');
  tails->add_option("--C", s.C, "bound constant");

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--seed", s.seed, "master seed");
  verify->add_option("--threads", s.threads, "worker threads (0 = all)");
  verify->add_option("--only", s.only, "criterion ids")->delimiter(',');
  verify->add_option("--format", s.format, "csv (text lines) or json");
  verify->add_option("--out", s.out, "output path");
  verify->add_option("--config", s.config, "JSON config file");

  auto* oracle = app.add_subcommand("oracle", "exact (L1, N1, L2) law by enumeration");
  add_model_flags(oracle, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << " (see hyperwalk --help)" << std::endl;
    return 2;
  }

  try {
    apply_config(s);
    if (*theory) return cmd_theory(s);
    if (*run) return cmd_run(s);
    if (*mc) return cmd_mc(s);
    if (*tails) return cmd_tails(s);
    if (*verify) return cmd_verify(s);
    if (*oracle) return cmd_oracle(s);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << one_line(e.what()) << std::endl;
    return 3;
  }
  return 3;
}
