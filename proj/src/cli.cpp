#include "hardy/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hardy/constructions.hpp"
#include "hardy/errors.hpp"
#include "hardy/hardy_estimation.hpp"
#include "hardy/mean_families.hpp"
#include "hardy/serialize.hpp"
#include "hardy/weight_sequences.hpp"

namespace hardy::cli {

namespace {

struct RunConfig {
  std::string format = "text";
  std::string out_path;
  std::string mean;
  std::string weights = "ones";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool allow_float = false;

  // constant
  std::string copson;
  bool arithmetic = false;
  bool partial = false;

  // estimate
  std::string method = "finite";
  std::size_t starts = 8;
  double q = 0.5;
  double window = 0.5;
  std::vector<double> y_grid;
  std::vector<double> scale_box;

  // verify
  std::size_t trials = 0;
  double tol = -1.0;
  std::vector<double> x;
  std::vector<std::string> w;
  std::vector<double> values;
  std::vector<std::string> lengths;
  std::vector<double> grid;
  std::vector<std::size_t> blocks;
  bool search = false;
  bool mean_mode = false;
  std::size_t kmax = 25;
  std::string bound;

  // explore
  std::vector<double> s_values;
};

// Text output uses 15 significant digits; JSON keeps full precision.
std::string short_double(double v) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

struct Report {
  std::string kind;
  nlohmann::json body;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<std::pair<std::string, std::string>> text;
  int exit_code = 0;
};

std::string render(const Report& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << document(r.kind, r.body).dump(2) << "\n";
  } else if (format == "csv") {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << "\n";
    };
    line(r.csv_header);
    for (const auto& row : r.csv_rows) line(row);
  } else {
    for (const auto& [key, value] : r.text) {
      if (key.empty()) {
        os << value << "\n";
      } else {
        os << key << ": " << value << "\n";
      }
    }
  }
  return os.str();
}

std::vector<Rational> parse_rationals(const std::vector<std::string>& items, bool allow_float, const char* what) {
  std::vector<Rational> out;
  for (const auto& s : items) {
    if (!allow_float && s.find('.') != std::string::npos) {
      throw InvalidArgument(std::string(what) + ": decimal '" + s + "' needs --float (use p/q for exact values)");
    }
    out.push_back(parse_rational(s));
  }
  return out;
}

OptimizerConfig optimizer(const RunConfig& c) {
  OptimizerConfig opt;
  opt.starts = c.starts;
  opt.seed = c.seed;
  opt.scale_box = c.scale_box;
  return opt;
}

double tol_or(const RunConfig& c, double fallback) { return c.tol >= 0.0 ? c.tol : fallback; }

Report estimate_report(const HardyEstimate& e, const RunConfig& c) {
  Report r;
  r.kind = "estimate";
  r.body = to_json(e);
  r.body["mean"] = c.mean;
  r.body["weights"] = c.weights;
  r.csv_header = {"method", "mean", "weights", "N", "value", "direction"};
  r.csv_rows.push_back({e.method, c.mean, c.weights, std::to_string(e.n), format_double(e.value), to_string(e.direction)});
  r.text = {{"method", e.method},
            {"mean", c.mean},
            {"weights", c.weights},
            {"N", std::to_string(e.n)},
            {"value", short_double(e.value)},
            {"direction", to_string(e.direction)}};
  for (const auto& w : e.warnings) r.text.push_back({"warning", w});
  return r;
}

Report check_report(const CheckReport& cr) {
  Report r;
  r.kind = "check";
  r.body = to_json(cr);
  r.csv_header = {"check", "pass", "instances", "worst_margin"};
  r.csv_rows.push_back({cr.check, cr.pass ? "true" : "false", std::to_string(cr.instances), format_double(cr.worst_margin)});
  r.text = {{"check", cr.check},
            {"result", cr.pass ? "pass" : "FAIL"},
            {"instances", std::to_string(cr.instances)},
            {"worst_margin", short_double(cr.worst_margin)}};
  for (const auto& n : cr.notes) r.text.push_back({"note", n});
  if (!cr.pass) r.text.push_back({"witness", cr.witness.dump()});
  r.exit_code = cr.pass ? 0 : 1;
  return r;
}

// ---------------------------------------------------------------------------

Report cmd_constant(const RunConfig& c) {
  Report r;
  r.kind = "constant";
  r.csv_header = {"quantity", "value", "direction"};
  if (!c.copson.empty()) {
    double p = parse_extended_real(c.copson);
    double v = copson_constant(p);
    r.body = {{"quantity", "copson"}, {"p", c.copson}, {"value", json_number(v)}, {"direction", "exact"}};
    r.csv_rows.push_back({"copson:" + c.copson, format_double(v), "exact"});
    r.text = {{"", short_double(v)}};
    return r;
  }
  if (!c.arithmetic) throw InvalidArgument("constant: pass --copson P or --arithmetic --weights W");
  WeightSeq w = make_sequence(c.weights, c.allow_float);
  std::size_t n = c.n ? c.n : 1000;
  HardyEstimate e = arithmetic_hardy(w, n, c.partial ? SeriesMode::partial : SeriesMode::certified);
  r.body = to_json(e);
  r.body["quantity"] = "arithmetic";
  r.body["weights"] = c.weights;
  r.csv_rows.push_back({"arithmetic:" + c.weights, format_double(e.value), to_string(e.direction)});
  r.text = {{"value", short_double(e.value)}, {"direction", to_string(e.direction)}, {"N", std::to_string(e.n)}};
  return r;
}

Report cmd_estimate(const RunConfig& c) {
  MeanSpec mean = parse_mean(c.mean);
  std::size_t n = c.n ? c.n : 256;
  if (c.method == "nonweighted-limit") return estimate_report(nonweighted_limit(mean, n), c);
  WeightSeq w = make_sequence(c.weights, c.allow_float);
  if (c.method == "finite") return estimate_report(finite_lower_bound(mean, w, n, optimizer(c)), c);
  if (c.method == "geometric-probe") return estimate_report(geometric_probe(mean, w, c.q, n), c);
  if (c.method == "kedlaya") {
    std::vector<double> grid = c.y_grid.empty() ? default_y_grid() : c.y_grid;
    return estimate_report(kedlaya_estimate(mean, w, grid, n, c.window), c);
  }
  throw InvalidArgument("estimate: unknown method '" + c.method + "'");
}

Report cmd_diagnose(const RunConfig& c) {
  WeightSeq w = make_sequence(c.weights, c.allow_float);
  RatioReport rr = ratio_diagnostics(w, c.n ? c.n : 64);
  Report r;
  r.kind = "ratios";
  r.body = to_json(rr);
  r.body["weights"] = c.weights;
  r.csv_header = {"k", "ratio", "max_term_ratio"};
  for (std::size_t k = 0; k < rr.ratios.size(); ++k) {
    r.csv_rows.push_back({std::to_string(k + 1), format_double(rr.ratios[k]), format_double(rr.max_term_ratios[k])});
  }
  r.text = {{"weights", c.weights},
            {"N", std::to_string(rr.n)},
            {"ratios_nonincreasing", rr.is_nonincreasing ? "yes" : "no"},
            {"ratio_limit", short_double(rr.ratio_limit_estimate) + (rr.ratio_limit_closed_form ? " (closed form)" : "")},
            {"verdict", to_string(rr.verdict)},
            {"justification", rr.justification}};
  return r;
}

Report cmd_axioms(const RunConfig& c) {
  MeanSpec mean = parse_mean(c.mean);
  AxiomReport ar = check_axioms(mean, c.trials ? c.trials : 200, c.seed, tol_or(c, 1e-9));
  Report r;
  r.kind = "axioms";
  r.body = to_json(ar);
  r.csv_header = {"axiom", "required", "trials", "failures", "worst_defect", "passed"};
  r.text = {{"mean", ar.mean}};
  for (const auto& o : ar.outcomes) {
    r.csv_rows.push_back({to_string(o.axiom), o.required ? "true" : "false", std::to_string(o.trials),
                          std::to_string(o.failures), format_double(o.worst_defect), o.passed() ? "true" : "false"});
    std::string status = o.passed() ? "pass" : (o.required ? "FAIL" : "fails (not claimed)");
    r.text.push_back({to_string(o.axiom), status + " (" + std::to_string(o.trials) + " trials, worst defect " +
                                              short_double(o.worst_defect) + ")"});
  }
  r.text.push_back({"result", ar.ok() ? "pass" : "FAIL"});
  r.exit_code = ar.ok() ? 0 : 1;
  return r;
}

Report cmd_jcin(const RunConfig& c) {
  MeanSpec mean = parse_mean(c.mean);
  if (c.search) {
    CounterexampleSearch s = search_jcin_counterexample(mean, c.trials ? c.trials : 1000, c.seed, tol_or(c, 1e-10));
    Report r;
    r.kind = "jcin-search";
    r.body = {{"mean", c.mean}, {"found", s.found}, {"instances", s.instances}, {"verdict", s.verdict}};
    r.body["failing"] = s.failing ? to_json(*s.failing) : nlohmann::json(nullptr);
    r.csv_header = {"mean", "found", "instances"};
    r.csv_rows.push_back({c.mean, s.found ? "true" : "false", std::to_string(s.instances)});
    r.text = {{"mean", c.mean}, {"instances", std::to_string(s.instances)}, {"verdict", s.verdict}};
    if (s.failing) r.text.push_back({"witness", s.failing->witness.dump()});
    return r;
  }
  if (c.x.empty()) throw InvalidArgument("verify jcin: pass --x and --w, or --search");
  WeightVector w = WeightVector::exact(parse_rationals(c.w, false, "verify jcin --w"));
  return check_report(verify_jcin(mean, PointVector(c.x), w, tol_or(c, 1e-10)));
}

Report cmd_cut(const RunConfig& c) {
  if (c.blocks.empty()) throw InvalidArgument("verify cut: --blocks is required");
  WeightSeq lam = make_sequence(c.weights, c.allow_float);
  WeightSeq psi = coarsen(lam, c.blocks, true);
  std::size_t n = c.n ? c.n : 100;
  MeanSpec mean = parse_mean(c.mean);
  if (is_arithmetic(mean) && !c.mean_mode) return check_report(verify_cut(ClosedFormArithmetic{}, psi, lam, n, tol_or(c, 1e-9)));
  return check_report(verify_cut(mean, psi, lam, n, tol_or(c, 1e-6), optimizer(c)));
}

Report cmd_decreasing(const RunConfig& c) {
  MeanSpec mean = parse_mean(c.mean);
  if (c.values.empty()) throw InvalidArgument("verify decreasing: --values and --lengths are required");
  WeightVector lengths = c.allow_float
                             ? WeightVector::floating([&] {
                                 std::vector<double> d;
                                 for (const auto& q : parse_rationals(c.lengths, true, "--lengths")) d.push_back(to_double(q));
                                 return d;
                               }())
                             : WeightVector::exact(parse_rationals(c.lengths, false, "verify decreasing --lengths"));
  StepFunction f(c.values, lengths);
  std::vector<double> grid = c.grid;
  if (grid.empty()) {
    auto points = f.breakpoints();
    grid.assign(points.begin() + 1, points.end());
  }
  return check_report(verify_decreasing(mean, f, grid, tol_or(c, 1e-12)));
}

Report cmd_lsc(const RunConfig& c) {
  LscTable t = reproduce_lsc_example(c.kmax, c.n ? c.n : 64, tol_or(c, 1e-9));
  Report r;
  r.kind = "lsc-example";
  r.body = to_json(t);
  r.csv_header = {"k", "value"};
  for (const auto& row : t.rows) r.csv_rows.push_back({std::to_string(row.k), format_double(row.value)});
  r.text = {{"baseline", short_double(t.baseline)}, {"limit_target", short_double(t.limit_target)}};
  for (const auto& row : t.rows) r.text.push_back({"k=" + std::to_string(row.k), short_double(row.value)});
  r.text.push_back({"limit_error", short_double(t.limit_error)});
  r.text.push_back({"min_margin", short_double(t.min_margin)});
  for (std::size_t k : t.below_baseline) r.text.push_back({"below_baseline", "k=" + std::to_string(k)});
  r.text.push_back({"result", t.pass ? "pass" : "FAIL"});
  r.exit_code = t.pass ? 0 : 1;
  return r;
}

Report cmd_mu1(const RunConfig& c) {
  MeanSpec mean = parse_mean(c.mean);
  std::optional<double> bound;
  if (!c.bound.empty()) bound = parse_extended_real(c.bound);
  Mu1Sweep s = verify_mu1_sweep(mean, c.n ? c.n : 256, c.trials ? c.trials : 50, c.seed, bound, tol_or(c, 1e-3),
                                optimizer(c));
  Report r = check_report(s.report);
  r.body["values"] = s.values;
  return r;
}

Report cmd_explore(const RunConfig& c) {
  MeanSpec mean = parse_mean(c.mean);
  std::vector<double> s_values = c.s_values;
  if (s_values.empty()) s_values = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0};
  std::size_t n = c.n ? c.n : 128;
  Report r;
  r.kind = "explore";
  r.body = {{"mean", c.mean}, {"N", n}, {"informational", true}};
  nlohmann::json rows = nlohmann::json::array();
  r.csv_header = {"s", "value", "direction"};
  r.text = {{"", "informational sweep over weights s^n; no pass/fail"}};
  for (double s : s_values) {
    if (!(s > 0.0)) throw InvalidArgument("explore: s must be positive");
    WeightSeq w = s == 1.0 ? WeightSeq::ones() : WeightSeq::geometric_float(s);
    HardyEstimate e = is_arithmetic(mean) ? arithmetic_hardy(w, n, SeriesMode::partial)
                                          : finite_lower_bound(mean, w, n, optimizer(c));
    rows.push_back({{"s", s}, {"value", json_number(e.value)}, {"direction", to_string(e.direction)}});
    r.csv_rows.push_back({format_double(s), format_double(e.value), to_string(e.direction)});
    r.text.push_back({"s=" + short_double(s), short_double(e.value) + " (" + to_string(e.direction) + ")"});
  }
  r.body["rows"] = rows;
  return r;
}

void add_format(CLI::App* app, RunConfig& c) {
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app->add_option("--out", c.out_path, "Write the report to this file instead of stdout");
}

void add_mean(CLI::App* app, RunConfig& c, const char* fallback) {
  app->add_option("--mean", c.mean,
                  std::string("Mean descriptor: arithmetic, geometric, harmonic, min, max, power:P, "
                              "quasiarithmetic:NAME (default ") + fallback + ")");
}

void add_weights(CLI::App* app, RunConfig& c) {
  app->add_option("--weights", c.weights,
                  "Weight sequence: ones, dyadic, geometric:Q, perturbed-dyadic:K, power:A (Q, A as p/q literals)");
  app->add_flag("--float", c.allow_float, "Accept decimal literals, giving floating-point weights");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"hardy: weighted means, weighted Hardy constants, and checks of their comparison theorems", "hardy"};
  app.require_subcommand(1);

  auto* constant = app.add_subcommand(
      "constant", "Closed-form Hardy constants: the Copson constant C(p) of the unweighted power mean, or the "
                  "arithmetic-mean constant Σ λ_n/Λ_n of a weight sequence");
  constant->add_option("--copson", c.copson, "Power exponent p (decimal, p/q, or ±inf)");
  constant->add_flag("--arithmetic", c.arithmetic, "Arithmetic-mean constant of --weights");
  constant->add_flag("--partial", c.partial, "Truncated series at N (lower bound) instead of the certified value");
  constant->add_option("--N", c.n, "Truncation (default 1000)");
  add_weights(constant, c);
  add_format(constant, c);

  auto* estimate = app.add_subcommand(
      "estimate", "Estimate the weighted Hardy constant of a mean: finite-N extremal search (lower bound), "
                  "geometric test sequences, Kedlaya-type liminf formula, or the unweighted limit n·M(1, 1/2, ..., 1/n)");
  add_mean(estimate, c, "arithmetic");
  add_weights(estimate, c);
  estimate->add_option("--method", c.method, "finite | geometric-probe | kedlaya | nonweighted-limit")
      ->check(CLI::IsMember({"finite", "geometric-probe", "kedlaya", "nonweighted-limit"}));
  estimate->add_option("--N", c.n, "Truncation (default 256)");
  estimate->add_option("--seed", c.seed, "Seed for the multistart search");
  estimate->add_option("--starts", c.starts, "Number of starts for the finite search");
  estimate->add_option("--q", c.q, "Ratio for geometric-probe, in (0, 1)");
  estimate->add_option("--window", c.window, "Liminf window fraction for kedlaya, in (0, 1]");
  estimate->add_option("--y-grid", c.y_grid, "Comma-separated y values for kedlaya")->delimiter(',');
  estimate->add_option("--scale-box", c.scale_box, "Scales Σλx to search, for non-homogeneous means")->delimiter(',');
  add_format(estimate, c);

  auto* diagnose = app.add_subcommand(
      "diagnose", "Ratio diagnostics λ_n/Λ_n of a weight sequence and the divergence verdict for Λ_n");
  add_weights(diagnose, c);
  diagnose->add_option("--N", c.n, "Number of terms (default 64)");
  add_format(diagnose, c);

  auto* verify = app.add_subcommand("verify", "Executable checks of the structural results on weighted means");
  verify->require_subcommand(1);

  auto* axioms = verify->add_subcommand(
      "axioms", "Weighted-mean axioms (nullhomogeneity, reduction, mean value, elimination) and the declared "
                "symmetry, monotonicity, Jensen concavity, and homogeneity on random instances");
  add_mean(axioms, c, "arithmetic");
  axioms->add_option("--trials", c.trials, "Trials per property (default 200)");
  axioms->add_option("--seed", c.seed, "Random seed");
  axioms->add_option("--tol", c.tol, "Relative tolerance (default 1e-9)");
  add_format(axioms, c);

  auto* jcin = verify->add_subcommand(
      "jcin", "Prefix-mean inequality against the same-sum nonincreasing rearrangement, for monotone concave "
              "means; --search looks for counterexamples for other means");
  add_mean(jcin, c, "arithmetic");
  jcin->add_option("--x", c.x, "Comma-separated positive points")->delimiter(',');
  jcin->add_option("--w", c.w, "Comma-separated rational weights (p/q)")->delimiter(',');
  jcin->add_flag("--search", c.search, "Random counterexample search (inconclusive when nothing is found)");
  jcin->add_option("--trials", c.trials, "Instances for --search (default 1000)");
  jcin->add_option("--seed", c.seed, "Random seed for --search");
  jcin->add_option("--tol", c.tol, "Tolerance (default 1e-10)");
  add_format(jcin, c);

  auto* cut = verify->add_subcommand(
      "cut", "Cut theorem: the Hardy constant does not grow when the weights are coarsened (ψ ≺ λ); the "
             "arithmetic mean is checked in exact rationals, other means through the finite search");
  add_mean(cut, c, "arithmetic");
  add_weights(cut, c);
  cut->add_option("--blocks", c.blocks, "Block sizes, repeated cyclically")->delimiter(',');
  cut->add_option("--N", c.n, "Terms of λ examined (default 100)");
  cut->add_flag("--mean-mode", c.mean_mode, "Use the finite search even for the arithmetic mean");
  cut->add_option("--seed", c.seed, "Seed for the finite search");
  cut->add_option("--starts", c.starts, "Starts for the finite search");
  cut->add_option("--tol", c.tol, "Tolerance");
  add_format(cut, c);

  auto* decreasing = verify->add_subcommand(
      "decreasing", "Running means u ↦ M of a nonincreasing step function over [0, u) are nonincreasing");
  add_mean(decreasing, c, "arithmetic");
  decreasing->add_option("--values", c.values, "Step values, comma-separated")->delimiter(',');
  decreasing->add_option("--lengths", c.lengths, "Step lengths as p/q, comma-separated")->delimiter(',');
  decreasing->add_option("--grid", c.grid, "Evaluation points u (default: the breakpoints)")->delimiter(',');
  decreasing->add_flag("--float", c.allow_float, "Accept decimal lengths");
  decreasing->add_option("--tol", c.tol, "Tolerance (default 1e-12)");
  add_format(decreasing, c);

  auto* lsc = verify->add_subcommand(
      "lsc-example", "Lower semicontinuity example: arithmetic constants of the perturbed dyadic weights stay "
                     "above the dyadic constant and tend to it plus 1/2");
  lsc->add_option("--kmax", c.kmax, "Largest perturbed index (default 25)");
  lsc->add_option("--N", c.n, "Starting truncation for the certified series (default 64)");
  lsc->add_option("--tol", c.tol, "Tolerance on the comparison (default 1e-9)");
  add_format(lsc, c);

  auto* mu1 = verify->add_subcommand(
      "mu1-sweep", "Weighted constants of a symmetric monotone mean never exceed the unweighted one: finite "
                   "search over random rational weights against the Copson constant");
  add_mean(mu1, c, "power:1/2");
  mu1->add_option("--N", c.n, "Truncation (default 256)");
  mu1->add_option("--trials", c.trials, "Random weight vectors (default 50)");
  mu1->add_option("--seed", c.seed, "Random seed");
  mu1->add_option("--starts", c.starts, "Starts per finite search");
  mu1->add_option("--bound", c.bound, "Bound to test against (default: Copson constant for power means)");
  mu1->add_option("--tol", c.tol, "Tolerance (default 1e-3)");
  add_format(mu1, c);

  auto* explore = app.add_subcommand(
      "explore", "Informational sweep of the Hardy constant over geometric weights s^n as s tends to 1, "
                 "probing continuity in the weights; no pass/fail");
  add_mean(explore, c, "arithmetic");
  explore->add_option("--s", c.s_values, "Comma-separated ratios s")->delimiter(',');
  explore->add_option("--N", c.n, "Truncation (default 128)");
  explore->add_option("--seed", c.seed, "Seed for the finite search");
  explore->add_option("--starts", c.starts, "Starts for the finite search");
  add_format(explore, c);

  std::vector<const char*> argv{"hardy"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (c.mean.empty()) c.mean = mu1->parsed() ? "power:1/2" : "arithmetic";

  Report report;
  try {
    if (constant->parsed()) {
      report = cmd_constant(c);
    } else if (estimate->parsed()) {
      report = cmd_estimate(c);
    } else if (diagnose->parsed()) {
      report = cmd_diagnose(c);
    } else if (axioms->parsed()) {
      report = cmd_axioms(c);
    } else if (jcin->parsed()) {
      report = cmd_jcin(c);
    } else if (cut->parsed()) {
      report = cmd_cut(c);
    } else if (decreasing->parsed()) {
      report = cmd_decreasing(c);
    } else if (lsc->parsed()) {
      report = cmd_lsc(c);
    } else if (mu1->parsed()) {
      report = cmd_mu1(c);
    } else {
      report = cmd_explore(c);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n" << "Run with --help for usage.\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return 3;
  } catch (const InconclusiveError& e) {
    err << "inconclusive: " << e.what() << "\n";
    return 3;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 3;
  }

  std::string text = render(report, c.format);
  if (c.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << c.out_path << "' for writing\n";
      return 2;
    }
    file << text;
  }
  return report.exit_code;
}

}  // namespace hardy::cli
