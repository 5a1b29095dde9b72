#include "hardy/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/mean_families.hpp"
#include "hardy/parallel.hpp"

namespace hardy {

namespace {

nlohmann::json to_json_list(std::span<const double> v) { return nlohmann::json(std::vector<double>(v.begin(), v.end())); }

nlohmann::json to_json_list(const std::vector<Rational>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rearrangement

RearrangementResult rearrange_samesum(const PointVector& x, const WeightVector& w, std::size_t budget) {
  require_same_length(x.size(), w.size(), "rearrange_samesum");
  if (!w.is_exact()) throw InvalidArgument("rearrange_samesum requires exact rational weights");
  const auto& weights = w.exact_values();
  const std::size_t n = x.size();

  Integer scale = 1;
  for (const auto& q : weights) scale = boost::multiprecision::lcm(scale, boost::multiprecision::denominator(q));
  std::vector<Integer> counts(n);
  Integer expansion = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rational scaled = weights[i] * Rational(scale);
    counts[i] = boost::multiprecision::numerator(scaled);
    expansion += counts[i];
  }
  if (expansion > budget) {
    throw BudgetExceeded("rearrange_samesum: expansion size " + expansion.str() + " exceeds budget " +
                         std::to_string(budget));
  }

  // s repeats x_n counts[n] times; s* is s sorted nonincreasingly. Runs of s*
  // are walked without materializing the expansion.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  std::vector<Rational> x_exact(n);
  for (std::size_t i = 0; i < n; ++i) x_exact[i] = exact_from_double(x[i]);

  RearrangementResult out;
  out.y_exact.resize(n);
  out.y.resize(n);
  out.expansion_size = expansion;
  out.scale_factor = scale;
  std::size_t run = 0;
  auto run_left = counts[order[0]].convert_to<std::size_t>();
  for (std::size_t i = 0; i < n; ++i) {
    auto need = counts[i].convert_to<std::size_t>();
    Rational block_sum = 0;
    while (need > 0) {
      std::size_t take = std::min(need, run_left);
      block_sum += Rational(static_cast<unsigned long long>(take)) * x_exact[order[run]];
      need -= take;
      run_left -= take;
      if (run_left == 0 && run + 1 < n) run_left = counts[order[++run]].convert_to<std::size_t>();
    }
    out.y_exact[i] = block_sum / Rational(counts[i]);
    out.y[i] = to_double(out.y_exact[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prefix-mean inequality

namespace {

CheckReport jcin_unchecked(const MeanSpec& mean, const PointVector& x, const WeightVector& w, double tolerance,
                           std::size_t budget) {
  RearrangementResult r = rearrange_samesum(x, w, budget);
  PointVector y(r.y);
  CheckReport report;
  report.check = "jcin";
  report.instances = x.size();
  report.pass = true;
  report.worst_margin = std::numeric_limits<double>::infinity();
  std::size_t worst_n = 0;
  for (std::size_t n = 1; n <= x.size(); ++n) {
    WeightVector wn = w.prefix(n);
    double lhs = evaluate(mean, x.prefix(n), wn);
    double rhs = evaluate(mean, y.prefix(n), wn);
    double margin = rhs - lhs;
    if (margin < -tolerance * std::max(1.0, std::abs(lhs))) report.pass = false;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      worst_n = n;
    }
  }
  report.witness = {{"n", worst_n},
                    {"x", to_json_list(x.values())},
                    {"y", to_json_list(r.y)},
                    {"w", to_json_list(w.exact_values())}};
  report.details["expansion_size"] = r.expansion_size.str();
  report.details["scale_factor"] = r.scale_factor.str();
  return report;
}

}  // namespace

CheckReport verify_jcin(const MeanSpec& mean, const PointVector& x, const WeightVector& w, double tolerance,
                        std::size_t budget) {
  if (!mean.flags().monotone || !mean.flags().concave) {
    throw PreconditionError("verify_jcin: mean '" + mean.descriptor() + "' is not flagged monotone and concave");
  }
  return jcin_unchecked(mean, x, w, tolerance, budget);
}

CounterexampleSearch search_jcin_counterexample(const MeanSpec& mean, std::size_t trials, std::uint64_t seed,
                                                double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(2, 6);
  std::uniform_int_distribution<int> weight(1, 6);
  std::uniform_real_distribution<double> logx(std::log(0.1), std::log(10.0));
  CounterexampleSearch out;
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t n = len(rng);
    std::vector<double> xs(n);
    std::vector<Rational> ws(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = std::exp(logx(rng));
      ws[i] = Rational(weight(rng), weight(rng));
    }
    ++out.instances;
    CheckReport report = jcin_unchecked(mean, PointVector(xs), WeightVector::exact(ws), tolerance,
                                        kDefaultExpansionBudget);
    if (!report.pass) {
      out.found = true;
      out.failing = std::move(report);
      break;
    }
  }
  out.verdict = out.found ? "found" : "no counterexample found (inconclusive)";
  return out;
}

// ---------------------------------------------------------------------------
// Cut theorem

namespace {

// n_M for M = 1, 2, ... while n_M <= limit. Throws when a partial sum of ψ is
// skipped by λ.
std::vector<std::size_t> matched_indices(const WeightSeq& psi, const WeightSeq& lam, std::size_t limit) {
  if (!psi.is_exact() || !lam.is_exact()) throw InvalidArgument("verify_cut requires exact rational sequences");
  std::vector<std::size_t> matched;
  Rational lam_sum = 0;
  std::size_t idx = 0;
  auto psi_len = psi.length();
  auto lam_len = lam.length();
  for (std::size_t m = 1; !psi_len || m <= *psi_len; ++m) {
    Rational target = *psi.exact_partial_sum(m);
    while (lam_sum < target) {
      if (idx == limit || (lam_len && idx == *lam_len)) return matched;
      lam_sum += *lam.exact_term(++idx);
    }
    if (lam_sum != target) {
      throw PreconditionError("verify_cut: Ψ_" + std::to_string(m) + " is not a partial sum of '" + lam.descriptor() +
                              "'; ψ ≺ λ fails on the prefix");
    }
    matched.push_back(idx);
  }
  return matched;
}

}  // namespace

CheckReport verify_cut(const CutSubject& subject, const WeightSeq& psi, const WeightSeq& lam, std::size_t n,
                       double tol, const OptimizerConfig& opt) {
  if (n == 0) throw InvalidArgument("verify_cut: N must be at least 1");
  std::vector<std::size_t> matched = matched_indices(psi, lam, n);
  if (matched.empty()) {
    throw PreconditionError("verify_cut: no partial sum of ψ is matched within the first " + std::to_string(n) +
                            " terms of λ");
  }
  CheckReport report;
  report.check = "cut";
  report.details["psi"] = psi.descriptor();
  report.details["lambda"] = lam.descriptor();
  report.details["matched_terms"] = matched.size();
  report.details["lambda_terms"] = matched.back();

  if (std::holds_alternative<ClosedFormArithmetic>(subject)) {
    report.details["mode"] = "arithmetic-closed-form";
    Rational psi_partial = 0;
    Rational psi_series = 0;
    Rational lam_partial = 0;
    Rational lam_series = 0;
    std::size_t lam_idx = 0;
    report.pass = true;
    report.worst_margin = std::numeric_limits<double>::infinity();
    Rational worst_slack;
    std::size_t worst_m = 0;
    for (std::size_t m = 1; m <= matched.size(); ++m) {
      Rational term = *psi.exact_term(m);
      psi_partial += term;
      psi_series += term / psi_partial;
      while (lam_idx < matched[m - 1]) {
        Rational t = *lam.exact_term(++lam_idx);
        lam_partial += t;
        lam_series += t / lam_partial;
      }
      Rational slack = lam_series - psi_series;
      if (slack < 0) report.pass = false;
      if (worst_m == 0 || slack < worst_slack) {
        worst_slack = slack;
        worst_m = m;
      }
    }
    report.instances = matched.size();
    report.worst_margin = to_double(worst_slack);
    report.witness = {{"M", worst_m},
                      {"n_M", matched[worst_m - 1]},
                      {"slack", to_string(worst_slack)}};
    report.details["psi_partial_series"] = to_string(psi_series);
    report.details["lambda_partial_series"] = to_string(lam_series);
    // Full constants, when both series can be certified.
    try {
      HardyEstimate hp = arithmetic_hardy(psi, matched.size(), SeriesMode::certified);
      HardyEstimate hl = arithmetic_hardy(lam, matched.back(), SeriesMode::certified);
      report.details["psi_constant"] = std::isinf(hp.value) ? nlohmann::json("inf") : nlohmann::json(hp.value);
      report.details["lambda_constant"] = std::isinf(hl.value) ? nlohmann::json("inf") : nlohmann::json(hl.value);
      if (!(hp.value <= hl.value + tol)) report.pass = false;
    } catch (const InconclusiveError& e) {
      report.notes.push_back(std::string("full constants not certified: ") + e.what());
    }
    return report;
  }

  const MeanSpec& mean = std::get<MeanSpec>(subject);
  if (!mean.flags().monotone || !mean.flags().concave) {
    throw PreconditionError("verify_cut: mean '" + mean.descriptor() + "' is not flagged monotone and concave");
  }
  report.details["mode"] = "finite-lower-bound";
  std::size_t m_star = matched.size();
  std::size_t n_star = matched.back();
  HardyEstimate hp = finite_lower_bound(mean, psi, m_star, opt);
  HardyEstimate hl = finite_lower_bound(mean, lam, n_star, opt);
  report.instances = 1;
  report.worst_margin = hl.value - hp.value;
  report.pass = hp.value <= hl.value + tol;
  report.witness = {{"M", m_star}, {"n_M", n_star}, {"psi_value", hp.value}, {"lambda_value", hl.value}};
  report.details["tolerance"] = tol;
  for (const auto& w : hp.warnings) report.notes.push_back("psi: " + w);
  for (const auto& w : hl.warnings) report.notes.push_back("lambda: " + w);
  return report;
}

// ---------------------------------------------------------------------------
// Running means of nonincreasing step functions

CheckReport verify_decreasing(const MeanSpec& mean, const StepFunction& f, const std::vector<double>& grid,
                              double tolerance) {
  if (!f.is_nonincreasing()) throw PreconditionError("verify_decreasing: step function is not nonincreasing");
  if (!mean.flags().monotone) {
    throw PreconditionError("verify_decreasing: mean '" + mean.descriptor() + "' is not flagged monotone");
  }
  if (grid.empty()) throw InvalidArgument("verify_decreasing: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw InvalidArgument("verify_decreasing: grid must be strictly increasing");
  }
  CheckReport report;
  report.check = "decreasing";
  report.instances = grid.size();
  std::vector<double> values;
  values.reserve(grid.size());
  for (double u : grid) values.push_back(integral_eval(mean, f, 0.0, u));
  report.pass = true;
  report.worst_margin = grid.size() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    double margin = values[i] - values[i + 1];
    if (margin < -tolerance * std::max(1.0, std::abs(values[i]))) report.pass = false;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      worst = i;
    }
  }
  report.witness = {{"index", worst}, {"grid", grid}, {"values", values}};
  return report;
}

// ---------------------------------------------------------------------------
// Lower semicontinuity example

LscTable reproduce_lsc_example(std::size_t kmax, std::size_t n, double tol, double limit_tol) {
  if (kmax == 0) throw InvalidArgument("reproduce_lsc_example: kmax must be at least 1");
  if (n == 0) throw InvalidArgument("reproduce_lsc_example: N must be at least 1");
  LscTable table;
  table.baseline = arithmetic_hardy(WeightSeq::dyadic(), n, SeriesMode::certified).value;
  table.limit_target = table.baseline + 0.5;
  table.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= kmax; ++k) {
    double v = arithmetic_hardy(WeightSeq::perturbed_dyadic(k), n, SeriesMode::certified).value;
    table.rows.push_back({k, v});
    table.min_margin = std::min(table.min_margin, v - table.baseline);
    if (v < table.baseline - tol) table.below_baseline.push_back(k);
  }
  table.limit_error = std::abs(table.rows.back().value - table.limit_target);
  table.pass = table.rows.back().value >= table.baseline - tol && table.limit_error <= limit_tol;
  return table;
}

// ---------------------------------------------------------------------------
// Weighted constants never exceed the unweighted one

std::vector<Rational> random_rational_weights(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> part(1, 20);
  std::vector<Rational> out(n);
  for (auto& r : out) r = Rational(part(rng), part(rng));
  return out;
}

Mu1Sweep verify_mu1_sweep(const MeanSpec& mean, std::size_t n, std::size_t trials, std::uint64_t seed,
                          std::optional<double> bound, double tol, const OptimizerConfig& opt) {
  if (!mean.flags().symmetric || !mean.flags().monotone) {
    throw PreconditionError("verify_mu1_sweep: mean '" + mean.descriptor() + "' is not flagged symmetric and monotone");
  }
  if (!bound) {
    if (mean.family() != MeanFamily::power) {
      throw PreconditionError("verify_mu1_sweep: no closed-form unweighted constant for '" + mean.descriptor() +
                              "'; pass an explicit bound");
    }
    bound = copson_constant(std::get<PowerParams>(mean.params()).p);
  }
  if (trials == 0) throw InvalidArgument("verify_mu1_sweep: trials must be at least 1");
  Mu1Sweep sweep;
  sweep.values.resize(trials);
  std::vector<std::vector<Rational>> weights(trials);
  OptimizerConfig inner = opt;
  inner.threads = 1;
  std::size_t threads = opt.threads ? opt.threads : default_thread_count();
  parallel_for(trials, threads, [&](std::size_t t) {
    weights[t] = random_rational_weights(n, seed + t);
    WeightSeq w = WeightSeq::from_prefix(weights[t], "random-rational#" + std::to_string(t));
    OptimizerConfig local = inner;
    local.seed = opt.seed + t;
    sweep.values[t] = finite_lower_bound(mean, w, n, local).value;
  });
  CheckReport& report = sweep.report;
  report.check = "mu1-sweep";
  report.instances = trials;
  report.pass = true;
  report.worst_margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double margin = *bound - sweep.values[t];
    if (margin < -tol) report.pass = false;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      worst = t;
    }
  }
  report.witness = {{"trial", worst}, {"value", sweep.values[worst]}, {"weights", to_json_list(weights[worst])}};
  report.details["bound"] = std::isinf(*bound) ? nlohmann::json("inf") : nlohmann::json(*bound);
  report.details["tolerance"] = tol;
  report.details["max_value"] = *std::max_element(sweep.values.begin(), sweep.values.end());
  return sweep;
}

}  // namespace hardy
