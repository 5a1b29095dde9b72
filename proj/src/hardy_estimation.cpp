#include "hardy/hardy_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "hardy/errors.hpp"
#include "hardy/mean_families.hpp"
#include "hardy/parallel.hpp"

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_n(std::size_t n, const char* what) {
  if (n == 0) throw InvalidArgument(std::string(what) + ": N must be at least 1");
}

}  // namespace

std::string to_string(Direction d) {
  switch (d) {
    case Direction::exact: return "exact";
    case Direction::lower_bound: return "lower_bound";
    case Direction::upper_bound: return "upper_bound";
    case Direction::limit_approx: return "limit_approx";
  }
  return "unknown";
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("HARDY_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Closed forms

double copson_constant(double p) {
  if (std::isnan(p)) throw InvalidArgument("copson_constant: p is NaN");
  if (p == -kInf) return 1.0;
  if (p >= 1.0) return kInf;
  if (p == 0.0) return std::exp(1.0);
  // (1 - p)^{-1/p}
  return std::exp(-std::log1p(-p) / p);
}

Rational arithmetic_partial_sum_exact(const WeightSeq& w, std::size_t n) {
  require_n(n, "arithmetic_partial_sum_exact");
  if (!w.is_exact()) throw InvalidArgument("sequence '" + w.descriptor() + "' is not exact");
  Rational total = 0;
  Rational partial = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    Rational term = *w.exact_term(m);
    partial += term;
    total += term / partial;
  }
  return total;
}

double arithmetic_partial_sum(const WeightSeq& w, std::size_t n) {
  require_n(n, "arithmetic_partial_sum");
  CompensatedSum total;
  for (std::size_t m = 1; m <= n; ++m) total.add(w.term(m) / w.partial_sum(m));
  return total.value();
}

HardyEstimate arithmetic_hardy(const WeightSeq& w, std::size_t n, SeriesMode mode, double certify_tolerance) {
  require_n(n, "arithmetic_hardy");
  HardyEstimate est;
  est.method = mode == SeriesMode::partial ? "arithmetic-partial" : "arithmetic-certified";
  est.n = n;
  constexpr std::size_t kExactLimit = 512;
  if (mode == SeriesMode::partial) {
    est.value = arithmetic_partial_sum(w, n);
    est.direction = Direction::lower_bound;
    if (w.is_exact() && n <= kExactLimit) est.diagnostics["exact_value"] = to_string(arithmetic_partial_sum_exact(w, n));
    return est;
  }
  if (w.verdict() == Verdict::diverges) {
    // The series Σ λ_m/Λ_m and the sequence Λ_m converge or diverge together.
    est.value = kInf;
    est.direction = Direction::exact;
    est.diagnostics["partial_sum"] = arithmetic_partial_sum(w, n);
    est.diagnostics["verdict"] = to_string(w.verdict());
    est.diagnostics["justification"] = w.verdict_reason();
    return est;
  }
  if (!w.tail_bound(n)) {
    throw InconclusiveError("arithmetic_hardy: no tail bound and no divergence verdict for '" + w.descriptor() + "'");
  }
  // Σ_{m>n} λ_m/Λ_m <= tail(n)/Λ_n since Λ is increasing.
  constexpr std::size_t kMaxTerms = 1u << 24;
  std::size_t terms = n;
  double bound = *w.tail_bound(terms) / w.partial_sum(terms);
  while (bound > certify_tolerance && terms < kMaxTerms) {
    terms *= 2;
    bound = *w.tail_bound(terms) / w.partial_sum(terms);
  }
  est.value = arithmetic_partial_sum(w, terms);
  est.direction = bound <= certify_tolerance ? Direction::exact : Direction::lower_bound;
  est.n = terms;
  est.diagnostics["tail_error_bound"] = bound;
  est.diagnostics["requested_n"] = n;
  est.diagnostics["verdict"] = to_string(w.verdict());
  if (est.direction != Direction::exact) {
    est.warnings.push_back("tail bound did not reach the certification tolerance");
  }
  return est;
}

// ---------------------------------------------------------------------------
// Finite-N extremal search

double hardy_ratio(const MeanSpec& mean, const WeightSeq& w, std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("hardy_ratio: empty x");
  std::vector<double> lam = w.terms(x.size());
  double numerator = prefix_objective(mean, x, lam);
  CompensatedSum denominator;
  for (std::size_t i = 0; i < x.size(); ++i) denominator.add(lam[i] * x[i]);
  return numerator / denominator.value();
}

namespace {

struct AscentResult {
  double value = -kInf;
  std::vector<double> x;
  std::size_t iterations = 0;
  bool converged = false;
};

// Exponentiated gradient ascent over u on the probability simplex with
// x_k = scale · u_k / λ_k, so that Σ λ x = scale.
class SimplexAscent {
 public:
  SimplexAscent(const MeanSpec& mean, std::span<const double> lam, double scale, const OptimizerConfig& opt)
      : mean_(mean), lam_(lam), scale_(scale), opt_(opt), x_(lam.size()) {}

  AscentResult run(std::vector<double> u) const {
    normalize(u);
    std::vector<double> g;
    double value = objective(u, &g);
    AscentResult out;
    double spread = *std::max_element(g.begin(), g.end()) - *std::min_element(g.begin(), g.end());
    double eta = spread > 0 ? 1.0 / spread : 1.0;
    std::vector<double> v(u.size());
    std::vector<double> gv;
    for (out.iterations = 0; out.iterations < opt_.max_iterations; ++out.iterations) {
      double gmax = *std::max_element(g.begin(), g.end());
      bool accepted = false;
      double candidate = value;
      while (eta > 1e-300) {
        for (std::size_t k = 0; k < u.size(); ++k) v[k] = u[k] * std::exp(eta * (g[k] - gmax));
        normalize(v);
        candidate = objective(v, &gv);
        if (candidate >= value) {
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) {
        out.converged = true;  // no ascent along the mirror step
        break;
      }
      double gain = (candidate - value) / std::max(std::abs(value), 1e-300);
      u.swap(v);
      g.swap(gv);
      value = candidate;
      eta *= 2.0;
      if (gain < opt_.relative_tolerance) {
        out.converged = true;
        break;
      }
    }
    out.value = value;
    out.x = to_x(u);
    return out;
  }

 private:
  void normalize(std::vector<double>& u) const {
    double sum = std::accumulate(u.begin(), u.end(), 0.0);
    for (std::size_t k = 0; k < u.size(); ++k) {
      u[k] = std::max(u[k] / sum, opt_.floor * lam_[k] / scale_);
    }
    sum = std::accumulate(u.begin(), u.end(), 0.0);
    for (auto& e : u) e /= sum;
  }

  std::vector<double> to_x(const std::vector<double>& u) const {
    std::vector<double> x(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) x[k] = std::max(scale_ * u[k] / lam_[k], opt_.floor);
    return x;
  }

  double objective(const std::vector<double>& u, std::vector<double>* grad_u) const {
    for (std::size_t k = 0; k < u.size(); ++k) x_[k] = std::max(scale_ * u[k] / lam_[k], opt_.floor);
    double f = prefix_objective(mean_, x_, lam_, grad_u);
    if (grad_u) {
      for (std::size_t k = 0; k < u.size(); ++k) (*grad_u)[k] /= lam_[k];
    }
    return f / scale_;
  }

  const MeanSpec& mean_;
  std::span<const double> lam_;
  double scale_;
  const OptimizerConfig& opt_;
  mutable std::vector<double> x_;
};

std::vector<double> start_point(std::size_t index, std::span<const double> lam, std::uint64_t seed) {
  const std::size_t n = lam.size();
  std::vector<double> u(n);
  if (index == 0) {
    // u_k ∝ λ_k / Λ_k, the shape of the near-extremal sequences x_k ∝ 1/Λ_k.
    double cum = 0.0;
    for (std::size_t k = 0; k < n; ++k) u[k] = lam[k] / (cum += lam[k]);
  } else if (index == 1) {
    // Mass on x_1: the extremal shape for the arithmetic mean.
    std::fill(u.begin(), u.end(), 1e-3 / static_cast<double>(n));
    u[0] = 1.0;
  } else {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * index));
    std::exponential_distribution<double> dist(1.0);
    for (auto& e : u) e = dist(rng);
  }
  return u;
}

bool better(const AscentResult& a, const AscentResult& b) {
  if (a.value != b.value) return a.value > b.value;
  return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
}

}  // namespace

HardyEstimate finite_lower_bound(const MeanSpec& mean, const WeightSeq& w, std::size_t n,
                                 const OptimizerConfig& opt) {
  require_n(n, "finite_lower_bound");
  if (opt.starts == 0) throw InvalidArgument("finite_lower_bound: need at least one start");
  std::vector<double> scales = opt.scale_box;
  if (scales.empty()) {
    if (!mean.flags().homogeneous) {
      throw PreconditionError("finite_lower_bound: mean '" + mean.descriptor() +
                              "' is not homogeneous; supply a scale box for Σ λ x");
    }
    scales = {1.0};
  }
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("finite_lower_bound: scales must be positive");
  }
  const std::vector<double> lam = w.terms(n);
  const std::size_t tasks = opt.starts * scales.size();
  std::vector<AscentResult> results(tasks);
  std::size_t threads = opt.threads ? opt.threads : default_thread_count();
  parallel_for(tasks, threads, [&](std::size_t t) {
    std::size_t start = t % opt.starts;
    double scale = scales[t / opt.starts];
    SimplexAscent ascent(mean, lam, scale, opt);
    results[t] = ascent.run(start_point(start, lam, opt.seed));
  });

  std::size_t best = 0;
  for (std::size_t t = 1; t < tasks; ++t) {
    if (better(results[t], results[best])) best = t;
  }
  HardyEstimate est;
  est.method = "finite";
  est.n = n;
  est.direction = Direction::lower_bound;
  est.witness = results[best].x;
  est.value = hardy_ratio(mean, w, *est.witness);
  std::vector<std::size_t> iterations;
  std::size_t unconverged = 0;
  for (const auto& r : results) {
    iterations.push_back(r.iterations);
    if (!r.converged) ++unconverged;
  }
  est.diagnostics["optimizer"] = "exponentiated-gradient";
  est.diagnostics["starts"] = opt.starts;
  est.diagnostics["seed"] = opt.seed;
  est.diagnostics["best_start"] = best % opt.starts;
  est.diagnostics["scale"] = scales[best / opt.starts];
  est.diagnostics["iterations"] = iterations;
  est.diagnostics["unconverged_starts"] = unconverged;
  if (unconverged > 0) {
    est.warnings.push_back(std::to_string(unconverged) +
                           " start(s) hit the iteration cap; best-so-far value returned");
  }
  return est;
}

HardyEstimate geometric_probe(const MeanSpec& mean, const WeightSeq& w, double q, std::size_t n) {
  require_n(n, "geometric_probe");
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("geometric_probe: q must lie in (0, 1)");
  std::vector<double> x;
  x.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    double v = std::exp(static_cast<double>(k) * std::log(q) - std::log(w.term(k)));
    if (!(v > 1e-300) || !std::isfinite(v)) break;
    x.push_back(v);
  }
  if (x.empty()) throw InvalidArgument("geometric_probe: test sequence underflows at n = 1");
  HardyEstimate est;
  est.method = "geometric-probe";
  est.n = n;
  est.direction = Direction::lower_bound;
  est.value = hardy_ratio(mean, w, x);
  est.diagnostics["q"] = q;
  est.diagnostics["effective_n"] = x.size();
  if (x.size() < n) est.warnings.push_back("test sequence truncated where q^n/λ_n underflows");
  est.witness = std::move(x);
  return est;
}

// ---------------------------------------------------------------------------
// Limit formulas

std::vector<double> default_y_grid() {
  std::vector<double> grid;
  for (int k = -10; k <= 10; ++k) grid.push_back(std::ldexp(1.0, k));
  return grid;
}

bool divergent_trend(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 8) return false;
  double a_n = values[n - 1];
  double a_half = values[n / 2 - 1];
  double a_quarter = values[n / 4 - 1];
  double recent = a_n - a_half;
  double earlier = a_half - a_quarter;
  return recent > 1e-3 * std::abs(a_n) && recent >= 0.9 * earlier;
}

namespace {

nlohmann::json sampled_sequence(std::span<const double> values) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t n = 1; n <= values.size(); n *= 2) out.push_back({n, values[n - 1]});
  std::size_t last = values.size();
  if ((last & (last - 1)) != 0) out.push_back({last, values[last - 1]});
  return out;
}

}  // namespace

HardyEstimate kedlaya_estimate(const MeanSpec& mean, const WeightSeq& w, std::span<const double> y_grid, std::size_t n,
                               double window) {
  if (n < 2) throw InvalidArgument("kedlaya_estimate: N must be at least 2");
  if (y_grid.empty()) throw InvalidArgument("kedlaya_estimate: empty y grid");
  if (!(window > 0.0 && window <= 1.0)) throw InvalidArgument("kedlaya_estimate: window must lie in (0, 1]");
  RatioReport ratios = ratio_diagnostics(w, n);
  if (!ratios.is_nonincreasing) {
    throw PreconditionError("hypothesis violated: the ratios λ_n/Λ_n are not nonincreasing for '" + w.descriptor() +
                            "'");
  }
  if (ratios.verdict != Verdict::diverges) {
    throw PreconditionError("hypothesis violated: Λ_n → ∞ is not established for '" + w.descriptor() +
                            "' (verdict: " + to_string(ratios.verdict) + ")");
  }
  std::vector<double> lam = w.terms(n);
  std::vector<double> cum(n);
  for (std::size_t k = 1; k <= n; ++k) cum[k - 1] = w.partial_sum(k);
  const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(window * static_cast<double>(n))));

  HardyEstimate est;
  est.method = "kedlaya";
  est.n = n;
  est.direction = Direction::limit_approx;
  est.value = -kInf;
  nlohmann::json per_y = nlohmann::json::array();
  std::vector<double> best_sequence;
  double best_y = 0.0;
  std::vector<double> x(n);
  std::vector<double> a(n);
  for (double y : y_grid) {
    if (!(y > 0.0)) throw InvalidArgument("kedlaya_estimate: grid points must be positive");
    for (std::size_t k = 0; k < n; ++k) x[k] = y / cum[k];
    std::vector<double> means = prefix_means(mean, x, lam);
    for (std::size_t k = 0; k < n; ++k) a[k] = cum[k] / y * means[k];
    double liminf = *std::min_element(a.begin() + static_cast<std::ptrdiff_t>(first - 1), a.end());
    per_y.push_back({y, liminf});
    if (liminf > est.value) {
      est.value = liminf;
      best_y = y;
      best_sequence = a;
    }
  }
  bool diverging = divergent_trend(best_sequence);
  est.diagnostics["best_y"] = best_y;
  est.diagnostics["window_start"] = first;
  est.diagnostics["liminf_by_y"] = per_y;
  est.diagnostics["sequence"] = sampled_sequence(best_sequence);
  est.diagnostics["divergent_trend"] = diverging;
  if (diverging) est.warnings.push_back("sequence keeps growing across the window; the constant appears infinite");
  return est;
}

HardyEstimate nonweighted_limit(const MeanSpec& mean, std::size_t n) {
  require_n(n, "nonweighted_limit");
  HardyEstimate est;
  est.method = "nonweighted-limit";
  est.n = n;
  est.direction = Direction::limit_approx;
  const MeanFlags& f = mean.flags();
  if (!f.monotone) est.warnings.push_back("mean is not flagged monotone; the limit formula may not apply");
  if (!f.symmetric) est.warnings.push_back("mean is not flagged symmetric; the limit formula may not apply");
  if (!f.concave) est.warnings.push_back("mean is not flagged concave; the limit formula may not apply");
  if (!f.homogeneous) est.warnings.push_back("mean is not flagged homogeneous; the limit formula may not apply");
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = 1.0 / static_cast<double>(k + 1);
  std::vector<double> ones(n, 1.0);
  std::vector<double> means = prefix_means(mean, x, ones);
  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = static_cast<double>(k + 1) * means[k];
  est.value = a.back();
  bool diverging = divergent_trend(a);
  est.diagnostics["sequence"] = sampled_sequence(a);
  est.diagnostics["divergent_trend"] = diverging;
  if (diverging) est.warnings.push_back("n·M(1, 1/2, ..., 1/n) keeps growing; the constant appears infinite");
  return est;
}

}  // namespace hardy
