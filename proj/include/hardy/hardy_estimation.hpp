#pragma once

// Weighted Hardy constants: closed forms, limit formulas, and the finite-N
// extremal search.
//
// For a mean M and weights λ, the λ-weighted Hardy constant is the least C with
//   Σ_n λ_n M((x_1..x_n), (λ_1..λ_n)) <= C Σ_n λ_n x_n
// for every positive summable x; it equals the supremum over N of the same
// inequality restricted to x in (0, ∞)^N, which is what finite_lower_bound
// searches.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardy/mean_kernel.hpp"
#include "hardy/weight_sequences.hpp"

namespace hardy {

enum class Direction { exact, lower_bound, upper_bound, limit_approx };
std::string to_string(Direction d);

struct HardyEstimate {
  double value = 0.0;  // may be +inf
  Direction direction = Direction::lower_bound;
  std::size_t n = 0;
  std::string method;
  std::optional<std::vector<double>> witness;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::vector<std::string> warnings;
};

/// Sharp Hardy constant of the unweighted p-th power mean, extended to
/// p = -inf (value 1) and p >= 1 (value +inf).
double copson_constant(double p);

enum class SeriesMode { partial, certified };

/// Σ_{m<=N} λ_m/Λ_m, the Hardy constant of the arithmetic mean truncated at N.
Rational arithmetic_partial_sum_exact(const WeightSeq& w, std::size_t n);
double arithmetic_partial_sum(const WeightSeq& w, std::size_t n);

/// Hardy constant of the arithmetic mean. Partial mode gives the truncated
/// series as a lower bound. Certified mode returns +inf for proven-divergent
/// weights, or the series extended past N until the closed-form tail bound
/// (tail_bound(N)/Λ_N) is below `certify_tolerance`; it throws
/// InconclusiveError when neither a tail bound nor a verdict is available.
HardyEstimate arithmetic_hardy(const WeightSeq& w, std::size_t n, SeriesMode mode,
                               double certify_tolerance = 1e-12);

struct OptimizerConfig {
  std::size_t starts = 8;
  std::uint64_t seed = 0;
  double floor = 1e-12;  // x_k >= floor after normalization Σ λ x = 1
  std::size_t max_iterations = 10'000;
  double relative_tolerance = 1e-10;
  /// 0: HARDY_THREADS or the hardware concurrency.
  std::size_t threads = 0;
  /// Scales s with Σ λ x = s to search; required for non-homogeneous means.
  std::vector<double> scale_box;
};

/// Σ_n λ_n M_n(x) / Σ_n λ_n x_n over the first x.size() terms.
double hardy_ratio(const MeanSpec& mean, const WeightSeq& w, std::span<const double> x);

/// Maximizes the truncated Hardy ratio over x in (0, ∞)^N by exponentiated
/// gradient ascent on {Σ λ x = 1} with seeded multistart. Returns the best
/// value as a lower bound with its witness. Homogeneous means only, unless
/// `opt.scale_box` lists the sums to search.
HardyEstimate finite_lower_bound(const MeanSpec& mean, const WeightSeq& w, std::size_t n,
                                 const OptimizerConfig& opt = {});

/// Hardy ratio at x_n = q^n / λ_n, n <= N.
HardyEstimate geometric_probe(const MeanSpec& mean, const WeightSeq& w, double q, std::size_t n);

/// Default y grid {2^k : k = -10..10}.
std::vector<double> default_y_grid();

/// sup_y liminf_n (Λ_n / y) M((y/Λ_1, ..., y/Λ_n), (λ_1..λ_n)), with the liminf
/// approximated by the minimum over n in [window·N, N]. Requires nonincreasing
/// ratios λ_n/Λ_n and a divergent Λ_n; throws PreconditionError otherwise.
HardyEstimate kedlaya_estimate(const MeanSpec& mean, const WeightSeq& w, std::span<const double> y_grid, std::size_t n,
                               double window = 0.5);

/// n · M(1, 1/2, ..., 1/n) at n = N with the sequence at powers of two in the
/// diagnostics. Missing hypotheses add warnings only.
HardyEstimate nonweighted_limit(const MeanSpec& mean, std::size_t n);

/// Heuristic: the increments a(N) - a(N/2) and a(N/2) - a(N/4) fail to shrink.
bool divergent_trend(std::span<const double> values);

/// Worker count from HARDY_THREADS, falling back to the hardware concurrency.
std::size_t default_thread_count();

}  // namespace hardy
