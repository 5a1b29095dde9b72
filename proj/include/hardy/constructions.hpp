#pragma once

// The same-sum nonincreasing rearrangement and executable checks of the
// comparison results for weighted Hardy constants.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hardy/hardy_estimation.hpp"
#include "hardy/mean_kernel.hpp"
#include "hardy/weight_sequences.hpp"

namespace hardy {

struct RearrangementResult {
  std::vector<Rational> y_exact;  // nonincreasing
  std::vector<double> y;
  Integer expansion_size;  // Σ K·w_n
  Integer scale_factor;    // K, the lcm of the weight denominators
};

inline constexpr std::size_t kDefaultExpansionBudget = 1'000'000;

/// Expands x into s with x_n repeated K·w_n times, sorts s nonincreasingly,
/// and averages consecutive blocks of the same sizes. Preserves Σ w x exactly.
/// Throws BudgetExceeded when Σ K·w_n exceeds `budget`.
RearrangementResult rearrange_samesum(const PointVector& x, const WeightVector& w,
                                      std::size_t budget = kDefaultExpansionBudget);

struct CheckReport {
  std::string check;
  bool pass = false;
  std::size_t instances = 0;
  double worst_margin = 0.0;  // signed slack; negative means violated
  nlohmann::json witness = nullptr;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> notes;
};

/// Prefix-mean inequality M(x_1..x_n; w) <= M(y_1..y_n; w) for every n, with
/// y from rearrange_samesum. Requires a monotone concave mean and exact weights.
CheckReport verify_jcin(const MeanSpec& mean, const PointVector& x, const WeightVector& w, double tolerance = 1e-10,
                        std::size_t budget = kDefaultExpansionBudget);

struct CounterexampleSearch {
  bool found = false;
  std::size_t instances = 0;
  std::optional<CheckReport> failing;  // first failing instance
  std::string verdict;                 // "found" or "no counterexample found (inconclusive)"
};

/// Random search for JCin failures, intended for means outside the concave
/// monotone class. Not finding one is inconclusive.
CounterexampleSearch search_jcin_counterexample(const MeanSpec& mean, std::size_t trials, std::uint64_t seed,
                                                double tolerance = 1e-10);

struct ClosedFormArithmetic {};
using CutSubject = std::variant<ClosedFormArithmetic, MeanSpec>;

/// Compares Hardy constants of ψ ≺ λ at matched truncations Ψ_M = Λ_{n_M}.
/// Arithmetic mode compares Σ_{m<=M} ψ_m/Ψ_m with Σ_{n<=n_M} λ_n/Λ_n exactly
/// for every M <= N, plus the certified constants when both are available.
/// Mean mode compares finite_lower_bound(ψ, M) with finite_lower_bound(λ, n_M)
/// + tol at the largest M with n_M <= N. Throws PreconditionError when ψ ≺ λ
/// cannot be certified on the prefix.
CheckReport verify_cut(const CutSubject& subject, const WeightSeq& psi, const WeightSeq& lam, std::size_t n,
                       double tol = 1e-9, const OptimizerConfig& opt = {});

/// Nonincreasing-ness of u ↦ mean of f over [0, u) on the grid. Requires a
/// nonincreasing f and a monotone mean.
CheckReport verify_decreasing(const MeanSpec& mean, const StepFunction& f, const std::vector<double>& grid,
                              double tolerance = 1e-12);

struct LscRow {
  std::size_t k = 0;
  double value = 0.0;
};

struct LscTable {
  std::vector<LscRow> rows;
  double baseline = 0.0;  // constant for the dyadic weights
  double limit_target = 0.0;
  double limit_error = 0.0;  // |value(kmax) - limit_target|
  double min_margin = 0.0;   // min_k value(k) - baseline
  std::vector<std::size_t> below_baseline;  // k with value(k) < baseline - tol
  bool pass = false;
};

/// Arithmetic-mean constants for the perturbed dyadic weights ψ^(k) (dyadic
/// with the k-th term replaced by 1), k = 1..kmax, against the dyadic baseline.
/// Passes when the last value is at least baseline - tol and within limit_tol
/// of baseline + 1/2. Early values may sit below the baseline (k = 1 does);
/// they are listed in below_baseline.
LscTable reproduce_lsc_example(std::size_t kmax, std::size_t n, double tol = 1e-9, double limit_tol = 1e-3);

struct Mu1Sweep {
  CheckReport report;
  std::vector<double> values;
};

/// finite_lower_bound at N for `trials` random rational weight vectors, each
/// required to stay at most `bound + tol`. Power means default the bound to
/// the Copson constant; other means need an explicit bound.
Mu1Sweep verify_mu1_sweep(const MeanSpec& mean, std::size_t n, std::size_t trials, std::uint64_t seed,
                          std::optional<double> bound = std::nullopt, double tol = 1e-3,
                          const OptimizerConfig& opt = {});

/// Random rational weight vector with entries num/den, num, den in [1, 20].
std::vector<Rational> random_rational_weights(std::size_t n, std::uint64_t seed);

}  // namespace hardy
