#pragma once

// Infinite positive weight sequences λ with partial sums Λ_n, ratio
// diagnostics, partition coarsening, and the partition-order prefix check.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardy/rational.hpp"

namespace hardy {

enum class Verdict { diverges, converges, inconclusive };
std::string to_string(Verdict v);

namespace detail {
class SequenceSource;
}

/// Immutable handle to a weight sequence; cheap to copy and safe to share
/// across threads. Indices are 1-based; partial_sum(0) = 0.
class WeightSeq {
 public:
  // Built-ins.
  static WeightSeq ones();
  static WeightSeq dyadic();
  static WeightSeq geometric(const Rational& q);
  static WeightSeq geometric_float(double q);
  static WeightSeq perturbed_dyadic(std::size_t k);
  /// n^alpha, exact for integer alpha.
  static WeightSeq power(const Rational& alpha);
  static WeightSeq power_float(double alpha);
  /// Finite prefixes; probing past the end throws InvalidArgument.
  static WeightSeq from_prefix(std::vector<Rational> terms, std::string descriptor = "prefix");
  static WeightSeq from_prefix_float(std::vector<double> terms, std::string descriptor = "prefix");

  double term(std::size_t n) const;
  double partial_sum(std::size_t n) const;
  std::optional<Rational> exact_term(std::size_t n) const;
  std::optional<Rational> exact_partial_sum(std::size_t n) const;
  bool is_exact() const;

  /// Upper bound on Σ_{m>n} λ_m, when one is known in closed form.
  std::optional<double> tail_bound(std::size_t n) const;
  Verdict verdict() const;
  std::string verdict_reason() const;
  /// Closed-form lim λ_n/Λ_n, when known.
  std::optional<double> ratio_limit() const;
  /// Number of available terms for finite prefixes.
  std::optional<std::size_t> length() const;
  const std::string& descriptor() const;

  std::vector<double> terms(std::size_t count) const;
  std::vector<Rational> exact_terms(std::size_t count) const;

  const detail::SequenceSource& source() const { return *source_; }

 private:
  explicit WeightSeq(std::shared_ptr<const detail::SequenceSource> source) : source_(std::move(source)) {}
  friend WeightSeq coarsen(const WeightSeq&, std::vector<std::size_t>, bool);
  std::shared_ptr<const detail::SequenceSource> source_;
};

/// Parses "ones", "dyadic", "geometric:Q", "perturbed-dyadic:K", "power:ALPHA".
/// Rational literals ("1/2") give exact sequences. Decimal parameters are
/// accepted only when `allow_float` is set and then yield float sequences,
/// except that integer exponents of power sequences stay exact.
WeightSeq make_sequence(std::string_view descriptor, bool allow_float = false);

struct RatioReport {
  std::size_t n = 0;
  std::vector<double> ratios;            // λ_k / Λ_k, k = 1..N
  std::vector<double> max_term_ratios;   // max(λ_1..λ_k) / Λ_k
  bool is_nonincreasing = false;
  double ratio_limit_estimate = 0.0;
  bool ratio_limit_closed_form = false;
  double partial_sum_at_n = 0.0;
  std::optional<Rational> exact_partial_sum_at_n;
  Verdict verdict = Verdict::inconclusive;
  std::string justification;
};

/// Ratio sequence, its monotonicity, max-term ratios, and the divergence
/// verdict for Λ_n. Requires N >= 2.
RatioReport ratio_diagnostics(const WeightSeq& w, std::size_t n);

/// ψ_k = Σ_{n = n_{k-1}+1}^{n_k} λ_n for consecutive blocks of the given
/// sizes. Without `cyclic`, blocks past the list have size 1; with it the
/// list repeats forever. Zero-size blocks are rejected.
WeightSeq coarsen(const WeightSeq& w, std::vector<std::size_t> blocks, bool cyclic = false);

/// Certifies ψ ≺ λ on a prefix: each of Ψ_1..Ψ_N occurs among the partial
/// sums of λ (exact greedy matching). A true result covers the examined
/// prefix only. Both sequences must be exact. `scan_limit` caps how many
/// terms of λ are examined.
bool check_prec(const WeightSeq& psi, const WeightSeq& lam, std::size_t n, std::size_t scan_limit = 1'000'000);

/// Indices n_1 < ... < n_N with Λ_{n_m} = Ψ_m, or nullopt when ψ ⊀ λ on the prefix.
std::optional<std::vector<std::size_t>> match_partial_sums(const WeightSeq& psi, const WeightSeq& lam, std::size_t n,
                                                           std::size_t scan_limit = 1'000'000);

}  // namespace hardy
