#include "hardy/weight_sequences.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "hardy/errors.hpp"

namespace hardy {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::diverges: return "diverges";
    case Verdict::converges: return "converges";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace detail {

// Compensated running sums, filled on demand. Concurrent readers see the same
// values as a single sequential fill.
class FloatSumCache {
 public:
  template <typename TermFn>
  double get(std::size_t n, TermFn term) const {
    std::lock_guard lock(mutex_);
    while (sums_.size() <= n) {
      double t = term(sums_.size());
      double s = sum_ + t;
      comp_ += std::abs(sum_) >= std::abs(t) ? (sum_ - s) + t : (t - s) + sum_;
      sum_ = s;
      sums_.push_back(sum_ + comp_);
    }
    return sums_[n];
  }

 private:
  mutable std::mutex mutex_;
  mutable std::vector<double> sums_{0.0};
  mutable double sum_ = 0.0;
  mutable double comp_ = 0.0;
};

class ExactSumCache {
 public:
  template <typename TermFn>
  Rational get(std::size_t n, TermFn term) const {
    std::lock_guard lock(mutex_);
    while (sums_.size() <= n) sums_.push_back(sums_.back() + term(sums_.size()));
    return sums_[n];
  }

 private:
  mutable std::mutex mutex_;
  mutable std::vector<Rational> sums_{Rational(0)};
};

class SequenceSource {
 public:
  explicit SequenceSource(std::string descriptor) : descriptor_(std::move(descriptor)) {}
  virtual ~SequenceSource() = default;

  virtual double term(std::size_t n) const = 0;
  virtual double partial_sum(std::size_t n) const {
    return float_cache_.get(n, [this](std::size_t k) { return term(k); });
  }
  virtual bool exact() const { return false; }
  virtual Rational exact_term(std::size_t) const { throw InvalidArgument("sequence is not exact"); }
  virtual Rational exact_partial_sum(std::size_t n) const {
    return exact_cache_.get(n, [this](std::size_t k) { return exact_term(k); });
  }
  virtual std::optional<double> tail_bound(std::size_t) const { return std::nullopt; }
  virtual Verdict verdict() const { return Verdict::inconclusive; }
  virtual std::string verdict_reason() const { return "finite data cannot decide divergence"; }
  virtual std::optional<double> ratio_limit() const { return std::nullopt; }
  virtual std::optional<std::size_t> length() const { return std::nullopt; }

  const std::string& descriptor() const { return descriptor_; }

 private:
  std::string descriptor_;
  FloatSumCache float_cache_;
  ExactSumCache exact_cache_;
};

namespace {

Rational rational_pow(const Rational& q, std::size_t n) {
  auto e = static_cast<unsigned>(n);
  return Rational(boost::multiprecision::pow(boost::multiprecision::numerator(q), e),
                  boost::multiprecision::pow(boost::multiprecision::denominator(q), e));
}

// q^n with exact partial sums q(1 - q^n)/(1 - q), or n when q = 1.
class Geometric final : public SequenceSource {
 public:
  Geometric(std::string descriptor, std::optional<Rational> exact_q, double q)
      : SequenceSource(std::move(descriptor)), exact_q_(std::move(exact_q)), q_(q) {
    if (!(q_ > 0.0)) throw InvalidArgument("geometric ratio must be positive");
  }

  double term(std::size_t n) const override {
    return std::pow(q_, static_cast<double>(n));
  }
  double partial_sum(std::size_t n) const override {
    if (q_ == 1.0) return static_cast<double>(n);
    return q_ * -std::expm1(static_cast<double>(n) * std::log(q_)) / (1.0 - q_);
  }
  bool exact() const override { return exact_q_.has_value(); }
  Rational exact_term(std::size_t n) const override { return rational_pow(exact_q(), n); }
  Rational exact_partial_sum(std::size_t n) const override {
    const Rational& q = exact_q();
    if (q == 1) return Rational(static_cast<unsigned long long>(n));
    return q * (Rational(1) - rational_pow(q, n)) / (Rational(1) - q);
  }
  std::optional<double> tail_bound(std::size_t n) const override {
    if (q_ >= 1.0) return std::nullopt;
    return std::pow(q_, static_cast<double>(n + 1)) / (1.0 - q_);
  }
  Verdict verdict() const override { return q_ >= 1.0 ? Verdict::diverges : Verdict::converges; }
  std::string verdict_reason() const override {
    return q_ >= 1.0 ? "closed form: geometric ratio >= 1" : "closed form: geometric ratio < 1";
  }
  std::optional<double> ratio_limit() const override { return q_ > 1.0 ? 1.0 - 1.0 / q_ : 0.0; }

 private:
  const Rational& exact_q() const {
    if (!exact_q_) throw InvalidArgument("sequence is not exact");
    return *exact_q_;
  }
  std::optional<Rational> exact_q_;
  double q_;
};

// 2^{-n} except for the value 1 at n = k.
class PerturbedDyadic final : public SequenceSource {
 public:
  explicit PerturbedDyadic(std::size_t k) : SequenceSource("perturbed-dyadic:" + std::to_string(k)), k_(k) {
    if (k == 0) throw InvalidArgument("perturbed-dyadic index must be at least 1");
  }
  double term(std::size_t n) const override { return n == k_ ? 1.0 : std::ldexp(1.0, -static_cast<int>(n)); }
  double partial_sum(std::size_t n) const override {
    double base = -std::expm1(-static_cast<double>(n) * std::log(2.0));
    return n >= k_ ? base + 1.0 - std::ldexp(1.0, -static_cast<int>(k_)) : base;
  }
  bool exact() const override { return true; }
  Rational exact_term(std::size_t n) const override {
    return n == k_ ? Rational(1) : rational_pow(Rational(1, 2), n);
  }
  Rational exact_partial_sum(std::size_t n) const override {
    Rational base = Rational(1) - rational_pow(Rational(1, 2), n);
    return n >= k_ ? base + Rational(1) - rational_pow(Rational(1, 2), k_) : base;
  }
  std::optional<double> tail_bound(std::size_t n) const override {
    double dyadic_tail = std::ldexp(1.0, -static_cast<int>(n));
    return n < k_ ? dyadic_tail + 1.0 : dyadic_tail;
  }
  Verdict verdict() const override { return Verdict::converges; }
  std::string verdict_reason() const override { return "closed form: dyadic tail with one modified term"; }
  std::optional<double> ratio_limit() const override { return 0.0; }

 private:
  std::size_t k_;
};

// n^alpha.
class PowerSeq final : public SequenceSource {
 public:
  PowerSeq(std::string descriptor, std::optional<Integer> exact_alpha, double alpha)
      : SequenceSource(std::move(descriptor)), exact_alpha_(std::move(exact_alpha)), alpha_(alpha) {}

  double term(std::size_t n) const override { return std::pow(static_cast<double>(n), alpha_); }
  bool exact() const override { return exact_alpha_.has_value(); }
  Rational exact_term(std::size_t n) const override {
    if (!exact_alpha_) throw InvalidArgument("sequence is not exact");
    Integer base(static_cast<unsigned long long>(n));
    auto e = static_cast<unsigned>(boost::multiprecision::abs(*exact_alpha_));
    Integer p = boost::multiprecision::pow(base, e);
    return *exact_alpha_ >= 0 ? Rational(p) : Rational(Integer(1), p);
  }
  std::optional<double> tail_bound(std::size_t n) const override {
    if (alpha_ >= -1.0) return std::nullopt;
    // Σ_{m>n} m^α <= ∫_n^∞ t^α dt
    return std::pow(static_cast<double>(n), alpha_ + 1.0) / (-alpha_ - 1.0);
  }
  Verdict verdict() const override { return alpha_ >= -1.0 ? Verdict::diverges : Verdict::converges; }
  std::string verdict_reason() const override {
    return alpha_ >= -1.0 ? "closed form: p-series with exponent >= -1" : "closed form: p-series with exponent < -1";
  }
  std::optional<double> ratio_limit() const override { return 0.0; }

 private:
  std::optional<Integer> exact_alpha_;
  double alpha_;
};

class Prefix final : public SequenceSource {
 public:
  Prefix(std::string descriptor, std::vector<Rational> exact_terms, std::vector<double> terms)
      : SequenceSource(std::move(descriptor)), exact_(std::move(exact_terms)), terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("weight prefix must be nonempty");
    for (double t : terms_) {
      if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("weights must be strictly positive");
    }
    for (const auto& e : exact_) {
      if (e <= 0) throw InvalidArgument("weights must be strictly positive");
    }
  }
  double term(std::size_t n) const override { return terms_[index(n)]; }
  bool exact() const override { return !exact_.empty(); }
  Rational exact_term(std::size_t n) const override {
    if (exact_.empty()) throw InvalidArgument("sequence is not exact");
    return exact_[index(n)];
  }
  std::optional<std::size_t> length() const override { return terms_.size(); }

 private:
  std::size_t index(std::size_t n) const {
    if (n == 0 || n > terms_.size()) {
      throw InvalidArgument("weight prefix has " + std::to_string(terms_.size()) + " terms; term " +
                            std::to_string(n) + " requested");
    }
    return n - 1;
  }
  std::vector<Rational> exact_;
  std::vector<double> terms_;
};

std::string block_descriptor(const std::string& base, const std::vector<std::size_t>& blocks, bool cyclic) {
  std::string d = base + "|blocks=";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) d += ",";
    d += std::to_string(blocks[i]);
  }
  if (cyclic) d += "...";
  return d;
}

class Coarsened final : public SequenceSource {
 public:
  Coarsened(WeightSeq base, std::vector<std::size_t> blocks, bool cyclic)
      : SequenceSource(block_descriptor(base.descriptor(), blocks, cyclic)),
        base_(std::move(base)),
        blocks_(std::move(blocks)),
        cyclic_(cyclic) {
    if (blocks_.empty()) throw InvalidArgument("coarsen: block list must be nonempty");
    cumulative_.push_back(0);
    for (std::size_t b : blocks_) {
      if (b == 0) throw InvalidArgument("coarsen: zero-size blocks would create zero weights");
      cumulative_.push_back(cumulative_.back() + b);
    }
  }

  // n_k: index in the base sequence where block k ends.
  std::size_t boundary(std::size_t k) const {
    const std::size_t listed = blocks_.size();
    if (k <= listed) return cumulative_[k];
    if (!cyclic_) return cumulative_[listed] + (k - listed);
    std::size_t periods = k / listed;
    std::size_t rest = k % listed;
    return periods * cumulative_[listed] + cumulative_[rest];
  }

  double term(std::size_t k) const override {
    if (k == 0) throw InvalidArgument("weight sequences are 1-based");
    double acc = 0.0;
    for (std::size_t n = boundary(k - 1) + 1; n <= boundary(k); ++n) acc += base_.term(n);
    return acc;
  }
  double partial_sum(std::size_t k) const override { return base_.partial_sum(boundary(k)); }
  bool exact() const override { return base_.is_exact(); }
  Rational exact_term(std::size_t k) const override {
    if (k == 0) throw InvalidArgument("weight sequences are 1-based");
    return *base_.exact_partial_sum(boundary(k)) - *base_.exact_partial_sum(boundary(k - 1));
  }
  Rational exact_partial_sum(std::size_t k) const override { return *base_.exact_partial_sum(boundary(k)); }
  std::optional<double> tail_bound(std::size_t k) const override { return base_.tail_bound(boundary(k)); }
  Verdict verdict() const override { return base_.verdict(); }
  std::string verdict_reason() const override { return base_.verdict_reason() + " (coarsening keeps the total)"; }
  std::optional<double> ratio_limit() const override {
    auto base_limit = base_.ratio_limit();
    if (!base_limit) return std::nullopt;
    // Finitely many merged blocks leave the tail untouched; bounded blocks over
    // a ratio tending to zero keep it at zero.
    if (!cyclic_ || *base_limit == 0.0) return base_limit;
    if (std::all_of(blocks_.begin(), blocks_.end(), [](std::size_t b) { return b == 1; })) return base_limit;
    return std::nullopt;
  }
  std::optional<std::size_t> length() const override {
    auto base_len = base_.length();
    if (!base_len) return std::nullopt;
    std::size_t k = 0;
    while (boundary(k + 1) <= *base_len) ++k;
    return k;
  }

 private:
  WeightSeq base_;
  std::vector<std::size_t> blocks_;
  std::vector<std::size_t> cumulative_;
  bool cyclic_;
};

void require_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("weight sequences are 1-based");
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// WeightSeq

WeightSeq WeightSeq::ones() {
  return WeightSeq(std::make_shared<detail::Geometric>("ones", Rational(1), 1.0));
}

WeightSeq WeightSeq::dyadic() {
  return WeightSeq(std::make_shared<detail::Geometric>("dyadic", Rational(1, 2), 0.5));
}

WeightSeq WeightSeq::geometric(const Rational& q) {
  if (q <= 0) throw InvalidArgument("geometric ratio must be positive");
  return WeightSeq(std::make_shared<detail::Geometric>("geometric:" + to_string(q), q, to_double(q)));
}

WeightSeq WeightSeq::geometric_float(double q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "geometric:%.17g", q);
  return WeightSeq(std::make_shared<detail::Geometric>(buf, std::nullopt, q));
}

WeightSeq WeightSeq::perturbed_dyadic(std::size_t k) {
  return WeightSeq(std::make_shared<detail::PerturbedDyadic>(k));
}

WeightSeq WeightSeq::power(const Rational& alpha) {
  if (boost::multiprecision::denominator(alpha) != 1) return power_float(to_double(alpha));
  Integer a = boost::multiprecision::numerator(alpha);
  return WeightSeq(std::make_shared<detail::PowerSeq>("power:" + a.str(), a, to_double(alpha)));
}

WeightSeq WeightSeq::power_float(double alpha) {
  if (!std::isfinite(alpha)) throw InvalidArgument("power exponent must be finite");
  char buf[64];
  std::snprintf(buf, sizeof buf, "power:%.17g", alpha);
  return WeightSeq(std::make_shared<detail::PowerSeq>(buf, std::nullopt, alpha));
}

WeightSeq WeightSeq::from_prefix(std::vector<Rational> terms, std::string descriptor) {
  std::vector<double> approx;
  approx.reserve(terms.size());
  for (const auto& t : terms) approx.push_back(to_double(t));
  return WeightSeq(std::make_shared<detail::Prefix>(std::move(descriptor), std::move(terms), std::move(approx)));
}

WeightSeq WeightSeq::from_prefix_float(std::vector<double> terms, std::string descriptor) {
  return WeightSeq(std::make_shared<detail::Prefix>(std::move(descriptor), std::vector<Rational>{}, std::move(terms)));
}

double WeightSeq::term(std::size_t n) const {
  detail::require_index(n);
  return source_->term(n);
}

double WeightSeq::partial_sum(std::size_t n) const {
  if (n == 0) return 0.0;
  if (auto len = source_->length(); len && n > *len) {
    throw InvalidArgument("weight prefix has " + std::to_string(*len) + " terms; partial sum " + std::to_string(n) +
                          " requested");
  }
  return source_->partial_sum(n);
}

std::optional<Rational> WeightSeq::exact_term(std::size_t n) const {
  detail::require_index(n);
  if (!source_->exact()) return std::nullopt;
  return source_->exact_term(n);
}

std::optional<Rational> WeightSeq::exact_partial_sum(std::size_t n) const {
  if (!source_->exact()) return std::nullopt;
  if (n == 0) return Rational(0);
  if (auto len = source_->length(); len && n > *len) {
    throw InvalidArgument("weight prefix has " + std::to_string(*len) + " terms");
  }
  return source_->exact_partial_sum(n);
}

bool WeightSeq::is_exact() const { return source_->exact(); }
std::optional<double> WeightSeq::tail_bound(std::size_t n) const { return source_->tail_bound(n); }
Verdict WeightSeq::verdict() const { return source_->verdict(); }
std::string WeightSeq::verdict_reason() const { return source_->verdict_reason(); }
std::optional<double> WeightSeq::ratio_limit() const { return source_->ratio_limit(); }
std::optional<std::size_t> WeightSeq::length() const { return source_->length(); }
const std::string& WeightSeq::descriptor() const { return source_->descriptor(); }

std::vector<double> WeightSeq::terms(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t n = 1; n <= count; ++n) out[n - 1] = term(n);
  return out;
}

std::vector<Rational> WeightSeq::exact_terms(std::size_t count) const {
  if (!is_exact()) throw InvalidArgument("sequence '" + descriptor() + "' is not exact");
  std::vector<Rational> out(count);
  for (std::size_t n = 1; n <= count; ++n) out[n - 1] = source_->exact_term(n);
  return out;
}

// ---------------------------------------------------------------------------
// Descriptors

namespace {

bool is_fraction_literal(std::string_view s) { return s.find('.') == std::string_view::npos; }

}  // namespace

WeightSeq make_sequence(std::string_view descriptor, bool allow_float) {
  if (descriptor == "ones") return WeightSeq::ones();
  if (descriptor == "dyadic") return WeightSeq::dyadic();
  auto colon = descriptor.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("unknown weight descriptor '" + std::string(descriptor) + "'");
  }
  std::string_view kind = descriptor.substr(0, colon);
  std::string_view arg = descriptor.substr(colon + 1);
  if (kind == "geometric") {
    Rational q = parse_rational(arg);
    if (is_fraction_literal(arg)) return WeightSeq::geometric(q);
    if (!allow_float) {
      throw InvalidArgument("decimal ratio '" + std::string(arg) + "' needs --float (use p/q for exact weights)");
    }
    if (q <= 0) throw InvalidArgument("geometric ratio must be positive");
    return WeightSeq::geometric_float(to_double(q));
  }
  if (kind == "perturbed-dyadic") {
    Rational k = parse_rational(arg);
    if (boost::multiprecision::denominator(k) != 1 || k < 1) {
      throw InvalidArgument("perturbed-dyadic index must be a positive integer");
    }
    return WeightSeq::perturbed_dyadic(boost::multiprecision::numerator(k).convert_to<std::size_t>());
  }
  if (kind == "power") {
    Rational alpha = parse_rational(arg);
    if (boost::multiprecision::denominator(alpha) == 1) return WeightSeq::power(alpha);
    if (!allow_float) {
      throw InvalidArgument("non-integer exponent '" + std::string(arg) + "' gives float weights; needs --float");
    }
    return WeightSeq::power_float(to_double(alpha));
  }
  throw InvalidArgument("unknown weight descriptor '" + std::string(descriptor) + "'");
}

// ---------------------------------------------------------------------------
// Diagnostics

RatioReport ratio_diagnostics(const WeightSeq& w, std::size_t n) {
  if (n < 2) throw InvalidArgument("ratio_diagnostics: N must be at least 2");
  RatioReport r;
  r.n = n;
  r.ratios.resize(n);
  r.max_term_ratios.resize(n);
  double max_term = 0.0;
  r.is_nonincreasing = true;
  for (std::size_t k = 1; k <= n; ++k) {
    double term = w.term(k);
    double sum = w.partial_sum(k);
    max_term = std::max(max_term, term);
    r.ratios[k - 1] = term / sum;
    r.max_term_ratios[k - 1] = max_term / sum;
    // Slack absorbs rounding in ratios that are exactly constant.
    if (k > 1 && r.ratios[k - 1] > r.ratios[k - 2] * (1.0 + 1e-12)) r.is_nonincreasing = false;
  }
  if (auto lim = w.ratio_limit()) {
    r.ratio_limit_estimate = *lim;
    r.ratio_limit_closed_form = true;
  } else {
    r.ratio_limit_estimate = r.ratios.back();
  }
  r.partial_sum_at_n = w.partial_sum(n);
  constexpr std::size_t kExactReportLimit = 4096;
  if (w.is_exact() && n <= kExactReportLimit) r.exact_partial_sum_at_n = w.exact_partial_sum(n);
  r.verdict = w.verdict();
  r.justification = w.verdict_reason();
  return r;
}

WeightSeq coarsen(const WeightSeq& w, std::vector<std::size_t> blocks, bool cyclic) {
  return WeightSeq(std::make_shared<detail::Coarsened>(w, std::move(blocks), cyclic));
}

std::optional<std::vector<std::size_t>> match_partial_sums(const WeightSeq& psi, const WeightSeq& lam, std::size_t n,
                                                           std::size_t scan_limit) {
  if (!psi.is_exact() || !lam.is_exact()) {
    throw InvalidArgument("check_prec requires exact rational sequences");
  }
  if (n == 0) throw InvalidArgument("check_prec: N must be at least 1");
  std::vector<std::size_t> matched;
  matched.reserve(n);
  std::size_t idx = 0;
  Rational lam_sum = 0;
  auto lam_len = lam.length();
  for (std::size_t m = 1; m <= n; ++m) {
    Rational target = *psi.exact_partial_sum(m);
    while (lam_sum < target) {
      ++idx;
      if (idx > scan_limit || (lam_len && idx > *lam_len)) return std::nullopt;
      lam_sum += *lam.exact_term(idx);
    }
    if (lam_sum != target) return std::nullopt;
    matched.push_back(idx);
  }
  return matched;
}

bool check_prec(const WeightSeq& psi, const WeightSeq& lam, std::size_t n, std::size_t scan_limit) {
  return match_partial_sums(psi, lam, n, scan_limit).has_value();
}

}  // namespace hardy
