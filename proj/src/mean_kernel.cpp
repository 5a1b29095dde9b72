#include "hardy/mean_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/mean_families.hpp"

namespace hardy {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

// ---------------------------------------------------------------------------
// PointVector

PointVector::PointVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("point vector must be nonempty");
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("point vector entries must be finite and strictly positive");
    }
  }
}

double PointVector::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PointVector::max() const { return *std::max_element(values_.begin(), values_.end()); }

PointVector PointVector::prefix(std::size_t n) const {
  if (n == 0 || n > values_.size()) throw InvalidArgument("prefix length out of range");
  return PointVector(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)));
}

// ---------------------------------------------------------------------------
// WeightVector

WeightVector WeightVector::exact(std::vector<Rational> entries) {
  if (entries.empty()) throw InvalidArgument("weight vector must be nonempty");
  WeightVector w;
  w.mode_ = NumberMode::exact_rational;
  w.approx_.reserve(entries.size());
  for (const auto& e : entries) {
    if (e <= 0) throw InvalidArgument("weights must be strictly positive (zero weight is not allowed)");
    w.approx_.push_back(to_double(e));
  }
  w.exact_ = std::move(entries);
  return w;
}

WeightVector WeightVector::floating(std::vector<double> entries) {
  if (entries.empty()) throw InvalidArgument("weight vector must be nonempty");
  for (double e : entries) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw InvalidArgument("weights must be finite and strictly positive (zero weight is not allowed)");
    }
  }
  WeightVector w;
  w.mode_ = NumberMode::floating;
  w.approx_ = std::move(entries);
  return w;
}

const std::vector<Rational>& WeightVector::exact_values() const {
  if (!is_exact()) throw InvalidArgument("weight vector is not in exact rational mode");
  return exact_;
}

std::vector<double> WeightVector::normalized() const {
  std::vector<double> out(size());
  if (is_exact()) {
    Rational sum = std::accumulate(exact_.begin(), exact_.end(), Rational(0));
    for (std::size_t i = 0; i < size(); ++i) out[i] = to_double(exact_[i] / sum);
  } else {
    double sum = std::accumulate(approx_.begin(), approx_.end(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) out[i] = approx_[i] / sum;
  }
  return out;
}

double WeightVector::total() const {
  if (is_exact()) return to_double(std::accumulate(exact_.begin(), exact_.end(), Rational(0)));
  return std::accumulate(approx_.begin(), approx_.end(), 0.0);
}

WeightVector WeightVector::scaled(const Rational& t) const {
  if (t <= 0) throw InvalidArgument("weight scale must be positive");
  if (!is_exact()) return scaled(to_double(t));
  std::vector<Rational> e(exact_);
  for (auto& v : e) v *= t;
  return exact(std::move(e));
}

WeightVector WeightVector::scaled(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("weight scale must be positive");
  std::vector<double> e(approx_);
  for (auto& v : e) v *= t;
  return floating(std::move(e));
}

WeightVector WeightVector::prefix(std::size_t n) const {
  if (n == 0 || n > size()) throw InvalidArgument("prefix length out of range");
  if (is_exact()) return exact(std::vector<Rational>(exact_.begin(), exact_.begin() + static_cast<std::ptrdiff_t>(n)));
  return floating(std::vector<double>(approx_.begin(), approx_.begin() + static_cast<std::ptrdiff_t>(n)));
}

// ---------------------------------------------------------------------------
// MeanSpec

MeanSpec::MeanSpec(Params params, MeanFlags flags, std::string descriptor)
    : params_(std::move(params)), flags_(flags), descriptor_(std::move(descriptor)) {}

MeanFamily MeanSpec::family() const {
  switch (params_.index()) {
    case 0: return MeanFamily::power;
    case 1: return MeanFamily::quasiarithmetic;
    default: return MeanFamily::custom;
  }
}

MeanSpec MeanSpec::with_flags(MeanFlags flags) const {
  MeanSpec copy = *this;
  copy.flags_ = flags;
  return copy;
}

double evaluate(const MeanSpec& mean, const PointVector& x, const WeightVector& w) {
  require_same_length(x.size(), w.size(), "evaluate");
  if (x.size() == 0) throw InvalidArgument("evaluate: empty input");
  switch (mean.family()) {
    case MeanFamily::power:
      return power_mean(std::get<PowerParams>(mean.params()).p, x, w);
    case MeanFamily::quasiarithmetic:
      return quasiarithmetic_mean(std::get<Generator>(mean.params()), x, w);
    case MeanFamily::custom:
      return std::get<CustomMean>(mean.params()).fn(x.values(), w.values());
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Shuffle

std::vector<double> shuffle(const std::vector<double>& p, const std::vector<double>& q) {
  return shuffle(std::span<const double>(p), std::span<const double>(q));
}

PointVector shuffle(const PointVector& p, const PointVector& q) {
  return PointVector(shuffle(p.values(), q.values()));
}

WeightVector shuffle(const WeightVector& p, const WeightVector& q) {
  require_same_length(p.size(), q.size(), "shuffle");
  if (p.is_exact() && q.is_exact()) {
    return WeightVector::exact(shuffle(std::span<const Rational>(p.exact_values()),
                                       std::span<const Rational>(q.exact_values())));
  }
  return WeightVector::floating(shuffle(p.values(), q.values()));
}

// ---------------------------------------------------------------------------
// Step functions

StepFunction::StepFunction(std::vector<double> values, WeightVector lengths)
    : values_(std::move(values)), lengths_(std::move(lengths)) {
  require_same_length(values_.size(), lengths_.size(), "step function");
  PointVector check(values_);  // validates positivity
}

std::vector<double> StepFunction::breakpoints() const {
  std::vector<double> out{0.0};
  if (auto exact = exact_breakpoints()) {
    for (std::size_t k = 1; k < exact->size(); ++k) out.push_back(to_double((*exact)[k]));
    return out;
  }
  double acc = 0.0;
  for (double len : lengths_.values()) out.push_back(acc += len);
  return out;
}

std::optional<std::vector<Rational>> StepFunction::exact_breakpoints() const {
  if (!lengths_.is_exact()) return std::nullopt;
  std::vector<Rational> out{Rational(0)};
  Rational acc = 0;
  for (const auto& len : lengths_.exact_values()) out.push_back(acc += len);
  return out;
}

double StepFunction::support_end() const { return breakpoints().back(); }

double StepFunction::operator()(double t) const {
  auto bp = breakpoints();
  if (t < 0.0 || t >= bp.back()) throw InvalidArgument("step function evaluated outside its support");
  auto it = std::upper_bound(bp.begin(), bp.end(), t);
  return values_[static_cast<std::size_t>(it - bp.begin()) - 1];
}

bool StepFunction::is_nonincreasing() const {
  return std::is_sorted(values_.rbegin(), values_.rend());
}

StepFunction chi(const PointVector& x, const WeightVector& w) {
  require_same_length(x.size(), w.size(), "chi");
  return StepFunction(std::vector<double>(x.values().begin(), x.values().end()), w);
}

namespace {

// Collects the pieces of f restricted to [a, b) using arithmetic type T for the
// breakpoints. `whole` lengths are reused verbatim.
template <typename T, typename LengthOf, typename MakeWeights>
double integral_impl(const MeanSpec& mean, const StepFunction& f, const std::vector<T>& bp, const T& a,
                     const T& b, LengthOf length_of, MakeWeights make_weights) {
  if (!(a < b)) throw InvalidArgument("integral_eval: need a < b");
  if (a < bp.front() || b > bp.back()) throw InvalidArgument("integral_eval: [a, b) outside the support");
  std::vector<double> values;
  std::vector<T> lengths;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const T& lo = bp[k];
    const T& hi = bp[k + 1];
    if (!(hi > a) || !(lo < b)) continue;
    values.push_back(f.values()[k]);
    if (!(lo < a) && !(hi > b)) {
      lengths.push_back(length_of(k));
    } else {
      lengths.push_back((hi < b ? hi : b) - (lo > a ? lo : a));
    }
  }
  return evaluate(mean, PointVector(std::move(values)), make_weights(std::move(lengths)));
}

}  // namespace

double integral_eval(const MeanSpec& mean, const StepFunction& f, double a, double b) {
  if (f.lengths().is_exact()) {
    return integral_eval(mean, f, exact_from_double(a), exact_from_double(b));
  }
  return integral_impl<double>(
      mean, f, f.breakpoints(), a, b, [&](std::size_t k) { return f.lengths()[k]; },
      [](std::vector<double> l) { return WeightVector::floating(std::move(l)); });
}

double integral_eval(const MeanSpec& mean, const StepFunction& f, const Rational& a, const Rational& b) {
  auto exact = f.exact_breakpoints();
  if (!exact) return integral_eval(mean, f, to_double(a), to_double(b));
  return integral_impl<Rational>(
      mean, f, *exact, a, b, [&](std::size_t k) { return f.lengths().exact_values()[k]; },
      [](std::vector<Rational> l) { return WeightVector::exact(std::move(l)); });
}

// ---------------------------------------------------------------------------
// Axiom checks

std::string to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::mean_value: return "mean_value";
    case Axiom::nullhomogeneity: return "nullhomogeneity";
    case Axiom::reduction: return "reduction";
    case Axiom::elimination: return "elimination";
    case Axiom::symmetry: return "symmetry";
    case Axiom::monotonicity: return "monotonicity";
    case Axiom::concavity: return "concavity";
    case Axiom::homogeneity: return "homogeneity";
  }
  return "unknown";
}

namespace {

double relative_gap(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

constexpr double kEliminationCoarse = 1e-6;
constexpr double kEliminationFine = 1e-9;

double elimination_gap(const MeanSpec& mean, const PointVector& x, const WeightVector& w, double appended,
                       double eps) {
  std::vector<double> xs(x.values().begin(), x.values().end());
  xs.push_back(appended);
  // Weights are normalized to total 1 so that eps is a relative weight.
  std::vector<double> ws = w.normalized();
  ws.push_back(eps);
  return relative_gap(evaluate(mean, PointVector(std::move(xs)), WeightVector::floating(std::move(ws))),
                      evaluate(mean, x, WeightVector::floating(w.normalized())));
}

}  // namespace

double measure_defect(const MeanSpec& mean, const AxiomWitness& wit) {
  const auto& x = wit.x;
  const auto& w = wit.w;
  switch (wit.axiom) {
    case Axiom::mean_value: {
      double m = evaluate(mean, x, w);
      double lo = x.min();
      double hi = x.max();
      double excess = std::max({lo - m, m - hi, 0.0});
      if (std::isnan(m)) return std::numeric_limits<double>::infinity();
      return excess / std::max(std::abs(m), 1e-300);
    }
    case Axiom::nullhomogeneity: {
      WeightVector scaled = w.is_exact() ? w.scaled(exact_from_double(wit.scalar)) : w.scaled(wit.scalar);
      return relative_gap(evaluate(mean, x, scaled), evaluate(mean, x, w));
    }
    case Axiom::reduction: {
      const WeightVector& mu = *wit.other_w;
      WeightVector sum;
      if (w.is_exact() && mu.is_exact()) {
        std::vector<Rational> s(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) s[i] = w.exact_values()[i] + mu.exact_values()[i];
        sum = WeightVector::exact(std::move(s));
      } else {
        std::vector<double> s(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) s[i] = w[i] + mu[i];
        sum = WeightVector::floating(std::move(s));
      }
      return relative_gap(evaluate(mean, x, sum), evaluate(mean, shuffle(x, x), shuffle(w, mu)));
    }
    case Axiom::elimination: {
      // The gap must shrink as the appended weight tends to zero.
      double coarse = elimination_gap(mean, x, w, wit.scalar, kEliminationCoarse);
      double fine = elimination_gap(mean, x, w, wit.scalar, kEliminationFine);
      return std::max(0.0, fine - 1e-2 * coarse);
    }
    case Axiom::symmetry: {
      std::vector<double> px(x.size());
      std::vector<double> pwd(x.size());
      std::vector<Rational> pwe;
      if (w.is_exact()) pwe.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        px[i] = x[wit.permutation[i]];
        if (w.is_exact()) {
          pwe[i] = w.exact_values()[wit.permutation[i]];
        } else {
          pwd[i] = w[wit.permutation[i]];
        }
      }
      WeightVector pw = w.is_exact() ? WeightVector::exact(std::move(pwe)) : WeightVector::floating(std::move(pwd));
      return relative_gap(evaluate(mean, PointVector(std::move(px)), pw), evaluate(mean, x, w));
    }
    case Axiom::monotonicity: {
      double low = evaluate(mean, x, w);
      double high = evaluate(mean, *wit.other_x, w);
      return std::max(0.0, low - high) / std::max(std::abs(low), 1e-300);
    }
    case Axiom::concavity: {
      const PointVector& y = *wit.other_x;
      std::vector<double> mid(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) mid[i] = 0.5 * (x[i] + y[i]);
      double at_mid = evaluate(mean, PointVector(std::move(mid)), w);
      double chord = 0.5 * (evaluate(mean, x, w) + evaluate(mean, y, w));
      return std::max(0.0, chord - at_mid) / std::max(std::abs(chord), 1e-300);
    }
    case Axiom::homogeneity: {
      std::vector<double> tx(x.values().begin(), x.values().end());
      for (auto& v : tx) v *= wit.scalar;
      return relative_gap(evaluate(mean, PointVector(std::move(tx)), w), wit.scalar * evaluate(mean, x, w));
    }
  }
  return 0.0;
}

namespace {

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  std::size_t length() { return std::uniform_int_distribution<std::size_t>(1, 8)(rng_); }

  double positive() { return std::exp(std::uniform_real_distribution<double>(std::log(1e-2), std::log(1e2))(rng_)); }

  PointVector point(std::size_t n) {
    std::vector<double> v(n);
    for (auto& e : v) e = positive();
    return PointVector(std::move(v));
  }

  Rational small_rational() {
    std::uniform_int_distribution<int> num(1, 50);
    std::uniform_int_distribution<int> den(1, 50);
    return Rational(num(rng_), den(rng_));
  }

  WeightVector weights(std::size_t n) {
    std::vector<Rational> v(n);
    for (auto& e : v) e = small_rational();
    return WeightVector::exact(std::move(v));
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng_);
    return p;
  }

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  double factor() { return std::uniform_real_distribution<double>(1.0, 4.0)(rng_); }

  AxiomWitness draw(Axiom axiom) {
    AxiomWitness wit;
    wit.axiom = axiom;
    std::size_t n = length();
    wit.x = point(n);
    wit.w = weights(n);
    switch (axiom) {
      case Axiom::mean_value: break;
      case Axiom::nullhomogeneity: wit.scalar = to_double(small_rational()); break;
      case Axiom::reduction: wit.other_w = weights(n); break;
      case Axiom::elimination: wit.scalar = positive(); break;
      case Axiom::symmetry: wit.permutation = permutation(n); break;
      case Axiom::monotonicity: {
        std::vector<double> raised(wit.x.values().begin(), wit.x.values().end());
        raised[index(n)] *= factor();
        wit.other_x = PointVector(std::move(raised));
        break;
      }
      case Axiom::concavity: wit.other_x = point(n); break;
      case Axiom::homogeneity: wit.scalar = positive(); break;
    }
    return wit;
  }

 private:
  std::mt19937_64 rng_;
};

bool required_for(Axiom axiom, const MeanFlags& flags) {
  switch (axiom) {
    case Axiom::mean_value:
    case Axiom::nullhomogeneity:
    case Axiom::reduction: return true;
    case Axiom::elimination: return flags.continuous_in_weights;
    case Axiom::symmetry: return flags.symmetric;
    case Axiom::monotonicity: return flags.monotone;
    case Axiom::concavity: return flags.concave;
    case Axiom::homogeneity: return flags.homogeneous;
  }
  return false;
}

}  // namespace

bool AxiomReport::ok() const {
  return std::all_of(outcomes.begin(), outcomes.end(),
                     [](const AxiomOutcome& o) { return !o.required || o.passed(); });
}

const AxiomOutcome& AxiomReport::outcome(Axiom axiom) const {
  for (const auto& o : outcomes) {
    if (o.axiom == axiom) return o;
  }
  throw InvalidArgument("axiom not measured: " + to_string(axiom));
}

AxiomReport check_axioms(const MeanSpec& mean, std::size_t trials, std::uint64_t seed, double tolerance) {
  if (trials == 0) throw InvalidArgument("check_axioms: trials must be at least 1");
  AxiomReport report;
  report.mean = mean.descriptor();
  report.tolerance = tolerance;
  report.seed = seed;
  const Axiom all[] = {Axiom::mean_value, Axiom::nullhomogeneity, Axiom::reduction,    Axiom::elimination,
                       Axiom::symmetry,   Axiom::monotonicity,    Axiom::concavity,    Axiom::homogeneity};
  for (std::size_t a = 0; a < std::size(all); ++a) {
    Axiom axiom = all[a];
    // Elimination is a limit statement; it is meaningless without weight continuity.
    if (axiom == Axiom::elimination && !mean.flags().continuous_in_weights) continue;
    InstanceGenerator gen(seed * 0x9E3779B97F4A7C15ULL + a);
    AxiomOutcome out;
    out.axiom = axiom;
    out.required = required_for(axiom, mean.flags());
    out.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
      AxiomWitness wit = gen.draw(axiom);
      wit.defect = measure_defect(mean, wit);
      if (!(wit.defect <= tolerance)) {
        ++out.failures;
        if (!out.witness || !(wit.defect <= out.worst_defect)) {
          out.worst_defect = wit.defect;
          out.witness = wit;
        }
      } else {
        out.worst_defect = std::max(out.worst_defect, wit.defect);
      }
    }
    report.outcomes.push_back(std::move(out));
  }
  return report;
}

}  // namespace hardy
