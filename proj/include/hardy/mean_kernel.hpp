#pragma once

// Weighted means on vectors of strictly positive reals, the shuffle operator,
// weighted characteristic (step) functions, and randomized axiom checks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hardy/rational.hpp"

namespace hardy {

/// Finite vector of strictly positive finite reals.
class PointVector {
 public:
  PointVector() = default;
  explicit PointVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double min() const;
  double max() const;
  PointVector prefix(std::size_t n) const;

 private:
  std::vector<double> values_;
};

enum class NumberMode { exact_rational, floating };

/// Finite list of strictly positive weights. Exact-rational vectors keep their
/// rational entries; a double view is always available.
class WeightVector {
 public:
  WeightVector() = default;
  static WeightVector exact(std::vector<Rational> entries);
  static WeightVector floating(std::vector<double> entries);

  NumberMode mode() const { return mode_; }
  bool is_exact() const { return mode_ == NumberMode::exact_rational; }
  std::size_t size() const { return approx_.size(); }
  std::span<const double> values() const { return approx_; }
  double operator[](std::size_t i) const { return approx_[i]; }
  /// Throws InvalidArgument in float mode.
  const std::vector<Rational>& exact_values() const;

  /// Entries divided by their sum; the division is exact in rational mode, so
  /// scaling the vector by any positive rational leaves the result bit-identical.
  std::vector<double> normalized() const;
  double total() const;

  WeightVector scaled(const Rational& t) const;
  WeightVector scaled(double t) const;
  WeightVector prefix(std::size_t n) const;

 private:
  NumberMode mode_ = NumberMode::floating;
  std::vector<Rational> exact_;
  std::vector<double> approx_;
};

struct MeanFlags {
  bool symmetric = false;
  bool monotone = false;
  bool concave = false;
  bool homogeneous = false;
  bool continuous_in_weights = false;
};

/// Paired forward/inverse maps of a quasi-arithmetic mean. `derivative` is
/// optional; a central difference of `forward` is used when it is empty.
struct Generator {
  std::string name;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  std::function<double(double)> derivative;
};

struct PowerParams {
  double p = 1.0;
};

/// Arbitrary callable mean, used for experiments and planted-defect tests.
/// Receives raw (unnormalized) weights.
struct CustomMean {
  std::string name;
  std::function<double(std::span<const double> x, std::span<const double> w)> fn;
};

enum class MeanFamily { power, quasiarithmetic, custom };

class MeanSpec {
 public:
  using Params = std::variant<PowerParams, Generator, CustomMean>;

  MeanSpec(Params params, MeanFlags flags, std::string descriptor);

  MeanFamily family() const;
  const Params& params() const { return params_; }
  const MeanFlags& flags() const { return flags_; }
  const std::string& descriptor() const { return descriptor_; }
  MeanSpec with_flags(MeanFlags flags) const;

 private:
  Params params_;
  MeanFlags flags_;
  std::string descriptor_;
};

/// M(x, w). Requires equal lengths; the result lies in [min x, max x].
double evaluate(const MeanSpec& mean, const PointVector& x, const WeightVector& w);

void require_same_length(std::size_t a, std::size_t b, const char* what);

/// (p1, q1, p2, q2, ..., pn, qn).
template <typename T>
std::vector<T> shuffle(std::span<const T> p, std::span<const T> q) {
  require_same_length(p.size(), q.size(), "shuffle");
  std::vector<T> out;
  out.reserve(2 * p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.push_back(p[i]);
    out.push_back(q[i]);
  }
  return out;
}

std::vector<double> shuffle(const std::vector<double>& p, const std::vector<double>& q);
PointVector shuffle(const PointVector& p, const PointVector& q);
WeightVector shuffle(const WeightVector& p, const WeightVector& q);

/// Piecewise constant function on [0, L): value x_k on [Λ_{k-1}, Λ_k).
/// Pieces are stored as (value, length); lengths carry the weight vector's mode.
class StepFunction {
 public:
  StepFunction(std::vector<double> values, WeightVector lengths);

  std::span<const double> values() const { return values_; }
  const WeightVector& lengths() const { return lengths_; }
  std::size_t pieces() const { return values_.size(); }

  /// (0, Λ_1, ..., Λ_n).
  std::vector<double> breakpoints() const;
  /// Exact breakpoints when the lengths are rational.
  std::optional<std::vector<Rational>> exact_breakpoints() const;
  double support_end() const;
  /// f(t) for t in [0, L); throws InvalidArgument outside the support.
  double operator()(double t) const;
  bool is_nonincreasing() const;

 private:
  std::vector<double> values_;
  WeightVector lengths_;
};

/// Weighted characteristic function χ_{x,w}.
StepFunction chi(const PointVector& x, const WeightVector& w);

/// Mean of f over [a, b): the mean of the piece values on the refinement of f
/// at a and b, weighted by the piece lengths. Whole pieces keep their stored
/// lengths, so the full support reproduces evaluate(mean, x, w) exactly.
double integral_eval(const MeanSpec& mean, const StepFunction& f, double a, double b);
double integral_eval(const MeanSpec& mean, const StepFunction& f, const Rational& a, const Rational& b);

enum class Axiom {
  mean_value,
  nullhomogeneity,
  reduction,
  elimination,
  symmetry,
  monotonicity,
  concavity,
  homogeneity,
};

std::string to_string(Axiom axiom);

/// A concrete instance of an axiom check. `measure_defect` recomputes the
/// defect from these fields alone.
struct AxiomWitness {
  Axiom axiom = Axiom::mean_value;
  PointVector x;
  WeightVector w;
  std::optional<PointVector> other_x;   // concavity: second point; monotonicity: raised point
  std::optional<WeightVector> other_w;  // reduction: μ
  double scalar = 0.0;                  // scaling factor or appended value
  std::vector<std::size_t> permutation;
  double defect = 0.0;
};

/// Relative defect of the relation the witness encodes; the relation holds
/// when the defect is at most the tolerance.
double measure_defect(const MeanSpec& mean, const AxiomWitness& witness);

struct AxiomOutcome {
  Axiom axiom = Axiom::mean_value;
  bool required = false;  // a defining axiom or a claimed flag
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_defect = 0.0;
  std::optional<AxiomWitness> witness;  // worst failing instance

  bool passed() const { return failures == 0; }
};

struct AxiomReport {
  std::string mean;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::vector<AxiomOutcome> outcomes;

  /// Every defining axiom and every claimed flag passed.
  bool ok() const;
  const AxiomOutcome& outcome(Axiom axiom) const;
};

/// Runs `trials` seeded random instances of each defining axiom and of each
/// capability property. Unclaimed properties are still measured; they only
/// count towards ok() when the corresponding flag is set. Elimination is
/// measured for means flagged continuous in the weights.
AxiomReport check_axioms(const MeanSpec& mean, std::size_t trials, std::uint64_t seed, double tolerance = 1e-9);

}  // namespace hardy
