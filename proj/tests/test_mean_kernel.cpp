#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hardy/errors.hpp"
#include "hardy/mean_families.hpp"
#include "hardy/mean_kernel.hpp"

using namespace hardy;

namespace {

WeightVector exact_weights(std::initializer_list<Rational> w) { return WeightVector::exact(std::vector<Rational>(w)); }

// Hand-rolled weighted power mean used as the oracle throughout.
double oracle_power(double p, const std::vector<double>& x, const std::vector<double>& w) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  double acc = 0.0;
  if (p == 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::log(x[i]);
    return std::exp(acc / total);
  }
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::pow(x[i], p);
  return std::pow(acc / total, 1.0 / p);
}

MeanSpec custom(std::string name, MeanFlags flags,
                std::function<double(std::span<const double>, std::span<const double>)> fn) {
  return MeanSpec(CustomMean{name, std::move(fn)}, flags, "custom:" + name);
}

}  // namespace

TEST_CASE("point and weight vectors reject bad entries") {
  CHECK_THROWS_AS(PointVector({1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(PointVector({1.0, -2.0}), InvalidArgument);
  CHECK_THROWS_AS(PointVector({INFINITY}), InvalidArgument);
  CHECK_THROWS_AS(exact_weights({1, 0}), InvalidArgument);
  CHECK_THROWS_AS(WeightVector::floating({1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(evaluate(power_mean_spec(1), PointVector({1, 2}), exact_weights({1})), InvalidArgument);
}

TEST_CASE("exact weights stay exact under normalization and scaling") {
  WeightVector w = exact_weights({Rational(1, 3), Rational(2, 3), 1});
  CHECK(w.is_exact());
  auto scaled = w.scaled(Rational(3, 2));
  CHECK(scaled.exact_values()[0] == Rational(1, 2));
  CHECK(w.total() == doctest::Approx(2.0));
  CHECK_THROWS_AS(WeightVector::floating({1.0}).exact_values(), InvalidArgument);
}

TEST_CASE("power means against the direct formula") {
  std::vector<double> x{0.5, 2.0, 7.0, 1.25};
  std::vector<double> w{1.0, 0.5, 2.0, 3.0};
  for (double p : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0}) {
    CAPTURE(p);
    double got = evaluate(power_mean_spec(p), PointVector(x), WeightVector::floating(w));
    CHECK(got == doctest::Approx(oracle_power(p, x, w)).epsilon(1e-13));
  }
  CHECK(evaluate(power_mean_spec(-INFINITY), PointVector(x), WeightVector::floating(w)) == 0.5);
  CHECK(evaluate(power_mean_spec(INFINITY), PointVector(x), WeightVector::floating(w)) == 7.0);
}

TEST_CASE("small worked instances") {
  CHECK(evaluate(parse_mean("arithmetic"), PointVector({1, 3}), exact_weights({2, 1})) == doctest::Approx(5.0 / 3));
  CHECK(evaluate(parse_mean("geometric"), PointVector({1, 4}), exact_weights({1, 1})) == doctest::Approx(2.0));
  CHECK(evaluate(parse_mean("harmonic"), PointVector({1, 2}), exact_weights({1, 1})) == doctest::Approx(4.0 / 3));
}

TEST_CASE("power means are continuous through p = 0 and toward the extremes") {
  PointVector x({0.3, 4.0, 1.5});
  WeightVector w = exact_weights({1, 2, 3});
  double g = evaluate(power_mean_spec(0), x, w);
  CHECK(evaluate(power_mean_spec(1e-7), x, w) == doctest::Approx(g).epsilon(1e-6));
  CHECK(evaluate(power_mean_spec(-1e-7), x, w) == doctest::Approx(g).epsilon(1e-6));
  CHECK(evaluate(power_mean_spec(400), x, w) == doctest::Approx(4.0).epsilon(1e-2));
  CHECK(evaluate(power_mean_spec(-400), x, w) == doctest::Approx(0.3).epsilon(1e-2));
  // Large values do not overflow.
  CHECK(std::isfinite(evaluate(power_mean_spec(50), PointVector({1e200, 1e-200}), exact_weights({1, 1}))));
}

TEST_CASE("shuffle interleaves") {
  auto s = shuffle(std::vector<double>{1, 2}, std::vector<double>{3, 4});
  CHECK(s == std::vector<double>{1, 3, 2, 4});
  CHECK_THROWS_AS(shuffle(std::vector<double>{1}, std::vector<double>{3, 4}), InvalidArgument);
}

TEST_CASE("step functions and integral evaluation") {
  StepFunction f = chi(PointVector({3, 1}), exact_weights({1, 1}));
  CHECK(f(0.5) == 3.0);
  CHECK(f(1.5) == 1.0);
  CHECK(f.support_end() == 2.0);
  CHECK(f.is_nonincreasing());
  MeanSpec a = parse_mean("arithmetic");
  CHECK(integral_eval(a, f, 0.0, 2.0) == doctest::Approx(2.0));
  CHECK(integral_eval(a, f, 0.0, 1.5) == doctest::Approx(3.5 / 1.5));
  CHECK(integral_eval(a, f, Rational(1, 2), Rational(3, 2)) == doctest::Approx(2.0));
  // On whole pieces the integral reproduces the weighted mean.
  PointVector x({0.5, 2.0, 7.0});
  WeightVector w = exact_weights({Rational(1, 3), 2, Rational(5, 7)});
  MeanSpec g = power_mean_spec(0);
  CHECK(integral_eval(g, chi(x, w), Rational(0), Rational(1, 3) + 2 + Rational(5, 7)) ==
        doctest::Approx(evaluate(g, x, w)).epsilon(1e-14));
  CHECK_THROWS_AS(integral_eval(a, f, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(integral_eval(a, f, 0.0, 3.0), InvalidArgument);
}

TEST_CASE("axiom suite accepts the power means with their flags") {
  for (double p : std::vector<double>{-INFINITY, -2.0, 0.0, 0.5, 1.0, 3.0, INFINITY}) {
    CAPTURE(p);
    AxiomReport report = check_axioms(power_mean_spec(p), 60, 11);
    CHECK(report.ok());
  }
}

TEST_CASE("axiom suite reports concavity as unclaimed for p > 1") {
  AxiomReport report = check_axioms(power_mean_spec(2), 100, 5);
  CHECK(report.ok());
  const AxiomOutcome& c = report.outcome(Axiom::concavity);
  CHECK_FALSE(c.required);
  CHECK(c.failures > 0);
}

TEST_CASE("planted defects are caught with a witness") {
  MeanFlags flags{true, true, false, true, true};
  // Squared weights: nullhomogeneous and mean-valued, but reduction fails.
  MeanSpec squared = custom("squared-weights", flags, [](std::span<const double> x, std::span<const double> w) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += w[i] * w[i] * x[i];
      den += w[i] * w[i];
    }
    return num / den;
  });
  AxiomReport r1 = check_axioms(squared, 50, 3);
  CHECK_FALSE(r1.ok());
  const AxiomOutcome& red = r1.outcome(Axiom::reduction);
  CHECK(red.failures > 0);
  REQUIRE(red.witness);
  CHECK(measure_defect(squared, *red.witness) > 1e-9);
  CHECK(r1.outcome(Axiom::nullhomogeneity).passed());

  // Weights without normalization: breaks nullhomogeneity.
  MeanSpec unnormalized = custom("unnormalized", flags, [](std::span<const double> x, std::span<const double> w) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += w[i] * x[i];
      den += w[i];
    }
    return num / den * std::min(den, 1.0) + std::max(0.0, 1.0 - den) * x[0];
  });
  CHECK(check_axioms(unnormalized, 50, 3).outcome(Axiom::nullhomogeneity).failures > 0);

  // Claims concavity while being the quadratic mean.
  MeanFlags concave_claim = power_mean_spec(2).flags();
  concave_claim.concave = true;
  AxiomReport r3 = check_axioms(power_mean_spec(2).with_flags(concave_claim), 100, 3);
  CHECK_FALSE(r3.ok());
  CHECK(r3.outcome(Axiom::concavity).required);
  CHECK(r3.outcome(Axiom::concavity).failures > 0);
}

TEST_CASE("axiom suite is deterministic in the seed") {
  AxiomReport a = check_axioms(power_mean_spec(0.5), 30, 42);
  AxiomReport b = check_axioms(power_mean_spec(0.5), 30, 42);
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) CHECK(a.outcomes[i].worst_defect == b.outcomes[i].worst_defect);
}
