#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hardy/constructions.hpp"
#include "hardy/errors.hpp"
#include "hardy/mean_families.hpp"

using namespace hardy;

namespace {

// Materializes the expansion and averages blocks, all in exact rationals.
std::vector<Rational> rearrange_oracle(const std::vector<double>& x, const std::vector<int>& counts) {
  std::vector<Rational> s;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < counts[i]; ++c) s.push_back(exact_from_double(x[i]));
  std::sort(s.begin(), s.end(), [](const Rational& a, const Rational& b) { return a > b; });
  std::vector<Rational> y;
  std::size_t pos = 0;
  for (int c : counts) {
    Rational sum = 0;
    for (int j = 0; j < c; ++j) sum += s[pos++];
    y.push_back(sum / c);
  }
  return y;
}

}  // namespace

TEST_CASE("rearrangement on a worked instance") {
  auto r = rearrange_samesum(PointVector({1, 3}), WeightVector::exact({2, 1}));
  CHECK(r.y_exact == std::vector<Rational>{2, 1});
  CHECK(r.expansion_size == 3);
  CHECK(r.scale_factor == 1);
  auto half = rearrange_samesum(PointVector({1, 5}), WeightVector::exact({Rational(1, 2), Rational(1, 3)}));
  CHECK(half.scale_factor == 6);
  CHECK(half.y_exact == std::vector<Rational>{Rational(11, 3), 1});
}

TEST_CASE("rearrangement matches the materialized oracle") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(1, 7), cnt(1, 6);
  std::uniform_real_distribution<double> val(0.1, 10.0);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = len(rng);
    std::vector<double> x(n);
    std::vector<int> counts(n);
    std::vector<Rational> w(n);
    int denom = cnt(rng);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = val(rng);
      counts[i] = cnt(rng);
      w[i] = Rational(counts[i], denom);
    }
    auto r = rearrange_samesum(PointVector(x), WeightVector::exact(w));
    // Dividing by a common denominator does not change the block structure
    // once K rescales it back.
    auto oracle = rearrange_oracle(x, counts);
    CHECK(r.y_exact == oracle);
    CHECK(std::is_sorted(r.y_exact.rbegin(), r.y_exact.rend()));
  }
}

TEST_CASE("rearrangement budget and exactness requirements") {
  CHECK_THROWS_AS(rearrange_samesum(PointVector({1, 2}), WeightVector::exact({1000, 1}), 100), BudgetExceeded);
  CHECK_THROWS_AS(rearrange_samesum(PointVector({1, 2}), WeightVector::floating({1, 1})), InvalidArgument);
}

TEST_CASE("prefix-mean inequality for concave monotone means") {
  CheckReport r = verify_jcin(parse_mean("arithmetic"), PointVector({1, 3}), WeightVector::exact({2, 1}));
  CHECK(r.pass);
  CHECK(r.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
  CheckReport g = verify_jcin(parse_mean("geometric"), PointVector({0.5, 4, 2, 9}), WeightVector::exact({1, 3, 2, 1}));
  CHECK(g.pass);
  CHECK_THROWS_AS(verify_jcin(power_mean_spec(2), PointVector({1, 3}), WeightVector::exact({2, 1})), PreconditionError);
}

TEST_CASE("counterexample search for the quadratic mean") {
  CounterexampleSearch s = search_jcin_counterexample(power_mean_spec(2), 2000, 1);
  CHECK(s.found);
  REQUIRE(s.failing);
  CHECK(s.failing->worst_margin < 0);
  CounterexampleSearch none = search_jcin_counterexample(power_mean_spec(1), 200, 1);
  CHECK_FALSE(none.found);
  CHECK(none.verdict.find("inconclusive") != std::string::npos);
}

TEST_CASE("cut check in exact arithmetic") {
  for (const WeightSeq& lam : {WeightSeq::ones(), WeightSeq::dyadic(), WeightSeq::geometric(Rational(3, 4))}) {
    CAPTURE(lam.descriptor());
    CheckReport r = verify_cut(ClosedFormArithmetic{}, coarsen(lam, {2, 3}, true), lam, 60);
    CHECK(r.pass);
    CHECK(r.worst_margin >= 0);
  }
  // Reversed order violates the hypothesis.
  CHECK_THROWS_AS(verify_cut(ClosedFormArithmetic{}, WeightSeq::ones(), coarsen(WeightSeq::ones(), {2}, true), 20),
                  PreconditionError);
  CHECK_THROWS_AS(verify_cut(ClosedFormArithmetic{}, WeightSeq::geometric_float(0.5), WeightSeq::dyadic(), 20),
                  InvalidArgument);
}

TEST_CASE("cut check through the finite search") {
  CheckReport r = verify_cut(power_mean_spec(0.5), coarsen(WeightSeq::ones(), {2}, true), WeightSeq::ones(), 64, 1e-6);
  CHECK(r.pass);
  CHECK_THROWS_AS(verify_cut(power_mean_spec(2), coarsen(WeightSeq::ones(), {2}, true), WeightSeq::ones(), 16),
                  PreconditionError);
}

TEST_CASE("running means of nonincreasing step functions") {
  StepFunction f({5, 3, 3, 1}, WeightVector::exact({Rational(1, 2), 1, 2, Rational(1, 3)}));
  std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 3.5, 3.8};
  for (const char* m : {"arithmetic", "geometric", "harmonic", "power:3", "min"}) {
    CAPTURE(m);
    CHECK(verify_decreasing(parse_mean(m), f, grid).pass);
  }
  StepFunction up({1, 2}, WeightVector::exact({1, 1}));
  CHECK_THROWS_AS(verify_decreasing(parse_mean("arithmetic"), up, {1.0, 2.0}), PreconditionError);
}

TEST_CASE("lower semicontinuity example") {
  LscTable t = reproduce_lsc_example(10, 64);
  REQUIRE(t.rows.size() == 10);
  // k = 1: ψ_1 = 1 and Ψ_m = 3/2 - 2^{-m} afterwards.
  double k1 = 1;
  for (int m = 2; m < 80; ++m) k1 += std::ldexp(1.0, -m) / (1.5 - std::ldexp(1.0, -m));
  CHECK(t.rows[0].value == doctest::Approx(k1).epsilon(1e-12));
  CHECK(t.rows[0].value < t.baseline);
  CHECK(t.below_baseline == std::vector<std::size_t>{1});
  for (std::size_t k = 2; k <= 10; ++k) CHECK(t.rows[k - 1].value >= t.baseline);
  CHECK(t.limit_error < 1e-3);
  LscTable far = reproduce_lsc_example(20, 200);
  CHECK(far.pass);
  CHECK(far.rows.back().value == doctest::Approx(far.limit_target).epsilon(1e-4));
  CHECK(t.limit_target == doctest::Approx(t.baseline + 0.5));
  CHECK_THROWS_AS(reproduce_lsc_example(0, 64), InvalidArgument);
}

TEST_CASE("weighted constants stay below the unweighted one") {
  Mu1Sweep s = verify_mu1_sweep(power_mean_spec(0.5), 64, 5, 3);
  CHECK(s.report.pass);
  CHECK(s.values.size() == 5);
  for (double v : s.values) CHECK(v <= 4.0);
  Mu1Sweep tight = verify_mu1_sweep(power_mean_spec(0.5), 64, 3, 3, 1.5, 0.0);
  CHECK_FALSE(tight.report.pass);
  CHECK(tight.report.worst_margin < 0);
  CHECK_THROWS_AS(verify_mu1_sweep(parse_mean("quasiarithmetic:log"), 16, 2, 1), PreconditionError);
}

TEST_CASE("random rational weights are reproducible") {
  CHECK(random_rational_weights(10, 4) == random_rational_weights(10, 4));
  CHECK(random_rational_weights(10, 4) != random_rational_weights(10, 5));
}
