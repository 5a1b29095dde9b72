#include <doctest.h>

#include <cmath>
#include <random>

#include "hardy/errors.hpp"
#include "hardy/mean_families.hpp"

using namespace hardy;

TEST_CASE("descriptor parsing") {
  CHECK(is_arithmetic(parse_mean("arithmetic")));
  CHECK(is_arithmetic(parse_mean("power:1")));
  CHECK_FALSE(is_arithmetic(parse_mean("power:1/2")));
  CHECK(std::get<PowerParams>(parse_mean("power:1/2").params()).p == 0.5);
  CHECK(std::get<PowerParams>(parse_mean("min").params()).p == -INFINITY);
  CHECK(std::get<PowerParams>(parse_mean("power:-inf").params()).p == -INFINITY);
  CHECK(parse_mean("quasiarithmetic:log").family() == MeanFamily::quasiarithmetic);
  CHECK_THROWS_AS(parse_mean("median"), InvalidArgument);
  CHECK_THROWS_AS(parse_mean("power:abc"), InvalidArgument);
  CHECK_THROWS_AS(parse_mean("quasiarithmetic:cube"), InvalidArgument);
}

TEST_CASE("power mean flags") {
  CHECK(power_mean_spec(0.5).flags().concave);
  CHECK(power_mean_spec(1).flags().concave);
  CHECK_FALSE(power_mean_spec(2).flags().concave);
  CHECK(power_mean_spec(2).flags().homogeneous);
  CHECK_FALSE(power_mean_spec(INFINITY).flags().continuous_in_weights);
}

TEST_CASE("quasi-arithmetic means match their power counterparts") {
  PointVector x({0.2, 1.0, 9.0});
  WeightVector w = WeightVector::exact({1, 2, Rational(1, 2)});
  CHECK(evaluate(parse_mean("quasiarithmetic:log"), x, w) == doctest::Approx(evaluate(power_mean_spec(0), x, w)));
  CHECK(evaluate(parse_mean("quasiarithmetic:identity"), x, w) == doctest::Approx(evaluate(power_mean_spec(1), x, w)));
  CHECK(evaluate(parse_mean("quasiarithmetic:reciprocal"), x, w) ==
        doctest::Approx(evaluate(power_mean_spec(-1), x, w)));
  CHECK(evaluate(parse_mean("quasiarithmetic:sqrt"), x, w) == doctest::Approx(evaluate(power_mean_spec(0.5), x, w)));
  CHECK(evaluate(quasiarithmetic_mean_spec(power_generator(3), {}), x, w) ==
        doctest::Approx(evaluate(power_mean_spec(3), x, w)));
  // Exponential generator: log(Σ w e^x / Σ w).
  double expected = std::log((std::exp(0.2) + 2 * std::exp(1.0) + 0.5 * std::exp(9.0)) / 3.5);
  CHECK(evaluate(parse_mean("quasiarithmetic:exp"), x, w) == doctest::Approx(expected));
  CHECK_FALSE(parse_mean("quasiarithmetic:exp").flags().homogeneous);
}

TEST_CASE("prefix means and gradient agree with direct evaluation and finite differences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<double> x(12), w(12);
  for (auto& v : x) v = u(rng);
  for (auto& v : w) v = u(rng);
  for (const char* d : {"arithmetic", "geometric", "harmonic", "power:1/2", "power:3", "quasiarithmetic:exp"}) {
    CAPTURE(d);
    MeanSpec m = parse_mean(d);
    auto pm = prefix_means(m, x, w);
    for (std::size_t n = 1; n <= x.size(); ++n) {
      PointVector xn(std::vector<double>(x.begin(), x.begin() + n));
      WeightVector wn = WeightVector::floating(std::vector<double>(w.begin(), w.begin() + n));
      CHECK(pm[n - 1] == doctest::Approx(evaluate(m, xn, wn)).epsilon(1e-12));
    }
    std::vector<double> grad;
    double f0 = prefix_objective(m, x, w, &grad);
    for (std::size_t k : {0UL, 5UL, 11UL}) {
      auto xp = x, xm = x;
      double h = 1e-6 * x[k];
      xp[k] += h;
      xm[k] -= h;
      double fd = (prefix_objective(m, xp, w, nullptr) - prefix_objective(m, xm, w, nullptr)) / (2 * h);
      CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-5));
    }
    CHECK(f0 > 0);
  }
}
