// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hardy/constructions.hpp"
#include "hardy/errors.hpp"
#include "hardy/hardy_estimation.hpp"
#include "hardy/mean_families.hpp"
#include "hardy/weight_sequences.hpp"

using namespace hardy;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome ac1_copson() {
  double e = std::exp(1.0);
  bool ok = std::abs(copson_constant(0.5) - 4.0) <= 1e-12 && std::abs(copson_constant(0.0) - e) <= 1e-12 &&
            copson_constant(-INFINITY) == 1.0 && std::isinf(copson_constant(1.0)) && copson_constant(1.0) > 0;
  return {ok, fmt("C(1/2)=%.15g C(0)=%.15g C(-inf)=%.15g", copson_constant(0.5), copson_constant(0.0),
                  copson_constant(-INFINITY)) +
                  " C(1)=" + (std::isinf(copson_constant(1.0)) ? "inf" : "finite")};
}

Outcome ac2_dyadic() {
  double v = arithmetic_hardy(WeightSeq::dyadic(), 64, SeriesMode::certified).value;
  return {v >= 1.6066 && v <= 1.6068, fmt("H_A(dyadic)=%.15g", v)};
}

Outcome ac3_lsc() {
  LscTable t = reproduce_lsc_example(25, 64);
  bool limit_ok = t.limit_error <= 1e-3 && std::abs(t.limit_target - 2.1067) <= 1e-3;
  bool each_above = t.min_margin >= 0.0;
  std::string below;
  for (std::size_t k : t.below_baseline) below += (below.empty() ? "" : ",") + std::to_string(k);
  return {limit_ok && each_above,
          fmt("value(25)=%.10g target=%.10g limit_error=%.3g", t.rows.back().value, t.limit_target, t.limit_error) +
              (each_above ? std::string("; every value >= baseline")
                          : "; below baseline at k=" + below + fmt(" (min margin %.4g)", t.min_margin))};
}

// Oracle: by exchanging the order of summation the truncated ratio is
// Σ_k λ_k x_k T_k / Σ_k λ_k x_k with T_k = Σ_{n=k}^N λ_n/Λ_n, maximized by
// T_1; evaluated here in exact rationals from the raw terms.
Rational exchange_oracle(const std::vector<Rational>& lam) {
  std::vector<Rational> t(lam.size() + 1, Rational(0));
  Rational total = 0;
  std::vector<Rational> Lam;
  for (const auto& l : lam) Lam.push_back(total += l);
  for (std::size_t k = lam.size(); k-- > 0;) t[k] = t[k + 1] + lam[k] / Lam[k];
  return *std::max_element(t.begin(), t.end());
}

Outcome ac4_finite_oracle() {
  double worst = 0;
  for (const WeightSeq& w : {WeightSeq::ones(), WeightSeq::dyadic(), WeightSeq::geometric(Rational(1, 3))}) {
    for (std::size_t n : {4UL, 16UL, 64UL}) {
      double oracle = to_double(exchange_oracle(w.exact_terms(n)));
      double got = finite_lower_bound(power_mean_spec(1), w, n).value;
      worst = std::max(worst, std::abs(got - oracle) / oracle);
    }
  }
  return {worst <= 1e-6, fmt("max relative error %.3g", worst)};
}

Outcome ac5_limits() {
  double g = nonweighted_limit(power_mean_spec(0), 2000).value;
  double s = nonweighted_limit(power_mean_spec(0.5), 1'000'000).value;
  double eg = std::abs(g - std::exp(1.0)) / std::exp(1.0);
  double es = std::abs(s - 4.0) / 4.0;
  return {eg <= 5e-3 && es <= 3e-3, fmt("power0: %.8g (rel %.3g); power1/2: %.8g", g, eg, s) + fmt(" (rel %.3g)", es)};
}

Outcome ac6_mu1() {
  Mu1Sweep s = verify_mu1_sweep(power_mean_spec(0.5), 256, 50, 2024, 4.0, 1e-3);
  double max_v = *std::max_element(s.values.begin(), s.values.end());
  bool ok = s.report.pass && max_v <= 4.0 + 1e-3;
  return {ok, fmt("50 weight vectors, max finite bound %.10g", max_v)};
}

Outcome ac7_cut() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> nblocks(1, 4), bsize(1, 5);
  std::size_t checked = 0, failed = 0;
  for (const WeightSeq& lam : {WeightSeq::ones(), WeightSeq::geometric(Rational(1, 2)), WeightSeq::geometric(Rational(3, 4))}) {
    for (int t = 0; t < 100; ++t) {
      std::vector<std::size_t> blocks(nblocks(rng));
      for (auto& b : blocks) b = bsize(rng);
      bool cyclic = t % 2 == 0;
      CheckReport r = verify_cut(ClosedFormArithmetic{}, coarsen(lam, blocks, cyclic), lam, 60);
      ++checked;
      if (!r.pass) ++failed;
    }
  }
  std::string corollary;
  bool corollary_ok = true;
  for (const Rational q : {Rational(1, 4), Rational(1, 2), Rational(7, 10), Rational(9, 10)}) {
    double cq = arithmetic_hardy(WeightSeq::geometric(q), 64, SeriesMode::certified).value;
    double cq2 = arithmetic_hardy(WeightSeq::geometric(q * q), 64, SeriesMode::certified).value;
    // ψ = coarsen(geometric q, 2) is proportional to geometric q².
    WeightSeq lam = WeightSeq::geometric(q);
    bool cut_ok = verify_cut(ClosedFormArithmetic{}, coarsen(lam, {2}, true), lam, 80).pass;
    if (!(cq2 <= cq) || !cut_ok) corollary_ok = false;
    corollary += fmt(" C(%.2g)=%.6g C(q^2)=%.6g", to_double(q), cq, cq2);
  }
  return {failed == 0 && corollary_ok,
          std::to_string(checked) + " coarsenings, " + std::to_string(failed) + " failures;" + corollary};
}

Outcome ac8_rearrangement() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  std::uniform_int_distribution<int> weight(1, 9);
  std::uniform_real_distribution<double> logx(std::log(0.05), std::log(20.0));
  MeanSpec arithmetic = power_mean_spec(1);
  MeanSpec root = power_mean_spec(0.5);
  std::size_t bad_sum = 0, bad_order = 0, bad_jcin = 0;
  for (int t = 0; t < 500; ++t) {
    std::size_t n = len(rng);
    std::vector<double> x(n);
    std::vector<Rational> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::exp(logx(rng));
      w[i] = weight(rng);
    }
    PointVector px(x);
    WeightVector pw = WeightVector::exact(w);
    RearrangementResult r = rearrange_samesum(px, pw);
    Rational lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lhs += w[i] * exact_from_double(x[i]);
      rhs += w[i] * r.y_exact[i];
    }
    if (lhs != rhs) ++bad_sum;
    if (!std::is_sorted(r.y_exact.rbegin(), r.y_exact.rend())) ++bad_order;
    if (!verify_jcin(arithmetic, px, pw).pass || !verify_jcin(root, px, pw).pass) ++bad_jcin;
  }
  return {bad_sum + bad_order + bad_jcin == 0,
          "500 instances; sum mismatches " + std::to_string(bad_sum) + ", order violations " +
              std::to_string(bad_order) + ", jcin failures " + std::to_string(bad_jcin)};
}

Outcome ac9_axioms() {
  std::string detail;
  bool ok = true;
  for (double p : std::vector<double>{-INFINITY, -1.0, 0.0, 0.5, 1.0, 2.0, INFINITY}) {
    AxiomReport r = check_axioms(power_mean_spec(p), 200, 9);
    const AxiomOutcome& c = r.outcome(Axiom::concavity);
    bool concave_ok = p > 1 || (c.required && c.passed());
    if (!r.ok() || !concave_ok) {
      ok = false;
      detail += " p=" + std::string(std::isinf(p) ? (p > 0 ? "inf" : "-inf") : fmt("%g", p)) + " failed;";
    }
  }
  return {ok, "7 exponents x 200 trials" + (detail.empty() ? std::string(", all required properties hold") : detail)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"AC1", "Copson constants", ac1_copson},
      {"AC2", "dyadic arithmetic constant", ac2_dyadic},
      {"AC3", "lower semicontinuity example", ac3_lsc},
      {"AC4", "finite search vs exchange oracle", ac4_finite_oracle},
      {"AC5", "unweighted limits", ac5_limits},
      {"AC6", "weighted <= unweighted sweep", ac6_mu1},
      {"AC7", "cut theorem in exact arithmetic", ac7_cut},
      {"AC8", "rearrangement and prefix-mean inequality", ac8_rearrangement},
      {"AC9", "axiom suite", ac9_axioms},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s (%s) [%.2fs]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
