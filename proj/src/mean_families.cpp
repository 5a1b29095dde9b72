#include "hardy/mean_families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PowerRegime { minimum, maximum, geometric, general };

PowerRegime regime(double p) {
  if (std::isnan(p)) throw InvalidArgument("power mean parameter is NaN");
  if (p <= -kExtremeThreshold) return PowerRegime::minimum;
  if (p >= kExtremeThreshold) return PowerRegime::maximum;
  if (std::abs(p) < kGeometricThreshold) return PowerRegime::geometric;
  return PowerRegime::general;
}

double clamp_to(double m, const PointVector& x) { return std::clamp(m, x.min(), x.max()); }

// log(e^a + e^b) with a = -inf allowed.
double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double generator_derivative(const Generator& g, double t) {
  if (g.derivative) return g.derivative(t);
  double h = 1e-6 * std::max(std::abs(t), 1e-12);
  return (g.forward(t + h) - g.forward(t - h)) / (2.0 * h);
}

void require_prefix_inputs(std::span<const double> x, std::span<const double> w) {
  require_same_length(x.size(), w.size(), "prefix evaluation");
  if (x.empty()) throw InvalidArgument("prefix evaluation: empty input");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(w[i] > 0.0)) throw InvalidArgument("prefix evaluation: entries must be positive");
  }
}

}  // namespace

double power_mean(double p, const PointVector& x, const WeightVector& w) {
  require_same_length(x.size(), w.size(), "power_mean");
  switch (regime(p)) {
    case PowerRegime::minimum: return x.min();
    case PowerRegime::maximum: return x.max();
    case PowerRegime::geometric: {
      auto v = w.normalized();
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) acc += v[i] * std::log(x[i]);
      return clamp_to(std::exp(acc), x);
    }
    case PowerRegime::general: break;
  }
  auto v = w.normalized();
  // Scale by the extreme entry that keeps every (x_i / c)^p <= 1.
  double c = p > 0 ? x.max() : x.min();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += v[i] * std::pow(x[i] / c, p);
  return clamp_to(c * std::pow(acc, 1.0 / p), x);
}

double quasiarithmetic_mean(const Generator& g, const PointVector& x, const WeightVector& w) {
  require_same_length(x.size(), w.size(), "quasiarithmetic_mean");
  auto v = w.normalized();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = g.forward(x[i]);
    if (!std::isfinite(f)) throw InvalidArgument("generator '" + g.name + "' failed at " + std::to_string(x[i]));
    acc += v[i] * f;
  }
  double m = g.inverse(acc);
  if (std::isnan(m)) throw InvalidArgument("generator '" + g.name + "' inverse failed");
  return clamp_to(m, x);
}

MeanSpec power_mean_spec(double p) {
  MeanFlags flags;
  flags.symmetric = true;
  flags.monotone = true;
  flags.concave = p <= 1.0;
  flags.homogeneous = true;
  flags.continuous_in_weights = std::isfinite(p);
  std::string name;
  if (p == -kInf) {
    name = "power:-inf";
  } else if (p == kInf) {
    name = "power:inf";
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "power:%.17g", p);
    name = buf;
  }
  return MeanSpec(PowerParams{p}, flags, name);
}

MeanSpec quasiarithmetic_mean_spec(Generator g, MeanFlags flags) {
  std::string name = "quasiarithmetic:" + g.name;
  return MeanSpec(std::move(g), flags, std::move(name));
}

Generator power_generator(double p) {
  if (!std::isfinite(p)) throw InvalidArgument("power generator needs a finite exponent");
  if (p == 0.0) return builtin_generator("log");
  Generator g;
  char buf[64];
  std::snprintf(buf, sizeof buf, "pow%.17g", p);
  g.name = buf;
  g.forward = [p](double t) { return std::pow(t, p); };
  g.inverse = [p](double s) { return std::pow(s, 1.0 / p); };
  g.derivative = [p](double t) { return p * std::pow(t, p - 1.0); };
  return g;
}

Generator builtin_generator(std::string_view name) {
  Generator g;
  g.name = std::string(name);
  if (name == "identity") {
    g.forward = [](double t) { return t; };
    g.inverse = [](double s) { return s; };
    g.derivative = [](double) { return 1.0; };
  } else if (name == "log") {
    g.forward = [](double t) { return std::log(t); };
    g.inverse = [](double s) { return std::exp(s); };
    g.derivative = [](double t) { return 1.0 / t; };
  } else if (name == "sqrt") {
    g.forward = [](double t) { return std::sqrt(t); };
    g.inverse = [](double s) { return s * s; };
    g.derivative = [](double t) { return 0.5 / std::sqrt(t); };
  } else if (name == "square") {
    g.forward = [](double t) { return t * t; };
    g.inverse = [](double s) { return std::sqrt(s); };
    g.derivative = [](double t) { return 2.0 * t; };
  } else if (name == "reciprocal") {
    g.forward = [](double t) { return 1.0 / t; };
    g.inverse = [](double s) { return 1.0 / s; };
    g.derivative = [](double t) { return -1.0 / (t * t); };
  } else if (name == "exp") {
    g.forward = [](double t) { return std::exp(t); };
    g.inverse = [](double s) { return std::log(s); };
    g.derivative = [](double t) { return std::exp(t); };
  } else {
    throw InvalidArgument("unknown generator '" + std::string(name) +
                          "' (expected identity, log, sqrt, square, reciprocal, exp)");
  }
  return g;
}

MeanFlags builtin_generator_flags(std::string_view name) {
  MeanFlags f;
  f.symmetric = true;
  f.monotone = true;
  f.continuous_in_weights = true;
  // identity, log, sqrt, reciprocal generate the power means p = 1, 0, 1/2, -1.
  if (name == "identity" || name == "log" || name == "sqrt" || name == "reciprocal") {
    f.concave = true;
    f.homogeneous = true;
  } else if (name == "square") {
    f.homogeneous = true;
  } else if (name != "exp") {
    throw InvalidArgument("unknown generator '" + std::string(name) + "'");
  }
  return f;
}

double parse_extended_real(std::string_view text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kInf;
  if (text == "-inf" || text == "-infinity") return -kInf;
  return to_double(parse_rational(text));
}

MeanSpec parse_mean(std::string_view descriptor) {
  if (descriptor == "arithmetic") return power_mean_spec(1.0);
  if (descriptor == "geometric") return power_mean_spec(0.0);
  if (descriptor == "harmonic") return power_mean_spec(-1.0);
  if (descriptor == "min") return power_mean_spec(-kInf);
  if (descriptor == "max") return power_mean_spec(kInf);
  auto colon = descriptor.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("unknown mean descriptor '" + std::string(descriptor) + "'");
  }
  std::string_view family = descriptor.substr(0, colon);
  std::string_view arg = descriptor.substr(colon + 1);
  if (family == "power") return power_mean_spec(parse_extended_real(arg));
  if (family == "quasiarithmetic") {
    return quasiarithmetic_mean_spec(builtin_generator(arg), builtin_generator_flags(arg));
  }
  throw InvalidArgument("unknown mean family '" + std::string(family) + "'");
}

bool is_arithmetic(const MeanSpec& mean) {
  return mean.family() == MeanFamily::power && std::get<PowerParams>(mean.params()).p == 1.0;
}

// ---------------------------------------------------------------------------
// Prefix evaluation

namespace {

struct PrefixPass {
  std::vector<double> means;
  std::vector<double> gradient;
};

// Power means in the log domain: log S_n = log Σ_{i<=n} w_i x_i^p.
PrefixPass power_prefix(double p, std::span<const double> x, std::span<const double> w, bool want_gradient) {
  const std::size_t n = x.size();
  PrefixPass out;
  out.means.resize(n);
  std::vector<double> cum_w(n);
  double acc_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) cum_w[i] = (acc_w += w[i]);

  PowerRegime r = regime(p);
  if (r == PowerRegime::minimum || r == PowerRegime::maximum) {
    std::vector<std::size_t> arg(n);
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool better = r == PowerRegime::minimum ? x[i] < x[best] : x[i] > x[best];
      if (better) best = i;
      arg[i] = best;
      out.means[i] = x[best];
    }
    if (want_gradient) {
      out.gradient.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) out.gradient[arg[i]] += w[i];
    }
    return out;
  }

  std::vector<double> log_m(n);
  if (r == PowerRegime::geometric) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += w[i] * std::log(x[i]);
      log_m[i] = acc / cum_w[i];
    }
    p = 0.0;
  } else {
    double log_s = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      log_s = log_add(log_s, std::log(w[i]) + p * std::log(x[i]));
      log_m[i] = (log_s - std::log(cum_w[i])) / p;
    }
  }
  // Running min/max bound every prefix mean; clamping removes rounding drift.
  double lo = kInf;
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
    out.means[i] = std::clamp(std::exp(log_m[i]), lo, hi);
  }
  if (want_gradient) {
    // ∂F/∂x_k = w_k x_k^{p-1} Σ_{n>=k} w_n M_n^{1-p} / W_n
    out.gradient.resize(n);
    double suffix = -kInf;
    for (std::size_t k = n; k-- > 0;) {
      suffix = log_add(suffix, std::log(w[k]) + (1.0 - p) * log_m[k] - std::log(cum_w[k]));
      out.gradient[k] = std::exp(std::log(w[k]) + (p - 1.0) * std::log(x[k]) + suffix);
    }
  }
  return out;
}

PrefixPass quasiarithmetic_prefix(const Generator& g, std::span<const double> x, std::span<const double> w,
                                  bool want_gradient) {
  const std::size_t n = x.size();
  PrefixPass out;
  out.means.resize(n);
  std::vector<double> cum_w(n);
  double acc_w = 0.0;
  double acc_f = 0.0;
  double lo = kInf;
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc_w += w[i];
    acc_f += w[i] * g.forward(x[i]);
    cum_w[i] = acc_w;
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
    out.means[i] = std::clamp(g.inverse(acc_f / acc_w), lo, hi);
  }
  if (want_gradient) {
    // ∂M_n/∂x_k = w_k f'(x_k) / (W_n f'(M_n))
    out.gradient.resize(n);
    double suffix = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      suffix += w[k] / (cum_w[k] * generator_derivative(g, out.means[k]));
      out.gradient[k] = w[k] * generator_derivative(g, x[k]) * suffix;
    }
  }
  return out;
}

PrefixPass custom_prefix(const CustomMean& c, std::span<const double> x, std::span<const double> w,
                         bool want_gradient) {
  const std::size_t n = x.size();
  PrefixPass out;
  out.means.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.means[i] = c.fn(x.first(i + 1), w.first(i + 1));
  if (want_gradient) {
    auto objective = [&](std::span<const double> xs) {
      double f = 0.0;
      for (std::size_t i = 0; i < n; ++i) f += w[i] * c.fn(xs.first(i + 1), w.first(i + 1));
      return f;
    };
    out.gradient.resize(n);
    std::vector<double> xs(x.begin(), x.end());
    for (std::size_t k = 0; k < n; ++k) {
      double h = 1e-6 * xs[k];
      double keep = xs[k];
      xs[k] = keep + h;
      double up = objective(xs);
      xs[k] = keep - h;
      double down = objective(xs);
      xs[k] = keep;
      out.gradient[k] = (up - down) / (2.0 * h);
    }
  }
  return out;
}

PrefixPass prefix_pass(const MeanSpec& mean, std::span<const double> x, std::span<const double> w,
                       bool want_gradient) {
  require_prefix_inputs(x, w);
  switch (mean.family()) {
    case MeanFamily::power: return power_prefix(std::get<PowerParams>(mean.params()).p, x, w, want_gradient);
    case MeanFamily::quasiarithmetic:
      return quasiarithmetic_prefix(std::get<Generator>(mean.params()), x, w, want_gradient);
    case MeanFamily::custom: return custom_prefix(std::get<CustomMean>(mean.params()), x, w, want_gradient);
  }
  return {};
}

}  // namespace

std::vector<double> prefix_means(const MeanSpec& mean, std::span<const double> x, std::span<const double> w) {
  return prefix_pass(mean, x, w, false).means;
}

double prefix_objective(const MeanSpec& mean, std::span<const double> x, std::span<const double> w,
                        std::vector<double>* gradient) {
  PrefixPass pass = prefix_pass(mean, x, w, gradient != nullptr);
  double total = 0.0;
  double comp = 0.0;  // Neumaier compensation
  for (std::size_t i = 0; i < x.size(); ++i) {
    double term = w[i] * pass.means[i];
    double t = total + term;
    comp += std::abs(total) >= std::abs(term) ? (total - t) + term : (term - t) + total;
    total = t;
  }
  if (gradient) *gradient = std::move(pass.gradient);
  return total + comp;
}

}  // namespace hardy
