#pragma once

// Power means over the extended parameter range and quasi-arithmetic means,
// descriptor parsing, and one-pass evaluation of all prefix means.

#include <span>
#include <string_view>
#include <vector>

#include "hardy/mean_kernel.hpp"

namespace hardy {

/// Below this |p| the power mean is evaluated as the geometric mean.
inline constexpr double kGeometricThreshold = 1e-8;
/// Above this |p| the power mean is evaluated as min or max.
inline constexpr double kExtremeThreshold = 1e8;

/// Weighted p-th power mean for p in [-inf, +inf].
double power_mean(double p, const PointVector& x, const WeightVector& w);

/// f^{-1}(Σ w f(x) / Σ w), clamped into [min x, max x].
double quasiarithmetic_mean(const Generator& g, const PointVector& x, const WeightVector& w);

/// Flags: symmetric, monotone, homogeneous always; concave iff p <= 1;
/// continuous in the weights iff p is finite.
MeanSpec power_mean_spec(double p);
MeanSpec quasiarithmetic_mean_spec(Generator g, MeanFlags flags);

/// Names: identity, log, sqrt, square, reciprocal, exp.
Generator builtin_generator(std::string_view name);
/// Flags that hold for the named built-in generator.
MeanFlags builtin_generator_flags(std::string_view name);
/// t ↦ t^p (log for p = 0).
Generator power_generator(double p);

/// "inf", "+inf", "-inf", "p/q", or a decimal literal.
double parse_extended_real(std::string_view text);

/// Accepts "power:P", "arithmetic", "geometric", "harmonic", "min", "max",
/// and "quasiarithmetic:NAME". Throws InvalidArgument otherwise.
MeanSpec parse_mean(std::string_view descriptor);

/// True for the power mean with p = 1.
bool is_arithmetic(const MeanSpec& mean);

/// M((x_1..x_n), (w_1..w_n)) for every n = 1..N in a single pass.
std::vector<double> prefix_means(const MeanSpec& mean, std::span<const double> x, std::span<const double> w);

/// F(x) = Σ_n w_n M((x_1..x_n), (w_1..w_n)). When `gradient` is non-null it
/// receives ∂F/∂x_k (a subgradient for min and max).
double prefix_objective(const MeanSpec& mean, std::span<const double> x, std::span<const double> w,
                        std::vector<double>* gradient = nullptr);

}  // namespace hardy
