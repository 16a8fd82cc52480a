#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>

#include "mfnas/errors.hpp"

// Accuracy/size trade-off metrics. Templated on the floating scalar so the
// property suites can run them in long double as well as double.

namespace mfnas {

namespace detail {
template <std::floating_point Scalar>
void require_unit(Scalar v, const char* name) {
  if (!(v >= Scalar(0) && v <= Scalar(1)))
    throw InvalidMetricInput(std::string(name) + " must lie in [0, 1], got " + std::to_string(static_cast<double>(v)));
}
}  // namespace detail

/// Normalized inverse size p_min / params, in (0, 1].
template <std::floating_point Scalar = double>
Scalar s_prime(std::int64_t params, std::int64_t p_min) {
  if (p_min <= 0) throw InvalidSpace("p_min must be positive");
  if (params < p_min)
    throw InvalidCost("params " + std::to_string(params) + " below p_min " + std::to_string(p_min));
  return static_cast<Scalar>(p_min) / static_cast<Scalar>(params);
}

/// Harmonic mean of accuracy and normalized inverse size; 0 at the degenerate point.
template <std::floating_point Scalar>
Scalar m_factor(Scalar accuracy, Scalar s) {
  detail::require_unit(accuracy, "accuracy");
  detail::require_unit(s, "s_prime");
  const Scalar denom = accuracy + s;
  if (denom == Scalar(0)) return Scalar(0);
  return Scalar(2) * accuracy * s / denom;
}

/// Weighted variant: alpha > 1 favours small models, alpha < 1 favours accuracy.
/// m_alpha(a, s, 1) == m_factor(a, s) exactly.
template <std::floating_point Scalar>
Scalar m_alpha(Scalar accuracy, Scalar s, Scalar alpha) {
  if (!(alpha >= Scalar(0))) throw InvalidAlpha("alpha must be non-negative");
  detail::require_unit(accuracy, "accuracy");
  detail::require_unit(s, "s_prime");
  if (alpha == Scalar(1)) return m_factor(accuracy, s);
  const Scalar denom = alpha * accuracy + s;
  if (denom == Scalar(0)) return Scalar(0);
  return (Scalar(1) + alpha) * accuracy * s / denom;
}

/// Coefficients and unit scales of the accuracy/params/MACs composite score.
struct NetScoreParams {
  double accuracy_exponent = 2.0;
  double params_exponent = 0.5;
  double macs_exponent = 0.5;
  double params_scale = 1e6;
  double macs_scale = 1e9;
};

/// 20 log10(A^alpha / ((P / p_scale)^beta (MACs / m_scale)^gamma)).
template <std::floating_point Scalar = double>
Scalar netscore(Scalar accuracy, std::int64_t params, std::int64_t macs, const NetScoreParams& p = {}) {
  if (!(accuracy > Scalar(0) && accuracy <= Scalar(1)))
    throw InvalidMetricInput("netscore needs accuracy in (0, 1]");
  if (params <= 0 || macs <= 0) throw InvalidMetricInput("netscore needs positive params and macs");
  if (!(p.params_scale > 0 && p.macs_scale > 0)) throw InvalidMetricInput("netscore scales must be positive");
  using std::log10;
  const Scalar p_rel = static_cast<Scalar>(params) / static_cast<Scalar>(p.params_scale);
  const Scalar m_rel = static_cast<Scalar>(macs) / static_cast<Scalar>(p.macs_scale);
  return Scalar(20) * (static_cast<Scalar>(p.accuracy_exponent) * log10(accuracy) -
                       static_cast<Scalar>(p.params_exponent) * log10(p_rel) -
                       static_cast<Scalar>(p.macs_exponent) * log10(m_rel));
}

}  // namespace mfnas
