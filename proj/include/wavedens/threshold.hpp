#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

namespace wavedens {

namespace detail {

inline double
shifted_variance(double sum, double sum_sq, std::size_t n)
{
  const auto nn = static_cast<double>(n);
  return std::max(0.0, (sum_sq - sum * sum / nn) / (nn - 1.0));
}

} // namespace detail

//! Unbiased U-statistic variance of the values,
//!   1/(n(n-1)) sum_{i>l} (v_i - v_l)^2 = n (m2 - m1^2) / (n - 1),
//! evaluated in O(n) on data shifted by the first value.
inline double
variance_hat(std::span<const double> values)
{
  if (values.size() < 2)
    throw std::invalid_argument("variance_hat: need at least two values");
  const double shift = values.front();
  double s1 = 0.0, s2 = 0.0;
  for (double v : values) {
    const double d = v - shift;
    s1 += d;
    s2 += d * d;
  }
  return detail::shifted_variance(s1, s2, values.size());
}

//! Same statistic for a vector of length n whose entries are the given
//! nonzero values padded with n - nonzero.size() zeros.
inline double
variance_hat_sparse(std::span<const double> nonzero, std::size_t n)
{
  if (n < 2 || nonzero.size() > n)
    throw std::invalid_argument("variance_hat_sparse: need 2 <= n and nonzero.size() <= n");
  if (nonzero.size() == n)
    return variance_hat(nonzero);
  double s1 = 0.0, s2 = 0.0;
  for (double v : nonzero) {
    s1 += v;
    s2 += v * v;
  }
  return detail::shifted_variance(s1, s2, n);
}

// ----------------------------------------------------------------------------
// Threshold modes
// ----------------------------------------------------------------------------

//! Data-driven threshold on the inflated variance sigma~^2, with resolution
//! j0 = floor(log2(n^c (ln n)^c')). Reconstruction is not clipped.
struct TheoreticalGamma
{
  double gamma{ 1.0 };
  double c{ 1.0 };
  double c_prime{ 0.0 };
};

//! Threshold on the unbiased variance with gamma = 1, positive-part
//! reconstruction.
struct Practical
{};

//! Practical threshold with both terms scaled by gamma.
struct PracticalGamma
{
  double gamma{ 1.0 };
};

using ThresholdMode = std::variant<TheoreticalGamma, Practical, PracticalGamma>;

inline double
mode_gamma(const ThresholdMode& mode)
{
  if (const auto* t = std::get_if<TheoreticalGamma>(&mode))
    return t->gamma;
  if (const auto* p = std::get_if<PracticalGamma>(&mode))
    return p->gamma;
  return 1.0;
}

inline bool
mode_clips_negative(const ThresholdMode& mode)
{
  return !std::holds_alternative<TheoreticalGamma>(mode);
}

inline std::string
mode_name(const ThresholdMode& mode)
{
  switch (mode.index()) {
    case 0:
      return "theoretical";
    case 1:
      return "practical";
    default:
      return "practical-gamma";
  }
}

inline void
validate(const ThresholdMode& mode)
{
  if (const auto* t = std::get_if<TheoreticalGamma>(&mode)) {
    if (!(t->gamma > 0.0))
      throw std::invalid_argument("theoretical mode: gamma must be > 0");
    if (!(t->c >= 1.0))
      throw std::invalid_argument("theoretical mode: c must be >= 1");
    if (!std::isfinite(t->c_prime))
      throw std::invalid_argument("theoretical mode: c' must be finite");
  } else if (const auto* p = std::get_if<PracticalGamma>(&mode)) {
    if (!(p->gamma > 0.0))
      throw std::invalid_argument("practical-gamma mode: gamma must be > 0");
  }
}

// ----------------------------------------------------------------------------
// Threshold formulas
// ----------------------------------------------------------------------------

namespace detail {

//! Formula bodies with a real-valued sample size.
inline double
variance_tilde_at(double sigma_hat_sq, double psi_sup, double n, double gamma)
{
  const double log_ratio = std::log(n) / n;
  return sigma_hat_sq + 2.0 * psi_sup * std::sqrt(2.0 * gamma * sigma_hat_sq * log_ratio) +
         8.0 * gamma * psi_sup * psi_sup * log_ratio;
}

inline double
threshold_at(double variance, double psi_sup, double n, double gamma)
{
  const double log_n = std::log(n);
  return std::sqrt(2.0 * gamma * variance * (log_n / n)) + 2.0 * gamma * psi_sup * log_n / (3.0 * n);
}

} // namespace detail

//! sigma~^2 = sigma^2 + 2 |psi|_inf sqrt(2 gamma sigma^2 ln n / n)
//!            + 8 gamma |psi|_inf^2 ln n / n
inline double
variance_tilde(double sigma_hat_sq, double psi_sup, std::size_t n, double gamma)
{
  if (n < 2 || !(gamma > 0.0) || sigma_hat_sq < 0.0 || psi_sup < 0.0)
    throw std::invalid_argument("variance_tilde: need n >= 2, gamma > 0, nonnegative inputs");
  return detail::variance_tilde_at(sigma_hat_sq, psi_sup, static_cast<double>(n), gamma);
}

//! sqrt(2 gamma v ln n / n) + 2 gamma |psi|_inf ln n / (3 n).
//! Every threshold variant is this expression with the appropriate
//! variance v; the shared operation order keeps the ordering between
//! variants exact in floating point.
inline double
threshold_value(double variance, double psi_sup, std::size_t n, double gamma)
{
  return detail::threshold_at(variance, psi_sup, static_cast<double>(n), gamma);
}

inline double
practical_threshold(double sigma_hat_sq, double psi_sup, std::size_t n)
{
  return threshold_value(sigma_hat_sq, psi_sup, n, 1.0);
}

inline double
practical_gamma_threshold(double sigma_hat_sq, double psi_sup, std::size_t n, double gamma)
{
  return threshold_value(sigma_hat_sq, psi_sup, n, gamma);
}

inline double
theoretical_threshold(double sigma_hat_sq, double psi_sup, std::size_t n, double gamma)
{
  return threshold_value(variance_tilde(sigma_hat_sq, psi_sup, n, gamma), psi_sup, n, gamma);
}

//! Threshold for one cell under the given mode.
inline double
threshold(double sigma_hat_sq, double psi_sup, std::size_t n, const ThresholdMode& mode)
{
  if (n < 2)
    throw std::invalid_argument("threshold: need n >= 2");
  return std::visit(
    [&](const auto& m) -> double {
      using M = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<M, TheoreticalGamma>)
        return theoretical_threshold(sigma_hat_sq, psi_sup, n, m.gamma);
      else if constexpr (std::is_same_v<M, Practical>)
        return practical_threshold(sigma_hat_sq, psi_sup, n);
      else
        return practical_gamma_threshold(sigma_hat_sq, psi_sup, n, m.gamma);
    },
    mode);
}

} // namespace wavedens
