#pragma once

#include "estimator.hpp"
#include "signals.hpp"

namespace wavedens {

//! Benchmark estimator that knows the density: keeps beta^_jk exactly when
//! the true beta_jk^2 exceeds sigma_jk^2 / n. The kept set does not depend
//! on the threshold mode; only the resolution j0 is taken from `config`.
//! The result is not clipped. Recorded thresholds are sigma_jk / sqrt(n),
//! the cut-off applied to |beta_jk|.
inline DensityEstimate
oracle_estimate(const Sample& sample, const TestSignal& signal, const EstimatorConfig& config)
{
  detail::check_config(config);
  const std::size_t n = sample.size();
  const int j0 = finest_level(config, n);
  // The kept set is mode-independent, so compute the empirical cells with a
  // fixed mode.
  EstimatorConfig plain = config;
  plain.mode = Practical{};
  const auto coeffs = empirical_coefficients(sample, plain);

  std::vector<KeptCoefficient> kept;
  for (const auto& c : coeffs) {
    const double beta = true_coefficient(signal, *config.basis, c.idx);
    const double sigma_sq = true_sigma_sq(signal, *config.basis, c.idx);
    if (beta * beta > sigma_sq / static_cast<double>(n))
      kept.push_back({ c.idx, c.beta_hat, std::sqrt(sigma_sq / static_cast<double>(n)) });
  }
  return DensityEstimate(config.basis, std::move(kept), false, n, config.mode, j0);
}

} // namespace wavedens
