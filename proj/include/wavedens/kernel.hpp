#pragma once

#include "functions.hpp"
#include "sample.hpp"

#include <limits>
#include <numbers>
#include <utility>

namespace wavedens {

namespace detail {

inline constexpr double inv_sqrt_2pi = 0.39894228040143267794;

//! Least-squares CV score from the pairwise squared distances (i < l).
//!   int f_h^2          = (1/n^2) [n K_{sqrt2 h}(0) + 2 sum_{i<l} K_{sqrt2 h}(d_il)]
//!   (2/n) sum f_h^-i   = (4 / (n (n-1))) sum_{i<l} K_h(d_il)
//! with K_s the N(0, s^2) density. exp(-d^2/(4h^2)) is the convolution
//! kernel's exponential and its square is the plain kernel's.
inline double
lscv_from_pairs(std::span<const double> sq_dists, std::size_t n, double h)
{
  const auto nn = static_cast<double>(n);
  const double inv4h2 = 1.0 / (4.0 * h * h);
  double conv = 0.0;
  double plain = 0.0;
  for (double d2 : sq_dists) {
    const double e = std::exp(-d2 * inv4h2);
    conv += e;
    plain += e * e;
  }
  const double conv_norm = inv_sqrt_2pi / (std::numbers::sqrt2 * h);
  const double plain_norm = inv_sqrt_2pi / h;
  const double integral_sq = (nn * conv_norm + 2.0 * conv_norm * conv) / (nn * nn);
  const double loo = 4.0 * plain_norm * plain / (nn * (nn - 1.0));
  return integral_sq - loo;
}

inline std::vector<double>
pairwise_sq_dists(const Sample& sample)
{
  const auto x = sample.values();
  std::vector<double> out;
  out.reserve(x.size() * (x.size() - 1) / 2);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t l = i + 1; l < x.size(); ++l)
      out.push_back((x[i] - x[l]) * (x[i] - x[l]));
  return out;
}

} // namespace detail

//! Least-squares cross-validation criterion for a Gaussian kernel
//! estimate with bandwidth h: int f_h^2 - (2/n) sum_i f_h^{(-i)}(X_i).
inline double
lscv_score(const Sample& sample, double h)
{
  if (!(h > 0.0))
    throw std::invalid_argument("lscv_score: bandwidth must be positive");
  return detail::lscv_from_pairs(detail::pairwise_sq_dists(sample), sample.size(), h);
}

//! Gaussian kernel density estimate with a global bandwidth.
class KernelEstimate
{
public:
  //! Kernels are truncated at this many bandwidths (relative mass < 1e-14).
  static constexpr double truncation = 8.0;

  KernelEstimate(Sample sample, double bandwidth,
                 std::vector<std::pair<double, double>> cv_scores = {})
    : sample_(std::move(sample))
    , bandwidth_(bandwidth)
    , cv_scores_(std::move(cv_scores))
  {
    if (!(bandwidth_ > 0.0))
      throw std::invalid_argument("KernelEstimate: bandwidth must be positive");
  }

  const Sample& sample() const { return sample_; }
  double bandwidth() const { return bandwidth_; }
  //! (bandwidth, LSCV score) for every bandwidth searched.
  const std::vector<std::pair<double, double>>& cv_scores() const { return cv_scores_; }

  Interval support() const
  {
    return { sample_.min() - truncation * bandwidth_, sample_.max() + truncation * bandwidth_ };
  }

  double operator()(double x) const
  {
    const auto obs = sample_.values();
    const double reach = truncation * bandwidth_;
    auto first = std::lower_bound(obs.begin(), obs.end(), x - reach);
    auto last = std::upper_bound(first, obs.end(), x + reach);
    double s = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (x - *it) / bandwidth_;
      s += std::exp(-0.5 * z * z);
    }
    return s * detail::inv_sqrt_2pi / (bandwidth_ * static_cast<double>(obs.size()));
  }

  std::vector<double> evaluate(std::span<const double> grid) const
  {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      out[i] = (*this)(grid[i]);
    return out;
  }

private:
  Sample sample_;
  double bandwidth_;
  std::vector<std::pair<double, double>> cv_scores_;
};

//! Normal reference bandwidth 1.06 sd n^{-1/5}.
inline double
reference_bandwidth(const Sample& sample)
{
  const double sd = sample.stddev();
  if (!(sd > 0.0))
    throw std::invalid_argument("kernel bandwidth: sample has zero variance");
  return 1.06 * sd * std::pow(static_cast<double>(sample.size()), -0.2);
}

inline constexpr std::size_t kernel_grid_size = 40;

//! Minimizes the LSCV score over 40 log-spaced bandwidths in
//! [0.05, 5] x the reference bandwidth. Ties go to the larger bandwidth.
inline KernelEstimate
fit_kernel(const Sample& sample)
{
  const double h0 = reference_bandwidth(sample);
  const auto pairs = detail::pairwise_sq_dists(sample);
  const double lo = std::log(0.05 * h0);
  const double hi = std::log(5.0 * h0);
  std::vector<std::pair<double, double>> scores;
  scores.reserve(kernel_grid_size);
  double best_h = 0.0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kernel_grid_size; ++i) {
    const double h = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(kernel_grid_size - 1));
    const double score = detail::lscv_from_pairs(pairs, sample.size(), h);
    scores.emplace_back(h, score);
    if (score <= best_score) {
      best_score = score;
      best_h = h;
    }
  }
  return KernelEstimate(sample, best_h, std::move(scores));
}

} // namespace wavedens
