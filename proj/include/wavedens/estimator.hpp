#pragma once

#include "basis.hpp"
#include "parallel.hpp"
#include "sample.hpp"
#include "threshold.hpp"

#include <bit>
#include <optional>

namespace wavedens {

struct EstimatorConfig
{
  BasisPtr basis;
  ThresholdMode mode{ Practical{} };
  std::optional<int> j0_override;
  //! Levels are processed concurrently when > 1; the result is identical.
  unsigned workers{ 1 };
};

//! Finest resolution level j0.
//! Practical modes: floor(log2 n). Theoretical: floor(log2(n^c (ln n)^c')).
inline int
finest_level(const EstimatorConfig& config, std::size_t n)
{
  if (n < 2)
    throw std::invalid_argument("finest_level: need n >= 2");
  if (config.j0_override) {
    if (*config.j0_override < -1)
      throw std::invalid_argument("finest_level: j0 override must be >= -1");
    return *config.j0_override;
  }
  if (const auto* t = std::get_if<TheoreticalGamma>(&config.mode)) {
    const auto nn = static_cast<double>(n);
    const double level = t->c * std::log2(nn) + t->c_prime * std::log2(std::log(nn));
    return std::max(-1, static_cast<int>(std::floor(level)));
  }
  return static_cast<int>(std::bit_width(n)) - 1;
}

//! Statistics of one (j, k) cell computed from the sample.
struct EmpiricalCoefficient
{
  CoefficientIndex idx;
  double beta_hat{ 0.0 };
  double sigma_hat_sq{ 0.0 };
  //! Inflated variance; set in theoretical mode only.
  std::optional<double> sigma_tilde_sq;
  double psi_sup_norm{ 0.0 };
  //! Number of observations where psi_jk is nonzero.
  std::size_t n_jk{ 0 };
  double threshold{ 0.0 };

  bool kept() const { return std::abs(beta_hat) >= threshold; }
};

namespace detail {

inline void
check_config(const EstimatorConfig& config)
{
  if (!config.basis)
    throw std::invalid_argument("estimator: config has no basis");
  validate(config.mode);
}

//! All nonzero empirical coefficients of one level, sorted by k.
inline std::vector<EmpiricalCoefficient>
level_coefficients(const Sample& sample,
                   const BiorthogonalBasis& basis,
                   int j,
                   const ThresholdMode& mode)
{
  const std::size_t n = sample.size();
  std::vector<std::pair<std::int64_t, double>> hits;
  hits.reserve(n * static_cast<std::size_t>(basis.support_width()));
  for (double x : sample.values()) {
    const auto [k_min, k_max] = basis.translates_covering(j, x);
    for (std::int64_t k = k_min; k <= k_max; ++k) {
      const double v = basis.eval_decomposition({ j, k }, x);
      if (v != 0.0)
        hits.emplace_back(k, v);
    }
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<EmpiricalCoefficient> out;
  std::vector<double> values;
  const double sup = basis.sup_norm({ j, 0 });
  const bool theoretical = std::holds_alternative<TheoreticalGamma>(mode);
  for (std::size_t begin = 0; begin < hits.size();) {
    std::size_t end = begin;
    values.clear();
    double sum = 0.0;
    for (; end < hits.size() && hits[end].first == hits[begin].first; ++end) {
      values.push_back(hits[end].second);
      sum += hits[end].second;
    }
    const double beta = sum / static_cast<double>(n);
    if (beta != 0.0) {
      EmpiricalCoefficient c;
      c.idx = { j, hits[begin].first };
      c.beta_hat = beta;
      c.sigma_hat_sq = variance_hat_sparse(values, n);
      c.psi_sup_norm = sup;
      c.n_jk = values.size();
      if (theoretical)
        c.sigma_tilde_sq = variance_tilde(c.sigma_hat_sq, sup, n, mode_gamma(mode));
      c.threshold = threshold(c.sigma_hat_sq, sup, n, mode);
      out.push_back(c);
    }
    begin = end;
  }
  return out;
}

} // namespace detail

//! Nonzero empirical coefficients beta^_jk = (1/n) sum_i psi_jk(X_i) over
//! levels -1..j0, with their variance estimates and thresholds. Only
//! translates whose support holds at least one observation can be
//! nonzero, so only those are visited. Sorted by (j, k).
inline std::vector<EmpiricalCoefficient>
empirical_coefficients(const Sample& sample, const EstimatorConfig& config)
{
  detail::check_config(config);
  const int j0 = finest_level(config, sample.size());
  const auto levels = static_cast<std::size_t>(j0 + 2);
  std::vector<std::vector<EmpiricalCoefficient>> per_level(levels);
  parallel_for(levels, config.workers, [&](std::size_t i) {
    per_level[i] = detail::level_coefficients(sample, *config.basis,
                                              static_cast<int>(i) - 1, config.mode);
  });
  std::vector<EmpiricalCoefficient> out;
  for (auto& level : per_level)
    out.insert(out.end(), level.begin(), level.end());
  return out;
}

//! Coefficient kept in an estimate, with the threshold it passed.
struct KeptCoefficient
{
  CoefficientIndex idx;
  double value{ 0.0 };
  double threshold{ 0.0 };

  bool operator==(const KeptCoefficient&) const = default;
};

//! f~ = sum beta~_jk psi~_jk over the kept cells, optionally clipped at 0.
//! No renormalization to unit mass is applied.
class DensityEstimate
{
public:
  DensityEstimate(BasisPtr basis,
                  std::vector<KeptCoefficient> kept,
                  bool positive_part,
                  std::size_t n,
                  ThresholdMode mode,
                  int j0)
    : basis_(std::move(basis))
    , kept_(std::move(kept))
    , positive_part_(positive_part)
    , n_(n)
    , mode_(mode)
    , j0_(j0)
  {
    if (!basis_)
      throw std::invalid_argument("DensityEstimate: no basis");
    std::sort(kept_.begin(), kept_.end(),
              [](const auto& a, const auto& b) { return a.idx < b.idx; });
    for (std::size_t i = 1; i < kept_.size(); ++i)
      if (kept_[i].idx == kept_[i - 1].idx)
        throw std::invalid_argument("DensityEstimate: duplicate coefficient index");
  }

  const BiorthogonalBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const std::vector<KeptCoefficient>& kept() const { return kept_; }
  bool positive_part() const { return positive_part_; }
  std::size_t n() const { return n_; }
  const ThresholdMode& mode() const { return mode_; }
  int j0() const { return j0_; }

  //! Hull of the reconstruction supports of the kept cells; empty for the
  //! zero estimate.
  std::optional<Interval> support() const
  {
    std::optional<Interval> s;
    for (const auto& c : kept_) {
      const Interval r = basis_->reconstruction_support(c.idx);
      s = s ? hull(*s, r) : r;
    }
    return s;
  }

  //! Sum before clipping.
  double raw_value(double x) const
  {
    double v = 0.0;
    for (const auto& c : kept_)
      if (basis_->reconstruction_support(c.idx).contains(x))
        v += c.value * basis_->eval_reconstruction(c.idx, x);
    return v;
  }

  double operator()(double x) const { return finish(raw_value(x)); }

  std::vector<double> evaluate(std::span<const double> grid) const
  {
    if (!std::is_sorted(grid.begin(), grid.end())) {
      std::vector<double> out(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = (*this)(grid[i]);
      return out;
    }
    // Same terms in the same order as raw_value, visited cell by cell.
    std::vector<double> out(grid.size(), 0.0);
    for (const auto& c : kept_) {
      const Interval r = basis_->reconstruction_support(c.idx);
      auto first = std::lower_bound(grid.begin(), grid.end(), r.lo);
      auto last = std::upper_bound(first, grid.end(), r.hi);
      for (auto it = first; it != last; ++it) {
        const auto i = static_cast<std::size_t>(it - grid.begin());
        out[i] += c.value * basis_->eval_reconstruction(c.idx, *it);
      }
    }
    for (auto& v : out)
      v = finish(v);
    return out;
  }

  //! Trapezoid integral over the support on a grid of the given step.
  //! Diagnostic only.
  double integral(double step = 1.0 / 1024.0) const
  {
    const auto s = support();
    if (!s)
      return 0.0;
    const auto count = static_cast<std::size_t>(std::ceil(s->width() / step));
    std::vector<double> grid(count + 1);
    for (std::size_t i = 0; i <= count; ++i)
      grid[i] = s->lo + static_cast<double>(i) * step;
    const auto v = evaluate(grid);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      total += 0.5 * (v[i] + v[i + 1]) * (grid[i + 1] - grid[i]);
    return total;
  }

private:
  double finish(double v) const { return positive_part_ ? std::max(v, 0.0) : v; }

  BasisPtr basis_;
  std::vector<KeptCoefficient> kept_;
  bool positive_part_;
  std::size_t n_;
  ThresholdMode mode_;
  int j0_;
};

//! Keep-or-kill: beta~_jk = beta^_jk 1{|beta^_jk| >= eta_jk}, then
//! reconstruct with the dual functions. Clipped at 0 in practical modes.
inline DensityEstimate
estimate(const Sample& sample, const EstimatorConfig& config)
{
  const auto coeffs = empirical_coefficients(sample, config);
  std::vector<KeptCoefficient> kept;
  for (const auto& c : coeffs)
    if (c.kept())
      kept.push_back({ c.idx, c.beta_hat, c.threshold });
  return DensityEstimate(config.basis, std::move(kept), mode_clips_negative(config.mode),
                         sample.size(), config.mode, finest_level(config, sample.size()));
}

} // namespace wavedens
