#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <stdexcept>
#include <vector>

namespace wavedens {

//! Observations X_1..X_n, sorted ascending. n >= 2, all finite.
class Sample
{
public:
  explicit Sample(std::vector<double> observations)
    : obs_(std::move(observations))
  {
    if (obs_.size() < 2)
      throw std::invalid_argument("Sample: need at least 2 observations, got " +
                                  std::to_string(obs_.size()));
    for (double x : obs_)
      if (!std::isfinite(x))
        throw std::invalid_argument("Sample: observations must be finite");
    std::sort(obs_.begin(), obs_.end());
  }

  std::span<const double> values() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  double min() const { return obs_.front(); }
  double max() const { return obs_.back(); }
  double operator[](std::size_t i) const { return obs_[i]; }

  //! Each observation divided by `factor`.
  Sample rescaled(double factor) const
  {
    if (!(factor > 0.0) || !std::isfinite(factor))
      throw std::invalid_argument("Sample: rescale factor must be positive");
    std::vector<double> out(obs_);
    for (auto& x : out)
      x /= factor;
    return Sample(std::move(out));
  }

  double mean() const
  {
    double s = 0.0;
    for (double x : obs_)
      s += x;
    return s / static_cast<double>(obs_.size());
  }

  //! Standard deviation with the n - 1 denominator.
  double stddev() const
  {
    const double m = mean();
    double s = 0.0;
    for (double x : obs_)
      s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(obs_.size() - 1));
  }

private:
  std::vector<double> obs_;
};

} // namespace wavedens
