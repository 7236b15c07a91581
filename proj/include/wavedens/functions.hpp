#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavedens {

//! Closed interval [lo, hi].
struct Interval
{
  double lo{ 0.0 };
  double hi{ 0.0 };

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool contains(const Interval& other) const
  {
    return other.lo >= lo && other.hi <= hi;
  }
  bool intersects(const Interval& other) const
  {
    return lo <= other.hi && other.lo <= hi;
  }
  bool operator==(const Interval&) const = default;
};

inline Interval
hull(const Interval& a, const Interval& b)
{
  return { std::min(a.lo, b.lo), std::max(a.hi, b.hi) };
}

//! Piecewise constant function, zero outside its support.
//! Pieces are half-open [b_i, b_{i+1}) except the last one, which is closed
//! on the right so that e.g. the box function is 1 on [0, 1].
class StepFunction
{
public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints))
    , values_(std::move(values))
  {
    if (breakpoints_.size() < 2 ||
        values_.size() + 1 != breakpoints_.size()) {
      throw std::invalid_argument(
        "StepFunction: need one value per interval between breakpoints");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!(breakpoints_[i] > breakpoints_[i - 1])) {
        throw std::invalid_argument(
          "StepFunction: breakpoints must be strictly increasing");
      }
    }
  }

  double operator()(double x) const
  {
    if (x < breakpoints_.front() || x > breakpoints_.back())
      return 0.0;
    if (x == breakpoints_.back())
      return values_.back();
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
  }

  Interval support() const { return { breakpoints_.front(), breakpoints_.back() }; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }

  double sup_norm() const
  {
    double m = 0.0;
    for (double v : values_)
      m = std::max(m, std::abs(v));
    return m;
  }

  //! int x^m f(x) dx, piece by piece in closed form.
  //! int x^m f(x) dx. The sum of v_i (b^{m+1} - a^{m+1}) is formed before
  //! the single division, so dyadic breakpoints and values give an exact
  //! zero for every vanishing moment with small m.
  double moment(int m) const
  {
    if (m < 0)
      throw std::invalid_argument("StepFunction::moment: m must be >= 0");
    const auto power = [m](double x) {
      double r = 1.0;
      for (int i = 0; i <= m; ++i)
        r *= x;
      return r;
    };
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      total += values_[i] * (power(breakpoints_[i + 1]) - power(breakpoints_[i]));
    return total / (m + 1);
  }

  double integral() const { return moment(0); }

private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

//! Samples of a function on the dyadic grid lo + i * 2^-G covering its
//! support, with linear interpolation between nodes.
class TabulatedFunction
{
public:
  TabulatedFunction(Interval support, int grid_exponent, std::vector<double> samples)
    : support_(support)
    , grid_exponent_(grid_exponent)
    , samples_(std::move(samples))
  {
    if (grid_exponent_ < 10)
      throw std::invalid_argument("TabulatedFunction: grid exponent must be >= 10");
    const double nodes = std::ldexp(support_.width(), grid_exponent_);
    if (!(support_.hi > support_.lo) || nodes != std::floor(nodes) ||
        samples_.size() != static_cast<std::size_t>(nodes) + 1) {
      throw std::invalid_argument(
        "TabulatedFunction: samples do not cover the support on the grid");
    }
  }

  double operator()(double x) const
  {
    if (x < support_.lo || x > support_.hi)
      return 0.0;
    const double pos = std::ldexp(x - support_.lo, grid_exponent_);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= samples_.size())
      return samples_.back();
    const double frac = pos - static_cast<double>(i);
    if (frac == 0.0)
      return samples_[i];
    return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
  }

  Interval support() const { return support_; }
  int grid_exponent() const { return grid_exponent_; }
  double grid_step() const { return std::ldexp(1.0, -grid_exponent_); }
  std::span<const double> samples() const { return samples_; }
  double node(std::size_t i) const
  {
    return support_.lo + std::ldexp(static_cast<double>(i), -grid_exponent_);
  }

  double sup_norm() const
  {
    double m = 0.0;
    for (double v : samples_)
      m = std::max(m, std::abs(v));
    return m;
  }

  //! Trapezoid rule on the tabulation nodes.
  double trapezoid() const
  {
    double s = 0.5 * (samples_.front() + samples_.back());
    for (std::size_t i = 1; i + 1 < samples_.size(); ++i)
      s += samples_[i];
    return s * grid_step();
  }

private:
  Interval support_;
  int grid_exponent_;
  std::vector<double> samples_;
};

} // namespace wavedens
