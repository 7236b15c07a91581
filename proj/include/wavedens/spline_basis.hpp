#pragma once

#include "basis.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace wavedens {

namespace detail {

//! Refinement filter normalized to sum 2: f(x) = sum_k c_k f(2x - k).
struct Filter
{
  int first;
  std::vector<double> taps;

  int last() const { return first + static_cast<int>(taps.size()) - 1; }
  double operator[](int k) const
  {
    return (k < first || k > last()) ? 0.0 : taps[static_cast<std::size_t>(k - first)];
  }
};

// Cohen-Daubechies-Feauveau (1,3): box analysis scaling function, dual
// lowpass with three vanishing moments on the analysis wavelet.
inline const Filter&
cdf13_box_lowpass()
{
  static const Filter f{ 0, { 1.0, 1.0 } };
  return f;
}

inline const Filter&
cdf13_dual_lowpass()
{
  static const Filter f{ -2, { -0.125, 0.125, 1.0, 1.0, 0.125, -0.125 } };
  return f;
}

//! Fixed point of the refinement operator on the dyadic grid of step 2^-G,
//! started from the hat function and iterated until two successive
//! iterates agree to `tolerance` in sup-norm.
inline TabulatedFunction
cascade(const Filter& lowpass, int grid_exponent, double tolerance, int max_iterations)
{
  const std::int64_t per_unit = std::int64_t{ 1 } << grid_exponent;
  const std::int64_t lo = lowpass.first * per_unit;
  const std::int64_t hi = lowpass.last() * per_unit;
  const auto count = static_cast<std::size_t>(hi - lo + 1);

  std::vector<double> current(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = std::ldexp(static_cast<double>(lo + static_cast<std::int64_t>(i)),
                                -grid_exponent);
    current[i] = std::max(0.0, 1.0 - std::abs(x));
  }

  std::vector<double> next(count);
  for (int iter = 0; iter < max_iterations; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t m = lo + static_cast<std::int64_t>(i);
      double v = 0.0;
      for (int k = lowpass.first; k <= lowpass.last(); ++k) {
        const std::int64_t src = 2 * m - k * per_unit;
        if (src >= lo && src <= hi)
          v += lowpass[k] * current[static_cast<std::size_t>(src - lo)];
      }
      next[i] = v;
      change = std::max(change, std::abs(v - current[i]));
    }
    current.swap(next);
    if (change < tolerance) {
      return TabulatedFunction({ static_cast<double>(lowpass.first),
                                 static_cast<double>(lowpass.last()) },
                               grid_exponent,
                               std::move(current));
    }
  }
  throw std::runtime_error("cascade did not converge within " +
                           std::to_string(max_iterations) +
                           " iterations; check the refinement filter");
}

//! Samples of sum_k c_k g(2x - k) on g's grid, where c is the wavelet
//! highpass and g a tabulated scaling function.
inline TabulatedFunction
wavelet_from_scaling(const TabulatedFunction& scaling,
                     const Filter& highpass)
{
  const int g = scaling.grid_exponent();
  const std::int64_t per_unit = std::int64_t{ 1 } << g;
  const Interval s = scaling.support();
  const double lo = (s.lo + highpass.first) / 2.0;
  const double hi = (s.hi + highpass.last()) / 2.0;
  const auto first = static_cast<std::int64_t>(std::ldexp(lo, g));
  const auto last = static_cast<std::int64_t>(std::ldexp(hi, g));
  const auto src_lo = static_cast<std::int64_t>(std::ldexp(s.lo, g));
  const auto src_hi = static_cast<std::int64_t>(std::ldexp(s.hi, g));
  const auto samples = scaling.samples();

  std::vector<double> out(static_cast<std::size_t>(last - first + 1), 0.0);
  for (std::int64_t m = first; m <= last; ++m) {
    double v = 0.0;
    for (int k = highpass.first; k <= highpass.last(); ++k) {
      const std::int64_t src = 2 * m - k * per_unit;
      if (src >= src_lo && src <= src_hi)
        v += highpass[k] * samples[static_cast<std::size_t>(src - src_lo)];
    }
    out[static_cast<std::size_t>(m - first)] = v;
  }
  return TabulatedFunction({ lo, hi }, g, std::move(out));
}

//! Highpass g_k = (-1)^k c_{1-k} built from the opposite lowpass c.
inline Filter
quadrature_mirror(const Filter& lowpass)
{
  Filter out{ 1 - lowpass.last(), {} };
  for (int k = out.first; k <= 1 - lowpass.first; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out.taps.push_back(sign * lowpass[1 - k]);
  }
  return out;
}

//! psi(x) = sum_k g_k 1_[0,1](2x - k): one step of width 1/2 per tap.
inline StepFunction
box_wavelet(const Filter& highpass)
{
  std::vector<double> breaks;
  std::vector<double> values;
  for (int k = highpass.first; k <= highpass.last(); ++k) {
    breaks.push_back(k / 2.0);
    values.push_back(highpass[k]);
  }
  breaks.push_back((highpass.last() + 1) / 2.0);
  return StepFunction(std::move(breaks), std::move(values));
}

inline void
write_tabulation(std::ostream& os, std::string_view label, const TabulatedFunction& f)
{
  std::array<char, 32> buf{};
  const auto fmt = [&buf](double v) {
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
  };
  os << label << ' ' << fmt(f.support().lo) << ' ' << fmt(f.support().hi) << ' '
     << f.samples().size() << '\n';
  for (double v : f.samples())
    os << fmt(v) << '\n';
}

inline double
parse_double(const std::string& token)
{
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw std::runtime_error("reconstruction cache: bad number '" + token + "'");
  return v;
}

inline TabulatedFunction
read_tabulation(std::istream& is, std::string_view label, int grid_exponent)
{
  std::string name, lo, hi;
  std::size_t count = 0;
  if (!(is >> name >> lo >> hi >> count) || name != label)
    throw std::runtime_error("reconstruction cache: expected block '" +
                             std::string(label) + "'");
  std::vector<double> samples(count);
  std::string token;
  for (auto& s : samples) {
    if (!(is >> token))
      throw std::runtime_error("reconstruction cache: truncated block '" +
                               std::string(label) + "'");
    s = parse_double(token);
  }
  return TabulatedFunction({ parse_double(lo), parse_double(hi) }, grid_exponent,
                           std::move(samples));
}

inline BiorthogonalBasis
assemble_spline_basis(TabulatedFunction phi_tilde, TabulatedFunction psi_tilde)
{
  StepFunction phi({ 0.0, 1.0 }, { 1.0 });
  StepFunction psi = box_wavelet(quadrature_mirror(cdf13_dual_lowpass()));
  // psi annihilates polynomials up to degree 2.
  return BiorthogonalBasis(BasisKind::spline, std::move(phi), std::move(psi),
                           std::move(phi_tilde), std::move(psi_tilde), 2.0);
}

} // namespace detail

inline constexpr int default_grid_exponent = 12;
inline constexpr double cascade_tolerance = 1e-10;
inline constexpr int cascade_max_iterations = 60;

//! CDF(1,3) biorthogonal pair. Decomposition side: phi = 1_[0,1] and an
//! exact piecewise-constant psi on [-1, 2]. Reconstruction side: phi~ on
//! [-2, 3] and psi~ on [-1, 2], tabulated on the 2^-grid_exponent grid by
//! the cascade algorithm.
inline BiorthogonalBasis
build_spline_basis(int grid_exponent = default_grid_exponent)
{
  if (grid_exponent < 10 || grid_exponent > 24)
    throw std::invalid_argument("build_spline_basis: grid exponent must be in [10, 24]");
  auto phi_tilde = detail::cascade(detail::cdf13_dual_lowpass(), grid_exponent,
                                   cascade_tolerance, cascade_max_iterations);
  auto psi_tilde = detail::wavelet_from_scaling(
    phi_tilde, detail::quadrature_mirror(detail::cdf13_box_lowpass()));
  return detail::assemble_spline_basis(std::move(phi_tilde), std::move(psi_tilde));
}

inline BasisPtr
spline_basis()
{
  static const BasisPtr basis =
    std::make_shared<const BiorthogonalBasis>(build_spline_basis());
  return basis;
}

inline constexpr std::string_view reconstruction_cache_header =
  "wavedens-reconstruction-cache v1";

//! Dump the tabulated reconstruction functions of a spline basis.
inline void
save_reconstruction_cache(const BiorthogonalBasis& basis, std::ostream& os)
{
  const auto* phi = std::get_if<TabulatedFunction>(&basis.phi_tilde());
  const auto* psi = std::get_if<TabulatedFunction>(&basis.psi_tilde());
  if (basis.kind() != BasisKind::spline || !phi || !psi)
    throw std::invalid_argument("save_reconstruction_cache: not a tabulated basis");
  os << reconstruction_cache_header << '\n'
     << "grid_exponent " << phi->grid_exponent() << '\n';
  detail::write_tabulation(os, "phi_tilde", *phi);
  detail::write_tabulation(os, "psi_tilde", *psi);
}

inline BiorthogonalBasis
load_reconstruction_cache(std::istream& is)
{
  std::string header;
  std::getline(is, header);
  if (header != reconstruction_cache_header)
    throw std::runtime_error("reconstruction cache: unsupported header '" + header + "'");
  std::string key;
  int g = 0;
  if (!(is >> key >> g) || key != "grid_exponent")
    throw std::runtime_error("reconstruction cache: missing grid_exponent");
  auto phi = detail::read_tabulation(is, "phi_tilde", g);
  auto psi = detail::read_tabulation(is, "psi_tilde", g);
  return detail::assemble_spline_basis(std::move(phi), std::move(psi));
}

} // namespace wavedens
