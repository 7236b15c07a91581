#pragma once

#include "functions.hpp"

#include <compare>
#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>

namespace wavedens {

//! Position (j, k) in the wavelet index set. Level j = -1 is the row of
//! father-wavelet translates phi(x - k); levels j >= 0 hold the dilated
//! mother wavelets 2^{j/2} psi(2^j x - k).
struct CoefficientIndex
{
  int j{ -1 };
  std::int64_t k{ 0 };

  auto operator<=>(const CoefficientIndex&) const = default;
};

enum class BasisKind
{
  haar,
  spline
};

inline std::string_view
to_string(BasisKind kind)
{
  return kind == BasisKind::haar ? "haar" : "spline";
}

//! 2^{j/2} for j >= 0, 1 for the father row.
inline double
level_scale(int j)
{
  return j < 0 ? 1.0 : std::sqrt(std::ldexp(1.0, j));
}

//! Reconstruction functions are either exact steps (Haar) or tabulations.
using ReconstructionFunction = std::variant<StepFunction, TabulatedFunction>;

inline double
evaluate(const ReconstructionFunction& f, double x)
{
  return std::visit([x](const auto& g) { return g(x); }, f);
}

inline Interval
support_of(const ReconstructionFunction& f)
{
  return std::visit([](const auto& g) { return g.support(); }, f);
}

//! The family (phi, psi, phi_tilde, psi_tilde): piecewise constant
//! decomposition side, possibly smooth reconstruction side.
//! Immutable once built.
class BiorthogonalBasis
{
public:
  BiorthogonalBasis(BasisKind kind,
                    StepFunction phi,
                    StepFunction psi,
                    ReconstructionFunction phi_tilde,
                    ReconstructionFunction psi_tilde,
                    double smoothness)
    : kind_(kind)
    , phi_(std::move(phi))
    , psi_(std::move(psi))
    , phi_tilde_(std::move(phi_tilde))
    , psi_tilde_(std::move(psi_tilde))
    , smoothness_(smoothness)
  {}

  BasisKind kind() const { return kind_; }
  std::string_view name() const { return to_string(kind_); }
  const StepFunction& phi() const { return phi_; }
  const StepFunction& psi() const { return psi_; }
  const ReconstructionFunction& phi_tilde() const { return phi_tilde_; }
  const ReconstructionFunction& psi_tilde() const { return psi_tilde_; }

  //! Degree r of the polynomials annihilated by psi.
  double smoothness() const { return smoothness_; }

  //! Argument of the mother/father function for cell idx at point x.
  static double local_coordinate(CoefficientIndex idx, double x)
  {
    const double t = idx.j < 0 ? x : std::ldexp(x, idx.j);
    return t - static_cast<double>(idx.k);
  }

  //! psi_jk(x), or phi_k(x) on the father row. Exact lookup.
  double eval_decomposition(CoefficientIndex idx, double x) const
  {
    const double t = local_coordinate(idx, x);
    if (idx.j < 0)
      return phi_(t);
    return level_scale(idx.j) * psi_(t);
  }

  //! psi~_jk(x), or phi~_k(x) on the father row.
  double eval_reconstruction(CoefficientIndex idx, double x) const
  {
    const double t = local_coordinate(idx, x);
    if (idx.j < 0)
      return evaluate(phi_tilde_, t);
    return level_scale(idx.j) * evaluate(psi_tilde_, t);
  }

  double sup_norm(CoefficientIndex idx) const
  {
    if (idx.j < 0)
      return phi_.sup_norm();
    return level_scale(idx.j) * psi_.sup_norm();
  }

  //! Support of psi_jk: [2^-j (a + k), 2^-j (b + k)].
  Interval support_interval(CoefficientIndex idx) const
  {
    return scaled(idx, idx.j < 0 ? phi_.support() : psi_.support());
  }

  Interval reconstruction_support(CoefficientIndex idx) const
  {
    return scaled(idx, support_of(idx.j < 0 ? phi_tilde_ : psi_tilde_));
  }

  //! Range [k_min, k_max] of translates at level j whose decomposition
  //! support contains x. Empty when k_min > k_max.
  std::pair<std::int64_t, std::int64_t> translates_covering(int j, double x) const
  {
    const Interval s = j < 0 ? phi_.support() : psi_.support();
    const double t = j < 0 ? x : std::ldexp(x, j);
    return { static_cast<std::int64_t>(std::ceil(t - s.hi)),
             static_cast<std::int64_t>(std::floor(t - s.lo)) };
  }

  //! Largest number of integer translates of the decomposition functions
  //! whose supports share a point.
  std::int64_t support_width() const
  {
    const auto w = [](Interval s) {
      return static_cast<std::int64_t>(std::ceil(s.width())) + 1;
    };
    return std::max(w(phi_.support()), w(psi_.support()));
  }

private:
  static Interval scaled(CoefficientIndex idx, Interval s)
  {
    const auto k = static_cast<double>(idx.k);
    if (idx.j < 0)
      return { s.lo + k, s.hi + k };
    return { std::ldexp(s.lo + k, -idx.j), std::ldexp(s.hi + k, -idx.j) };
  }

  BasisKind kind_;
  StepFunction phi_;
  StepFunction psi_;
  ReconstructionFunction phi_tilde_;
  ReconstructionFunction psi_tilde_;
  double smoothness_;
};

using BasisPtr = std::shared_ptr<const BiorthogonalBasis>;

//! Haar system: phi = 1_[0,1], psi = 1_[0,1/2) - 1_[1/2,1], self-dual.
inline BiorthogonalBasis
make_haar_basis()
{
  StepFunction phi({ 0.0, 1.0 }, { 1.0 });
  StepFunction psi({ 0.0, 0.5, 1.0 }, { 1.0, -1.0 });
  return BiorthogonalBasis(BasisKind::haar, phi, psi, phi, psi, 0.0);
}

inline BasisPtr
haar_basis()
{
  static const BasisPtr basis =
    std::make_shared<const BiorthogonalBasis>(make_haar_basis());
  return basis;
}

} // namespace wavedens
