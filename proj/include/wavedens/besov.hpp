#pragma once

#include "basis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace wavedens {

//! Sequence-space Besov norm of a finite coefficient set:
//!   |(alpha_k)|_p + [ sum_j 2^{j q (alpha + 1/2 - 1/p)} |(beta_jk)_k|_p^q ]^{1/q}
//! where the father row (j = -1) supplies alpha_k. p or q may be infinite.
inline double
besov_norm(const std::map<CoefficientIndex, double>& coeffs, double alpha, double p, double q)
{
  if (!(p >= 1.0) || !(q >= 1.0))
    throw std::invalid_argument("besov_norm: need p >= 1 and q >= 1");
  const bool p_inf = std::isinf(p);
  const bool q_inf = std::isinf(q);

  // Accumulate sum |c|^p (or max |c|) per level.
  std::map<int, double> level_acc;
  for (const auto& [idx, value] : coeffs) {
    const double a = std::abs(value);
    double& acc = level_acc[idx.j];
    acc = p_inf ? std::max(acc, a) : acc + std::pow(a, p);
  }

  const auto lp = [&](double acc) { return p_inf ? acc : std::pow(acc, 1.0 / p); };
  const double inv_p = p_inf ? 0.0 : 1.0 / p;

  double father = 0.0;
  double detail_acc = 0.0;
  for (const auto& [j, acc] : level_acc) {
    if (j < 0) {
      father = lp(acc);
      continue;
    }
    const double weighted = std::exp2(j * (alpha + 0.5 - inv_p)) * lp(acc);
    detail_acc = q_inf ? std::max(detail_acc, weighted) : detail_acc + std::pow(weighted, q);
  }
  return father + (q_inf ? detail_acc : std::pow(detail_acc, 1.0 / q));
}

} // namespace wavedens
