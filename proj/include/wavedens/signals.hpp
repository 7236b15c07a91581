#pragma once

#include "basis.hpp"
#include "quadrature.hpp"
#include "sample.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <variant>

namespace wavedens {

// ----------------------------------------------------------------------------
// Mixture components
// ----------------------------------------------------------------------------

struct NormalComponent
{
  double mean{ 0.0 };
  double sd{ 1.0 };
};

//! Standard Student t with `dof` degrees of freedom (location 0, scale 1).
struct StudentComponent
{
  double dof{ 1.0 };
};

struct UniformComponent
{
  double lo{ 0.0 };
  double hi{ 1.0 };
};

//! The Bumps test function restricted to [0, 1], normalized to unit mass.
struct BumpsComponent
{};

using Component =
  std::variant<NormalComponent, StudentComponent, UniformComponent, BumpsComponent>;

struct MixturePart
{
  double weight{ 1.0 };
  Component component;
};

namespace bumps {

inline constexpr std::array<double, 11> positions{ 0.1,  0.13, 0.15, 0.23, 0.25, 0.4,
                                                   0.44, 0.65, 0.76, 0.78, 0.81 };
inline constexpr std::array<double, 11> heights{ 4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2 };
inline constexpr std::array<double, 11> widths{ 0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                                0.01,  0.01,  0.005, 0.008, 0.005 };

//! Normalizing constant quoted alongside the Bumps definition.
inline constexpr double quoted_normalizer = 0.284;

//! sum_j g_j (1 + |x - p_j| / w_j)^-4 on [0, 1], 0 elsewhere.
inline double
raw(double x)
{
  if (x < 0.0 || x > 1.0)
    return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double u = 1.0 + std::abs(x - positions[i]) / widths[i];
    const double u2 = u * u;
    s += heights[i] / (u2 * u2);
  }
  return s;
}

//! Integral of g(x) over [a, b] ∩ [0, 1], split at the kinks p_j.
template <class G>
double
integrate_pieces(const G& g, double a, double b, double tol)
{
  a = std::max(a, 0.0);
  b = std::min(b, 1.0);
  if (!(a < b))
    return 0.0;
  double total = 0.0;
  double left = a;
  for (double p : positions) {
    if (p > left && p < b) {
      total += adaptive_simpson(g, left, p, tol);
      left = p;
    }
  }
  return total + adaptive_simpson(g, left, b, tol);
}

inline double
raw_integral(double a, double b, double tol = 1e-10)
{
  return integrate_pieces(raw, a, b, tol);
}

//! int_0^1 raw(x) dx, computed once.
inline double
normalizer()
{
  static const double z = raw_integral(0.0, 1.0, 1e-13);
  return z;
}

} // namespace bumps

namespace detail {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

//! P(a <= Z <= b) for a standard normal Z, using whichever tail is small.
inline double
std_normal_mass(double za, double zb)
{
  if (!(za < zb))
    return 0.0;
  if (za >= 0.0)
    return 0.5 * (std::erfc(za * inv_sqrt2) - std::erfc(zb * inv_sqrt2));
  if (zb <= 0.0)
    return 0.5 * (std::erfc(-zb * inv_sqrt2) - std::erfc(-za * inv_sqrt2));
  return 1.0 - 0.5 * std::erfc(zb * inv_sqrt2) - 0.5 * std::erfc(-za * inv_sqrt2);
}

inline double
normal_pdf(double x, double mean, double sd)
{
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double
student_pdf(double x, double dof)
{
  const double logc = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                      0.5 * std::log(dof * std::numbers::pi);
  return std::exp(logc - 0.5 * (dof + 1.0) * std::log1p(x * x / dof));
}

inline double
student_upper(double x, double dof)
{
  if (x == std::numeric_limits<double>::infinity())
    return 0.0;
  if (x == -std::numeric_limits<double>::infinity())
    return 1.0;
  boost::math::students_t dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

inline double
student_mass(double a, double b, double dof)
{
  if (!(a < b))
    return 0.0;
  // Work with upper-tail probabilities so both terms stay small.
  if (a >= 0.0)
    return student_upper(a, dof) - student_upper(b, dof);
  if (b <= 0.0)
    return student_upper(-b, dof) - student_upper(-a, dof);
  return 1.0 - student_upper(b, dof) - student_upper(-a, dof);
}

inline double
component_pdf(const Component& c, double x)
{
  return std::visit(
    [x](const auto& m) -> double {
      using M = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<M, NormalComponent>)
        return normal_pdf(x, m.mean, m.sd);
      else if constexpr (std::is_same_v<M, StudentComponent>)
        return student_pdf(x, m.dof);
      else if constexpr (std::is_same_v<M, UniformComponent>)
        return (x >= m.lo && x <= m.hi) ? 1.0 / (m.hi - m.lo) : 0.0;
      else
        return bumps::raw(x) / bumps::normalizer();
    },
    c);
}

inline double
component_mass(const Component& c, double a, double b)
{
  return std::visit(
    [a, b](const auto& m) -> double {
      using M = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<M, NormalComponent>)
        return std_normal_mass((a - m.mean) / m.sd, (b - m.mean) / m.sd);
      else if constexpr (std::is_same_v<M, StudentComponent>)
        return student_mass(a, b, m.dof);
      else if constexpr (std::is_same_v<M, UniformComponent>)
        return std::max(0.0, std::min(b, m.hi) - std::max(a, m.lo)) / (m.hi - m.lo);
      else
        return bumps::raw_integral(a, b) / bumps::normalizer();
    },
    c);
}

//! Interval holding all but `tail` of the component's mass (two-sided).
inline Interval
component_bracket(const Component& c, double tail)
{
  return std::visit(
    [tail](const auto& m) -> Interval {
      using M = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<M, NormalComponent>)
        return { m.mean - 8.0 * m.sd, m.mean + 8.0 * m.sd };
      else if constexpr (std::is_same_v<M, StudentComponent>) {
        boost::math::students_t dist(m.dof);
        const double q = boost::math::quantile(boost::math::complement(dist, 0.5 * tail));
        return { -q, q };
      } else if constexpr (std::is_same_v<M, UniformComponent>)
        return { m.lo, m.hi };
      else
        return { 0.0, 1.0 };
    },
    c);
}

//! Support of a component, infinite for normal and Student.
inline Interval
component_support(const Component& c)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (const auto* u = std::get_if<UniformComponent>(&c))
    return { u->lo, u->hi };
  if (std::holds_alternative<BumpsComponent>(c))
    return { 0.0, 1.0 };
  return { -inf, inf };
}

//! int_a^b N(x; m1, s1) N(x; m2, s2) dx in closed form.
inline double
normal_product_integral(const NormalComponent& p, const NormalComponent& q, double a, double b)
{
  const double v = p.sd * p.sd + q.sd * q.sd;
  const double scale = normal_pdf(p.mean - q.mean, 0.0, std::sqrt(v));
  const double mean = (p.mean * q.sd * q.sd + q.mean * p.sd * p.sd) / v;
  const double sd = p.sd * q.sd / std::sqrt(v);
  return scale * std_normal_mass((a - mean) / sd, (b - mean) / sd);
}

template <class G>
double
integrate_line(const G& g, double a, double b)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(a < b))
    return 0.0;
  if (std::isfinite(a) && std::isfinite(b))
    return adaptive_simpson(g, a, b, 1e-13);
  boost::math::quadrature::exp_sinh<double> integrator;
  if (std::isfinite(a))
    return integrator.integrate(g, a, inf);
  if (std::isfinite(b))
    return integrator.integrate([&g](double x) { return g(-x); }, -b, inf);
  return integrate_line(g, -inf, 0.0) + integrate_line(g, 0.0, inf);
}

} // namespace detail

// ----------------------------------------------------------------------------
// TestSignal
// ----------------------------------------------------------------------------

//! Analytic density on the line: a finite mixture of components.
//! Weights are normalized to sum to one at construction.
class TestSignal
{
public:
  TestSignal(std::string id, std::vector<MixturePart> parts)
    : id_(std::move(id))
    , parts_(std::move(parts))
  {
    double total = 0.0;
    for (const auto& p : parts_) {
      if (!(p.weight > 0.0))
        throw std::invalid_argument("TestSignal: weights must be positive");
      total += p.weight;
    }
    if (parts_.empty())
      throw std::invalid_argument("TestSignal: no components");
    for (auto& p : parts_)
      p.weight /= total;
  }

  static TestSignal uniform01()
  {
    return TestSignal("uniform", { { 1.0, UniformComponent{ 0.0, 1.0 } } });
  }

  static TestSignal gauss(double mean = 0.5, double sd = 0.25)
  {
    if (!(sd > 0.0))
      throw std::invalid_argument("gauss: sd must be positive");
    return TestSignal("gauss(" + fmt(mean) + "," + fmt(sd) + ")",
                      { { 1.0, NormalComponent{ mean, sd } } });
  }

  //! 1/2 N(0, 1) + 1/2 N(d, 1).
  static TestSignal mixture_gd(double d)
  {
    return TestSignal("gd(" + fmt(d) + ")",
                      { { 0.5, NormalComponent{ 0.0, 1.0 } }, { 0.5, NormalComponent{ d, 1.0 } } });
  }

  //! 0.45 T(k) + 0.15 N(-1, .05) + 0.1 N(-.7, .005) + 0.25 N(1, .025)
  //! + 0.15 N(2, .05). These weights add up to 1.1 and are renormalized.
  static TestSignal mixture_hk(double k)
  {
    if (!(k > 0.0))
      throw std::invalid_argument("hk: degrees of freedom must be positive");
    return TestSignal("hk(" + fmt(k) + ")",
                      { { 0.45, StudentComponent{ k } },
                        { 0.15, NormalComponent{ -1.0, 0.05 } },
                        { 0.10, NormalComponent{ -0.7, 0.005 } },
                        { 0.25, NormalComponent{ 1.0, 0.025 } },
                        { 0.15, NormalComponent{ 2.0, 0.05 } } });
  }

  static TestSignal bumps() { return TestSignal("bumps", { { 1.0, BumpsComponent{} } }); }

  const std::string& id() const { return id_; }
  const std::vector<MixturePart>& parts() const { return parts_; }

  double pdf(double x) const
  {
    double s = 0.0;
    for (const auto& p : parts_)
      s += p.weight * detail::component_pdf(p.component, x);
    return s;
  }

  //! P(a <= X <= b).
  double mass(double a, double b) const
  {
    double s = 0.0;
    for (const auto& p : parts_)
      s += p.weight * detail::component_mass(p.component, a, b);
    return s;
  }

  //! Interval holding mass >= 1 - 1e-9.
  Interval effective_support() const { return bracket(1e-9); }

  //! Interval on which ISE grids resolve the density. Student components
  //! keep only their central 1 - 1e-4; the rest of the line is accounted
  //! for exactly by square_integral_outside.
  Interval ise_core() const { return bracket(1e-4); }

  //! int_a^b f(x)^2 dx (a, b may be infinite).
  double square_integral(double a, double b) const
  {
    double total = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      for (std::size_t l = i; l < parts_.size(); ++l) {
        const double w = parts_[i].weight * parts_[l].weight * (i == l ? 1.0 : 2.0);
        total += w * pair_integral(parts_[i].component, parts_[l].component, a, b);
      }
    }
    return total;
  }

  //! int f^2 over the complement of `inside`.
  double square_integral_outside(Interval inside) const
  {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return square_integral(-inf, inside.lo) + square_integral(inside.hi, inf);
  }

  //! n i.i.d. draws: component first, then a draw from it. Deterministic
  //! per seed.
  Sample sample(std::uint64_t seed, std::size_t n) const
  {
    if (n < 2)
      throw std::invalid_argument("sample: need n >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out;
    out.reserve(n);
    std::size_t proposals = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = unit(rng);
      std::size_t c = 0;
      double acc = parts_[0].weight;
      while (c + 1 < parts_.size() && u >= acc)
        acc += parts_[++c].weight;
      out.push_back(draw(parts_[c].component, rng, proposals));
    }
    return Sample(std::move(out));
  }

private:
  static std::string fmt(double v)
  {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  Interval bracket(double tail) const
  {
    Interval s = detail::component_bracket(parts_.front().component, tail);
    for (const auto& p : parts_)
      s = hull(s, detail::component_bracket(p.component, tail));
    return s;
  }

  static double pair_integral(const Component& p, const Component& q, double a, double b)
  {
    const auto* np = std::get_if<NormalComponent>(&p);
    const auto* nq = std::get_if<NormalComponent>(&q);
    if (np && nq)
      return detail::normal_product_integral(*np, *nq, a, b);
    const Interval sp = detail::component_support(p);
    const Interval sq = detail::component_support(q);
    const double lo = std::max({ a, sp.lo, sq.lo });
    const double hi = std::min({ b, sp.hi, sq.hi });
    const auto g = [&p, &q](double x) {
      return detail::component_pdf(p, x) * detail::component_pdf(q, x);
    };
    if (std::holds_alternative<BumpsComponent>(p) || std::holds_alternative<BumpsComponent>(q))
      return bumps::integrate_pieces(g, lo, hi, 1e-12);
    return detail::integrate_line(g, lo, hi);
  }

  static double draw(const Component& c, std::mt19937_64& rng, std::size_t& proposals)
  {
    return std::visit(
      [&rng, &proposals](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NormalComponent>) {
          std::normal_distribution<double> d(m.mean, m.sd);
          return d(rng);
        } else if constexpr (std::is_same_v<M, StudentComponent>) {
          std::normal_distribution<double> z(0.0, 1.0);
          std::chi_squared_distribution<double> v(m.dof);
          const double num = z(rng);
          return num / std::sqrt(v(rng) / m.dof);
        } else if constexpr (std::is_same_v<M, UniformComponent>) {
          std::uniform_real_distribution<double> d(m.lo, m.hi);
          return d(rng);
        } else {
          return draw_bumps(rng, proposals);
        }
      },
      c);
  }

  static double bumps_envelope()
  {
    static const double envelope = [] {
      double m = 0.0;
      const std::size_t cells = std::size_t{ 1 } << 14;
      for (std::size_t i = 0; i <= cells; ++i)
        m = std::max(m, bumps::raw(std::ldexp(static_cast<double>(i), -14)));
      for (double p : bumps::positions)
        m = std::max(m, bumps::raw(p));
      return 1.05 * m / bumps::normalizer();
    }();
    return envelope;
  }

  //! Rejection sampling under a constant envelope on [0, 1].
  static double draw_bumps(std::mt19937_64& rng, std::size_t& proposals)
  {
    constexpr std::size_t max_proposals = 10'000'000;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double envelope = bumps_envelope();
    while (proposals++ < max_proposals) {
      const double x = unit(rng);
      const double y = envelope * unit(rng);
      if (y <= bumps::raw(x) / bumps::normalizer())
        return x;
    }
    throw std::runtime_error("bumps sampler: proposal budget exhausted");
  }

  std::string id_;
  std::vector<MixturePart> parts_;
};

//! Builds a signal from a name: uniform, gauss[:mean,sd], bumps, gd:<d>, hk:<k>.
inline TestSignal
parse_signal(const std::string& spec)
{
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto number = [&spec](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size())
      throw std::invalid_argument("bad signal parameter in '" + spec + "'");
    return v;
  };
  if (name == "uniform" && args.empty())
    return TestSignal::uniform01();
  if (name == "bumps" && args.empty())
    return TestSignal::bumps();
  if (name == "gauss") {
    if (args.empty())
      return TestSignal::gauss();
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("gauss signal expects gauss:<mean>,<sd>");
    return TestSignal::gauss(number(args.substr(0, comma)), number(args.substr(comma + 1)));
  }
  if (name == "gd" && !args.empty())
    return TestSignal::mixture_gd(number(args));
  if (name == "hk" && !args.empty())
    return TestSignal::mixture_hk(number(args));
  throw std::invalid_argument("unknown signal '" + spec +
                              "' (expected uniform, gauss[:m,s], bumps, gd:<d>, hk:<k>)");
}

// ----------------------------------------------------------------------------
// True coefficients
// ----------------------------------------------------------------------------

//! beta_jk = int psi_jk f: sum over the steps of psi_jk of
//! (step value) * P(X in step).
inline double
true_coefficient(const TestSignal& signal, const BiorthogonalBasis& basis, CoefficientIndex idx)
{
  const StepFunction& f = idx.j < 0 ? basis.phi() : basis.psi();
  const double scale = level_scale(idx.j);
  const auto& br = f.breakpoints();
  const auto& vals = f.values();
  const auto to_x = [&idx](double t) {
    const double u = t + static_cast<double>(idx.k);
    return idx.j < 0 ? u : std::ldexp(u, -idx.j);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    total += scale * vals[i] * signal.mass(to_x(br[i]), to_x(br[i + 1]));
  return total;
}

//! sigma^2_jk = int psi_jk^2 f - beta_jk^2.
inline double
true_sigma_sq(const TestSignal& signal, const BiorthogonalBasis& basis, CoefficientIndex idx)
{
  const StepFunction& f = idx.j < 0 ? basis.phi() : basis.psi();
  const double scale = level_scale(idx.j);
  const auto& br = f.breakpoints();
  const auto& vals = f.values();
  const auto to_x = [&idx](double t) {
    const double u = t + static_cast<double>(idx.k);
    return idx.j < 0 ? u : std::ldexp(u, -idx.j);
  };
  double second = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    second += scale * scale * vals[i] * vals[i] * signal.mass(to_x(br[i]), to_x(br[i + 1]));
  const double beta = true_coefficient(signal, basis, idx);
  return std::max(0.0, second - beta * beta);
}

} // namespace wavedens
