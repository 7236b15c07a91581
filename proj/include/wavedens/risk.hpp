#pragma once

#include "estimator.hpp"
#include "kernel.hpp"
#include "oracle.hpp"
#include "signals.hpp"
#include "spline_basis.hpp"

#include <functional>
#include <optional>

namespace wavedens {

// ----------------------------------------------------------------------------
// Integrated squared error
// ----------------------------------------------------------------------------

//! Uniform integration grid lo, lo + step, ..., hi.
struct GridSpec
{
  double lo{ 0.0 };
  double hi{ 1.0 };
  double step{ 1.0 / 1024.0 };

  static constexpr double max_intervals = 1e7;

  void validate() const
  {
    if (!(lo < hi) || !(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("GridSpec: need finite lo < hi and step > 0");
    if ((hi - lo) / step > max_intervals)
      throw std::invalid_argument("GridSpec: more than 1e7 intervals");
  }

  std::size_t intervals() const
  {
    return static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
  }

  //! Nodes lo + i * step; the last node is hi.
  std::vector<double> nodes() const
  {
    validate();
    const std::size_t m = intervals();
    std::vector<double> x(m + 1);
    for (std::size_t i = 0; i < m; ++i)
      x[i] = lo + static_cast<double>(i) * step;
    x[m] = hi;
    return x;
  }
};

//! Smallest grid with nodes on multiples of `step` covering `span`
//! widened by one unit on each side.
inline GridSpec
covering_grid(Interval span, double step)
{
  return { std::floor((span.lo - 1.0) / step) * step, std::ceil((span.hi + 1.0) / step) * step,
           step };
}

using GridEvaluator = std::function<std::vector<double>(std::span<const double>)>;

//! ISE of an estimate given by a vectorized evaluator, zero outside
//! `estimate_support`. The trapezoid rule on each grid cell uses one-sided
//! limits at the cell ends, so jumps located on grid nodes are integrated
//! exactly; int f^2 outside the grid is added in closed form.
inline double
ise(const GridEvaluator& estimate,
    std::optional<Interval> estimate_support,
    const TestSignal& signal,
    const GridSpec& grid)
{
  grid.validate();
  if (estimate_support && !Interval{ grid.lo, grid.hi }.contains(*estimate_support)) {
    const double a = estimate_support->lo < grid.lo ? estimate_support->lo : grid.hi;
    const double b = estimate_support->lo < grid.lo ? grid.lo : estimate_support->hi;
    throw std::invalid_argument("ise: grid does not cover the estimate on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const auto nodes = grid.nodes();
  const std::size_t m = nodes.size() - 1;
  const double delta = grid.step * 0x1p-20;
  std::vector<double> right(m), left(m);
  for (std::size_t i = 0; i < m; ++i) {
    right[i] = nodes[i] + delta;
    left[i] = nodes[i + 1] - delta;
  }
  const auto fr = estimate(right);
  const auto fl = estimate(left);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double er = signal.pdf(right[i]) - fr[i];
    const double el = signal.pdf(left[i]) - fl[i];
    total += 0.5 * (er * er + el * el) * (nodes[i + 1] - nodes[i]);
  }
  return total + signal.square_integral_outside({ grid.lo, grid.hi });
}

inline double
ise(const DensityEstimate& estimate, const TestSignal& signal, const GridSpec& grid)
{
  return ise([&estimate](std::span<const double> x) { return estimate.evaluate(x); },
             estimate.support(), signal, grid);
}

inline double
ise(const KernelEstimate& estimate, const TestSignal& signal, const GridSpec& grid)
{
  return ise([&estimate](std::span<const double> x) { return estimate.evaluate(x); },
             estimate.support(), signal, grid);
}

// ----------------------------------------------------------------------------
// Methods
// ----------------------------------------------------------------------------

struct WaveletMethod
{
  BasisPtr basis;
  ThresholdMode mode{ Practical{} };
  std::optional<int> j0_override;
};

struct OracleMethod
{
  BasisPtr basis;
  std::optional<int> j0_override;
};

struct KernelMethod
{};

struct Method
{
  std::string id;
  std::variant<WaveletMethod, OracleMethod, KernelMethod> spec;
  //! Sweep parameter reported alongside the results (gamma, d or k).
  double parameter{ std::numeric_limits<double>::quiet_NaN() };
};

inline const std::vector<std::string>&
method_codes()
{
  static const std::vector<std::string> codes{ "S", "H", "S*", "K" };
  return codes;
}

//! S: spline, practical. H: Haar, practical. S*: spline, gamma = 0.5. K: kernel.
inline Method
method_from_code(const std::string& code)
{
  if (code == "S")
    return { "S", WaveletMethod{ spline_basis(), Practical{}, {} } };
  if (code == "H")
    return { "H", WaveletMethod{ haar_basis(), Practical{}, {} } };
  if (code == "S*")
    return { "S*", WaveletMethod{ spline_basis(), PracticalGamma{ 0.5 }, {} } };
  if (code == "K")
    return { "K", KernelMethod{} };
  std::string valid;
  for (const auto& c : method_codes())
    valid += (valid.empty() ? "" : ", ") + c;
  throw std::invalid_argument("unknown method '" + code + "' (valid: " + valid + ")");
}

using FittedEstimate = std::variant<DensityEstimate, KernelEstimate>;

inline FittedEstimate
fit(const Method& method, const Sample& sample, const TestSignal& signal)
{
  return std::visit(
    [&](const auto& m) -> FittedEstimate {
      using M = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<M, WaveletMethod>)
        return estimate(sample, EstimatorConfig{ m.basis, m.mode, m.j0_override });
      else if constexpr (std::is_same_v<M, OracleMethod>)
        return oracle_estimate(sample, signal,
                               EstimatorConfig{ m.basis, Practical{}, m.j0_override });
      else
        return fit_kernel(sample);
    },
    method.spec);
}

inline std::optional<Interval>
support_of(const FittedEstimate& e)
{
  return std::visit([](const auto& v) -> std::optional<Interval> { return v.support(); }, e);
}

inline double
ise(const FittedEstimate& e, const TestSignal& signal, const GridSpec& grid)
{
  return std::visit([&](const auto& v) { return ise(v, signal, grid); }, e);
}

inline std::size_t
kept_count(const FittedEstimate& e)
{
  if (const auto* d = std::get_if<DensityEstimate>(&e))
    return d->kept().size();
  return 0;
}

// ----------------------------------------------------------------------------
// Monte-Carlo sweeps
// ----------------------------------------------------------------------------

inline std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Seed of replication `rep` under `master_seed`.
inline std::uint64_t
replication_seed(std::uint64_t master_seed, std::size_t rep)
{
  return splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(rep)));
}

//! Type-7 sample quantile.
inline double
quantile(std::vector<double> values, double p)
{
  if (values.empty())
    throw std::invalid_argument("quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size())
    return values.back();
  return values[i] + (pos - static_cast<double>(i)) * (values[i + 1] - values[i]);
}

struct RiskReport
{
  std::string signal_id;
  std::string method_id;
  double parameter{ std::numeric_limits<double>::quiet_NaN() };
  std::size_t n{ 0 };
  std::size_t replications{ 0 };
  std::uint64_t master_seed{ 0 };
  //! By replication index.
  std::vector<double> ise_values;
  std::vector<std::size_t> kept_counts;
  double mean{ 0.0 };
  double median{ 0.0 };
  double q25{ 0.0 };
  double q75{ 0.0 };

  void aggregate()
  {
    replications = ise_values.size();
    double s = 0.0;
    for (double v : ise_values)
      s += v;
    mean = s / static_cast<double>(ise_values.size());
    median = quantile(ise_values, 0.5);
    q25 = quantile(ise_values, 0.25);
    q75 = quantile(ise_values, 0.75);
  }
};

struct SweepOptions
{
  std::size_t n{ 1024 };
  std::size_t replications{ 50 };
  std::uint64_t master_seed{ 1 };
  unsigned workers{ 1 };
  //! Defaults to 2^-max(10, floor(log2 n) + 1), which puts every Haar
  //! breakpoint up to the default j0 on a grid node.
  std::optional<double> grid_step;
  //! Region the ISE grid must include in addition to the signal core and
  //! the estimate supports.
  std::optional<Interval> grid_extent;
};

inline double
default_grid_step(std::size_t n)
{
  const int j0 = static_cast<int>(std::bit_width(n)) - 1;
  return std::ldexp(1.0, -std::max(10, j0 + 1));
}

//! Runs `replications` seeded samples of size n; every method sees the same
//! sample within a replication. One report per method, in input order.
//! A failing replication aborts the sweep.
inline std::vector<RiskReport>
mise_sweep(const TestSignal& signal, std::span<const Method> methods, const SweepOptions& opts)
{
  if (opts.replications < 1)
    throw std::invalid_argument("mise_sweep: need at least one replication");
  if (methods.empty())
    throw std::invalid_argument("mise_sweep: no methods");
  const double step = opts.grid_step.value_or(default_grid_step(opts.n));

  std::vector<std::vector<double>> ises(opts.replications, std::vector<double>(methods.size()));
  std::vector<std::vector<std::size_t>> kept(opts.replications,
                                             std::vector<std::size_t>(methods.size()));
  parallel_for(opts.replications, opts.workers, [&](std::size_t rep) {
    const Sample sample = signal.sample(replication_seed(opts.master_seed, rep), opts.n);
    std::vector<FittedEstimate> fits;
    fits.reserve(methods.size());
    Interval span = signal.ise_core();
    if (opts.grid_extent)
      span = hull(span, *opts.grid_extent);
    for (const auto& m : methods) {
      fits.push_back(fit(m, sample, signal));
      if (auto s = support_of(fits.back()))
        span = hull(span, *s);
    }
    const GridSpec grid = covering_grid(span, step);
    for (std::size_t i = 0; i < methods.size(); ++i) {
      ises[rep][i] = ise(fits[i], signal, grid);
      kept[rep][i] = kept_count(fits[i]);
    }
  });

  std::vector<RiskReport> reports;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    RiskReport r;
    r.signal_id = signal.id();
    r.method_id = methods[i].id;
    r.parameter = methods[i].parameter;
    r.n = opts.n;
    r.master_seed = opts.master_seed;
    for (std::size_t rep = 0; rep < opts.replications; ++rep) {
      r.ise_values.push_back(ises[rep][i]);
      r.kept_counts.push_back(kept[rep][i]);
    }
    r.aggregate();
    reports.push_back(std::move(r));
  }
  return reports;
}

//! PracticalGamma(gamma) for each gamma on one signal and basis.
inline std::vector<RiskReport>
calibration_sweep(const TestSignal& signal,
                  const BasisPtr& basis,
                  std::span<const double> gammas,
                  const SweepOptions& opts)
{
  std::vector<Method> methods;
  for (double g : gammas) {
    if (!(g > 0.0))
      throw std::invalid_argument("calibration_sweep: gamma must be > 0");
    std::ostringstream id;
    id << "gamma=" << g;
    methods.push_back({ id.str(), WaveletMethod{ basis, PracticalGamma{ g }, {} }, g });
  }
  return mise_sweep(signal, methods, opts);
}

//! Two-Gaussian mixture g_d for each d; the ISE grid always spans
//! [-10, d + 10].
inline std::vector<RiskReport>
support_sweep(std::span<const double> d_values, std::span<const Method> methods,
              const SweepOptions& opts)
{
  std::vector<RiskReport> out;
  for (double d : d_values) {
    SweepOptions o = opts;
    o.grid_extent = opts.grid_extent ? hull(*opts.grid_extent, Interval{ -10.0, d + 10.0 })
                                     : Interval{ -10.0, d + 10.0 };
    for (auto& r : mise_sweep(TestSignal::mixture_gd(d), methods, o)) {
      r.parameter = d;
      out.push_back(std::move(r));
    }
  }
  return out;
}

//! Heavy-tailed spiky mixture h_k for each k.
inline std::vector<RiskReport>
tail_sweep(std::span<const double> k_values, std::span<const Method> methods,
           const SweepOptions& opts)
{
  std::vector<RiskReport> out;
  for (double k : k_values) {
    for (auto& r : mise_sweep(TestSignal::mixture_hk(k), methods, opts)) {
      r.parameter = k;
      out.push_back(std::move(r));
    }
  }
  return out;
}

} // namespace wavedens
