// wavedens command-line tool.
//
// Every subcommand resolves its flags into a JSON config, then runs from
// that config alone. The config is written to <out>/manifest.json, so
// `wavedens replay <out>/manifest.json` reproduces the run.

#include <wavedens/io.hpp>
#include <wavedens/wavedens.hpp>

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavedens;

namespace {

constexpr std::string_view manifest_format = "wavedens.manifest";
constexpr int manifest_version = 1;

// ----------------------------------------------------------------------------
// Small parsing helpers
// ----------------------------------------------------------------------------

double
parse_number(const std::string& s)
{
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string>
split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto end = s.find(sep, begin);
    out.push_back(s.substr(begin, end - begin));
    if (end == std::string::npos)
      return out;
    begin = end + 1;
  }
}

//! "lo:hi:step" (inclusive, values rounded to 12 decimals) or "a,b,c".
std::vector<double>
parse_values(const std::string& s)
{
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("range must be lo:hi:step, got '" + s + "'");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || hi < lo)
      throw std::invalid_argument("range needs step > 0 and lo <= hi: '" + s + "'");
    for (std::size_t i = 0;; ++i) {
      const double v = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
      if (v > hi + 1e-9)
        break;
      out.push_back(v);
    }
  } else {
    for (const auto& p : split(s, ','))
      out.push_back(parse_number(p));
  }
  if (out.empty())
    throw std::invalid_argument("empty value list");
  return out;
}

void
write_file(const fs::path& path, const std::string& contents)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  os << contents;
  if (!os)
    throw std::runtime_error("write failed for " + path.string());
}

template<class F>
void
write_stream(const fs::path& path, F&& fill)
{
  std::ostringstream os;
  fill(os);
  write_file(path, os.str());
}

// ----------------------------------------------------------------------------
// Config -> run
// ----------------------------------------------------------------------------

BasisPtr
resolve_basis(const json& cfg)
{
  const auto name = cfg.at("basis").get<std::string>();
  if (name == "haar")
    return haar_basis();
  if (name != "spline")
    throw std::invalid_argument("unknown basis '" + name + "' (valid: haar, spline)");
  const auto& cache = cfg.value("basis_cache", json());
  if (cache.is_null())
    return spline_basis();
  const fs::path path = cache.get<std::string>();
  if (fs::exists(path)) {
    std::ifstream is(path);
    return std::make_shared<const BiorthogonalBasis>(load_reconstruction_cache(is));
  }
  auto basis = std::make_shared<const BiorthogonalBasis>(build_spline_basis());
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write basis cache " + path.string());
  save_reconstruction_cache(*basis, os);
  return basis;
}

void
run_estimate(const json& cfg, const fs::path& out)
{
  std::ifstream is(cfg.at("input").get<std::string>());
  if (!is)
    throw std::runtime_error("cannot open input " + cfg.at("input").get<std::string>());
  Sample sample = read_sample_csv(is);
  if (!cfg.at("rescale").is_null())
    sample = sample.rescaled(cfg.at("rescale").get<double>());

  EstimatorConfig ec;
  ec.basis = resolve_basis(cfg);
  ec.mode = mode_from_json(cfg.at("mode"));
  if (!cfg.at("j0").is_null())
    ec.j0_override = cfg.at("j0").get<int>();
  ec.workers = 1;
  const auto est = estimate(sample, ec);

  Interval span{ sample.min(), sample.max() };
  if (auto s = est.support())
    span = hull(span, *s);
  const double lo = cfg.at("grid_lo").is_null() ? span.lo : cfg.at("grid_lo").get<double>();
  const double hi = cfg.at("grid_hi").is_null() ? span.hi : cfg.at("grid_hi").get<double>();
  const GridSpec grid{ lo, hi, cfg.at("grid_step").get<double>() };
  const auto x = grid.nodes();
  const auto y = est.evaluate(x);

  write_file(out / "estimate.json", to_json(est).dump(2) + "\n");
  write_stream(out / "grid.csv", [&](std::ostream& os) { write_grid_csv(os, x, y); });
}

void
write_reports(const std::vector<RiskReport>& reports, const fs::path& out)
{
  write_stream(out / "replications.csv",
               [&](std::ostream& os) { write_replications_csv(os, reports); });
  write_stream(out / "plot.csv", [&](std::ostream& os) { write_plot_csv(os, reports); });
  write_file(out / "summary.json", summary_json(reports).dump(2) + "\n");
}

SweepOptions
sweep_options(const json& cfg, unsigned workers)
{
  SweepOptions o;
  o.n = cfg.at("n").get<std::size_t>();
  o.replications = cfg.at("reps").get<std::size_t>();
  o.master_seed = cfg.at("seed").get<std::uint64_t>();
  o.workers = workers;
  if (o.n < 2)
    throw std::invalid_argument("--n must be at least 2");
  if (o.replications < 1)
    throw std::invalid_argument("--reps must be at least 1");
  return o;
}

void
run_calibrate(const json& cfg, const fs::path& out, unsigned workers)
{
  const auto signal = parse_signal(cfg.at("signal").get<std::string>());
  const auto gammas = cfg.at("gammas").get<std::vector<double>>();
  write_reports(calibration_sweep(signal, resolve_basis(cfg), gammas, sweep_options(cfg, workers)),
                out);
}

void
run_bench(const json& cfg, const fs::path& out, unsigned workers)
{
  std::vector<Method> methods;
  for (const auto& code : cfg.at("methods").get<std::vector<std::string>>())
    methods.push_back(method_from_code(code));
  const auto values = cfg.at("values").get<std::vector<double>>();
  const auto sweep = cfg.at("sweep").get<std::string>();
  const auto opts = sweep_options(cfg, workers);
  if (sweep == "support")
    write_reports(support_sweep(values, methods, opts), out);
  else if (sweep == "tail")
    write_reports(tail_sweep(values, methods, opts), out);
  else
    throw std::invalid_argument("unknown sweep '" + sweep + "' (valid: support, tail)");
}

void
run_sample(const json& cfg, const fs::path& out)
{
  const auto signal = parse_signal(cfg.at("signal").get<std::string>());
  const auto n = cfg.at("n").get<std::size_t>();
  const auto sample = signal.sample(cfg.at("seed").get<std::uint64_t>(), n);
  write_stream(out / "sample.csv", [&](std::ostream& os) { write_sample_csv(os, sample); });
}

//! Runs `config` for `command` into `out` and writes the manifest. The
//! worker count only affects speed, so it is not part of the manifest.
void
run(const std::string& command, const json& config, const fs::path& out, unsigned workers)
{
  fs::create_directories(out);
  if (command == "estimate")
    run_estimate(config, out);
  else if (command == "calibrate")
    run_calibrate(config, out, workers);
  else if (command == "bench")
    run_bench(config, out, workers);
  else if (command == "sample")
    run_sample(config, out);
  else
    throw std::invalid_argument("manifest names unknown command '" + command + "'");
  const json manifest{ { "format", manifest_format },
                       { "version", manifest_version },
                       { "command", command },
                       { "config", config } };
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

fs::path
output_dir(const std::string& flag)
{
  if (!flag.empty())
    return flag;
  if (const char* env = std::getenv("WAVEDENS_OUT"); env && *env)
    return env;
  return "wavedens-out";
}

json
optional_json(const std::optional<double>& v)
{
  return v ? json(*v) : json();
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Wavelet thresholding density estimation on the real line" };
  app.require_subcommand(1);
  std::string out_flag;
  unsigned workers = 1;
  app.add_option("-o,--out", out_flag, "Output directory (default: $WAVEDENS_OUT or wavedens-out)");
  app.add_option("-w,--workers", workers, "Worker threads for sweeps; outputs do not depend on it")
    ->check(CLI::PositiveNumber);

  std::string command;
  json config;

  // estimate ----------------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "Estimate a density from a one-column CSV sample");
  std::string input, basis = "spline", mode = "practical", basis_cache;
  double gamma = 1.0, c = 1.0, c_prime = 0.0, grid_step = 1.0 / 1024.0;
  std::optional<double> rescale, grid_lo, grid_hi;
  std::optional<int> j0;
  est->add_option("-i,--input", input, "Sample CSV (one value per line, '#' comments)")->required();
  est->add_option("-b,--basis", basis, "haar or spline")->capture_default_str();
  est->add_option("-m,--mode", mode, "practical, practical-gamma or theoretical")
    ->capture_default_str();
  est->add_option("--gamma", gamma, "gamma for practical-gamma and theoretical modes")
    ->capture_default_str();
  est->add_option("--c", c, "theoretical mode: j0 = floor(log2(n^c (ln n)^c'))")
    ->capture_default_str();
  est->add_option("--c-prime", c_prime, "theoretical mode exponent of ln n")->capture_default_str();
  est->add_option("--j0", j0, "Override the finest level");
  est->add_option("--rescale", rescale, "Divide the data by this factor before estimating");
  est->add_option("--grid-step", grid_step, "Output grid step")->capture_default_str();
  est->add_option("--grid-lo", grid_lo, "Output grid start (default: estimate support)");
  est->add_option("--grid-hi", grid_hi, "Output grid end (default: estimate support)");
  est->add_option("--basis-cache", basis_cache,
                  "Spline reconstruction cache file; created when missing");
  est->callback([&] {
    json m{ { "name", mode } };
    if (mode == "practical-gamma")
      m["gamma"] = gamma;
    else if (mode == "theoretical")
      m.update({ { "gamma", gamma }, { "c", c }, { "c_prime", c_prime } });
    else if (mode != "practical")
      throw CLI::ValidationError("--mode", "unknown mode '" + mode + "'");
    validate(mode_from_json(m));
    if (rescale && !(*rescale > 0.0))
      throw CLI::ValidationError("--rescale", "must be positive");
    command = "estimate";
    config = { { "input", input },
               { "basis", basis },
               { "mode", m },
               { "j0", j0 ? json(*j0) : json() },
               { "rescale", optional_json(rescale) },
               { "grid_step", grid_step },
               { "grid_lo", optional_json(grid_lo) },
               { "grid_hi", optional_json(grid_hi) },
               { "basis_cache", basis_cache.empty() ? json() : json(basis_cache) } };
  });

  // calibrate ---------------------------------------------------------------
  auto* cal = app.add_subcommand("calibrate", "MISE x n as a function of gamma");
  std::string signal = "uniform", cal_basis = "haar", gammas = "0.25:2:0.25";
  std::size_t n = 1024, reps = 200;
  std::uint64_t seed = 1;
  cal->add_option("-s,--signal", signal, "uniform | gauss[:m,s] | bumps | gd:d | hk:k")
    ->capture_default_str();
  cal->add_option("-b,--basis", cal_basis, "haar or spline")->capture_default_str();
  cal->add_option("-n,--n", n, "Sample size")->capture_default_str();
  cal->add_option("-g,--gammas", gammas, "lo:hi:step or comma list")->capture_default_str();
  cal->add_option("-r,--reps", reps, "Replications")->capture_default_str();
  cal->add_option("--seed", seed, "Master seed")->capture_default_str();
  cal->callback([&] {
    command = "calibrate";
    config = { { "signal", signal }, { "basis", cal_basis },          { "n", n },
               { "gammas", parse_values(gammas) }, { "reps", reps }, { "seed", seed } };
  });

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "ISE boxplot data over d (support) or k (tail)");
  std::string sweep = "support", values = "10,30,50,70", methods = "S,H,S*,K";
  std::size_t bench_n = 1024, bench_reps = 50;
  std::uint64_t bench_seed = 1;
  bench->add_option("--sweep", sweep, "support or tail")->capture_default_str();
  bench->add_option("--values", values, "d or k values")->capture_default_str();
  bench->add_option("--methods", methods, "Comma list of S, H, S*, K")->capture_default_str();
  bench->add_option("-n,--n", bench_n, "Sample size")->capture_default_str();
  bench->add_option("-r,--reps", bench_reps, "Replications")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Master seed")->capture_default_str();
  bench->callback([&] {
    const auto codes = split(methods, ',');
    for (const auto& code : codes)
      method_from_code(code);
    command = "bench";
    config = { { "sweep", sweep },   { "values", parse_values(values) }, { "methods", codes },
               { "n", bench_n },     { "reps", bench_reps },             { "seed", bench_seed } };
  });

  // sample ------------------------------------------------------------------
  auto* smp = app.add_subcommand("sample", "Write a seeded sample of a test signal as CSV");
  std::string smp_signal = "gauss";
  std::size_t smp_n = 1024;
  std::uint64_t smp_seed = 1;
  smp->add_option("-s,--signal", smp_signal, "uniform | gauss[:m,s] | bumps | gd:d | hk:k")
    ->capture_default_str();
  smp->add_option("-n,--n", smp_n, "Sample size")->capture_default_str();
  smp->add_option("--seed", smp_seed, "Seed")->capture_default_str();
  smp->callback([&] {
    parse_signal(smp_signal);
    command = "sample";
    config = { { "signal", smp_signal }, { "n", smp_n }, { "seed", smp_seed } };
  });

  // replay ------------------------------------------------------------------
  auto* replay = app.add_subcommand("replay", "Re-run from a manifest.json");
  std::string manifest_path;
  replay->add_option("manifest", manifest_path, "Path to manifest.json")->required();
  replay->callback([&] {
    std::ifstream is(manifest_path);
    if (!is)
      throw CLI::ValidationError("manifest", "cannot open " + manifest_path);
    const json m = json::parse(is);
    if (m.at("format") != manifest_format || m.at("version") != manifest_version)
      throw CLI::ValidationError("manifest", "unsupported manifest format");
    command = m.at("command").get<std::string>();
    config = m.at("config");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const fs::path out = output_dir(out_flag);
    run(command, config, out, workers);
    std::cerr << command << ": wrote " << out.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
