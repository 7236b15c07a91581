#pragma once

#include "estimator.hpp"
#include "risk.hpp"
#include "spline_basis.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

namespace wavedens {

inline constexpr std::string_view estimate_format = "wavedens.estimate";
inline constexpr int estimate_format_version = 1;

//! Shortest round-trip decimal form.
inline std::string
format_double(double v)
{
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline nlohmann::json
mode_to_json(const ThresholdMode& mode)
{
  nlohmann::json j{ { "name", mode_name(mode) } };
  if (const auto* t = std::get_if<TheoreticalGamma>(&mode)) {
    j["gamma"] = t->gamma;
    j["c"] = t->c;
    j["c_prime"] = t->c_prime;
  } else if (const auto* p = std::get_if<PracticalGamma>(&mode)) {
    j["gamma"] = p->gamma;
  }
  return j;
}

inline ThresholdMode
mode_from_json(const nlohmann::json& j)
{
  const auto name = j.at("name").get<std::string>();
  if (name == "practical")
    return Practical{};
  if (name == "practical-gamma")
    return PracticalGamma{ j.at("gamma").get<double>() };
  if (name == "theoretical")
    return TheoreticalGamma{ j.at("gamma").get<double>(), j.value("c", 1.0),
                             j.value("c_prime", 0.0) };
  throw std::invalid_argument("unknown threshold mode '" + name + "'");
}

//! {format, version, n, basis, mode, j0, positive_part,
//!  kept: [[j, k, value, threshold], ...]}
inline nlohmann::json
to_json(const DensityEstimate& e)
{
  nlohmann::json kept = nlohmann::json::array();
  for (const auto& c : e.kept())
    kept.push_back({ c.idx.j, c.idx.k, c.value, c.threshold });
  return { { "format", estimate_format },
           { "version", estimate_format_version },
           { "n", e.n() },
           { "basis", std::string(e.basis().name()) },
           { "mode", mode_to_json(e.mode()) },
           { "j0", e.j0() },
           { "positive_part", e.positive_part() },
           { "kept", std::move(kept) } };
}

//! Inverse of to_json. `basis` must match the document's basis name.
inline DensityEstimate
estimate_from_json(const nlohmann::json& j, BasisPtr basis)
{
  if (j.at("format").get<std::string>() != estimate_format ||
      j.at("version").get<int>() != estimate_format_version)
    throw std::invalid_argument("estimate JSON: unsupported format or version");
  if (!basis || j.at("basis").get<std::string>() != basis->name())
    throw std::invalid_argument("estimate JSON: basis mismatch");
  std::vector<KeptCoefficient> kept;
  for (const auto& row : j.at("kept")) {
    kept.push_back({ { row.at(0).get<int>(), row.at(1).get<std::int64_t>() },
                     row.at(2).get<double>(),
                     row.at(3).get<double>() });
  }
  return DensityEstimate(std::move(basis), std::move(kept), j.at("positive_part").get<bool>(),
                         j.at("n").get<std::size_t>(), mode_from_json(j.at("mode")),
                         j.at("j0").get<int>());
}

//! x,density rows.
inline void
write_grid_csv(std::ostream& os, std::span<const double> x, std::span<const double> y)
{
  os << "x,density\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
}

//! One-column sample CSV.
inline void
write_sample_csv(std::ostream& os, const Sample& sample)
{
  for (double x : sample.values())
    os << format_double(x) << '\n';
}

//! Reads one numeric value per line. Blank lines and lines starting with
//! '#' are skipped. Throws with the offending line number.
inline Sample
read_sample_csv(std::istream& is)
{
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    const auto last = line.find_last_not_of(" \t\r,");
    const std::string token = line.substr(first, last - first + 1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v))
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected one number, got '" +
                               line + "'");
    values.push_back(v);
  }
  if (values.size() < 2)
    throw std::runtime_error("sample file needs at least 2 values, found " +
                             std::to_string(values.size()));
  return Sample(std::move(values));
}

inline std::string
format_parameter(double p)
{
  return std::isnan(p) ? "" : format_double(p);
}

//! signal,method,parameter,n,replication,ise,kept
inline void
write_replications_csv(std::ostream& os, std::span<const RiskReport> reports)
{
  os << "signal,method,parameter,n,replication,ise,kept\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.ise_values.size(); ++i)
      os << r.signal_id << ',' << r.method_id << ',' << format_parameter(r.parameter) << ','
         << r.n << ',' << i << ',' << format_double(r.ise_values[i]) << ','
         << r.kept_counts[i] << '\n';
}

//! parameter,method,mean,median,q25,q75,n_mise
inline void
write_plot_csv(std::ostream& os, std::span<const RiskReport> reports)
{
  os << "parameter,method,mean,median,q25,q75,n_mise\n";
  for (const auto& r : reports)
    os << format_parameter(r.parameter) << ',' << r.method_id << ',' << format_double(r.mean)
       << ',' << format_double(r.median) << ',' << format_double(r.q25) << ','
       << format_double(r.q75) << ',' << format_double(r.mean * static_cast<double>(r.n))
       << '\n';
}

inline nlohmann::json
summary_json(std::span<const RiskReport> reports)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j{ { "signal", r.signal_id },
                      { "method", r.method_id },
                      { "n", r.n },
                      { "replications", r.replications },
                      { "master_seed", r.master_seed },
                      { "mean", r.mean },
                      { "median", r.median },
                      { "q25", r.q25 },
                      { "q75", r.q75 },
                      { "n_mise", r.mean * static_cast<double>(r.n) } };
    j["parameter"] = std::isnan(r.parameter) ? nlohmann::json() : nlohmann::json(r.parameter);
    out.push_back(std::move(j));
  }
  return out;
}

} // namespace wavedens
