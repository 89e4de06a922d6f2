#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "covsw/geometry.hpp"
#include "covsw/model.hpp"
#include "covsw/numerics.hpp"
#include "covsw/scenarios.hpp"
#include "covsw/solver.hpp"

namespace covsw {

enum class MeshKind { kRect, kVoronoi };

std::string_view to_string(MeshKind k);

/// Everything needed to reproduce a run. Optional fields fall back to the
/// scenario's defaults.
struct RunConfig {
  std::string scenario = "s_shape_riemann";
  MeshKind mesh = MeshKind::kRect;
  std::optional<double> mesh_size;
  std::optional<std::size_t> nx;
  std::optional<std::size_t> ny;
  std::size_t lloyd_iters = 5;
  std::uint64_t seed = 1;
  double cfl = 0.45;
  Limiter limiter = Limiter::kBarthJespersen;
  bool first_order = false;
  int gauss = 3;
  double output_interval = 0.0;
  std::string out = "output";
  std::optional<double> h_min;
  int threads = 1;

  // Scenario overrides.
  std::optional<ChartKind> chart;
  std::optional<MetricMode> metric_mode;
  std::optional<double> g;
  std::optional<double> final_time;
  std::optional<Formulation> formulation;
};

/// Throws ConfigError on an out-of-range value.
void validate(const RunConfig& c);

/// Applies one `key = value` setting. Throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& c, std::string_view key, std::string_view value);

/// Flat key = value lines; `#` starts a comment. Only keys before the first
/// `[section]` header (or inside `[run]`) are read; other sections are informational.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Canonical text form; doubles use the shortest round-trip representation.
std::string to_ini(const RunConfig& c);

/// The scenario with every override applied.
Scenario resolve_scenario(const RunConfig& c);
/// Overrides set to the resolved scenario values, so the echo is self-contained.
RunConfig resolved(const RunConfig& c);

SolverConfig solver_config(const RunConfig& c, const Scenario& s);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace covsw
