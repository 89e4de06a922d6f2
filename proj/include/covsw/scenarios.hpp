#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covsw/geometry.hpp"
#include "covsw/mesh.hpp"
#include "covsw/model.hpp"
#include "covsw/snapshot.hpp"

namespace covsw {

enum class MetricMode {
  kAnalytic,   // closed-form metric supplied by the chart
  kFromChart,  // J^T J of the chart Jacobian
  kIdentity,
};

std::string_view to_string(MetricMode m);
MetricMode metric_mode_from_string(std::string_view name);

/// Scalar initial field over (Cartesian image, computational point).
using InitialField = std::function<double(Point cartesian, Point computational)>;
/// Contravariant velocity u^i in computational coordinates.
using InitialVelocity = std::function<std::array<double, 2>(Point cartesian, Point computational)>;

struct Scenario {
  std::string name;
  ChartKind chart = ChartKind::kIdentity;
  Rect domain;                          // computational rectangle covered by the base mesh
  std::optional<ChartKind> mesh_chart;  // base meshes are mapped through this chart first
  MetricMode metric_mode = MetricMode::kIdentity;
  InitialField h0;
  InitialVelocity velocity;
  InitialField bathymetry;
  double g = 9.81;
  double final_time = 0.2;
  Formulation formulation = Formulation::kCovariant;
  std::string boundary = "wall";
  double default_mesh_size = 1.61e-2;
  std::optional<std::pair<std::size_t, std::size_t>> default_counts;

  std::shared_ptr<const Chart> make_chart() const;
};

/// Throws ConfigError: classical formulation needs the identity metric, analytic
/// metric needs a chart that supplies one.
void validate(const Scenario& s);

/// Riemann problem on the S-shaped channel in covariant coordinates.
Scenario s_shape_riemann();
/// Classical Cartesian twin on the mapped mesh.
Scenario s_shape_cartesian_reference();
/// Base mesh mapped through the S-shape chart, together with the twin scenario.
std::pair<Scenario, Mesh> s_shape_cartesian_reference(const Mesh& base);

/// The same Riemann data on an arbitrary chart over [0, 2pi] x [0, 0.8].
Scenario riemann_on_chart(ChartKind chart);
Scenario cartesian_reference_on_chart(ChartKind chart);

/// h = 2 | 1 at x = 0.5 on [0, 1] x [0, 0.1], identity metric, T = 0.05.
Scenario identity_dam_break(Formulation f = Formulation::kCovariant);
/// h = 2, u = 0, b = 0 on the chart's metric.
Scenario lake_at_rest(ChartKind chart);
/// h = 2 + 0.1 exp(-20 |x - (0.5, 0.05)|^2) on [0, 1] x [0, 0.1], T = 0.01.
Scenario smooth_bump();

std::vector<std::string> scenario_names();
/// Throws ConfigError listing the available names.
Scenario scenario_by_name(std::string_view name);

/// Applies the scenario's mesh chart (if any) to a mesh over its domain.
Mesh scenario_mesh(const Scenario& s, const Mesh& base);

/// Centroid point values of every field on a mesh produced by scenario_mesh.
FieldSnapshot initial_snapshot(const Scenario& s, const Mesh& mesh);

/// Riemann indicator h0 = 2 where y >= x - pi, 3 elsewhere.
double riemann_depth(Point cartesian);

}  // namespace covsw
