#include "covsw/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "covsw/errors.hpp"

namespace covsw {

std::string_view to_string(MetricMode m) {
  switch (m) {
    case MetricMode::kAnalytic:
      return "analytic";
    case MetricMode::kFromChart:
      return "from-chart";
    case MetricMode::kIdentity:
      return "identity";
  }
  return "unknown";
}

MetricMode metric_mode_from_string(std::string_view name) {
  if (name == "analytic") return MetricMode::kAnalytic;
  if (name == "from-chart") return MetricMode::kFromChart;
  if (name == "identity") return MetricMode::kIdentity;
  throw ConfigError("unknown metric mode '" + std::string(name) + "'");
}

std::shared_ptr<const Chart> Scenario::make_chart() const { return covsw::make_chart(chart, domain); }

void validate(const Scenario& s) {
  if (s.formulation == Formulation::kClassical && s.metric_mode != MetricMode::kIdentity) {
    throw ConfigError("scenario '" + s.name + "': classical formulation requires the identity metric");
  }
  if (s.metric_mode == MetricMode::kAnalytic && !s.make_chart()->analytic_metric(
                                                     {0.5 * (s.domain.x0 + s.domain.x1),
                                                      0.5 * (s.domain.y0 + s.domain.y1)})) {
    throw ConfigError("scenario '" + s.name + "': chart has no analytic metric");
  }
  if (!(s.final_time > 0.0)) throw ConfigError("final time must be positive");
  if (!(s.g > 0.0)) throw ConfigError("g must be positive");
  if (!s.h0) throw ConfigError("scenario '" + s.name + "' has no initial depth");
}

double riemann_depth(Point c) { return c.y >= c.x - std::numbers::pi ? 2.0 : 3.0; }

namespace {

InitialVelocity at_rest() {
  return [](Point, Point) { return std::array<double, 2>{0.0, 0.0}; };
}

InitialField flat() {
  return [](Point, Point) { return 0.0; };
}

Rect channel() { return SShapeChart::default_domain(); }

}  // namespace

Scenario riemann_on_chart(ChartKind chart) {
  Scenario s;
  s.name = chart == ChartKind::kSShape ? "s_shape_riemann" : std::string(to_string(chart)) + "_riemann";
  s.chart = chart;
  s.domain = channel();
  s.metric_mode = chart == ChartKind::kIdentity ? MetricMode::kIdentity : MetricMode::kAnalytic;
  s.h0 = [](Point cart, Point) { return riemann_depth(cart); };
  s.velocity = at_rest();
  s.bathymetry = flat();
  s.g = 9.81;
  s.final_time = 0.2;
  s.default_mesh_size = 1.61e-2;
  return s;
}

Scenario cartesian_reference_on_chart(ChartKind chart) {
  Scenario s = riemann_on_chart(chart);
  s.name = chart == ChartKind::kSShape ? "s_shape_cartesian_reference"
                                       : std::string(to_string(chart)) + "_cartesian_reference";
  s.mesh_chart = chart;
  s.chart = ChartKind::kIdentity;
  s.metric_mode = MetricMode::kIdentity;
  s.formulation = Formulation::kClassical;
  return s;
}

Scenario s_shape_riemann() { return riemann_on_chart(ChartKind::kSShape); }

Scenario s_shape_cartesian_reference() { return cartesian_reference_on_chart(ChartKind::kSShape); }

std::pair<Scenario, Mesh> s_shape_cartesian_reference(const Mesh& base) {
  Scenario s = s_shape_cartesian_reference();
  return {s, scenario_mesh(s, base)};
}

Scenario identity_dam_break(Formulation f) {
  Scenario s;
  s.name = "identity_dam_break";
  s.chart = ChartKind::kIdentity;
  s.domain = {0.0, 1.0, 0.0, 0.1};
  s.metric_mode = MetricMode::kIdentity;
  s.h0 = [](Point, Point x) { return x.x < 0.5 ? 2.0 : 1.0; };
  s.velocity = at_rest();
  s.bathymetry = flat();
  s.final_time = 0.05;
  s.formulation = f;
  s.default_counts = std::pair<std::size_t, std::size_t>{400, 4};
  return s;
}

Scenario lake_at_rest(ChartKind chart) {
  Scenario s;
  s.name = "lake_at_rest_" + std::string(to_string(chart));
  s.chart = chart;
  switch (chart) {
    case ChartKind::kIdentity:
      s.domain = {0.0, 1.0, 0.0, 1.0};
      s.metric_mode = MetricMode::kIdentity;
      s.default_mesh_size = 0.05;
      break;
    case ChartKind::kSShape:
      s.domain = channel();
      s.metric_mode = MetricMode::kAnalytic;
      s.default_mesh_size = 1.61e-2;
      break;
    case ChartKind::kPolar:
      s.domain = PolarChart::default_domain();
      s.metric_mode = MetricMode::kAnalytic;
      s.default_mesh_size = 0.05;
      break;
  }
  s.h0 = [](Point, Point) { return 2.0; };
  s.velocity = at_rest();
  s.bathymetry = flat();
  s.final_time = 0.2;
  return s;
}

Scenario smooth_bump() {
  Scenario s;
  s.name = "smooth_bump";
  s.chart = ChartKind::kIdentity;
  s.domain = {0.0, 1.0, 0.0, 0.1};
  s.metric_mode = MetricMode::kIdentity;
  s.h0 = [](Point, Point x) {
    const double dx = x.x - 0.5;
    const double dy = x.y - 0.05;
    return 2.0 + 0.1 * std::exp(-20.0 * (dx * dx + dy * dy));
  };
  s.velocity = at_rest();
  s.bathymetry = flat();
  s.final_time = 0.01;
  s.default_counts = std::pair<std::size_t, std::size_t>{100, 10};
  return s;
}

std::vector<std::string> scenario_names() {
  return {"s_shape_riemann",       "s_shape_cartesian_reference", "identity_dam_break",
          "lake_at_rest_identity", "lake_at_rest_s_shape",        "lake_at_rest_polar",
          "smooth_bump"};
}

Scenario scenario_by_name(std::string_view name) {
  if (name == "s_shape_riemann") return s_shape_riemann();
  if (name == "s_shape_cartesian_reference") return s_shape_cartesian_reference();
  if (name == "identity_dam_break") return identity_dam_break();
  if (name == "lake_at_rest_identity") return lake_at_rest(ChartKind::kIdentity);
  if (name == "lake_at_rest_s_shape") return lake_at_rest(ChartKind::kSShape);
  if (name == "lake_at_rest_polar") return lake_at_rest(ChartKind::kPolar);
  if (name == "smooth_bump") return smooth_bump();
  std::string msg = "unknown scenario '" + std::string(name) + "'; available:";
  for (const auto& n : scenario_names()) msg += " " + n;
  throw ConfigError(msg);
}

Mesh scenario_mesh(const Scenario& s, const Mesh& base) {
  if (!s.mesh_chart) return base;
  return map_mesh(base, *make_chart(*s.mesh_chart, s.domain));
}

FieldSnapshot initial_snapshot(const Scenario& s, const Mesh& mesh) {
  validate(s);
  const auto chart = s.make_chart();
  FieldSnapshot snap;
  snap.time = 0.0;
  snap.states.resize(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Point x = mesh.centroid(k);
    const Point cart = chart->map(x);
    Metric2 metric;
    switch (s.metric_mode) {
      case MetricMode::kAnalytic:
        metric = *chart->analytic_metric(x);
        break;
      case MetricMode::kFromChart:
        metric = first_fundamental_form(*chart, x);
        break;
      case MetricMode::kIdentity:
        metric = Metric2{};
        break;
    }
    const double h = s.h0(cart, x);
    const auto u = s.velocity ? s.velocity(cart, x) : std::array<double, 2>{0.0, 0.0};
    const double b = s.bathymetry ? s.bathymetry(cart, x) : 0.0;
    const State q(h, h * u[0], h * u[1], b, metric);
    if (!is_admissible(q)) {
      throw ConfigError("scenario '" + s.name + "' produces an inadmissible initial state in cell " +
                        std::to_string(k));
    }
    snap.states[k] = q.q;
  }
  return snap;
}

}  // namespace covsw
