#include "covsw/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <numbers>

#include "covsw/errors.hpp"

namespace covsw {

double metric_det(const Metric2& m) { return m.g11 * m.g22 - m.g12 * m.g12; }

Metric2 metric_inverse(const Metric2& m) {
  const double inv_det = 1.0 / metric_det(m);
  return {m.g22 * inv_det, -m.g12 * inv_det, m.g11 * inv_det};
}

bool is_spd(const Metric2& m) {
  return std::isfinite(m.g11) && std::isfinite(m.g12) && std::isfinite(m.g22) && m.g11 > 0.0 &&
         m.g22 > 0.0 && metric_det(m) > 0.0;
}

Metric2 metric_from_jacobian(const Jacobian2& j) {
  return {j.a11 * j.a11 + j.a21 * j.a21, j.a11 * j.a12 + j.a21 * j.a22,
          j.a12 * j.a12 + j.a22 * j.a22};
}

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::kIdentity:
      return "identity";
    case ChartKind::kSShape:
      return "s_shape";
    case ChartKind::kPolar:
      return "polar";
  }
  return "unknown";
}

ChartKind chart_kind_from_string(std::string_view name) {
  if (name == "identity") return ChartKind::kIdentity;
  if (name == "s_shape") return ChartKind::kSShape;
  if (name == "polar") return ChartKind::kPolar;
  throw GeometryError("unknown chart '" + std::string(name) + "'");
}

Jacobian2 Chart::jacobian(Point p) const {
  if (auto j = analytic_jacobian(p)) return *j;
  return fd_jacobian(p);
}

Jacobian2 Chart::fd_jacobian(Point p) const {
  const double hx = 1e-6 * std::max(1.0, std::abs(p.x));
  const double hy = 1e-6 * std::max(1.0, std::abs(p.y));
  const Point dx = (1.0 / (2.0 * hx)) * (map({p.x + hx, p.y}) - map({p.x - hx, p.y}));
  const Point dy = (1.0 / (2.0 * hy)) * (map({p.x, p.y + hy}) - map({p.x, p.y - hy}));
  return {dx.x, dy.x, dx.y, dy.y};
}

// ---------------------------------------------------------------------------
// S-shape. With c = cos x1, s = sin x1, D = 1 + c^2:
//   x = x1 - x2 c / sqrt(D),  y = s + x2 / sqrt(D)
//   gamma_11 = (D^{3/2} + x2 s)^2 / D^2,  gamma_12 = 0,  gamma_22 = 1

SShapeChart::SShapeChart() {
#ifndef NDEBUG
  assert(analytic_metric_discrepancy(*this, 20) < 1e-6);
#endif
}

Rect SShapeChart::default_domain() { return {0.0, 2.0 * std::numbers::pi, 0.0, 0.8}; }

Point SShapeChart::map(Point p) const {
  const double c = std::cos(p.x);
  const double root = std::sqrt(1.0 + c * c);
  return {p.x - p.y * c / root, std::sin(p.x) + p.y / root};
}

std::optional<Jacobian2> SShapeChart::analytic_jacobian(Point p) const {
  const double c = std::cos(p.x);
  const double s = std::sin(p.x);
  const double d = 1.0 + c * c;
  const double root = std::sqrt(d);
  const double d32 = d * root;
  const double stretch = 1.0 + p.y * s / d32;
  return Jacobian2{stretch, -c / root, c * stretch, 1.0 / root};
}

std::optional<Metric2> SShapeChart::analytic_metric(Point p) const {
  const double c = std::cos(p.x);
  const double s = std::sin(p.x);
  const double d = 1.0 + c * c;
  const double a = d * std::sqrt(d) + p.y * s;
  return Metric2{a * a / (d * d), 0.0, 1.0};
}

std::optional<MetricGradient> SShapeChart::analytic_metric_gradient(Point p) const {
  const double c = std::cos(p.x);
  const double s = std::sin(p.x);
  const double d = 1.0 + c * c;
  const double root = std::sqrt(d);
  const double a = d * root + p.y * s;
  const double da_dx1 = -3.0 * c * s * root + p.y * c;
  // dD/dx1 = -2 c s
  const double dg11_dx1 = 2.0 * a * da_dx1 / (d * d) + 4.0 * a * a * c * s / (d * d * d);
  const double dg11_dx2 = 2.0 * a * s / (d * d);
  MetricGradient g;
  g.d[0] = {dg11_dx1, 0.0, 0.0};
  g.d[1] = {dg11_dx2, 0.0, 0.0};
  return g;
}

// ---------------------------------------------------------------------------

PolarChart::PolarChart(Rect domain) : domain_(domain) {
  if (domain.x0 <= 0.0) throw GeometryError("polar chart requires r > 0");
}

Rect PolarChart::default_domain() { return {1.0, 2.0, 0.0, 0.5 * std::numbers::pi}; }

Point PolarChart::map(Point p) const { return {p.x * std::cos(p.y), p.x * std::sin(p.y)}; }

std::optional<Jacobian2> PolarChart::analytic_jacobian(Point p) const {
  const double c = std::cos(p.y);
  const double s = std::sin(p.y);
  return Jacobian2{c, -p.x * s, s, p.x * c};
}

std::optional<Metric2> PolarChart::analytic_metric(Point p) const {
  return Metric2{1.0, 0.0, p.x * p.x};
}

std::optional<MetricGradient> PolarChart::analytic_metric_gradient(Point p) const {
  MetricGradient g;
  g.d[0] = {0.0, 0.0, 2.0 * p.x};
  return g;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Chart> make_chart(ChartKind kind) {
  switch (kind) {
    case ChartKind::kIdentity:
      return std::make_shared<IdentityChart>(Rect{});
    case ChartKind::kSShape:
      return std::make_shared<SShapeChart>();
    case ChartKind::kPolar:
      return std::make_shared<PolarChart>();
  }
  throw GeometryError("unknown chart kind");
}

std::shared_ptr<const Chart> make_chart(ChartKind kind, Rect domain) {
  switch (kind) {
    case ChartKind::kIdentity:
      return std::make_shared<IdentityChart>(domain);
    case ChartKind::kSShape:
      return std::make_shared<SShapeChart>();
    case ChartKind::kPolar:
      return std::make_shared<PolarChart>(domain);
  }
  throw GeometryError("unknown chart kind");
}

Metric2 first_fundamental_form(const Chart& chart, Point p) {
  if (!chart.domain().contains(p, 1e-9)) {
    throw GeometryError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") outside chart domain");
  }
  const Jacobian2 j = chart.jacobian(p);
  if (!(std::abs(j.det()) > 1e-14)) {
    throw GeometryError("chart degeneracy: singular Jacobian at (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ")");
  }
  return metric_from_jacobian(j);
}

Metric2 chart_metric(const Chart& chart, Point p) {
  if (auto m = chart.analytic_metric(p)) return *m;
  return first_fundamental_form(chart, p);
}

MetricGradient metric_gradient(const Chart& chart, Point p, double h_fd) {
  if (auto g = chart.analytic_metric_gradient(p)) return *g;
  MetricGradient g;
  const Point steps[2] = {{h_fd, 0.0}, {0.0, h_fd}};
  for (int k = 0; k < 2; ++k) {
    const Metric2 plus = chart_metric(chart, p + steps[k]);
    const Metric2 minus = chart_metric(chart, p - steps[k]);
    const double inv = 1.0 / (2.0 * h_fd);
    g.d[k] = {(plus.g11 - minus.g11) * inv, (plus.g12 - minus.g12) * inv,
              (plus.g22 - minus.g22) * inv};
  }
  return g;
}

namespace {

double component(const Metric2& m, int i, int j) {
  if (i == 0 && j == 0) return m.g11;
  if (i == 1 && j == 1) return m.g22;
  return m.g12;
}

}  // namespace

Christoffel christoffel_from(const Metric2& m, const MetricGradient& dm) {
  if (!is_spd(m)) throw GeometryError("christoffel: singular or indefinite metric");
  const Metric2 inv = metric_inverse(m);
  Christoffel out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = j; k < 2; ++k) {
        double sum = 0.0;
        for (int l = 0; l < 2; ++l) {
          sum += component(inv, i, l) *
                 (component(dm.d[j], k, l) + component(dm.d[k], j, l) - component(dm.d[l], j, k));
        }
        out.value[i][j][k] = 0.5 * sum;
        out.value[i][k][j] = out.value[i][j][k];
      }
    }
  }
  return out;
}

Christoffel christoffel(const Chart& chart, Point p, double h_fd) {
  return christoffel_from(chart_metric(chart, p), metric_gradient(chart, p, h_fd));
}

double analytic_metric_discrepancy(const Chart& chart, int n) {
  const Rect d = chart.domain();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point p{d.x0 + (i + 0.5) * d.width() / n, d.y0 + (j + 0.5) * d.height() / n};
      const auto analytic = chart.analytic_metric(p);
      if (!analytic) return 0.0;
      const Metric2 fd = metric_from_jacobian(chart.fd_jacobian(p));
      worst = std::max({worst, std::abs(analytic->g11 - fd.g11), std::abs(analytic->g12 - fd.g12),
                        std::abs(analytic->g22 - fd.g22)});
    }
  }
  return worst;
}

}  // namespace covsw
