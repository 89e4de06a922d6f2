#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace covsw {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1] in computational coordinates.
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Point p, double tol = 1e-12) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
};

/// Covariant metric components of a symmetric 2x2 tensor.
struct Metric2 {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 1.0;
};

double metric_det(const Metric2& m);
/// Contravariant components, i.e. the matrix inverse.
Metric2 metric_inverse(const Metric2& m);
bool is_spd(const Metric2& m);

/// Partials of the Cartesian image: a[i][j] = d x^i / d xi^j, with x^1 = x, x^2 = y.
struct Jacobian2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a21; }
};

/// First fundamental form J^T J.
Metric2 metric_from_jacobian(const Jacobian2& j);

/// d[k] holds the partial derivative of every metric component along x^(k+1).
struct MetricGradient {
  std::array<Metric2, 2> d{Metric2{0, 0, 0}, Metric2{0, 0, 0}};
};

/// Gamma^i_jk, zero-based: value[i][j][k].
struct Christoffel {
  double value[2][2][2] = {};

  double operator()(int i, int j, int k) const { return value[i][j][k]; }
};

enum class ChartKind { kIdentity, kSShape, kPolar };

std::string_view to_string(ChartKind kind);
ChartKind chart_kind_from_string(std::string_view name);

/// Analytic map from a computational rectangle to Cartesian (x, y).
class Chart {
 public:
  virtual ~Chart() = default;

  virtual ChartKind kind() const = 0;
  virtual Rect domain() const = 0;
  virtual Point map(Point p) const = 0;

  virtual std::optional<Jacobian2> analytic_jacobian(Point) const { return std::nullopt; }
  virtual std::optional<Metric2> analytic_metric(Point) const { return std::nullopt; }
  virtual std::optional<MetricGradient> analytic_metric_gradient(Point) const {
    return std::nullopt;
  }

  /// Analytic Jacobian when supplied, central differences otherwise.
  Jacobian2 jacobian(Point p) const;
  /// Central differences with step 1e-6 scaled by coordinate magnitude.
  Jacobian2 fd_jacobian(Point p) const;
};

class IdentityChart final : public Chart {
 public:
  explicit IdentityChart(Rect domain) : domain_(domain) {}

  ChartKind kind() const override { return ChartKind::kIdentity; }
  Rect domain() const override { return domain_; }
  Point map(Point p) const override { return p; }
  std::optional<Jacobian2> analytic_jacobian(Point) const override { return Jacobian2{}; }
  std::optional<Metric2> analytic_metric(Point) const override { return Metric2{}; }
  std::optional<MetricGradient> analytic_metric_gradient(Point) const override {
    return MetricGradient{};
  }

 private:
  Rect domain_;
};

/// The S-shaped channel: a strip of width 0.8 laid along y = sin x and
/// parametrized on [0, 2pi] x [0, 0.8].
class SShapeChart final : public Chart {
 public:
  SShapeChart();

  static Rect default_domain();

  ChartKind kind() const override { return ChartKind::kSShape; }
  Rect domain() const override { return default_domain(); }
  Point map(Point p) const override;
  std::optional<Jacobian2> analytic_jacobian(Point p) const override;
  std::optional<Metric2> analytic_metric(Point p) const override;
  std::optional<MetricGradient> analytic_metric_gradient(Point p) const override;
};

/// (r, theta) -> (r cos theta, r sin theta); metric diag(1, r^2).
class PolarChart final : public Chart {
 public:
  explicit PolarChart(Rect domain = default_domain());

  static Rect default_domain();

  ChartKind kind() const override { return ChartKind::kPolar; }
  Rect domain() const override { return domain_; }
  Point map(Point p) const override;
  std::optional<Jacobian2> analytic_jacobian(Point p) const override;
  std::optional<Metric2> analytic_metric(Point p) const override;
  std::optional<MetricGradient> analytic_metric_gradient(Point p) const override;

 private:
  Rect domain_;
};

std::shared_ptr<const Chart> make_chart(ChartKind kind);
std::shared_ptr<const Chart> make_chart(ChartKind kind, Rect domain);

/// J^T J at p. Throws GeometryError outside the domain or for a singular Jacobian.
Metric2 first_fundamental_form(const Chart& chart, Point p);

/// Analytic metric when the chart supplies one, J^T J otherwise.
Metric2 chart_metric(const Chart& chart, Point p);

/// Metric derivatives: analytic when supplied, central differences with step h_fd otherwise.
MetricGradient metric_gradient(const Chart& chart, Point p, double h_fd);

/// Gamma^i_jk = 1/2 gamma^im (d_j gamma_km + d_k gamma_jm - d_m gamma_jk).
Christoffel christoffel(const Chart& chart, Point p, double h_fd = 1e-6);

/// Christoffel symbols from a metric value and its gradient.
Christoffel christoffel_from(const Metric2& m, const MetricGradient& dm);

/// Max over an n x n grid of |analytic metric - J^T J| with J taken by finite
/// differences. Returns 0 for charts without an analytic metric.
double analytic_metric_discrepancy(const Chart& chart, int n = 50);

}  // namespace covsw
