#include "covsw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covsw/errors.hpp"

namespace covsw {

std::string_view to_string(Limiter l) {
  return l == Limiter::kNone ? "off" : "on";
}

Vec7 CellPolynomial::evaluate(Point x, double t) const {
  const Point r = x - center;
  return q0.q + grad.col(0) * r.x + grad.col(1) * r.y + dt * (t - t0);
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error("gauss_legendre: need at least one point");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double step = pn / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged root for the weight.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
    }
    // Map from [-1, 1] to [0, 1]; nodes ascend.
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

namespace detail {

void reflect_momentum(const Vec7& q, Point n, double& m1, double& m2) {
  const Metric2 inv = metric_inverse({q[kG11], q[kG12], q[kG22]});
  // Unit covector in the metric and its raised counterpart.
  const double nn = std::sqrt(inv.g11 * n.x * n.x + 2.0 * inv.g12 * n.x * n.y + inv.g22 * n.y * n.y);
  const double n1 = n.x / nn;
  const double n2 = n.y / nn;
  const double up1 = inv.g11 * n1 + inv.g12 * n2;
  const double up2 = inv.g12 * n1 + inv.g22 * n2;
  const double h = q[kH];
  const double u1 = q[kM1] / h;
  const double u2 = q[kM2] / h;
  const double un = u1 * n1 + u2 * n2;
  m1 = h * (u1 - 2.0 * un * up1);
  m2 = h * (u2 - 2.0 * un * up2);
}

}  // namespace detail

// ---------------------------------------------------------------------------

namespace {

struct CellWeights {
  std::vector<std::size_t> cells;
  std::vector<Point> w;
  bool deficient = false;
};

using detail::StencilPoint;

Point mirror(Point p, Point on_line, Point n) {
  const double d = dot(p - on_line, n);
  return p - 2.0 * d * n;
}

bool touches(const Mesh& mesh, std::size_t j, const Edge& e) {
  for (std::size_t v : mesh.cell_vertices(j)) {
    if (v == e.v0 || v == e.v1) return true;
  }
  return false;
}

// Plain stencil of k plus, for each wall edge of k, the images of the stencil cells
// touching that edge; a corner cell also gets its image across both walls.
std::vector<StencilPoint> mirrored_stencil(const Mesh& mesh, std::size_t k) {
  const Point xk = mesh.centroid(k);
  const auto stencil = mesh.stencil(k);
  std::vector<StencilPoint> out;
  for (std::size_t j : stencil.subspan(1)) out.push_back({j, mesh.centroid(j) - xk});
  std::vector<std::size_t> walls;
  for (std::size_t e : mesh.cell_edges(k)) {
    if (mesh.edges()[e].is_boundary()) walls.push_back(e);
  }
  for (std::size_t e : walls) {
    const Edge& edge = mesh.edges()[e];
    for (std::size_t j : stencil) {
      if (!touches(mesh, j, edge)) continue;
      const Point img = mirror(mesh.centroid(j), edge.midpoint, edge.normal);
      out.push_back({j, img - xk, 1, edge.normal, {}});
    }
  }
  for (std::size_t a = 0; a < walls.size(); ++a) {
    for (std::size_t b = a + 1; b < walls.size(); ++b) {
      const Edge& ea = mesh.edges()[walls[a]];
      const Edge& eb = mesh.edges()[walls[b]];
      if (std::abs(cross(ea.normal, eb.normal)) < 1e-9) continue;
      const Point img = mirror(mirror(xk, ea.midpoint, ea.normal), eb.midpoint, eb.normal);
      out.push_back({k, img - xk, 2, ea.normal, eb.normal});
    }
  }
  return out;
}

// Least-squares weights for the given offsets; empty when the geometry is degenerate.
bool solve_weights(std::span<const Point> offsets, std::vector<Point>& w) {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (Point d : offsets) {
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  const double det = sxx * syy - sxy * sxy;
  const double scale = (sxx + syy) * (sxx + syy);
  if (offsets.size() < 2 || !(det > 1e-12 * scale)) return false;
  w.clear();
  for (Point d : offsets) {
    w.push_back({(syy * d.x - sxy * d.y) / det, (sxx * d.y - sxy * d.x) / det});
  }
  return true;
}

CellWeights lsq_weights(const Mesh& mesh, std::size_t k) {
  CellWeights out;
  const Point xk = mesh.centroid(k);
  const auto stencil = mesh.stencil(k);
  std::vector<Point> offsets;
  for (std::size_t j : stencil.subspan(1)) offsets.push_back(mesh.centroid(j) - xk);
  if (stencil.size() < 3 || !solve_weights(offsets, out.w)) {
    out.deficient = true;
    out.w.clear();
    return out;
  }
  out.cells.assign(stencil.begin() + 1, stencil.end());
  return out;
}

// h, m1, m2 of a stencil point: momentum reflected once per wall crossing.
Vec3 physical_value(const StencilPoint& p, const std::vector<Vec7>& states) {
  const Vec7& q = states[p.cell];
  Vec3 v = q.head<kNumPhysical>();
  if (p.reflections >= 1) detail::reflect_momentum(q, p.n1, v[1], v[2]);
  if (p.reflections == 2) {
    Vec7 once = q;
    once[kM1] = v[1];
    once[kM2] = v[2];
    detail::reflect_momentum(once, p.n2, v[1], v[2]);
  }
  return v;
}

// Scales the slope of one component so that no vertex value leaves [lo, hi].
void limit_row(Grad7& grad, int row, double q0, double lo, double hi,
               std::span<const Point> vertex_offsets) {
  const double gx = grad(row, 0);
  const double gy = grad(row, 1);
  if (gx == 0.0 && gy == 0.0) return;
  double phi = 1.0;
  for (Point r : vertex_offsets) {
    const double delta = gx * r.x + gy * r.y;
    if (delta > 0.0) {
      phi = std::min(phi, (hi - q0) / delta);
    } else if (delta < 0.0) {
      phi = std::min(phi, (lo - q0) / delta);
    }
  }
  phi = std::max(phi, 0.0);
  grad(row, 0) = gx * phi;
  grad(row, 1) = gy * phi;
}

template <int First, int Last>
void barth_jespersen_rows(Grad7& grad, std::size_t k, const std::vector<Vec7>& states,
                          std::span<const std::size_t> stencil,
                          std::span<const Point> vertex_offsets) {
  constexpr int kRows = Last - First;
  const Vec7& qk = states[k];
  bool any = false;
  for (int c = First; c < Last; ++c) any = any || grad(c, 0) != 0.0 || grad(c, 1) != 0.0;
  if (!any) return;
  double lo[kRows];
  double hi[kRows];
  for (int c = 0; c < kRows; ++c) lo[c] = hi[c] = qk[First + c];
  for (std::size_t j : stencil) {
    const Vec7& qj = states[j];
    for (int c = 0; c < kRows; ++c) {
      lo[c] = std::min(lo[c], qj[First + c]);
      hi[c] = std::max(hi[c], qj[First + c]);
    }
  }
  for (int c = 0; c < kRows; ++c) limit_row(grad, First + c, qk[First + c], lo[c], hi[c], vertex_offsets);
}

// Evolving rows of a wall cell from its mirrored stencil.
template <class Points, class Weights>
void mirrored_physical_rows(std::size_t k, const std::vector<Vec7>& states, Limiter limiter,
                            const Points& points, const Weights& weights,
                            std::span<const Point> vertex_offsets, Grad7& grad) {
  const Vec3 qk = states[k].head<kNumPhysical>();
  Vec3 gx = Vec3::Zero();
  Vec3 gy = Vec3::Zero();
  Vec3 lo = qk;
  Vec3 hi = qk;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 v = physical_value(points[i], states);
    const Vec3 dq = v - qk;
    gx += weights[i].x * dq;
    gy += weights[i].y * dq;
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  grad.block<kNumPhysical, 1>(0, 0) = gx;
  grad.block<kNumPhysical, 1>(0, 1) = gy;
  if (limiter != Limiter::kBarthJespersen) return;
  for (int c = 0; c < kNumPhysical; ++c) limit_row(grad, c, qk[c], lo[c], hi[c], vertex_offsets);
}

}  // namespace

GradientReconstructor::GradientReconstructor(const Mesh& mesh) : mesh_(&mesh) {
  const std::size_t n = mesh.num_cells();
  weight_offsets_.reserve(n + 1);
  weight_offsets_.push_back(0);
  mirror_offsets_.reserve(n + 1);
  mirror_offsets_.push_back(0);
  vertex_offsets_.reserve(n + 1);
  vertex_offsets_.push_back(0);
  deficient_.resize(n, 0);
  std::vector<Point> offsets;
  std::vector<Point> w;
  for (std::size_t k = 0; k < n; ++k) {
    const CellWeights cw = lsq_weights(mesh, k);
    deficient_[k] = cw.deficient ? 1 : 0;
    for (std::size_t i = 0; i < cw.cells.size(); ++i) {
      weights_.push_back({cw.cells[i], cw.w[i].x, cw.w[i].y});
    }
    weight_offsets_.push_back(weights_.size());

    const std::vector<StencilPoint> points = mirrored_stencil(mesh, k);
    const bool walled = points.size() + 1 > mesh.stencil(k).size();
    offsets.clear();
    for (const StencilPoint& p : points) offsets.push_back(p.offset);
    if (walled && !cw.deficient && solve_weights(offsets, w)) {
      for (std::size_t i = 0; i < points.size(); ++i) {
        mirror_points_.push_back(points[i]);
        mirror_weights_.push_back(w[i]);
      }
    }
    mirror_offsets_.push_back(mirror_points_.size());

    for (std::size_t v : mesh.cell_vertices(k)) {
      vertex_offsets_xy_.push_back(mesh.vertices()[v] - mesh.centroid(k));
    }
    vertex_offsets_.push_back(vertex_offsets_xy_.size());
  }
}

GradientReconstructor::~GradientReconstructor() = default;
GradientReconstructor::GradientReconstructor(GradientReconstructor&&) noexcept = default;
GradientReconstructor& GradientReconstructor::operator=(GradientReconstructor&&) noexcept = default;

std::size_t GradientReconstructor::rank_deficient_count() const {
  return static_cast<std::size_t>(std::count(deficient_.begin(), deficient_.end(), 1));
}

Grad7 GradientReconstructor::unlimited(std::size_t k, const std::vector<Vec7>& states) const {
  Grad7 grad;
  rows<0, kNumVars>(k, states, Limiter::kNone, grad);
  return grad;
}

template <int First, int Last>
void GradientReconstructor::rows(std::size_t k, const std::vector<Vec7>& states, Limiter limiter,
                                 Grad7& grad) const {
  if constexpr (First == 0 && Last == kNumVars) {
    rows<0, kNumPhysical>(k, states, limiter, grad);
    rows<kNumPhysical, kNumVars>(k, states, limiter, grad);
  } else {
    const std::span<const Point> vertices{vertex_offsets_xy_.data() + vertex_offsets_[k],
                                          vertex_offsets_[k + 1] - vertex_offsets_[k]};
    if constexpr (First == 0) {
      const std::size_t m0 = mirror_offsets_[k];
      const std::size_t m1 = mirror_offsets_[k + 1];
      if (m1 > m0) {
        mirrored_physical_rows(k, states, limiter,
                               std::span<const StencilPoint>(mirror_points_.data() + m0, m1 - m0),
                               std::span<const Point>(mirror_weights_.data() + m0, m1 - m0),
                               vertices, grad);
        return;
      }
    }
    constexpr int kRows = Last - First;
    double gx[kRows] = {};
    double gy[kRows] = {};
    const Vec7& qk = states[k];
    for (std::size_t i = weight_offsets_[k]; i < weight_offsets_[k + 1]; ++i) {
      const Weight& w = weights_[i];
      const Vec7& qj = states[w.cell];
      for (int c = 0; c < kRows; ++c) {
        const double dq = qj[First + c] - qk[First + c];
        gx[c] += w.wx * dq;
        gy[c] += w.wy * dq;
      }
    }
    for (int c = 0; c < kRows; ++c) {
      grad(First + c, 0) = gx[c];
      grad(First + c, 1) = gy[c];
    }
    if (limiter == Limiter::kBarthJespersen) {
      barth_jespersen_rows<First, Last>(grad, k, states, mesh_->stencil(k), vertices);
    }
  }
}

void GradientReconstructor::compute_rows(std::size_t k, const std::vector<Vec7>& states,
                                        Limiter limiter, int first, int last, Grad7& grad) const {
  if (first == 0 && last == kNumPhysical) {
    rows<0, kNumPhysical>(k, states, limiter, grad);
  } else if (first == kNumPhysical && last == kNumVars) {
    rows<kNumPhysical, kNumVars>(k, states, limiter, grad);
  } else if (first == 0 && last == kNumVars) {
    rows<0, kNumVars>(k, states, limiter, grad);
  } else {
    throw Error("compute_rows: unsupported component range");
  }
}

Grad7 GradientReconstructor::compute(std::size_t k, const std::vector<Vec7>& states,
                                     Limiter limiter) const {
  Grad7 grad;
  rows<0, kNumVars>(k, states, limiter, grad);
  return grad;
}

Grad7 compute_gradient(std::size_t k, const FieldSnapshot& snapshot, const Mesh& mesh,
                       Limiter limiter) {
  const CellWeights cw = lsq_weights(mesh, k);
  Grad7 grad = Grad7::Zero();
  if (cw.deficient) return grad;
  const Vec7& qk = snapshot.states[k];
  for (std::size_t i = 0; i < cw.cells.size(); ++i) {
    const Vec7 dq = snapshot.states[cw.cells[i]] - qk;
    grad.col(0) += cw.w[i].x * dq;
    grad.col(1) += cw.w[i].y * dq;
  }
  std::vector<Point> vertices;
  for (std::size_t v : mesh.cell_vertices(k)) vertices.push_back(mesh.vertices()[v] - mesh.centroid(k));
  if (limiter == Limiter::kBarthJespersen) {
    barth_jespersen_rows<0, kNumVars>(grad, k, snapshot.states, mesh.stencil(k), vertices);
  }
  const std::vector<StencilPoint> points = mirrored_stencil(mesh, k);
  if (points.size() + 1 > mesh.stencil(k).size()) {
    std::vector<Point> offsets;
    for (const StencilPoint& p : points) offsets.push_back(p.offset);
    std::vector<Point> w;
    if (solve_weights(offsets, w)) {
      mirrored_physical_rows(k, snapshot.states, limiter, points, w, vertices, grad);
    }
  }
  return grad;
}

Vec7 compute_time_derivative(std::size_t k, const Grad7& grad, const FieldSnapshot& snapshot,
                             const Mesh& mesh, const Model& model, std::size_t* fallbacks) {
  const Vec7& qk = snapshot.states[k];
  const Point xk = mesh.centroid(k);
  Vec7 boundary_sum = Vec7::Zero();
  for (std::size_t e : mesh.cell_edges(k)) {
    const Edge& edge = mesh.edges()[e];
    const Point r = edge.midpoint - xk;
    Vec7 w = qk + grad.col(0) * r.x + grad.col(1) * r.y;
    if (!detail::admissible(w)) {
      w = qk;
      if (fallbacks) ++*fallbacks;
    }
    boundary_sum += edge.length * model.normal_flux(w, mesh.outward_normal(e, k));
  }
  Vec7 dt = -boundary_sum / mesh.area(k) - model.ncp_gradient_product(qk, grad);
  dt.tail<kNumVars - kNumPhysical>().setZero();
  return dt;
}

State half_time_edge_state(const CellPolynomial& poly, Point mid, double dt_step, bool* fallback) {
  const Point r = mid - poly.center;
  const Vec7 q = poly.q0.q + poly.grad.col(0) * r.x + poly.grad.col(1) * r.y + 0.5 * dt_step * poly.dt;
  const bool ok = detail::admissible(q);
  if (fallback) *fallback = !ok;
  return ok ? State(q) : poly.q0;
}

namespace detail {

Vec7 rusanov_flux_unchecked(const Vec7& qm, const Vec7& qp, Point n, const Model& model) {
  const double s = std::max(model.signal_speed(qm, n), model.signal_speed(qp, n));
  Vec7 f = 0.5 * (model.normal_flux(qm, n) + model.normal_flux(qp, n));
  f.head<kNumPhysical>() -= 0.5 * s * (qp.head<kNumPhysical>() - qm.head<kNumPhysical>());
  return f;
}

Vec7 path_integral_unchecked(const Vec7& qm, const Vec7& qp, Point n, const GaussRule& rule,
                             const Model& model) {
  const Vec7 jump = qp - qm;
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec7 q = qm + rule.nodes[i] * jump;
    acc += rule.weights[i] * model.ncp_dot(q, n.x, jump, n.y, jump);
  }
  Vec7 out = Vec7::Zero();
  out.head<kNumPhysical>() = acc;
  return out;
}

}  // namespace detail

Vec7 rusanov_flux(const State& qm, const State& qp, Point n, const Model& model) {
  require_admissible(qm);
  require_admissible(qp);
  return detail::rusanov_flux_unchecked(qm.q, qp.q, n, model);
}

Vec7 ncp_path_integral(const State& qm, const State& qp, Point n, const GaussRule& rule,
                       const Model& model) {
  require_admissible(qm);
  require_admissible(qp);
  return detail::path_integral_unchecked(qm.q, qp.q, n, rule, model);
}

Vec7 ncp_jump(const State& qm, const State& qp, Point n, int n_gauss, const Model& model) {
  return 0.5 * ncp_path_integral(qm, qp, n, gauss_legendre(n_gauss), model);
}

}  // namespace covsw
