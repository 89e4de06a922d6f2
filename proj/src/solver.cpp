#include "covsw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "covsw/errors.hpp"
#include "covsw/parallel.hpp"

namespace covsw {

double covariant_mass(const FieldSnapshot& snapshot, const Mesh& mesh) {
  double sum = 0.0;
  for (std::size_t k = 0; k < snapshot.size(); ++k) {
    const Vec7& q = snapshot.states[k];
    const double det = q[kG11] * q[kG22] - q[kG12] * q[kG12];
    sum += q[kH] * std::sqrt(det) * mesh.area(k);
  }
  return sum;
}

double compute_dt(const FieldSnapshot& snapshot, const Mesh& mesh, const Model& model, double cfl) {
  if (!(cfl > 0.0 && cfl < 1.0)) throw Error("cfl must lie in (0, 1)");
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    double speed = 0.0;
    for (std::size_t e : mesh.cell_edges(k)) {
      speed = std::max(speed, model.signal_speed(snapshot.states[k], mesh.outward_normal(e, k)));
    }
    if (!std::isfinite(speed)) {
      std::ostringstream os;
      os << "non-finite signal speed in cell " << k;
      throw Error(os.str());
    }
    if (speed > 0.0) dt = std::min(dt, mesh.area(k) / mesh.perimeter(k) / speed);
  }
  if (!std::isfinite(dt)) throw Error("compute_dt: no finite signal speed");
  return cfl * dt;
}

State wall_ghost(const State& interior, Point n) {
  State ghost = interior;
  detail::reflect_momentum(interior.q, n, ghost.q[kM1], ghost.q[kM2]);
  return ghost;
}

// ---------------------------------------------------------------------------

namespace {

using Geo = Eigen::Matrix<double, kNumVars - kNumPhysical, 1>;
constexpr int kCellNcp = 14;
constexpr int kNodeNcp = 12;

// Same arithmetic as Model::signal_speed so that stable_dt matches compute_dt bitwise.
double metric_nn(double g11, double g12, double g22, Point n) {
  const double inv_det = 1.0 / (g11 * g22 - g12 * g12);
  return (g22 * n.x * n.x - 2.0 * g12 * n.x * n.y + g11 * n.y * n.y) * inv_det;
}

bool geometry_admissible(const Geo& g) {
  return g.allFinite() && g[1] > 0.0 && g[3] > 0.0 && g[1] * g[3] - g[2] * g[2] > 0.0;
}

bool physical_ok(double h, double m1, double m2) {
  return h > 0.0 && std::isfinite(h) && std::isfinite(m1) && std::isfinite(m2);
}

// Factors of a1 B1 d1 + a2 B2 d2 that depend only on the metric `at` and on the
// stationary parts (b, metric) of d1, d2. Layout: mass row m1, m2 | row 2 m1^2/h,
// m1 m2/h, m2^2/h | row 3 likewise | row 2 h dh1, h dh2 | row 3 h dh1, h dh2 |
// row 2 h | row 3 h.
void cell_factors(Formulation f, double grav, const Geo& at, double a1, const Geo& d1, double a2,
                  const Geo& d2, double scale, double* c) {
  std::fill(c, c + kCellNcp, 0.0);
  if (f == Formulation::kClassical) {
    c[12] = scale * grav * a1 * d1[0];
    c[13] = scale * grav * a2 * d2[0];
    return;
  }
  const double g11 = at[1];
  const double g12 = at[2];
  const double g22 = at[3];
  const double s = scale / (g11 * g22 - g12 * g12);
  const double p11 = d1[1], p12 = d1[2], p22 = d1[3];
  const double q11 = d2[1], q12 = d2[2], q22 = d2[3];
  c[0] = s * a1 * (0.5 * g22 * p11 - g12 * p12 + 0.5 * g11 * p22);
  c[1] = s * a2 * (0.5 * g22 * q11 - g12 * q12 + 0.5 * g11 * q22);
  c[2] = s * (a1 * (g22 * p11 - 2.0 * g12 * p12 + 0.5 * g11 * p22) + a2 * 0.5 * g12 * q11);
  c[3] = s * (a1 * -g12 * p22 + a2 * (1.5 * g22 * q11 - g12 * q12 + 0.5 * g11 * q22));
  c[4] = s * (a1 * -0.5 * g22 * p22 + a2 * (g22 * q12 - 0.5 * g12 * q22));
  c[5] = s * (a1 * (-0.5 * g12 * p11 + g11 * p12) + a2 * -0.5 * g11 * q11);
  c[6] = s * (a1 * (0.5 * g22 * p11 - g12 * p12 + 1.5 * g11 * p22) + a2 * -g12 * q11);
  c[7] = s * (a1 * 0.5 * g12 * p22 + a2 * (0.5 * g22 * q11 - 2.0 * g12 * q12 + g11 * q22));
  c[8] = s * grav * a1 * g22;
  c[9] = s * grav * -a2 * g12;
  c[10] = s * grav * -a1 * g12;
  c[11] = s * grav * a2 * g11;
  c[12] = c[8] * d1[0] + c[9] * d2[0];
  c[13] = c[10] * d1[0] + c[11] * d2[0];
}

Vec3 apply_cell_factors(const double* c, double h, double m1, double m2, double dh1, double dh2) {
  const double ih = 1.0 / h;
  const double uu = m1 * m1 * ih;
  const double uv = m1 * m2 * ih;
  const double vv = m2 * m2 * ih;
  return {c[0] * m1 + c[1] * m2,
          c[2] * uu + c[3] * uv + c[4] * vv + h * (c[8] * dh1 + c[9] * dh2 + c[12]),
          c[5] * uu + c[6] * uv + c[7] * vv + h * (c[10] * dh1 + c[11] * dh2 + c[13])};
}

// Gauss node of the segment path: d1 = d2 = jump and dh1 = dh2, so the pressure
// factors merge. The quadrature weight is folded in.
void node_factors(Formulation f, double grav, const Geo& at, Point n, const Geo& jump,
                  double weight, double* c) {
  double full[kCellNcp];
  cell_factors(f, grav, at, n.x, jump, n.y, jump, weight, full);
  std::copy(full, full + 8, c);
  c[8] = full[8] + full[9];
  c[9] = full[10] + full[11];
  c[10] = full[12];
  c[11] = full[13];
}

Vec3 apply_node_factors(const double* c, double h, double m1, double m2, double dh) {
  const double ih = 1.0 / h;
  const double uu = m1 * m1 * ih;
  const double uv = m1 * m2 * ih;
  const double vv = m2 * m2 * ih;
  return {c[0] * m1 + c[1] * m2, c[2] * uu + c[3] * uv + c[4] * vv + h * (c[8] * dh + c[10]),
          c[5] * uu + c[6] * uv + c[7] * vv + h * (c[9] * dh + c[11])};
}

// Physical part of Model::normal_flux, scaled by the edge length and accumulated.
void add_normal_flux(Formulation f, double grav, double h, double m1, double m2, Point n,
                     double length, Vec3& acc) {
  const double mn = m1 * n.x + m2 * n.y;
  const double un = mn / h;
  double f1 = m1 * un;
  double f2 = m2 * un;
  if (f == Formulation::kClassical) {
    const double p = 0.5 * grav * h * h;
    f1 += p * n.x;
    f2 += p * n.y;
  }
  acc[0] += length * mn;
  acc[1] += length * f1;
  acc[2] += length * f2;
}

}  // namespace

Solver::Solver(const Mesh& mesh, Model model, SolverConfig config)
    : mesh_(&mesh),
      model_(model),
      config_(config),
      gradients_(mesh),
      rule_(gauss_legendre(config.gauss_points)) {
  if (!(config_.cfl > 0.0 && config_.cfl < 1.0)) throw Error("cfl must lie in (0, 1)");
  if (config_.gauss_points < 1) throw Error("gauss points must be >= 1");
  const std::size_t n_cells = mesh.num_cells();
  const std::size_t n_edges = mesh.num_edges();
  face_offsets_.reserve(n_cells + 1);
  face_offsets_.push_back(0);
  inradius_.resize(n_cells);
  for (std::size_t k = 0; k < n_cells; ++k) {
    for (std::size_t e : mesh.cell_edges(k)) {
      const Edge& edge = mesh.edges()[e];
      faces_.push_back({edge.midpoint - mesh.centroid(k), mesh.outward_normal(e, k), edge.length,
                        0.0, false});
      face_edges_.push_back(e);
    }
    face_offsets_.push_back(faces_.size());
    inradius_[k] = mesh.area(k) / mesh.perimeter(k);
  }
  edge_geometry_.resize(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const Edge& edge = mesh.edges()[e];
    edge_geometry_[e].r_left = edge.midpoint - mesh.centroid(edge.left);
    if (!edge.is_boundary()) edge_geometry_[e].r_right = edge.midpoint - mesh.centroid(edge.right);
  }
  grad_.assign(n_cells, Grad7::Zero());
  qdot_.assign(n_cells, Vec7::Zero());
  edge_flux_.resize(n_edges);
  edge_half_jump_.resize(n_edges);
  cell_fallbacks_.resize(n_cells);
  edge_fallbacks_.resize(n_edges);
}

void Solver::refresh_geometry(const std::vector<Vec7>& states) {
  constexpr int kGeo = kNumVars - kNumPhysical;
  const std::size_t n = states.size();
  bool same = geometry_values_.size() == n;
  for (std::size_t k = 0; same && k < n; ++k) {
    same = (states[k].tail<kGeo>().array() == geometry_values_[k].array()).all();
  }
  if (same) return;

  const Mesh& mesh = *mesh_;
  const Formulation form = model_.formulation();
  const double grav = model_.g();
  geometry_values_.resize(n);
  geometry_grad_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    geometry_values_[k] = states[k].tail<kGeo>();
    Grad7 grad = Grad7::Zero();
    if (!config_.first_order && !gradients_.rank_deficient(k)) {
      gradients_.compute_rows(k, states, config_.limiter, kNumPhysical, kNumVars, grad);
    }
    geometry_grad_[k] = grad.bottomRows<kGeo>();
    grad_[k].bottomRows<kGeo>() = geometry_grad_[k];
  }
  const auto extrapolate = [&](std::size_t k, Point r) -> Geo {
    return geometry_values_[k] + geometry_grad_[k].col(0) * r.x + geometry_grad_[k].col(1) * r.y;
  };

  for (std::size_t k = 0; k < n; ++k) {
    const Geo& g = geometry_values_[k];
    for (std::size_t f = face_offsets_[k]; f < face_offsets_[k + 1]; ++f) {
      Face& face = faces_[f];
      face.metric_nn = metric_nn(g[1], g[2], g[3], face.normal);
      face.geometry_ok = geometry_admissible(extrapolate(k, face.r));
    }
  }

  cell_ncp_.resize(n * kCellNcp);
  for (std::size_t k = 0; k < n; ++k) {
    cell_factors(form, grav, geometry_values_[k], 1.0, geometry_grad_[k].col(0), 1.0,
                 geometry_grad_[k].col(1), 1.0, &cell_ncp_[k * kCellNcp]);
  }

  const std::size_t nodes = rule_.nodes.size();
  edge_ncp_stride_ = nodes * kNodeNcp;
  edge_ncp_.resize(mesh.num_edges() * edge_ncp_stride_);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges()[e];
    EdgeGeometry& eg = edge_geometry_[e];
    const Geo left = extrapolate(edge.left, eg.r_left);
    const Geo right = edge.is_boundary() ? left : extrapolate(edge.right, eg.r_right);
    eg.ok_left = geometry_admissible(left);
    eg.ok_right = geometry_admissible(right);
    eg.metric_nn_left = metric_nn(left[1], left[2], left[3], edge.normal);
    eg.metric_nn_right = metric_nn(right[1], right[2], right[3], edge.normal);
    const Geo jump = right - left;
    for (std::size_t i = 0; i < nodes; ++i) {
      node_factors(form, grav, left + rule_.nodes[i] * jump, edge.normal, jump, rule_.weights[i],
                   &edge_ncp_[e * edge_ncp_stride_ + i * kNodeNcp]);
    }
  }
}

double Solver::stable_dt(const FieldSnapshot& snapshot) {
  const Mesh& mesh = *mesh_;
  if (snapshot.size() != mesh.num_cells()) throw Error("snapshot and mesh sizes differ");
  refresh_geometry(snapshot.states);
  const double grav = model_.g();
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Vec7& q = snapshot.states[k];
    double speed = 0.0;
    for (std::size_t f = face_offsets_[k]; f < face_offsets_[k + 1]; ++f) {
      const Face& face = faces_[f];
      const double un = (q[kM1] * face.normal.x + q[kM2] * face.normal.y) / q[kH];
      speed = std::max(speed, std::abs(un) + std::sqrt(grav * q[kH] * face.metric_nn));
    }
    if (!std::isfinite(speed)) {
      std::ostringstream os;
      os << "non-finite signal speed in cell " << k;
      throw Error(os.str());
    }
    if (speed > 0.0) dt = std::min(dt, inradius_[k] / speed);
  }
  if (!std::isfinite(dt)) throw Error("compute_dt: no finite signal speed");
  return config_.cfl * dt;
}

FieldSnapshot Solver::advance(const FieldSnapshot& in, double dt) {
  const Mesh& mesh = *mesh_;
  const std::size_t n_cells = mesh.num_cells();
  const std::size_t n_edges = mesh.num_edges();
  if (in.size() != n_cells) throw Error("snapshot and mesh sizes differ");
  const std::vector<Vec7>& q = in.states;
  refresh_geometry(q);
  const Formulation form = model_.formulation();
  const double grav = model_.g();
  const bool slopes = !config_.first_order;

  // Pass 1: limited slopes of h, m1, m2 and the predictor time derivative per cell.
  parallel_chunks(n_cells, config_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Grad7& gk = grad_[k];
      if (slopes && !gradients_.rank_deficient(k)) {
        gradients_.compute_rows(k, q, config_.limiter, 0, kNumPhysical, gk);
      } else {
        gk.topRows<kNumPhysical>().setZero();
      }
      const Vec7& qk = q[k];
      std::uint32_t fb = 0;
      Vec3 boundary = Vec3::Zero();
      for (std::size_t f = face_offsets_[k]; f < face_offsets_[k + 1]; ++f) {
        const Face& face = faces_[f];
        double h = qk[kH] + gk(kH, 0) * face.r.x + gk(kH, 1) * face.r.y;
        double m1 = qk[kM1] + gk(kM1, 0) * face.r.x + gk(kM1, 1) * face.r.y;
        double m2 = qk[kM2] + gk(kM2, 0) * face.r.x + gk(kM2, 1) * face.r.y;
        if (!(face.geometry_ok && physical_ok(h, m1, m2))) {
          h = qk[kH];
          m1 = qk[kM1];
          m2 = qk[kM2];
          ++fb;
        }
        add_normal_flux(form, grav, h, m1, m2, face.normal, face.length, boundary);
      }
      const Vec3 volume = apply_cell_factors(&cell_ncp_[k * kCellNcp], qk[kH], qk[kM1], qk[kM2],
                                             gk(kH, 0), gk(kH, 1));
      qdot_[k].head<kNumPhysical>() = -boundary / mesh.area(k) - volume;
      cell_fallbacks_[k] = fb;
    }
  });

  // Pass 2: numerical flux and half path jump per edge from half-time edge states.
  const double half_dt = 0.5 * dt;
  parallel_chunks(n_edges, config_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      const Edge& edge = mesh.edges()[e];
      const EdgeGeometry& eg = edge_geometry_[e];
      const auto side = [&](std::size_t k, Point r, double* out) {
        const Vec7& qk = q[k];
        const Grad7& gk = grad_[k];
        const Vec7& dk = qdot_[k];
        for (int c = 0; c < kNumPhysical; ++c) {
          out[c] = qk[c] + gk(c, 0) * r.x + gk(c, 1) * r.y + half_dt * dk[c];
        }
        return physical_ok(out[0], out[1], out[2]);
      };
      double l[3];
      double r[3];
      bool ok = side(edge.left, eg.r_left, l) && eg.ok_left;
      if (!edge.is_boundary()) ok = side(edge.right, eg.r_right, r) && eg.ok_right && ok;

      if (!ok || edge.is_boundary()) {
        // Walls and fallbacks go through the general building blocks.
        std::uint32_t fb = 0;
        const auto full_side = [&](std::size_t k, Point rk) -> Vec7 {
          const Vec7 s = q[k] + grad_[k].col(0) * rk.x + grad_[k].col(1) * rk.y + half_dt * qdot_[k];
          if (detail::admissible(s)) return s;
          ++fb;
          return q[k];
        };
        const Vec7 left = full_side(edge.left, eg.r_left);
        const Vec7 right = edge.is_boundary() ? wall_ghost(State(left), edge.normal).q
                                              : full_side(edge.right, eg.r_right);
        edge_flux_[e] = detail::rusanov_flux_unchecked(left, right, edge.normal, model_).head<kNumPhysical>();
        edge_half_jump_[e] =
            0.5 * detail::path_integral_unchecked(left, right, edge.normal, rule_, model_).head<kNumPhysical>();
        edge_fallbacks_[e] = fb;
        continue;
      }
      edge_fallbacks_[e] = 0;

      const Point n = edge.normal;
      Vec3 fl = Vec3::Zero();
      Vec3 fr = Vec3::Zero();
      add_normal_flux(form, grav, l[0], l[1], l[2], n, 1.0, fl);
      add_normal_flux(form, grav, r[0], r[1], r[2], n, 1.0, fr);
      const double un_l = (l[1] * n.x + l[2] * n.y) / l[0];
      const double un_r = (r[1] * n.x + r[2] * n.y) / r[0];
      const double speed = std::max(std::abs(un_l) + std::sqrt(grav * l[0] * eg.metric_nn_left),
                                    std::abs(un_r) + std::sqrt(grav * r[0] * eg.metric_nn_right));
      Vec3& flux = edge_flux_[e];
      for (int c = 0; c < kNumPhysical; ++c) {
        flux[c] = 0.5 * (fl[c] + fr[c]) - 0.5 * speed * (r[c] - l[c]);
      }

      const double dh = r[0] - l[0];
      const double dm1 = r[1] - l[1];
      const double dm2 = r[2] - l[2];
      const double* c = &edge_ncp_[e * edge_ncp_stride_];
      Vec3 acc = Vec3::Zero();
      for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        const double t = rule_.nodes[i];
        acc += apply_node_factors(c + i * kNodeNcp, l[0] + t * dh, l[1] + t * dm1, l[2] + t * dm2, dh);
      }
      edge_half_jump_[e] = 0.5 * acc;
    }
  });

  // Pass 3: gather per cell in fixed face order, plus the volume nonconservative term
  // at the half-time centroid state. b and the metric are carried over untouched.
  FieldSnapshot out;
  out.states = q;
  out.time = in.time + dt;
  std::vector<std::uint32_t> center_fallbacks(n_cells, 0);
  parallel_chunks(n_cells, config_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Vec3 boundary = Vec3::Zero();
      for (std::size_t f = face_offsets_[k]; f < face_offsets_[k + 1]; ++f) {
        const std::size_t e = face_edges_[f];
        const Vec3& flux = edge_flux_[e];
        boundary += faces_[f].length *
                    ((mesh.edges()[e].left == k ? flux : Vec3(-flux)) + edge_half_jump_[e]);
      }
      const Vec7& qk = q[k];
      double h = qk[kH] + half_dt * qdot_[k][kH];
      double m1 = qk[kM1] + half_dt * qdot_[k][kM1];
      double m2 = qk[kM2] + half_dt * qdot_[k][kM2];
      if (!physical_ok(h, m1, m2)) {
        h = qk[kH];
        m1 = qk[kM1];
        m2 = qk[kM2];
        center_fallbacks[k] = 1;
      }
      const Grad7& gk = grad_[k];
      const Vec3 volume =
          apply_cell_factors(&cell_ncp_[k * kCellNcp], h, m1, m2, gk(kH, 0), gk(kH, 1));
      out.states[k].head<kNumPhysical>() =
          qk.head<kNumPhysical>() - (dt / mesh.area(k)) * boundary - dt * volume;
    }
  });

  for (std::size_t k = 0; k < n_cells; ++k) {
    fallbacks_ += cell_fallbacks_[k] + center_fallbacks[k];
  }
  for (std::size_t e = 0; e < n_edges; ++e) fallbacks_ += edge_fallbacks_[e];

  for (std::size_t k = 0; k < n_cells; ++k) {
    Vec7& s = out.states[k];
    if (detail::admissible(s)) continue;
    if (config_.h_min && std::isfinite(s[kH]) && s[kH] < *config_.h_min) {
      s[kH] = *config_.h_min;
      s[kM1] = 0.0;
      s[kM2] = 0.0;
      ++floor_hits_;
      if (detail::admissible(s)) continue;
    }
    std::ostringstream os;
    os << "inadmissible update in cell " << k << " at centroid (" << mesh.centroid(k).x << ", "
       << mesh.centroid(k).y << "), t = " << out.time << ": state (" << s.transpose()
       << "), previous (" << q[k].transpose() << ")";
    throw SolverAbort(os.str(), k);
  }
  return out;
}

FieldSnapshot Solver::step(const FieldSnapshot& snapshot) {
  return advance(snapshot, stable_dt(snapshot));
}

namespace {

void record(RunDiagnostics& d, const FieldSnapshot& s, const Mesh& mesh) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec7& q : s.states) {
    lo = std::min(lo, q[kH]);
    hi = std::max(hi, q[kH]);
  }
  d.times.push_back(s.time);
  d.mass.push_back(covariant_mass(s, mesh));
  d.min_h.push_back(lo);
  d.max_h.push_back(hi);
}

}  // namespace

std::pair<FieldSnapshot, RunDiagnostics> Solver::run(FieldSnapshot current,
                                                     const StepObserver& observer) {
  const double final_time = config_.final_time;
  if (!(final_time > current.time)) throw Error("final time must exceed the initial time");
  for (std::size_t k = 0; k < current.size(); ++k) {
    if (!detail::admissible(current.states[k])) {
      std::ostringstream os;
      os << "inadmissible initial state in cell " << k;
      throw SolverAbort(os.str(), k);
    }
  }
  RunDiagnostics diag;
  record(diag, current, *mesh_);
  const std::size_t fallbacks_before = fallbacks_;
  const std::size_t floors_before = floor_hits_;

  double next_output = config_.output_interval > 0.0 ? current.time + config_.output_interval
                                                     : final_time;
  while (current.time < final_time) {
    double dt = stable_dt(current);
    const double target = std::min(next_output, final_time);
    bool landed = false;
    if (current.time + dt >= target) {
      dt = target - current.time;
      landed = true;
    }
    FieldSnapshot next = advance(current, dt);
    if (landed) next.time = target;  // exact landing despite rounding
    current = std::move(next);
    ++diag.steps;
    diag.dts.push_back(dt);
    record(diag, current, *mesh_);
    StepInfo info;
    if (landed) {
      info.output = true;
      if (config_.output_interval > 0.0) {
        while (next_output <= current.time) next_output += config_.output_interval;
      }
    }
    diag.fallbacks = fallbacks_ - fallbacks_before;
    diag.floor_hits = floor_hits_ - floors_before;
    if (observer) observer(current, diag, info);
  }
  diag.fallbacks = fallbacks_ - fallbacks_before;
  diag.floor_hits = floor_hits_ - floors_before;
  return {std::move(current), std::move(diag)};
}

FieldSnapshot step(const FieldSnapshot& snapshot, const Mesh& mesh, const Model& model,
                   const SolverConfig& config) {
  Solver solver(mesh, model, config);
  return solver.step(snapshot);
}

std::pair<FieldSnapshot, RunDiagnostics> run(const FieldSnapshot& initial, const Mesh& mesh,
                                             const Model& model, const SolverConfig& config,
                                             const StepObserver& observer) {
  Solver solver(mesh, model, config);
  return solver.run(initial, observer);
}

}  // namespace covsw
