#include "covsw/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "covsw/errors.hpp"

namespace covsw {

std::string_view to_string(Formulation f) {
  return f == Formulation::kCovariant ? "covariant" : "classical";
}

Formulation formulation_from_string(std::string_view name) {
  if (name == "covariant") return Formulation::kCovariant;
  if (name == "classical") return Formulation::kClassical;
  throw ConfigError("unknown formulation '" + std::string(name) + "'");
}

bool is_admissible(const State& q) {
  return q.q.allFinite() && q.h() > 0.0 && is_spd(q.metric());
}

void require_admissible(const State& q) {
  if (is_admissible(q)) return;
  std::ostringstream os;
  os << "inadmissible state (h, m1, m2, b, g11, g12, g22) = (" << q.q.transpose() << ")";
  throw InadmissibleState(os.str());
}

namespace detail {

void covariant_ncp_rows(const Vec7& q, double g, NcpRows& b1, NcpRows& b2) {
  const double h = q[kH];
  const double m1 = q[kM1];
  const double m2 = q[kM2];
  const double g11 = q[kG11];
  const double g12 = q[kG12];
  const double g22 = q[kG22];
  const double inv_det = 1.0 / (g11 * g22 - g12 * g12);
  const double inv_h = 1.0 / h;
  const double gh = g * h;
  const double alpha = -m1 * m1 * g11 + m2 * m2 * g22;

  b1.row(0) << 0.0, 0.0, 0.0, 0.0, 0.5 * m1 * g22, -m1 * g12, 0.5 * m1 * g11;
  b1.row(1) << gh * g22, 0.0, 0.0, gh * g22, m1 * m1 * inv_h * g22, -2.0 * m1 * m1 * inv_h * g12,
      -0.5 * inv_h * (2.0 * m1 * m2 * g12 + alpha);
  b1.row(2) << -gh * g12, 0.0, 0.0, -gh * g12, 0.5 * m1 * inv_h * (-m1 * g12 + m2 * g22),
      m1 * inv_h * (m1 * g11 - m2 * g12), 0.5 * m2 * inv_h * (3.0 * m1 * g11 + m2 * g12);

  // Index mirror of B1 (1 <-> 2 on velocities and metric).
  b2.row(0) << 0.0, 0.0, 0.0, 0.0, 0.5 * m2 * g22, -m2 * g12, 0.5 * m2 * g11;
  b2.row(1) << -gh * g12, 0.0, 0.0, -gh * g12, 0.5 * m1 * inv_h * (3.0 * m2 * g22 + m1 * g12),
      m2 * inv_h * (m2 * g22 - m1 * g12), 0.5 * m2 * inv_h * (-m2 * g12 + m1 * g11);
  b2.row(2) << gh * g11, 0.0, 0.0, gh * g11, -0.5 * inv_h * (2.0 * m1 * m2 * g12 - alpha),
      -2.0 * m2 * m2 * inv_h * g12, m2 * m2 * inv_h * g11;

  b1 *= inv_det;
  b2 *= inv_det;
}

}  // namespace detail

// ---------------------------------------------------------------------------

Model::Model(double g, Formulation f) : g_(g), formulation_(f) {}

FluxPair Model::flux(const Vec7& q) const {
  const double h = q[kH];
  const double m1 = q[kM1];
  const double m2 = q[kM2];
  FluxPair f;
  f.f1[kH] = m1;
  f.f1[kM1] = m1 * m1 / h;
  f.f1[kM2] = m1 * m2 / h;
  f.f2[kH] = m2;
  f.f2[kM1] = m1 * m2 / h;
  f.f2[kM2] = m2 * m2 / h;
  if (formulation_ == Formulation::kClassical) {
    const double p = 0.5 * g_ * h * h;
    f.f1[kM1] += p;
    f.f2[kM2] += p;
  }
  return f;
}

Vec7 Model::normal_flux(const Vec7& q, Point n) const {
  const double h = q[kH];
  const double mn = q[kM1] * n.x + q[kM2] * n.y;
  const double un = mn / h;
  Vec7 f = Vec7::Zero();
  f[kH] = mn;
  f[kM1] = q[kM1] * un;
  f[kM2] = q[kM2] * un;
  if (formulation_ == Formulation::kClassical) {
    const double p = 0.5 * g_ * h * h;
    f[kM1] += p * n.x;
    f[kM2] += p * n.y;
  }
  return f;
}

NcpRows Model::ncp_rows(const Vec7& q, Point n) const {
  if (formulation_ == Formulation::kClassical) {
    NcpRows rows = NcpRows::Zero();
    rows(1, kB) = g_ * q[kH] * n.x;
    rows(2, kB) = g_ * q[kH] * n.y;
    return rows;
  }
  NcpRows b1;
  NcpRows b2;
  detail::covariant_ncp_rows(q, g_, b1, b2);
  return b1 * n.x + b2 * n.y;
}

Vec7 Model::ncp_apply(const Vec7& q, Point n, const Vec7& dq) const {
  Vec7 out = Vec7::Zero();
  out.head<kNumPhysical>() = ncp_rows(q, n) * dq;
  return out;
}

Vec7 Model::ncp_gradient_product(const Vec7& q, const Grad7& grad) const {
  Vec7 out = Vec7::Zero();
  if (formulation_ == Formulation::kClassical) {
    out[kM1] = g_ * q[kH] * grad(kB, 0);
    out[kM2] = g_ * q[kH] * grad(kB, 1);
    return out;
  }
  out.head<kNumPhysical>() = ncp_dot(q, 1.0, grad.col(0), 1.0, grad.col(1));
  return out;
}

Vec3 Model::ncp_dot(const Vec7& q, double a1, const Vec7& d1, double a2, const Vec7& d2) const {
  Vec3 out;
  if (formulation_ == Formulation::kClassical) {
    const double gh = g_ * q[kH];
    out << 0.0, gh * a1 * d1[kB], gh * a2 * d2[kB];
    return out;
  }
  const double h = q[kH];
  const double m1 = q[kM1];
  const double m2 = q[kM2];
  const double g11 = q[kG11];
  const double g12 = q[kG12];
  const double g22 = q[kG22];
  const double inv_det = 1.0 / (g11 * g22 - g12 * g12);
  const double inv_h = 1.0 / h;
  const double gh = g_ * h;
  const double alpha = -m1 * m1 * g11 + m2 * m2 * g22;

  // Same entries as covariant_ncp_rows, contracted directly.
  const double s1 = d1[kH] + d1[kB];
  const double s2 = d2[kH] + d2[kB];
  const double mass1 = 0.5 * g22 * d1[kG11] - g12 * d1[kG12] + 0.5 * g11 * d1[kG22];
  const double mass2 = 0.5 * g22 * d2[kG11] - g12 * d2[kG12] + 0.5 * g11 * d2[kG22];

  const double r1 = gh * g22 * s1 + m1 * m1 * inv_h * g22 * d1[kG11] -
                    2.0 * m1 * m1 * inv_h * g12 * d1[kG12] -
                    0.5 * inv_h * (2.0 * m1 * m2 * g12 + alpha) * d1[kG22];
  const double r2 = -gh * g12 * s2 + 0.5 * m1 * inv_h * (3.0 * m2 * g22 + m1 * g12) * d2[kG11] +
                    m2 * inv_h * (m2 * g22 - m1 * g12) * d2[kG12] +
                    0.5 * m2 * inv_h * (-m2 * g12 + m1 * g11) * d2[kG22];
  const double t1 = -gh * g12 * s1 + 0.5 * m1 * inv_h * (-m1 * g12 + m2 * g22) * d1[kG11] +
                    m1 * inv_h * (m1 * g11 - m2 * g12) * d1[kG12] +
                    0.5 * m2 * inv_h * (3.0 * m1 * g11 + m2 * g12) * d1[kG22];
  const double t2 = gh * g11 * s2 - 0.5 * inv_h * (2.0 * m1 * m2 * g12 - alpha) * d2[kG11] -
                    2.0 * m2 * m2 * inv_h * g12 * d2[kG12] + m2 * m2 * inv_h * g11 * d2[kG22];

  out << (a1 * m1 * mass1 + a2 * m2 * mass2) * inv_det, (a1 * r1 + a2 * r2) * inv_det,
      (a1 * t1 + a2 * t2) * inv_det;
  return out;
}

double Model::signal_speed(const Vec7& q, Point n) const {
  const double g11 = q[kG11];
  const double g12 = q[kG12];
  const double g22 = q[kG22];
  const double inv_det = 1.0 / (g11 * g22 - g12 * g12);
  // gamma^ij n_i n_j with the contravariant metric (g22, -g12, g11) / det
  const double gnn = (g22 * n.x * n.x - 2.0 * g12 * n.x * n.y + g11 * n.y * n.y) * inv_det;
  const double un = (q[kM1] * n.x + q[kM2] * n.y) / q[kH];
  return std::abs(un) + std::sqrt(g_ * q[kH] * gnn);
}

// ---------------------------------------------------------------------------

FluxPair physical_flux(const State& q) {
  require_admissible(q);
  return Model(9.81, Formulation::kCovariant).flux(q.q);
}

FluxPair classical_flux(const State& q, double g) {
  require_admissible(q);
  return Model(g, Formulation::kClassical).flux(q.q);
}

NcpPair ncp_matrices(const State& q, double g) {
  require_admissible(q);
  NcpRows b1;
  NcpRows b2;
  detail::covariant_ncp_rows(q.q, g, b1, b2);
  NcpPair out;
  out.b1.topRows<kNumPhysical>() = b1;
  out.b2.topRows<kNumPhysical>() = b2;
  return out;
}

NcpPair classical_ncp_matrices(const State& q, double g) {
  require_admissible(q);
  NcpPair out;
  out.b1(kM1, kB) = g * q.h();
  out.b2(kM2, kB) = g * q.h();
  return out;
}

Mat7 flux_jacobian(const State& q, int dir) {
  require_admissible(q);
  if (dir != 1 && dir != 2) throw Error("flux_jacobian: direction must be 1 or 2");
  const double h = q.h();
  const double m1 = q.m1();
  const double m2 = q.m2();
  const double ih = 1.0 / h;
  const double ih2 = ih * ih;
  Mat7 a = Mat7::Zero();
  if (dir == 1) {
    a(kH, kM1) = 1.0;
    a(kM1, kH) = -m1 * m1 * ih2;
    a(kM1, kM1) = 2.0 * m1 * ih;
    a(kM2, kH) = -m1 * m2 * ih2;
    a(kM2, kM1) = m2 * ih;
    a(kM2, kM2) = m1 * ih;
  } else {
    a(kH, kM2) = 1.0;
    a(kM1, kH) = -m1 * m2 * ih2;
    a(kM1, kM1) = m2 * ih;
    a(kM1, kM2) = m1 * ih;
    a(kM2, kH) = -m2 * m2 * ih2;
    a(kM2, kM2) = 2.0 * m2 * ih;
  }
  return a;
}

Mat7 classical_flux_jacobian(const State& q, int dir, double g) {
  Mat7 a = flux_jacobian(q, dir);
  a(dir == 1 ? kM1 : kM2, kH) += g * q.h();
  return a;
}

Mat7 system_matrix(const State& q, Point n, double g) {
  const NcpPair b = ncp_matrices(q, g);
  return (flux_jacobian(q, 1) + b.b1) * n.x + (flux_jacobian(q, 2) + b.b2) * n.y;
}

Mat7 classical_system_matrix(const State& q, Point n, double g) {
  const NcpPair b = classical_ncp_matrices(q, g);
  return (classical_flux_jacobian(q, 1, g) + b.b1) * n.x +
         (classical_flux_jacobian(q, 2, g) + b.b2) * n.y;
}

double max_signal_speed(const State& q, Point n, double g) {
  require_admissible(q);
  return Model(g).signal_speed(q.q, n);
}

}  // namespace covsw
