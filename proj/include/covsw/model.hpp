#pragma once

#include <Eigen/Core>
#include <string_view>

#include "covsw/geometry.hpp"

namespace covsw {

inline constexpr int kNumVars = 7;
inline constexpr int kNumPhysical = 3;  // h, m1, m2 evolve; b and the metric do not

using Vec7 = Eigen::Matrix<double, kNumVars, 1>;
using Mat7 = Eigen::Matrix<double, kNumVars, kNumVars>;
/// Column d holds the partial derivative of every component along x^(d+1).
using Grad7 = Eigen::Matrix<double, kNumVars, 2>;
/// The nonzero rows (mass and momentum) of a nonconservative matrix.
using NcpRows = Eigen::Matrix<double, kNumPhysical, kNumVars>;
using Vec3 = Eigen::Matrix<double, kNumPhysical, 1>;

enum Var : int { kH = 0, kM1 = 1, kM2 = 2, kB = 3, kG11 = 4, kG12 = 5, kG22 = 6 };

/// Conserved tuple (h, m1, m2, b, g11, g12, g22). m^i = h u^i are contravariant
/// mass fluxes; the metric components are covariant.
struct State {
  Vec7 q = Vec7::Zero();

  State() = default;
  explicit State(const Vec7& v) : q(v) {}
  State(double h, double m1, double m2, double b, const Metric2& metric) {
    q << h, m1, m2, b, metric.g11, metric.g12, metric.g22;
  }

  double h() const { return q[kH]; }
  double m1() const { return q[kM1]; }
  double m2() const { return q[kM2]; }
  double b() const { return q[kB]; }
  Metric2 metric() const { return {q[kG11], q[kG12], q[kG22]}; }
  double u1() const { return q[kM1] / q[kH]; }
  double u2() const { return q[kM2] / q[kH]; }
};

enum class Formulation {
  kCovariant,  // metric in the state, pressure and curvature in B
  kClassical,  // Cartesian conservative SW, pressure in the flux
};

std::string_view to_string(Formulation f);
Formulation formulation_from_string(std::string_view name);

struct FluxPair {
  Vec7 f1 = Vec7::Zero();
  Vec7 f2 = Vec7::Zero();

  Vec7 dot(Point n) const { return f1 * n.x + f2 * n.y; }
};

struct NcpPair {
  Mat7 b1 = Mat7::Zero();
  Mat7 b2 = Mat7::Zero();
};

bool is_admissible(const State& q);
/// Throws InadmissibleState.
void require_admissible(const State& q);

// Checked entry points. Each throws InadmissibleState for a bad input.

/// Covariant flux: advective part only, the pressure lives in B.
FluxPair physical_flux(const State& q);
/// Cartesian conservative flux with 1/2 g h^2 on the momentum diagonal.
FluxPair classical_flux(const State& q, double g);
/// Nonconservative matrices of the covariant system.
NcpPair ncp_matrices(const State& q, double g);
/// Classical mode: only the bathymetry columns g h d b are nonzero.
NcpPair classical_ncp_matrices(const State& q, double g);
/// Analytic d f_dir / d Q; dir is 1 or 2.
Mat7 flux_jacobian(const State& q, int dir);
Mat7 classical_flux_jacobian(const State& q, int dir, double g);
/// (dF/dQ + B) . n
Mat7 system_matrix(const State& q, Point n, double g);
Mat7 classical_system_matrix(const State& q, Point n, double g);
/// |u^i n_i| + sqrt(g h gamma^ij n_i n_j)
double max_signal_speed(const State& q, Point n, double g);

/// Bundles g and the formulation for the solver's inner loops. Methods do not
/// validate their input; callers check admissibility first.
class Model {
 public:
  explicit Model(double g = 9.81, Formulation f = Formulation::kCovariant);

  double g() const { return g_; }
  Formulation formulation() const { return formulation_; }

  /// F(q) . n
  Vec7 normal_flux(const Vec7& q, Point n) const;
  FluxPair flux(const Vec7& q) const;
  /// Rows 1-3 of B1 n1 + B2 n2.
  NcpRows ncp_rows(const Vec7& q, Point n) const;
  /// (B1 n1 + B2 n2) dq, zero in rows 4-7.
  Vec7 ncp_apply(const Vec7& q, Point n, const Vec7& dq) const;
  /// B1 grad_1 + B2 grad_2.
  Vec7 ncp_gradient_product(const Vec7& q, const Grad7& grad) const;
  /// Rows 1-3 of a1 B1 d1 + a2 B2 d2 without forming the matrices.
  Vec3 ncp_dot(const Vec7& q, double a1, const Vec7& d1, double a2, const Vec7& d2) const;
  double signal_speed(const Vec7& q, Point n) const;

 private:
  double g_;
  Formulation formulation_;
};

namespace detail {

/// Rows 1-3 of B1 and B2 for the covariant system.
void covariant_ncp_rows(const Vec7& q, double g, NcpRows& b1, NcpRows& b2);

}  // namespace detail

}  // namespace covsw

namespace covsw::detail {

/// h > 0, SPD metric, all components finite.
inline bool admissible(const Vec7& q) {
  return q.allFinite() && q[kH] > 0.0 && q[kG11] > 0.0 && q[kG22] > 0.0 &&
         q[kG11] * q[kG22] - q[kG12] * q[kG12] > 0.0;
}

}  // namespace covsw::detail
