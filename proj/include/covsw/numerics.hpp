#pragma once

#include <string_view>
#include <vector>

#include "covsw/mesh.hpp"
#include "covsw/model.hpp"
#include "covsw/snapshot.hpp"

namespace covsw {

enum class Limiter { kNone, kBarthJespersen };

std::string_view to_string(Limiter l);

namespace detail {

/// A stencil cell, or its image across one or two wall lines.
struct StencilPoint {
  std::size_t cell = 0;
  Point offset;  // image centroid - reconstructed cell's centroid
  int reflections = 0;
  Point n1;
  Point n2;
};

}  // namespace detail

/// Space-time linear reconstruction q0 + grad (x - center) + dt (t - t0).
struct CellPolynomial {
  State q0;
  Grad7 grad = Grad7::Zero();
  Vec7 dt = Vec7::Zero();
  Point center;
  double t0 = 0.0;

  Vec7 evaluate(Point x, double t) const;
};

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Least-squares gradients over vertex stencils with precomputed weights, plus the
/// Barth-Jespersen limiter evaluated at the cell's vertices. Next to a wall, the
/// slopes of h, m1 and m2 also fit the wall images of the stencil cells touching
/// it (momentum reflected), so wall cells see a symmetric stencil; b and the
/// metric use the plain stencil.
class GradientReconstructor {
 public:
  explicit GradientReconstructor(const Mesh& mesh);
  ~GradientReconstructor();
  GradientReconstructor(GradientReconstructor&&) noexcept;
  GradientReconstructor& operator=(GradientReconstructor&&) noexcept;

  Grad7 unlimited(std::size_t k, const std::vector<Vec7>& states) const;
  Grad7 compute(std::size_t k, const std::vector<Vec7>& states, Limiter limiter) const;
  /// Limited gradient of components [first, last) only; other rows of grad are untouched.
  /// Supported ranges: the evolving rows [0, 3), the stationary rows [3, 7) and [0, 7).
  void compute_rows(std::size_t k, const std::vector<Vec7>& states, Limiter limiter, int first,
                    int last, Grad7& grad) const;

  /// Cells whose stencil geometry cannot determine a gradient; they get zero slopes.
  bool rank_deficient(std::size_t k) const { return deficient_[k] != 0; }
  std::size_t rank_deficient_count() const;

 private:
  template <int First, int Last>
  void rows(std::size_t k, const std::vector<Vec7>& states, Limiter limiter, Grad7& grad) const;

  struct Weight {
    std::size_t cell;
    double wx;
    double wy;
  };

  const Mesh* mesh_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<Weight> weights_;
  std::vector<std::size_t> mirror_offsets_;  // empty range: no wall edge
  std::vector<detail::StencilPoint> mirror_points_;
  std::vector<Point> mirror_weights_;
  std::vector<std::size_t> vertex_offsets_;
  std::vector<Point> vertex_offsets_xy_;  // vertex - centroid
  std::vector<char> deficient_;
};

/// Limited least-squares slope of cell k.
Grad7 compute_gradient(std::size_t k, const FieldSnapshot& snapshot, const Mesh& mesh,
                       Limiter limiter);

/// d_t Q_k = -(1/|cell|) sum_e |e| F(w_k(mid_e)) . n_e - B(Q_k) grad, rows 4-7 exactly zero.
/// Midpoint states that are inadmissible fall back to the cell average; the number of
/// fallbacks is added to *fallbacks when given.
Vec7 compute_time_derivative(std::size_t k, const Grad7& grad, const FieldSnapshot& snapshot,
                             const Mesh& mesh, const Model& model, std::size_t* fallbacks = nullptr);

/// q0 + grad (mid - center) + (dt_step / 2) dt. Falls back to q0 for an inadmissible
/// result and sets *fallback.
State half_time_edge_state(const CellPolynomial& poly, Point mid, double dt_step,
                           bool* fallback = nullptr);

/// 1/2 (F(qm) + F(qp)) . n - 1/2 s (qp - qm), dissipation masked to h, m1, m2.
Vec7 rusanov_flux(const State& qm, const State& qp, Point n, const Model& model);

/// Full segment-path integral [int_0^1 B(qm + tau (qp - qm)) . n dtau] (qp - qm).
Vec7 ncp_path_integral(const State& qm, const State& qp, Point n, const GaussRule& rule,
                       const Model& model);

/// Half of the path integral, the share assigned to the cell holding qm.
Vec7 ncp_jump(const State& qm, const State& qp, Point n, int n_gauss, const Model& model);

namespace detail {

/// Momentum of the wall image of q: u is reflected in the metric inner product.
void reflect_momentum(const Vec7& q, Point n, double& m1, double& m2);

Vec7 rusanov_flux_unchecked(const Vec7& qm, const Vec7& qp, Point n, const Model& model);
Vec7 path_integral_unchecked(const Vec7& qm, const Vec7& qp, Point n, const GaussRule& rule,
                             const Model& model);

}  // namespace detail

}  // namespace covsw
