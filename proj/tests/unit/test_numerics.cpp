#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "covsw/harness.hpp"
#include "covsw/mesh.hpp"
#include "covsw/numerics.hpp"
#include "oracles/ncp_reference.hpp"

using namespace covsw;
using doctest::Approx;

namespace {

constexpr double kG = 9.81;

FieldSnapshot field(const Mesh& m, const std::function<Vec7(Point)>& f) {
  FieldSnapshot s;
  for (Point c : m.centroids()) s.states.push_back(f(c));
  return s;
}

Vec7 still(double h, Metric2 g = {1, 0, 1}) { return State(h, 0, 0, 0, g).q; }

bool interior(const Mesh& m, std::size_t k) {
  for (std::size_t j : m.stencil(k)) {
    for (std::size_t e : m.cell_edges(j)) {
      if (m.edges()[e].is_boundary()) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("constant field has zero gradient") {
  const Mesh m = generate_voronoi_mesh({0, 1, 0, 1}, 80, 3, 4);
  const FieldSnapshot rest = field(m, [](Point) { return State(1.3, 0, 0, 0.05, {2, 0.1, 1}).q; });
  const FieldSnapshot moving = field(m, [](Point) { return State(1.3, 0.2, 0.1, 0.05, {2, 0.1, 1}).q; });
  const GradientReconstructor rec(m);
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    CHECK(compute_gradient(k, rest, m, Limiter::kBarthJespersen).isZero(0));
    CHECK(rec.compute(k, rest.states, Limiter::kNone).isZero(0));
    // wall images reflect the momentum, so only cells away from walls see a constant field
    if (interior(m, k)) CHECK(compute_gradient(k, moving, m, Limiter::kBarthJespersen).isZero(0));
  }
}

TEST_CASE("wall cells see a symmetric stencil") {
  // y-independent data with curvature in x: no slope across the walls y = 0, 0.1
  const Mesh m = generate_rect_mesh({0, 1, 0, 0.1}, 20, 4);
  const FieldSnapshot s = field(m, [](Point p) {
    return State(1 + p.x * p.x, 0.3 * p.x * p.x, 0, 0, {1, 0, 1}).q;
  });
  const GradientReconstructor rec(m);
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    const Grad7 a = compute_gradient(k, s, m, Limiter::kNone);
    const Grad7 b = rec.compute(k, s.states, Limiter::kNone);
    CHECK(std::abs(a(kH, 1)) < 1e-13);
    CHECK(std::abs(a(kM1, 1)) < 1e-13);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("unlimited gradients are exact on linear fields") {
  const Mesh rect = generate_rect_mesh({0, 1, 0, 1}, 8, 8);
  const Mesh vor = generate_voronoi_mesh({0, 1, 0, 1}, 150, 5, 9);
  for (const Mesh* m : {&rect, &vor}) {
    const FieldSnapshot s = field(*m, [](Point p) {
      Vec7 q = still(1 + 0.1 * p.x);
      q[kM1] = 0.3 - 0.2 * p.y;
      q[kB] = 0.5 * p.x + 0.25 * p.y;
      return q;
    });
    for (std::size_t k = 0; k < m->num_cells(); ++k) {
      if (!interior(*m, k)) continue;
      const Grad7 g = compute_gradient(k, s, *m, Limiter::kNone);
      CHECK(std::abs(g(kH, 0) - 0.1) < 1e-12);
      CHECK(std::abs(g(kH, 1)) < 1e-12);
      CHECK(std::abs(g(kM1, 1) + 0.2) < 1e-12);
      CHECK(std::abs(g(kB, 0) - 0.5) < 1e-12);
      CHECK(std::abs(g(kB, 1) - 0.25) < 1e-12);
    }
  }
}

TEST_CASE("Barth-Jespersen keeps vertex values inside the stencil range") {
  const Mesh rect = generate_rect_mesh({0, 1, 0, 1}, 9, 5);
  const Mesh vor = generate_voronoi_mesh({0, 1, 0, 1}, 120, 3, 5);
  for (const Mesh* m : {&rect, &vor}) {
    const FieldSnapshot s = field(*m, [](Point p) { return still(p.x < 0.5 ? 2.0 : 3.0); });
    for (std::size_t k = 0; k < m->num_cells(); ++k) {
      const Grad7 g = compute_gradient(k, s, *m, Limiter::kBarthJespersen);
      double lo = s.states[k][kH], hi = lo;
      for (std::size_t j : m->stencil(k)) {
        lo = std::min(lo, s.states[j][kH]);
        hi = std::max(hi, s.states[j][kH]);
      }
      for (std::size_t v : m->cell_vertices(k)) {
        const Point r = m->vertices()[v] - m->centroid(k);
        const double val = s.states[k][kH] + g(kH, 0) * r.x + g(kH, 1) * r.y;
        CHECK(val >= lo - 1e-13);
        CHECK(val <= hi + 1e-13);
      }
    }
  }
}

TEST_CASE("compute_time_derivative examples") {
  const Mesh m = generate_rect_mesh({0, 0.3, 0, 0.3}, 3, 3);
  const Model model(kG);
  SUBCASE("uniform state") {
    const FieldSnapshot s = field(m, [](Point) { return State(1.3, 0.4, -0.2, 0, {1, 0, 1}).q; });
    const Grad7 g = compute_gradient(4, s, m, Limiter::kNone);
    CHECK(compute_time_derivative(4, g, s, m, model).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("lake at rest") {
    const FieldSnapshot s = field(m, [](Point) { return still(2.0); });
    const Grad7 g = compute_gradient(4, s, m, Limiter::kBarthJespersen);
    CHECK(compute_time_derivative(4, g, s, m, model).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("linear depth at rest") {
    const FieldSnapshot s = field(m, [](Point p) { return still(1.0 + 0.1 * p.x); });
    const Grad7 g = compute_gradient(4, s, m, Limiter::kNone);
    const Vec7 dt = compute_time_derivative(4, g, s, m, model);
    const double h = s.states[4][kH];
    CHECK(std::abs(dt[kM1] + kG * h * 0.1) < 1e-10);
    CHECK(std::abs(dt[kM2]) < 1e-10);
    CHECK(dt.tail<4>().isZero(0));
  }
}

TEST_CASE("half_time_edge_state examples") {
  CellPolynomial p;
  p.q0 = State(1.0, 0.0, 0.0, 0.0, {1, 0, 1});
  p.center = {0.5, 0.5};
  CHECK(Vec7(half_time_edge_state(p, {0.55, 0.5}, 0.01).q) == p.q0.q);
  p.grad(kH, 0) = 0.1;
  CHECK(half_time_edge_state(p, {0.55, 0.5}, 0.0).h() == Approx(1.005).epsilon(1e-15));
  p.grad.setZero();
  p.dt[kH] = -1.0;
  CHECK(half_time_edge_state(p, {0.55, 0.5}, 0.01).h() == Approx(0.995).epsilon(1e-15));
  p.dt[kH] = -1000.0;
  bool fallback = false;
  CHECK(half_time_edge_state(p, {0.55, 0.5}, 0.01, &fallback).h() == 1.0);
  CHECK(fallback);
}

TEST_CASE("rusanov_flux examples") {
  const Model model(kG);
  const State q(1.4, 0.3, -0.7, 0.2, {2, 0.3, 1.5});
  const Point n{0.6, 0.8};
  CHECK(rusanov_flux(q, q, n, model) == physical_flux(q).dot(n));
  const Vec7 f = rusanov_flux(State(2, 0, 0, 0, {1, 0, 1}), State(3, 0, 0, 0, {1, 0, 1}), {1, 0}, model);
  CHECK(f[kH] == Approx(-2.7125).epsilon(1e-4));
  CHECK(f[kM1] == 0.0);
  const Vec7 g = rusanov_flux(State(1, 0.5, 0, 0, {2, 0, 1}), State(1, 0.5, 0, 0, {2.1, 0, 1}), {1, 0}, model);
  CHECK(g.tail<4>().isZero(0));
}

TEST_CASE("ncp_jump examples") {
  const Model model(kG);
  const State a(2, 0, 0, 0, {1, 0, 1});
  const State b(3, 0, 0, 0, {1, 0, 1});
  CHECK(ncp_jump(a, a, {1, 0}, 3, model).isZero(0));
  const Vec7 d = ncp_jump(a, b, {1, 0}, 3, model);
  CHECK(d[kM1] == Approx(12.2625).epsilon(1e-14));
  CHECK(d[kH] == 0.0);
  CHECK(d[kM2] == 0.0);
  const Vec7 ref = 0.5 * oracle::path_integral_50(a.q, b.q, {1, 0}, kG);
  CHECK(std::abs(ref[kM1] - 12.2625) < 1e-12);
}

TEST_CASE("half-jumps from the two sides sum to the full path integral") {
  const Model model(kG);
  const GaussRule rule = gauss_legendre(3);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  for (int i = 0; i < 500; ++i) {
    const State a = random_state(rng);
    const State b = random_state(rng);
    const double t = angle(rng);
    const Point n{std::cos(t), std::sin(t)};
    const Vec7 full = ncp_path_integral(a, b, n, rule, model);
    const Vec7 sum = ncp_jump(a, b, n, 3, model) + ncp_jump(b, a, -1.0 * n, 3, model);
    CHECK((sum - full).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, full.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("geometry rows of every operator output are zero") {
  const Model model(kG);
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    const State a = random_state(rng);
    const State b = random_state(rng);
    CHECK(rusanov_flux(a, b, {0.6, -0.8}, model).tail<4>().isZero(0));
    CHECK(ncp_jump(a, b, {0.6, -0.8}, 3, model).tail<4>().isZero(0));
  }
  const Mesh m = generate_voronoi_mesh({0, 1, 0, 1}, 60, 2, 6);
  const FieldSnapshot s = field(m, [](Point p) {
    return State(2 + std::sin(3 * p.x), p.y, -p.x, 0.1 * p.x, {2 + p.y, 0.1 * p.x, 1 + p.x}).q;
  });
  for (std::size_t k = 0; k < m.num_cells(); ++k) {
    const Grad7 g = compute_gradient(k, s, m, Limiter::kBarthJespersen);
    CHECK(compute_time_derivative(k, g, s, m, model).tail<4>().isZero(0));
  }
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n = 1; n <= 6; ++n) {
    const GaussRule r = gauss_legendre(n);
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      CHECK(s == Approx(1.0 / (p + 1)).epsilon(1e-14));
    }
  }
}
