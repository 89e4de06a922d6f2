#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "covsw/errors.hpp"
#include "covsw/mesh.hpp"
#include "oracles/vtk_reader.hpp"

using namespace covsw;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

void check_invariants(const Mesh& m, double area) {
  const MeshCheck c = check_mesh(m, area);
  CHECK(c.area_sum_rel_error <= 1e-10);
  CHECK(c.max_closure <= 1e-12);
  CHECK(c.max_normal_asymmetry == 0.0);
  CHECK(c.min_area > 0.0);
  CHECK(c.min_stencil_neighbors >= 3);
  for (std::size_t k = 0; k < m.num_cells(); ++k) CHECK(m.stencil(k)[0] == k);
}

}  // namespace

TEST_CASE("rect mesh 2x2") {
  const Mesh m = generate_rect_mesh({0, 1, 0, 1}, 2, 2);
  CHECK(m.num_cells() == 4);
  CHECK(m.num_edges() == 12);
  std::size_t boundary = 0;
  for (const Edge& e : m.edges()) boundary += e.is_boundary();
  CHECK(boundary == 8);
  for (double a : m.areas()) CHECK(a == 0.25);
  CHECK(m.size() == Approx(std::sqrt(0.5)).epsilon(1e-15));
  check_invariants(m, 1.0);
  CHECK_THROWS_AS(generate_rect_mesh({0, 0, 0, 1}, 2, 2), MeshError);
  CHECK_THROWS_AS(generate_rect_mesh({0, 1, 0, 1}, 1, 2), MeshError);
}

TEST_CASE("rect mesh at the coarse S-shape size") {
  const Rect d{0, 2 * kPi, 0, 0.8};
  const auto [nx, ny] = rect_counts_for_size(d, 1.61e-2);
  CHECK(nx == 552);
  CHECK(ny == 71);
  const Mesh m = generate_rect_mesh(d, nx, ny);
  CHECK(m.size() <= 1.61e-2);
  CHECK(m.size() == Approx(1.61e-2).epsilon(0.01));
  check_invariants(m, d.area());
}

TEST_CASE("halving the size quadruples the cell count") {
  const Mesh a = generate_rect_mesh({0, 1, 0, 1}, 10, 6);
  const Mesh b = generate_rect_mesh({0, 1, 0, 1}, 20, 12);
  CHECK(b.num_cells() == 4 * a.num_cells());
  CHECK(b.size() == Approx(a.size() / 2).epsilon(1e-14));
}

TEST_CASE("interior normals are opposite across an edge") {
  const Mesh m = generate_voronoi_mesh({0, 1, 0, 1}, 60, 2, 3);
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edges()[e];
    if (edge.is_boundary()) continue;
    const Point nl = m.outward_normal(e, edge.left);
    const Point nr = m.outward_normal(e, edge.right);
    CHECK(nl.x == -nr.x);
    CHECK(nl.y == -nr.y);
  }
}

TEST_CASE("voronoi meshes") {
  SUBCASE("four quarter-centre seeds") {
    const Mesh m = voronoi_mesh_from_seeds({0, 1, 0, 1},
                                           {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}}, 0);
    CHECK(m.num_cells() == 4);
    for (double a : m.areas()) CHECK(a == Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("500 seeds, 5 Lloyd sweeps") {
    const Mesh m = generate_voronoi_mesh({0, 1, 0, 1}, 500, 5, 7);
    CHECK(m.num_cells() == 500);
    check_invariants(m, 1.0);
  }
  SUBCASE("too few seeds") { CHECK_THROWS_AS(generate_voronoi_mesh({0, 1, 0, 1}, 3, 0, 1), MeshError); }
}

TEST_CASE("map_mesh") {
  const Rect d{0, 2 * kPi, 0, 0.8};
  const Mesh base = generate_rect_mesh(d, 40, 8);
  IdentityChart id(d);
  const Mesh same = map_mesh(base, id);
  CHECK(same.num_cells() == base.num_cells());
  for (std::size_t v = 0; v < base.num_vertices(); ++v) {
    CHECK(same.vertices()[v].x == base.vertices()[v].x);
    CHECK(same.vertices()[v].y == base.vertices()[v].y);
  }
  for (std::size_t k = 0; k < base.num_cells(); ++k) CHECK(same.area(k) == Approx(base.area(k)).epsilon(1e-14));

  SShapeChart s;
  const Point a = s.map({kPi / 2, 0.4});
  CHECK(a.x == Approx(1.5708).epsilon(1e-4));
  CHECK(a.y == Approx(1.4).epsilon(1e-12));
  const Point o = s.map({0, 0});
  CHECK(std::abs(o.x) < 1e-15);
  CHECK(std::abs(o.y) < 1e-15);

  const Mesh mapped = map_mesh(base, s);
  CHECK(mapped.num_cells() == base.num_cells());
  for (std::size_t k = 0; k < base.num_cells(); ++k) {
    // cell k of the image is the image of cell k
    const auto lb = base.cell_vertices(k);
    const auto lm = mapped.cell_vertices(k);
    REQUIRE(lb.size() == lm.size());
    for (std::size_t i = 0; i < lb.size(); ++i) {
      const Point img = s.map(base.vertices()[lb[i]]);
      CHECK(mapped.vertices()[lm[i]].x == img.x);
      CHECK(mapped.vertices()[lm[i]].y == img.y);
    }
  }
  const MeshCheck c = check_mesh(mapped, mapped.total_area());
  CHECK(c.max_closure <= 1e-12);
  CHECK(c.min_area > 0.0);
}

TEST_CASE("vtk export parses back") {
  const Mesh m = generate_voronoi_mesh({0, 1, 0, 1}, 30, 1, 2);
  std::vector<VtkField> cells{{"h", 1, std::vector<double>(m.num_cells(), 1.5)}};
  std::vector<double> xy;
  for (Point p : m.vertices()) {
    xy.push_back(p.x);
    xy.push_back(p.y);
  }
  std::vector<VtkField> points{{"cartesian", 2, xy}};
  std::stringstream ss;
  write_vtk(ss, m, cells, points);
  const oracle::VtkGrid g = oracle::read_vtk(ss);
  CHECK(g.cells.size() == m.num_cells());
  CHECK(g.points.size() == 3 * m.num_vertices());
  CHECK(g.cell_data.at("h").size() == m.num_cells());
  CHECK(g.point_data.at("cartesian")[3] == m.vertices()[1].x);
  for (int t : g.cell_types) CHECK(t == 7);
  for (std::size_t k = 0; k < m.num_cells(); ++k) CHECK(g.cells[k].size() == m.cell_vertices(k).size());
}
