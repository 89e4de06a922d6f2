#include "covsw/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "covsw/errors.hpp"

namespace covsw {

Mesh Mesh::from_polygons(std::vector<Point> vertices,
                         const std::vector<std::vector<std::size_t>>& loops) {
  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  const std::size_t n_cells = loops.size();
  const std::size_t n_vertices = mesh.vertices_.size();

  mesh.loop_offsets_.reserve(n_cells + 1);
  mesh.loop_offsets_.push_back(0);
  for (const auto& loop : loops) {
    if (loop.size() < 3) throw MeshError("cell with fewer than 3 vertices");
    for (std::size_t v : loop) {
      if (v >= n_vertices) throw MeshError("cell references a missing vertex");
      mesh.loop_vertices_.push_back(v);
    }
    mesh.loop_offsets_.push_back(mesh.loop_vertices_.size());
  }

  // Cell geometry.
  mesh.areas_.resize(n_cells);
  mesh.centroids_.resize(n_cells);
  mesh.perimeters_.resize(n_cells);
  for (std::size_t k = 0; k < n_cells; ++k) {
    const auto loop = mesh.cell_vertices(k);
    // Shift to the first vertex to keep the shoelace sums well conditioned.
    const Point origin = mesh.vertices_[loop[0]];
    double area2 = 0.0;
    Point c{0.0, 0.0};
    double perimeter = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Point a = mesh.vertices_[loop[i]] - origin;
      const Point b = mesh.vertices_[loop[(i + 1) % loop.size()]] - origin;
      const double w = cross(a, b);
      area2 += w;
      c = c + w * (a + b);
      perimeter += norm(b - a);
    }
    if (!(area2 > 0.0)) {
      std::ostringstream os;
      os << "cell " << k << " has non-positive area " << 0.5 * area2;
      throw MeshError(os.str());
    }
    mesh.areas_[k] = 0.5 * area2;
    mesh.centroids_[k] = origin + (1.0 / (3.0 * area2)) * c;
    mesh.perimeters_[k] = perimeter;
  }

  // Edges: the first cell to traverse a vertex pair owns it as `left`.
  std::unordered_map<std::uint64_t, std::size_t> edge_of;
  edge_of.reserve(mesh.loop_vertices_.size());
  mesh.cell_edges_.resize(mesh.loop_vertices_.size());
  for (std::size_t k = 0; k < n_cells; ++k) {
    const std::size_t begin = mesh.loop_offsets_[k];
    const std::size_t count = mesh.loop_offsets_[k + 1] - begin;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t a = mesh.loop_vertices_[begin + i];
      const std::size_t b = mesh.loop_vertices_[begin + (i + 1) % count];
      const std::uint64_t key = static_cast<std::uint64_t>(std::min(a, b)) * n_vertices + std::max(a, b);
      auto [it, inserted] = edge_of.try_emplace(key, mesh.edges_.size());
      if (inserted) {
        Edge e;
        e.left = k;
        e.v0 = a;
        e.v1 = b;
        const Point pa = mesh.vertices_[a];
        const Point pb = mesh.vertices_[b];
        e.midpoint = 0.5 * (pa + pb);
        const Point t = pb - pa;
        e.length = norm(t);
        if (!(e.length > 0.0)) throw MeshError("zero-length edge");
        e.normal = {t.y / e.length, -t.x / e.length};
        mesh.edges_.push_back(e);
      } else {
        Edge& e = mesh.edges_[it->second];
        if (e.right != kBoundary || e.v0 != b || e.v1 != a) {
          std::ostringstream os;
          os << "non-manifold or inconsistently oriented edge (" << a << ", " << b << ") in cell "
             << k;
          throw MeshError(os.str());
        }
        e.right = k;
      }
      mesh.cell_edges_[begin + i] = it->second;
    }
  }

  // Vertex stencils.
  std::vector<std::vector<std::size_t>> cells_of_vertex(n_vertices);
  for (std::size_t k = 0; k < n_cells; ++k) {
    for (std::size_t v : mesh.cell_vertices(k)) cells_of_vertex[v].push_back(k);
  }
  std::vector<std::vector<std::size_t>> ring(n_cells);
  for (std::size_t k = 0; k < n_cells; ++k) {
    auto& r = ring[k];
    for (std::size_t v : mesh.cell_vertices(k)) {
      for (std::size_t other : cells_of_vertex[v]) {
        if (other != k) r.push_back(other);
      }
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  mesh.stencil_offsets_.reserve(n_cells + 1);
  mesh.stencil_offsets_.push_back(0);
  std::vector<std::size_t> scratch;
  for (std::size_t k = 0; k < n_cells; ++k) {
    scratch = ring[k];
    if (scratch.size() < 3) {
      // Too few vertex neighbours (clipped corner cells): widen to the second ring.
      for (std::size_t j : ring[k]) {
        for (std::size_t other : ring[j]) {
          if (other != k) scratch.push_back(other);
        }
      }
      std::sort(scratch.begin(), scratch.end());
      scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    }
    mesh.stencil_cells_.push_back(k);
    mesh.stencil_cells_.insert(mesh.stencil_cells_.end(), scratch.begin(), scratch.end());
    mesh.stencil_offsets_.push_back(mesh.stencil_cells_.size());
  }

  for (std::size_t k = 0; k < n_cells; ++k) mesh.size_ = std::max(mesh.size_, mesh.diameter(k));
  return mesh;
}

std::span<const std::size_t> Mesh::cell_vertices(std::size_t k) const {
  return {loop_vertices_.data() + loop_offsets_[k], loop_offsets_[k + 1] - loop_offsets_[k]};
}

std::span<const std::size_t> Mesh::cell_edges(std::size_t k) const {
  return {cell_edges_.data() + loop_offsets_[k], loop_offsets_[k + 1] - loop_offsets_[k]};
}

std::span<const std::size_t> Mesh::stencil(std::size_t k) const {
  return {stencil_cells_.data() + stencil_offsets_[k],
          stencil_offsets_[k + 1] - stencil_offsets_[k]};
}

double Mesh::diameter(std::size_t k) const {
  const auto loop = cell_vertices(k);
  double d = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    for (std::size_t j = i + 1; j < loop.size(); ++j) {
      d = std::max(d, norm(vertices_[loop[i]] - vertices_[loop[j]]));
    }
  }
  return d;
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

// ---------------------------------------------------------------------------

Mesh generate_rect_mesh(Rect domain, std::size_t nx, std::size_t ny) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
    throw MeshError("degenerate domain");
  }
  if (nx < 2 || ny < 2) throw MeshError("rect mesh needs nx, ny >= 2");
  std::vector<Point> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    const double y = j == ny ? domain.y1 : domain.y0 + domain.height() * j / ny;
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = i == nx ? domain.x1 : domain.x0 + domain.width() * i / nx;
      vertices.push_back({x, y});
    }
  }
  std::vector<std::vector<std::size_t>> loops;
  loops.reserve(nx * ny);
  const std::size_t stride = nx + 1;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t v = j * stride + i;
      loops.push_back({v, v + 1, v + 1 + stride, v + stride});
    }
  }
  Mesh mesh = Mesh::from_polygons(std::move(vertices), loops);
  mesh.grid_ = GridInfo{domain, nx, ny};
  mesh.kind_ = "rect";
  return mesh;
}

std::pair<std::size_t, std::size_t> rect_counts_for_size(Rect domain, double target_size) {
  if (!(target_size > 0.0)) throw MeshError("mesh size must be positive");
  const double side = target_size / std::sqrt(2.0);
  const auto count = [&](double length) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(length / side - 1e-9)));
  };
  return {count(domain.width()), count(domain.height())};
}

Mesh map_mesh(const Mesh& mesh, const Chart& chart) {
  const Rect dom = chart.domain();
  std::vector<Point> mapped;
  mapped.reserve(mesh.num_vertices());
  for (Point v : mesh.vertices()) {
    if (!dom.contains(v, 1e-9)) throw MeshError("map_mesh: vertex outside chart domain");
    mapped.push_back(chart.map(v));
  }
  std::vector<std::vector<std::size_t>> loops(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const auto loop = mesh.cell_vertices(k);
    loops[k].assign(loop.begin(), loop.end());
  }
  Mesh out;
  try {
    out = Mesh::from_polygons(std::move(mapped), loops);
  } catch (const MeshError& e) {
    throw MeshError(std::string("chart fold: ") + e.what());
  }
  out.grid_ = mesh.grid_;
  out.kind_ = "mapped " + mesh.kind_;
  return out;
}

MeshCheck check_mesh(const Mesh& mesh, double domain_area) {
  MeshCheck c;
  c.area_sum_rel_error = std::abs(mesh.total_area() - domain_area) / domain_area;
  c.min_area = std::numeric_limits<double>::infinity();
  c.min_stencil_neighbors = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    Point sum{0.0, 0.0};
    for (std::size_t e : mesh.cell_edges(k)) {
      sum = sum + mesh.edges()[e].length * mesh.outward_normal(e, k);
    }
    c.max_closure = std::max(c.max_closure, norm(sum));
    c.min_area = std::min(c.min_area, mesh.area(k));
    c.min_stencil_neighbors = std::min(c.min_stencil_neighbors, mesh.stencil(k).size() - 1);
  }
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges()[e];
    if (edge.is_boundary()) continue;
    const Point nl = mesh.outward_normal(e, edge.left);
    const Point nr = mesh.outward_normal(e, edge.right);
    c.max_normal_asymmetry = std::max(c.max_normal_asymmetry, norm(nl + nr));
  }
  return c;
}

}  // namespace covsw
