#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covsw/geometry.hpp"

namespace covsw {

inline constexpr std::size_t kBoundary = std::numeric_limits<std::size_t>::max();

struct Edge {
  std::size_t left = 0;
  std::size_t right = kBoundary;  // kBoundary marks a wall
  std::size_t v0 = 0;             // v0 -> v1 runs counterclockwise around `left`
  std::size_t v1 = 0;
  Point midpoint;
  double length = 0.0;
  Point normal;  // unit, outward from `left`

  bool is_boundary() const { return right == kBoundary; }
};

/// Logical nx x ny structure of a mesh built by generate_rect_mesh (kept by map_mesh).
/// Cell (i, j) has index j * nx + i.
struct GridInfo {
  Rect domain;
  std::size_t nx = 0;
  std::size_t ny = 0;
};

/// Polygonal tessellation. Immutable after construction.
class Mesh {
 public:
  /// Builds connectivity, edges, stencils and cell geometry from counterclockwise
  /// vertex loops. Throws MeshError on a non-positive cell area.
  static Mesh from_polygons(std::vector<Point> vertices,
                            const std::vector<std::vector<std::size_t>>& loops);

  std::size_t num_cells() const { return areas_.size(); }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Point>& centroids() const { return centroids_; }
  const std::vector<double>& areas() const { return areas_; }

  std::span<const std::size_t> cell_vertices(std::size_t k) const;
  /// Edge indices of cell k in loop order.
  std::span<const std::size_t> cell_edges(std::size_t k) const;
  /// Cells sharing at least one vertex with k; k itself comes first. Cells with fewer
  /// than three such neighbours also get the neighbours of their neighbours.
  std::span<const std::size_t> stencil(std::size_t k) const;

  Point centroid(std::size_t k) const { return centroids_[k]; }
  double area(std::size_t k) const { return areas_[k]; }
  double perimeter(std::size_t k) const { return perimeters_[k]; }
  double diameter(std::size_t k) const;
  /// Outward unit normal of edge e as seen from cell k.
  Point outward_normal(std::size_t e, std::size_t k) const {
    const Edge& edge = edges_[e];
    return edge.left == k ? edge.normal : -1.0 * edge.normal;
  }

  /// Max cell diameter.
  double size() const { return size_; }
  double total_area() const;

  const std::optional<GridInfo>& grid() const { return grid_; }
  const std::string& kind() const { return kind_; }

 private:
  friend Mesh generate_rect_mesh(Rect, std::size_t, std::size_t);
  friend Mesh map_mesh(const Mesh&, const Chart&);
  friend Mesh voronoi_mesh_from_seeds(Rect, std::vector<Point>, std::size_t);

  std::vector<Point> vertices_;
  std::vector<std::size_t> loop_offsets_;
  std::vector<std::size_t> loop_vertices_;
  std::vector<std::size_t> cell_edges_;  // shares loop_offsets_
  std::vector<Edge> edges_;
  std::vector<Point> centroids_;
  std::vector<double> areas_;
  std::vector<double> perimeters_;
  std::vector<std::size_t> stencil_offsets_;
  std::vector<std::size_t> stencil_cells_;
  double size_ = 0.0;
  std::optional<GridInfo> grid_;
  std::string kind_ = "polygonal";
};

/// nx x ny axis-aligned quads. Throws MeshError for degenerate domains or counts < 2.
Mesh generate_rect_mesh(Rect domain, std::size_t nx, std::size_t ny);

/// Smallest nx, ny (each >= 2) whose quads are square-ish with diagonal <= target.
std::pair<std::size_t, std::size_t> rect_counts_for_size(Rect domain, double target_size);

/// Clipped Voronoi cells of n_seeds uniform random seeds after lloyd_iters
/// centroidal relaxation sweeps.
Mesh generate_voronoi_mesh(Rect domain, std::size_t n_seeds, std::size_t lloyd_iters,
                           std::uint64_t seed = 1);
Mesh voronoi_mesh_from_seeds(Rect domain, std::vector<Point> seeds, std::size_t lloyd_iters);

/// Replaces every vertex by its chart image; cells keep their indices.
/// Throws MeshError when the image is folded.
Mesh map_mesh(const Mesh& mesh, const Chart& chart);

struct MeshCheck {
  double area_sum_rel_error = 0.0;
  double max_closure = 0.0;           // max_k |sum_e |e| n_e|
  double max_normal_asymmetry = 0.0;  // always 0 with shared edge storage
  double min_area = 0.0;
  std::size_t min_stencil_neighbors = 0;
};

MeshCheck check_mesh(const Mesh& mesh, double domain_area);

/// Named per-cell or per-point data; components is 1 (scalar) or 2/3 (vector).
struct VtkField {
  std::string name;
  int components = 1;
  std::vector<double> values;
};

/// Legacy ASCII VTK unstructured grid with POLYGON cells.
void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const VtkField> cell_data,
               std::span<const VtkField> point_data, const std::string& title = "covsw");

}  // namespace covsw
