// Clipped Voronoi tessellation by half-plane intersection, with Lloyd relaxation.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "covsw/errors.hpp"
#include "covsw/mesh.hpp"

namespace covsw {

namespace {

using Polygon = std::vector<Point>;

// Keeps the part of `poly` where dot(x - mid, dir) <= 0.
Polygon clip(const Polygon& poly, Point mid, Point dir) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = poly[i];
    const Point q = poly[(i + 1) % n];
    const double dp = dot(p - mid, dir);
    const double dq = dot(q - mid, dir);
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

Polygon dedupe(const Polygon& poly, double tol) {
  Polygon out;
  for (Point p : poly) {
    if (out.empty() || norm(p - out.back()) > tol) out.push_back(p);
  }
  while (out.size() > 1 && norm(out.front() - out.back()) <= tol) out.pop_back();
  return out;
}

Point polygon_centroid(const Polygon& poly) {
  const Point o = poly[0];
  double a2 = 0.0;
  Point c{0.0, 0.0};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i] - o;
    const Point b = poly[(i + 1) % poly.size()] - o;
    const double w = cross(a, b);
    a2 += w;
    c = c + w * (a + b);
  }
  return o + (1.0 / (3.0 * a2)) * c;
}

std::string seed_dump(const std::vector<Point>& seeds) {
  std::ostringstream os;
  os.precision(17);
  os << "seeds:";
  for (Point p : seeds) os << " (" << p.x << ", " << p.y << ")";
  return os.str();
}

class SeedGrid {
 public:
  SeedGrid(Rect domain, const std::vector<Point>& seeds) : domain_(domain), seeds_(seeds) {
    const double n = static_cast<double>(seeds.size());
    cell_ = std::sqrt(domain.area() / n);
    nx_ = std::max<long>(1, static_cast<long>(std::ceil(domain.width() / cell_)));
    ny_ = std::max<long>(1, static_cast<long>(std::ceil(domain.height() / cell_)));
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      buckets_[bucket_index(ix(seeds[i]), iy(seeds[i]))].push_back(i);
    }
  }

  double cell() const { return cell_; }
  long max_ring() const { return std::max(nx_, ny_); }
  long ix(Point p) const {
    return std::clamp<long>(static_cast<long>((p.x - domain_.x0) / cell_), 0, nx_ - 1);
  }
  long iy(Point p) const {
    return std::clamp<long>(static_cast<long>((p.y - domain_.y0) / cell_), 0, ny_ - 1);
  }

  // Seeds in buckets at Chebyshev distance exactly `ring` from (cx, cy).
  void ring(long cx, long cy, long ring, std::vector<std::size_t>& out) const {
    for (long j = cy - ring; j <= cy + ring; ++j) {
      if (j < 0 || j >= ny_) continue;
      for (long i = cx - ring; i <= cx + ring; ++i) {
        if (i < 0 || i >= nx_) continue;
        if (std::max(std::abs(i - cx), std::abs(j - cy)) != ring) continue;
        const auto& b = buckets_[bucket_index(i, j)];
        out.insert(out.end(), b.begin(), b.end());
      }
    }
  }

 private:
  std::size_t bucket_index(long i, long j) const { return static_cast<std::size_t>(j * nx_ + i); }

  Rect domain_;
  const std::vector<Point>& seeds_;
  double cell_ = 1.0;
  long nx_ = 1;
  long ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

std::vector<Polygon> voronoi_cells(Rect domain, const std::vector<Point>& seeds, double tol) {
  const SeedGrid grid(domain, seeds);
  const Polygon box{{domain.x0, domain.y0}, {domain.x1, domain.y0}, {domain.x1, domain.y1},
                    {domain.x0, domain.y1}};
  std::vector<Polygon> cells(seeds.size());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Point s = seeds[i];
    Polygon poly = box;
    const long cx = grid.ix(s);
    const long cy = grid.iy(s);
    for (long r = 0; r <= grid.max_ring(); ++r) {
      candidates.clear();
      grid.ring(cx, cy, r, candidates);
      std::sort(candidates.begin(), candidates.end());
      for (std::size_t j : candidates) {
        if (j == i) continue;
        const Point dir = seeds[j] - s;
        if (norm(dir) <= tol) throw MeshError("coincident Voronoi seeds; " + seed_dump(seeds));
        poly = clip(poly, 0.5 * (s + seeds[j]), dir);
      }
      // Seeds beyond ring r are at least r * cell away; they cannot cut the cell
      // once that distance exceeds twice its radius.
      double radius = 0.0;
      for (Point p : poly) radius = std::max(radius, norm(p - s));
      if (2.0 * radius <= static_cast<double>(r) * grid.cell()) break;
    }
    poly = dedupe(poly, tol);
    if (poly.size() < 3) throw MeshError("degenerate Voronoi cell; " + seed_dump(seeds));
    cells[i] = std::move(poly);
  }
  return cells;
}

struct VertexPool {
  explicit VertexPool(double tol) : tol(tol) {}

  std::size_t insert(Point p) {
    const long bx = static_cast<long>(std::floor(p.x / tol));
    const long by = static_cast<long>(std::floor(p.y / tol));
    for (long j = by - 1; j <= by + 1; ++j) {
      for (long i = bx - 1; i <= bx + 1; ++i) {
        auto it = buckets.find(key(i, j));
        if (it == buckets.end()) continue;
        for (std::size_t v : it->second) {
          if (norm(points[v] - p) <= tol) return v;
        }
      }
    }
    points.push_back(p);
    buckets[key(bx, by)].push_back(points.size() - 1);
    return points.size() - 1;
  }

  static std::uint64_t key(long i, long j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint32_t>(j);
  }

  double tol;
  std::vector<Point> points;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
};

bool on_boundary(Rect d, Point a, Point b, double tol) {
  const auto near = [tol](double u, double v) { return std::abs(u - v) <= tol; };
  return (near(a.x, d.x0) && near(b.x, d.x0)) || (near(a.x, d.x1) && near(b.x, d.x1)) ||
         (near(a.y, d.y0) && near(b.y, d.y0)) || (near(a.y, d.y1) && near(b.y, d.y1));
}

// Splits edges that carry another cell's vertex in their interior, so that every
// interior edge is shared by exactly two cells.
void repair_t_junctions(std::vector<std::vector<std::size_t>>& loops,
                        const std::vector<Point>& points, Rect domain, double tol) {
  std::unordered_map<std::uint64_t, int> uses;
  const std::uint64_t n = points.size();
  const auto ekey = [n](std::size_t a, std::size_t b) {
    return static_cast<std::uint64_t>(std::min(a, b)) * n + std::max(a, b);
  };
  for (const auto& loop : loops) {
    for (std::size_t i = 0; i < loop.size(); ++i) ++uses[ekey(loop[i], loop[(i + 1) % loop.size()])];
  }
  std::vector<std::vector<std::size_t>> cells_of(points.size());
  for (std::size_t k = 0; k < loops.size(); ++k) {
    for (std::size_t v : loops[k]) cells_of[v].push_back(k);
  }
  for (auto& loop : loops) {
    std::vector<std::size_t> fixed;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const std::size_t a = loop[i];
      const std::size_t b = loop[(i + 1) % loop.size()];
      fixed.push_back(a);
      if (uses[ekey(a, b)] == 2 || on_boundary(domain, points[a], points[b], tol)) continue;
      const Point pa = points[a];
      const Point t = points[b] - pa;
      const double len2 = dot(t, t);
      std::vector<std::pair<double, std::size_t>> inner;
      for (std::size_t c : cells_of[a]) {
        for (std::size_t v : loops[c]) {
          if (v == a || v == b) continue;
          const double s = dot(points[v] - pa, t) / len2;
          if (s <= 0.0 || s >= 1.0) continue;
          if (std::abs(cross(t, points[v] - pa)) / std::sqrt(len2) > tol) continue;
          inner.emplace_back(s, v);
        }
      }
      std::sort(inner.begin(), inner.end());
      inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
      for (const auto& [s, v] : inner) fixed.push_back(v);
    }
    loop = std::move(fixed);
  }
}

}  // namespace

Mesh voronoi_mesh_from_seeds(Rect domain, std::vector<Point> seeds, std::size_t lloyd_iters) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) throw MeshError("degenerate domain");
  if (seeds.size() < 4) throw MeshError("voronoi mesh needs at least 4 seeds");
  for (Point p : seeds) {
    if (!domain.contains(p, 0.0)) throw MeshError("seed outside domain; " + seed_dump(seeds));
  }
  const double scale = std::max(domain.width(), domain.height());
  const double tol = 1e-10 * scale;

  std::vector<Polygon> cells = voronoi_cells(domain, seeds, tol);
  for (std::size_t it = 0; it < lloyd_iters; ++it) {
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = polygon_centroid(cells[i]);
    cells = voronoi_cells(domain, seeds, tol);
  }

  VertexPool pool(tol);
  std::vector<std::vector<std::size_t>> loops(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (Point p : cells[k]) {
      const std::size_t v = pool.insert(p);
      if (loops[k].empty() || loops[k].back() != v) loops[k].push_back(v);
    }
    while (loops[k].size() > 1 && loops[k].front() == loops[k].back()) loops[k].pop_back();
    if (loops[k].size() < 3) throw MeshError("collapsed Voronoi cell; " + seed_dump(seeds));
  }
  repair_t_junctions(loops, pool.points, domain, 10.0 * tol);

  Mesh mesh;
  try {
    mesh = Mesh::from_polygons(std::move(pool.points), loops);
  } catch (const MeshError& e) {
    throw MeshError(std::string("voronoi generator failure: ") + e.what() + "; " +
                    seed_dump(seeds));
  }
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges()[e];
    if (edge.is_boundary() &&
        !on_boundary(domain, mesh.vertices()[edge.v0], mesh.vertices()[edge.v1], 10.0 * tol)) {
      throw MeshError("voronoi generator failure: unmatched interior edge; " + seed_dump(seeds));
    }
  }
  mesh.kind_ = "voronoi";
  return mesh;
}

Mesh generate_voronoi_mesh(Rect domain, std::size_t n_seeds, std::size_t lloyd_iters,
                           std::uint64_t seed) {
  if (n_seeds < 4) throw MeshError("voronoi mesh needs at least 4 seeds");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(domain.x0, domain.x1);
  std::uniform_real_distribution<double> uy(domain.y0, domain.y1);
  std::vector<Point> seeds(n_seeds);
  for (Point& p : seeds) p = {ux(rng), uy(rng)};
  return voronoi_mesh_from_seeds(domain, std::move(seeds), lloyd_iters);
}

}  // namespace covsw
