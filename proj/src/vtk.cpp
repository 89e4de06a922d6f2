#include <iomanip>
#include <ostream>

#include "covsw/errors.hpp"
#include "covsw/mesh.hpp"

namespace covsw {

namespace {

constexpr int kVtkPolygon = 7;

void write_field(std::ostream& os, const VtkField& f, std::size_t count) {
  if (f.values.size() != count * static_cast<std::size_t>(f.components)) {
    throw Error("vtk field '" + f.name + "' has the wrong number of values");
  }
  if (f.components == 1) {
    os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) os << v << '\n';
    return;
  }
  os << "VECTORS " << f.name << " double\n";
  for (std::size_t i = 0; i < count; ++i) {
    const double* v = f.values.data() + i * f.components;
    os << v[0] << ' ' << v[1] << ' ' << (f.components > 2 ? v[2] : 0.0) << '\n';
  }
}

}  // namespace

void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const VtkField> cell_data,
               std::span<const VtkField> point_data, const std::string& title) {
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (Point p : mesh.vertices()) os << p.x << ' ' << p.y << " 0\n";

  std::size_t total = 0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) total += mesh.cell_vertices(k).size() + 1;
  os << "CELLS " << mesh.num_cells() << ' ' << total << '\n';
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const auto loop = mesh.cell_vertices(k);
    os << loop.size();
    for (std::size_t v : loop) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) os << kVtkPolygon << '\n';

  if (!cell_data.empty()) {
    os << "CELL_DATA " << mesh.num_cells() << '\n';
    for (const VtkField& f : cell_data) write_field(os, f, mesh.num_cells());
  }
  if (!point_data.empty()) {
    os << "POINT_DATA " << mesh.num_vertices() << '\n';
    for (const VtkField& f : point_data) write_field(os, f, mesh.num_vertices());
  }
}

}  // namespace covsw
