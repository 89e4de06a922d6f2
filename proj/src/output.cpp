#include "covsw/output.hpp"

#include <fstream>
#include <iomanip>

#include "covsw/errors.hpp"

namespace covsw {

namespace {

std::ofstream open(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  return os;
}

}  // namespace

void write_snapshot_vtk(const std::string& path, const Mesh& mesh, const FieldSnapshot& snapshot,
                        const Scenario& scenario) {
  const auto chart = scenario.make_chart();
  const std::size_t n = mesh.num_cells();
  VtkField h{"h", 1, {}};
  VtkField u{"velocity", 2, {}};
  VtkField uc{"velocity_cartesian", 2, {}};
  VtkField b{"b", 1, {}};
  VtkField g11{"g11", 1, {}};
  VtkField g12{"g12", 1, {}};
  VtkField g22{"g22", 1, {}};
  for (std::size_t k = 0; k < n; ++k) {
    const State q = snapshot.state(k);
    h.values.push_back(q.h());
    u.values.push_back(q.u1());
    u.values.push_back(q.u2());
    const Jacobian2 j = chart->jacobian(mesh.centroid(k));
    uc.values.push_back(j.a11 * q.u1() + j.a12 * q.u2());
    uc.values.push_back(j.a21 * q.u1() + j.a22 * q.u2());
    b.values.push_back(q.b());
    g11.values.push_back(q.q[kG11]);
    g12.values.push_back(q.q[kG12]);
    g22.values.push_back(q.q[kG22]);
  }
  VtkField cart{"cartesian", 2, {}};
  for (Point p : mesh.vertices()) {
    const Point c = chart->map(p);
    cart.values.push_back(c.x);
    cart.values.push_back(c.y);
  }
  const VtkField cells[] = {h, u, uc, b, g11, g12, g22};
  const VtkField points[] = {cart};
  auto os = open(path);
  write_vtk(os, mesh, cells, points, scenario.name + " t=" + format_double(snapshot.time));
}

void write_diagnostics_csv(const std::string& path, const RunDiagnostics& diag) {
  auto os = open(path);
  os << std::setprecision(17);
  os << "step,time,dt,mass,min_h,max_h\n";
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    os << i << ',' << diag.times[i] << ',' << (i == 0 ? 0.0 : diag.dts[i - 1]) << ','
       << diag.mass[i] << ',' << diag.min_h[i] << ',' << diag.max_h[i] << '\n';
  }
}

void write_metadata(const std::string& path, const RunConfig& resolved_config, const Mesh& mesh,
                    const RunDiagnostics* diag) {
  auto os = open(path);
  os << to_ini(resolved_config);
  os << "\n[mesh]\n";
  os << "kind = " << mesh.kind() << '\n';
  os << "cells = " << mesh.num_cells() << '\n';
  os << "edges = " << mesh.num_edges() << '\n';
  os << "vertices = " << mesh.num_vertices() << '\n';
  os << "size = " << format_double(mesh.size()) << "  # max cell diameter\n";
  if (const auto& grid = mesh.grid()) {
    os << "grid_nx = " << grid->nx << '\n';
    os << "grid_ny = " << grid->ny << '\n';
  }
  os << "total_area = " << format_double(mesh.total_area()) << '\n';
  if (diag) {
    os << "\n[diagnostics]\n";
    os << "steps = " << diag->steps << '\n';
    os << "final_time = " << format_double(diag->times.back()) << '\n';
    os << "initial_mass = " << format_double(diag->mass.front()) << '\n';
    os << "final_mass = " << format_double(diag->mass.back()) << '\n';
    os << "min_h = " << format_double(diag->min_h.back()) << '\n';
    os << "max_h = " << format_double(diag->max_h.back()) << '\n';
    os << "fallbacks = " << diag->fallbacks << '\n';
    os << "floor_hits = " << diag->floor_hits << '\n';
  }
}

}  // namespace covsw
