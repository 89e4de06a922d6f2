#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "covsw/config.hpp"
#include "covsw/errors.hpp"
#include "covsw/harness.hpp"
#include "covsw/mesh.hpp"

namespace {

using covsw::RunConfig;

// Flag values are kept as text and applied through the config parser, so the
// flags and the INI file share one validation path.
struct Overrides {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> settings;
};

void add_setting(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key,
                 const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.settings.emplace_back(key, v); }, help);
}

void add_run_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
  add_setting(app, o, "--scenario", "scenario", "scenario name");
  add_setting(app, o, "--mesh", "mesh", "rect | voronoi");
  add_setting(app, o, "--mesh-size", "mesh_size", "target mesh size");
  add_setting(app, o, "--nx", "nx", "cells along x1 (rect)");
  add_setting(app, o, "--ny", "ny", "cells along x2 (rect)");
  add_setting(app, o, "--cfl", "cfl", "CFL number in (0, 1)");
  add_setting(app, o, "--limiter", "limiter", "on | off");
  add_setting(app, o, "--first-order", "first_order", "on | off");
  add_setting(app, o, "--gauss", "gauss", "Gauss points on the path integral");
  add_setting(app, o, "--threads", "threads", "solver threads");
  add_setting(app, o, "--out", "out", "output directory");
  add_setting(app, o, "--seed", "seed", "Voronoi seed");
  add_setting(app, o, "--h-min", "h_min", "depth floor, or off");
  add_setting(app, o, "--final-time", "final_time", "end time");
  add_setting(app, o, "--output-interval", "output_interval", "snapshot cadence, 0 for final only");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : covsw::load_config(o.config_path);
  for (const auto& [key, value] : o.settings) covsw::set_config_value(c, key, value);
  covsw::validate(c);
  return c;
}

std::vector<double> parse_sizes(const std::string& text) {
  std::vector<double> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) sizes.push_back(covsw::parse_double(item));
  return sizes;
}

void print_summary(const covsw::RunResult& r) {
  const auto& d = r.diagnostics;
  std::cout << "scenario " << r.scenario.name << ", " << r.mesh.num_cells() << " cells, "
            << d.steps << " steps to t = " << d.times.back() << " in " << r.seconds << " s\n";
  std::cout << "mass drift " << (d.mass.back() - d.mass.front()) / d.mass.front()
            << ", min h " << d.min_h.back() << ", max h " << d.max_h.back() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariant shallow water solver on polygonal meshes"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run = app.add_subcommand("run", "run one scenario and write VTK, CSV and INI outputs");
  add_run_flags(run, run_o);

  Overrides cmp_o;
  std::string cmp_sizes = "1.61e-2,8.05e-3";
  std::string cmp_chart = "s_shape";
  std::string cmp_report;
  auto* compare = app.add_subcommand("compare", "covariant vs classical on the mapped mesh");
  add_run_flags(compare, cmp_o);
  compare->add_option("--sizes", cmp_sizes, "comma separated mesh sizes, decreasing");
  compare->add_option("--chart", cmp_chart, "identity | s_shape | polar");
  compare->add_option("--report", cmp_report, "write the report CSV here");

  Overrides conv_o;
  std::string conv_sizes = "0.02,0.01,0.005,0.0025";
  std::string conv_table;
  auto* convergence = app.add_subcommand("convergence", "self-convergence on nested rect meshes");
  add_run_flags(convergence, conv_o);
  convergence->add_option("--sizes", conv_sizes, "comma separated sizes, each half the previous");
  convergence->add_option("--table", conv_table, "write the table CSV here");

  std::size_t samples = 10000;
  std::uint64_t eig_seed = 1;
  double eig_g = 9.81;
  auto* eigen = app.add_subcommand("eigencheck", "hyperbolicity audit on random states");
  eigen->add_option("--samples", samples, "number of random states");
  eigen->add_option("--seed", eig_seed, "random seed");
  eigen->add_option("--g", eig_g, "gravity");

  Overrides mesh_o;
  std::string mesh_vtk;
  auto* mesh_info = app.add_subcommand("mesh-info", "build the mesh of a config and print statistics");
  add_run_flags(mesh_info, mesh_o);
  mesh_info->add_option("--vtk", mesh_vtk, "also write the mesh as VTK");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const covsw::RunResult r = covsw::run_config(build_config(run_o), true);
      print_summary(r);
    } else if (compare->parsed()) {
      const RunConfig c = build_config(cmp_o);
      const auto report = covsw::compare_formulations(
          parse_sizes(cmp_sizes), covsw::chart_kind_from_string(cmp_chart), c);
      covsw::write_report(std::cout, report);
      if (!cmp_report.empty()) {
        std::ofstream os(cmp_report);
        covsw::write_report(os, report);
      }
    } else if (convergence->parsed()) {
      RunConfig c = build_config(conv_o);
      bool scenario_set = false;
      for (const auto& [key, value] : conv_o.settings) scenario_set |= key == "scenario";
      if (!scenario_set && conv_o.config_path.empty()) c.scenario = "smooth_bump";
      const auto table = covsw::self_convergence(c, parse_sizes(conv_sizes));
      covsw::write_table(std::cout, table);
      if (!conv_table.empty()) {
        std::ofstream os(conv_table);
        covsw::write_table(os, table);
      }
    } else if (eigen->parsed()) {
      const auto audit = covsw::eigen_audit(samples, eig_seed, eig_g);
      std::cout << "samples " << audit.samples << "\nmax_imag_rel " << audit.max_imag_rel
                << "\nmax_speed_ratio " << audit.max_speed_ratio << "\nmax_jacobian_error "
                << audit.max_jacobian_error << '\n'
                << (audit.passed() ? "PASS" : "FAIL") << '\n';
      return audit.passed() ? 0 : 1;
    } else if (mesh_info->parsed()) {
      const RunConfig c = covsw::resolved(build_config(mesh_o));
      const covsw::Scenario s = covsw::resolve_scenario(c);
      const covsw::Mesh mesh = covsw::scenario_mesh(s, covsw::build_base_mesh(c, s));
      const auto check = covsw::check_mesh(mesh, mesh.total_area());
      std::cout << "kind " << mesh.kind() << "\ncells " << mesh.num_cells() << "\nedges "
                << mesh.num_edges() << "\nvertices " << mesh.num_vertices() << "\nsize "
                << mesh.size() << "\ntotal_area " << mesh.total_area() << "\nmin_area "
                << check.min_area << "\nmax_closure " << check.max_closure
                << "\nmin_stencil_neighbors " << check.min_stencil_neighbors << '\n';
      if (!mesh_vtk.empty()) {
        std::ofstream os(mesh_vtk);
        covsw::write_vtk(os, mesh, {}, {}, "mesh");
      }
    }
  } catch (const covsw::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return 3;
  } catch (const covsw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
