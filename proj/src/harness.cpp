#include "covsw/harness.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "covsw/errors.hpp"
#include "covsw/output.hpp"

namespace covsw {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string output_name(std::size_t index) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(4) << std::setfill('0') << index << ".vtk";
  return os.str();
}

}  // namespace

Mesh build_base_mesh(const RunConfig& c, const Scenario& s) {
  if (c.mesh == MeshKind::kVoronoi) {
    const double size = c.mesh_size.value_or(s.default_mesh_size);
    // Lloyd-relaxed cells are close to regular hexagons of area ~0.65 d^2.
    const auto n = static_cast<std::size_t>(std::ceil(s.domain.area() / (0.65 * size * size)));
    return generate_voronoi_mesh(s.domain, std::max<std::size_t>(n, 4), c.lloyd_iters, c.seed);
  }
  if (c.nx && c.ny) return generate_rect_mesh(s.domain, *c.nx, *c.ny);
  const auto [nx, ny] = rect_counts_for_size(s.domain, c.mesh_size.value_or(s.default_mesh_size));
  return generate_rect_mesh(s.domain, nx, ny);
}

RunResult run_scenario(const Scenario& scenario, const Mesh& base_mesh, const SolverConfig& config,
                       const StepObserver& observer) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r{scenario, scenario_mesh(scenario, base_mesh), {}, {}, {}, 0.0};
  r.initial = initial_snapshot(scenario, r.mesh);
  SolverConfig sc = config;
  sc.final_time = scenario.final_time;
  Solver solver(r.mesh, Model(scenario.g, scenario.formulation), sc);
  auto [final_state, diag] = solver.run(r.initial, observer);
  r.final = std::move(final_state);
  r.diagnostics = std::move(diag);
  r.seconds = seconds_since(t0);
  return r;
}

RunResult run_config(const RunConfig& config, bool write_outputs) {
  validate(config);
  const RunConfig rc = resolved(config);
  const Scenario scenario = resolve_scenario(rc);
  const Mesh base = build_base_mesh(rc, scenario);
  const SolverConfig sc = solver_config(rc, scenario);
  if (!write_outputs) return run_scenario(scenario, base, sc);

  namespace fs = std::filesystem;
  fs::create_directories(rc.out);
  const Mesh mesh = scenario_mesh(scenario, base);
  std::size_t index = 0;
  write_snapshot_vtk((fs::path(rc.out) / output_name(index++)).string(), mesh,
                     initial_snapshot(scenario, mesh), scenario);
  const StepObserver observer = [&](const FieldSnapshot& s, const RunDiagnostics&,
                                    const StepInfo& info) {
    if (info.output) {
      write_snapshot_vtk((fs::path(rc.out) / output_name(index++)).string(), mesh, s, scenario);
    }
  };
  RunResult r = run_scenario(scenario, base, sc, observer);
  write_diagnostics_csv((fs::path(rc.out) / "diagnostics.csv").string(), r.diagnostics);
  write_metadata((fs::path(rc.out) / "run.ini").string(), rc, r.mesh, &r.diagnostics);
  return r;
}

// ---------------------------------------------------------------------------

ComparisonReport compare_formulations(const std::vector<double>& sizes, ChartKind chart,
                                      const RunConfig& base) {
  if (sizes.size() < 2) throw ConfigError("compare needs at least two mesh sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (!(sizes[i] < sizes[i - 1])) throw ConfigError("mesh sizes must be strictly decreasing");
  }
  ComparisonReport report;
  report.chart = chart;
  const Scenario covariant = riemann_on_chart(chart);
  const Scenario reference = cartesian_reference_on_chart(chart);
  for (double size : sizes) {
    RunConfig rc = base;
    rc.mesh_size = size;
    rc.nx.reset();
    rc.ny.reset();
    const Mesh mesh = build_base_mesh(rc, covariant);
    const RunResult cov = run_scenario(covariant, mesh, solver_config(rc, covariant));
    const RunResult ref = run_scenario(reference, mesh, solver_config(rc, reference));

    ComparisonRow row;
    row.mesh_size = mesh.size();
    row.cells = mesh.num_cells();
    double norm_ref = 0.0;
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
      const double a = ref.mesh.area(k);
      const double d = std::abs(cov.final.states[k][kH] - ref.final.states[k][kH]);
      row.l1 += d * a;
      norm_ref += std::abs(ref.final.states[k][kH]) * a;
      row.linf = std::max(row.linf, d);
    }
    row.l1_rel = row.l1 / norm_ref;
    if (!report.rows.empty()) {
      const ComparisonRow& prev = report.rows.back();
      row.order = std::log(prev.l1_rel / row.l1_rel) / std::log(prev.mesh_size / row.mesh_size);
    }
    row.seconds_covariant = cov.seconds;
    row.seconds_reference = ref.seconds;
    report.rows.push_back(row);
  }
  return report;
}

void write_report(std::ostream& os, const ComparisonReport& report) {
  os << "# covariant vs classical-on-mapped-mesh, chart " << to_string(report.chart) << '\n';
  os << "mesh_size,cells,l1,l1_rel,linf,order,seconds_covariant,seconds_reference\n";
  os << std::setprecision(10);
  for (const auto& r : report.rows) {
    os << r.mesh_size << ',' << r.cells << ',' << r.l1 << ',' << r.l1_rel << ',' << r.linf << ','
       << r.order << ',' << r.seconds_covariant << ',' << r.seconds_reference << '\n';
  }
}

// ---------------------------------------------------------------------------

std::vector<double> restrict_to_coarse(const Mesh& coarse, const Mesh& fine,
                                       const std::vector<double>& fine_values) {
  const auto& gc = coarse.grid();
  const auto& gf = fine.grid();
  if (!gc || !gf || gf->nx != 2 * gc->nx || gf->ny != 2 * gc->ny) {
    throw ConfigError("restriction needs nested rect grids");
  }
  std::vector<double> out(coarse.num_cells(), 0.0);
  for (std::size_t j = 0; j < gc->ny; ++j) {
    for (std::size_t i = 0; i < gc->nx; ++i) {
      double sum = 0.0;
      double area = 0.0;
      for (std::size_t dj = 0; dj < 2; ++dj) {
        for (std::size_t di = 0; di < 2; ++di) {
          const std::size_t f = (2 * j + dj) * gf->nx + (2 * i + di);
          sum += fine_values[f] * fine.area(f);
          area += fine.area(f);
        }
      }
      out[j * gc->nx + i] = sum / area;
    }
  }
  return out;
}

ConvergenceTable self_convergence(const RunConfig& base, const std::vector<double>& sizes) {
  if (sizes.size() < 3) throw ConfigError("convergence needs at least three mesh sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    const double ratio = sizes[i - 1] / sizes[i];
    if (std::abs(ratio - 2.0) > 0.02) throw ConfigError("convergence sizes must halve successively");
  }
  RunConfig rc = resolved(base);
  if (rc.mesh != MeshKind::kRect) throw ConfigError("convergence runs on rect meshes only");
  const Scenario scenario = resolve_scenario(rc);
  std::size_t nx = 0;
  std::size_t ny = 0;
  if (base.nx && base.ny) {
    nx = *base.nx;
    ny = *base.ny;
  } else {
    std::tie(nx, ny) = rect_counts_for_size(scenario.domain, sizes.front());
  }

  std::vector<Mesh> meshes;
  std::vector<std::vector<double>> depths;
  ConvergenceTable table;
  for (std::size_t level = 0; level < sizes.size(); ++level) {
    meshes.push_back(generate_rect_mesh(scenario.domain, nx << level, ny << level));
    const RunResult r = run_scenario(scenario, meshes.back(), solver_config(rc, scenario));
    std::vector<double> h(r.final.size());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = r.final.states[k][kH];
    depths.push_back(std::move(h));
    table.rows.push_back({nx << level, ny << level, meshes.back().size(), 0.0, 0.0});
  }
  for (std::size_t level = 0; level + 1 < sizes.size(); ++level) {
    const auto projected = restrict_to_coarse(meshes[level], meshes[level + 1], depths[level + 1]);
    double l1 = 0.0;
    for (std::size_t k = 0; k < projected.size(); ++k) {
      l1 += std::abs(depths[level][k] - projected[k]) * meshes[level].area(k);
    }
    table.rows[level].l1_diff = l1;
  }
  for (std::size_t level = 1; level + 1 < sizes.size(); ++level) {
    table.rows[level].order = std::log2(table.rows[level - 1].l1_diff / table.rows[level].l1_diff);
    table.observed_order = table.rows[level].order;
  }
  return table;
}

void write_table(std::ostream& os, const ConvergenceTable& table) {
  os << "nx,ny,mesh_size,l1_diff,order\n" << std::setprecision(10);
  for (const auto& r : table.rows) {
    os << r.nx << ',' << r.ny << ',' << r.mesh_size << ',' << r.l1_diff << ',' << r.order << '\n';
  }
  os << "# observed order " << table.observed_order << '\n';
}

// ---------------------------------------------------------------------------

State random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> depth(0.1, 5.0);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  std::uniform_real_distribution<double> diag(0.2, 5.0);
  std::uniform_real_distribution<double> corr(-0.9, 0.9);
  std::uniform_real_distribution<double> bed(-1.0, 1.0);
  const double h = depth(rng);
  const double u1 = vel(rng);
  const double u2 = vel(rng);
  const double b = bed(rng);
  const double g11 = diag(rng);
  const double g22 = diag(rng);
  const double g12 = corr(rng) * std::sqrt(g11 * g22);
  return State(h, h * u1, h * u2, b, {g11, g12, g22});
}

EigenAudit eigen_audit(std::size_t samples, std::uint64_t seed, double g) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  EigenAudit audit;
  audit.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const State q = random_state(rng);
    const double a = angle(rng);
    const Point n{std::cos(a), std::sin(a)};
    const Mat7 sys = system_matrix(q, n, g);
    Eigen::EigenSolver<Mat7> solver(sys, false);
    const auto lambda = solver.eigenvalues();
    const double max_abs = lambda.cwiseAbs().maxCoeff();
    const double speed = max_signal_speed(q, n, g);
    audit.max_imag_rel = std::max(audit.max_imag_rel, lambda.imag().cwiseAbs().maxCoeff() / max_abs);
    audit.max_speed_ratio = std::max(audit.max_speed_ratio, max_abs / speed);

    // Central-difference Jacobian of the covariant flux.
    for (int dir = 1; dir <= 2; ++dir) {
      const Mat7 analytic = flux_jacobian(q, dir);
      Mat7 fd = Mat7::Zero();
      for (int c = 0; c < kNumVars; ++c) {
        const double step = 1e-7 * std::max(1.0, std::abs(q.q[c]));
        State plus = q;
        State minus = q;
        plus.q[c] += step;
        minus.q[c] -= step;
        const FluxPair fp = physical_flux(plus);
        const FluxPair fm = physical_flux(minus);
        fd.col(c) = ((dir == 1 ? fp.f1 : fp.f2) - (dir == 1 ? fm.f1 : fm.f2)) / (2.0 * step);
      }
      const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
      audit.max_jacobian_error =
          std::max(audit.max_jacobian_error, (analytic - fd).cwiseAbs().maxCoeff() / scale);
    }
  }
  return audit;
}

}  // namespace covsw
