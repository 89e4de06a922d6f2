#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "covsw/config.hpp"
#include "covsw/mesh.hpp"
#include "covsw/scenarios.hpp"
#include "covsw/snapshot.hpp"
#include "covsw/solver.hpp"

namespace covsw {

struct RunResult {
  Scenario scenario;
  Mesh mesh;  // the mesh the solver ran on (mapped for Cartesian references)
  FieldSnapshot initial;
  FieldSnapshot final;
  RunDiagnostics diagnostics;
  double seconds = 0.0;
};

/// Base mesh over the scenario's computational domain, as requested by the config.
Mesh build_base_mesh(const RunConfig& resolved_config, const Scenario& scenario);

RunResult run_scenario(const Scenario& scenario, const Mesh& base_mesh, const SolverConfig& config,
                       const StepObserver& observer = {});

/// Resolves the config, builds the mesh and runs. When write_outputs is set, writes
/// VTK snapshots at output times, diagnostics.csv and run.ini under config.out.
RunResult run_config(const RunConfig& config, bool write_outputs);

struct ComparisonRow {
  double mesh_size = 0.0;
  std::size_t cells = 0;
  double l1 = 0.0;      // sum |dh| |cell| over the physical (mapped) cells
  double l1_rel = 0.0;  // l1 / sum |h_ref| |cell|
  double linf = 0.0;
  double order = 0.0;  // observed order of l1_rel against the previous row; 0 on the first
  double seconds_covariant = 0.0;
  double seconds_reference = 0.0;
};

struct ComparisonReport {
  ChartKind chart = ChartKind::kSShape;
  std::vector<ComparisonRow> rows;
};

/// Covariant run on the computational rectangle against the classical run on the
/// mapped mesh, compared cell by cell. Needs at least two strictly decreasing sizes.
ComparisonReport compare_formulations(const std::vector<double>& sizes, ChartKind chart,
                                      const RunConfig& base);

void write_report(std::ostream& os, const ComparisonReport& report);

struct ConvergenceRow {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double mesh_size = 0.0;
  double l1_diff = 0.0;  // L1(h_this - projection of h_next_finer); 0 on the finest
  double order = 0.0;    // log2 of successive differences; 0 where undefined
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double observed_order = 0.0;  // order of the finest available pair
};

/// Self-convergence on nested rect meshes. sizes must halve successively; nx, ny
/// are taken from the first size (or from base.nx/ny) and doubled per level.
ConvergenceTable self_convergence(const RunConfig& base, const std::vector<double>& sizes);

void write_table(std::ostream& os, const ConvergenceTable& table);

/// Average of fine cells over each coarse cell; meshes must be nested rect grids.
std::vector<double> restrict_to_coarse(const Mesh& coarse, const Mesh& fine,
                                       const std::vector<double>& fine_values);

struct EigenAudit {
  std::size_t samples = 0;
  double max_imag_rel = 0.0;       // max |Im lambda| / max |lambda|
  double max_speed_ratio = 0.0;    // max |lambda| / max_signal_speed
  double max_jacobian_error = 0.0; // analytic vs central-difference flux Jacobian, relative

  bool passed() const {
    return max_imag_rel <= 1e-9 && max_speed_ratio <= 1.0 + 1e-6 && max_jacobian_error <= 1e-6;
  }
};

/// Random admissible states and directions; eigenvalues of (dF/dQ + B) . n by a
/// general eigensolver.
EigenAudit eigen_audit(std::size_t samples, std::uint64_t seed, double g = 9.81);

/// Random admissible state for audits and property tests.
State random_state(std::mt19937_64& rng);

}  // namespace covsw
