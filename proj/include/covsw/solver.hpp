#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "covsw/mesh.hpp"
#include "covsw/model.hpp"
#include "covsw/numerics.hpp"
#include "covsw/snapshot.hpp"

namespace covsw {

struct SolverConfig {
  double cfl = 0.45;
  Limiter limiter = Limiter::kBarthJespersen;
  bool first_order = false;  // zero all slopes
  int gauss_points = 3;
  std::optional<double> h_min;  // floor instead of abort when set
  int threads = 1;
  double final_time = 0.2;
  double output_interval = 0.0;  // 0: no intermediate outputs
};

struct RunDiagnostics {
  std::size_t steps = 0;
  std::vector<double> times;  // times[0] is the initial time
  std::vector<double> dts;    // dts[i] advanced times[i] -> times[i + 1]
  std::vector<double> mass;   // covariant mass at each entry of `times`
  std::vector<double> min_h;
  std::vector<double> max_h;
  std::size_t fallbacks = 0;   // inadmissible reconstructions replaced by averages
  std::size_t floor_hits = 0;  // cells clipped by h_min
};

/// sum_k h_k sqrt(det gamma_k) |cell k|
double covariant_mass(const FieldSnapshot& snapshot, const Mesh& mesh);

/// cfl * min_k (|cell| / perimeter) / max_e signal_speed(Q_k, n_e).
double compute_dt(const FieldSnapshot& snapshot, const Mesh& mesh, const Model& model, double cfl);

/// Reflects the velocity in the metric inner product; h, b and the metric are copied.
State wall_ghost(const State& interior, Point n);

struct StepInfo {
  bool output = false;  // the step landed on an output time or on the final time
};

using StepObserver =
    std::function<void(const FieldSnapshot&, const RunDiagnostics&, const StepInfo&)>;

/// MUSCL-Hancock path-conservative update over a fixed mesh. Reads only the input
/// snapshot of a step and writes only the output snapshot.
class Solver {
 public:
  Solver(const Mesh& mesh, Model model, SolverConfig config);

  const Mesh& mesh() const { return *mesh_; }
  const Model& model() const { return model_; }
  const SolverConfig& config() const { return config_; }

  /// Same value as compute_dt with the configured cfl.
  double stable_dt(const FieldSnapshot& snapshot);
  /// Advances by exactly dt. Throws SolverAbort on an inadmissible update.
  FieldSnapshot advance(const FieldSnapshot& snapshot, double dt);
  /// Advances by the CFL step.
  FieldSnapshot step(const FieldSnapshot& snapshot);
  /// Steps until config.final_time, clipping the last step to land on it.
  std::pair<FieldSnapshot, RunDiagnostics> run(FieldSnapshot initial,
                                               const StepObserver& observer = {});

  /// Fallback count accumulated over all advances.
  std::size_t fallbacks() const { return fallbacks_; }
  std::size_t floor_hits() const { return floor_hits_; }

 private:
  using Geo = Eigen::Matrix<double, kNumVars - kNumPhysical, 1>;  // b, g11, g12, g22
  using GeoGrad = Eigen::Matrix<double, kNumVars - kNumPhysical, 2>;

  // b and the metric never change, so their limited slopes, their edge values and
  // every factor of the nonconservative products that depends on them alone are
  // computed once per geometry and reused.
  void refresh_geometry(const std::vector<Vec7>& states);

  struct Face {
    Point r;       // edge midpoint - centroid
    Point normal;  // outward from the owning cell
    double length;
    double metric_nn;  // gamma^ij n_i n_j of the cell metric
    bool geometry_ok;  // b and the metric extrapolated to the midpoint are admissible
  };
  struct EdgeGeometry {
    Point r_left;
    Point r_right;
    double metric_nn_left;  // at the extrapolated edge values
    double metric_nn_right;
    bool ok_left;
    bool ok_right;
  };

  const Mesh* mesh_;
  Model model_;
  SolverConfig config_;
  GradientReconstructor gradients_;
  GaussRule rule_;

  std::vector<std::size_t> face_offsets_;
  std::vector<Face> faces_;
  std::vector<std::size_t> face_edges_;
  std::vector<double> inradius_;  // |cell| / perimeter
  std::vector<EdgeGeometry> edge_geometry_;

  std::vector<Geo> geometry_values_;
  std::vector<GeoGrad> geometry_grad_;
  std::vector<double> cell_ncp_;
  std::vector<double> edge_ncp_;
  std::size_t edge_ncp_stride_ = 0;

  // Scratch reused across steps.
  std::vector<Grad7> grad_;
  std::vector<Vec7> qdot_;
  std::vector<Vec3> edge_flux_;
  std::vector<Vec3> edge_half_jump_;
  std::vector<std::uint32_t> cell_fallbacks_;
  std::vector<std::uint32_t> edge_fallbacks_;
  std::size_t fallbacks_ = 0;
  std::size_t floor_hits_ = 0;
};

/// One CFL step with a fresh solver.
FieldSnapshot step(const FieldSnapshot& snapshot, const Mesh& mesh, const Model& model,
                   const SolverConfig& config);

std::pair<FieldSnapshot, RunDiagnostics> run(const FieldSnapshot& initial, const Mesh& mesh,
                                             const Model& model, const SolverConfig& config,
                                             const StepObserver& observer = {});

}  // namespace covsw
