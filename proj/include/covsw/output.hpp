#pragma once

#include <string>

#include "covsw/config.hpp"
#include "covsw/mesh.hpp"
#include "covsw/scenarios.hpp"
#include "covsw/snapshot.hpp"
#include "covsw/solver.hpp"

namespace covsw {

/// Cell data: h, velocity (u^1, u^2), velocity_cartesian (J u), b, g11, g12, g22.
/// Point data: cartesian, the chart image of every vertex.
void write_snapshot_vtk(const std::string& path, const Mesh& mesh, const FieldSnapshot& snapshot,
                        const Scenario& scenario);

/// step,time,dt,mass,min_h,max_h; the first row is the initial state with dt = 0.
void write_diagnostics_csv(const std::string& path, const RunDiagnostics& diag);

/// Config echo plus informational [mesh] and [diagnostics] sections.
void write_metadata(const std::string& path, const RunConfig& resolved_config, const Mesh& mesh,
                    const RunDiagnostics* diag);

}  // namespace covsw
