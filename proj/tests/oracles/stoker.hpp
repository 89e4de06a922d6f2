#pragma once

namespace covsw::oracle {

/// Exact solution of the wet-wet dam break: still water hl | hr at x0, hl > hr.
struct DamBreak {
  double hl = 2.0;
  double hr = 1.0;
  double g = 9.81;
  double x0 = 0.5;
  double h_star = 0.0;
  double u_star = 0.0;
  double shock_speed = 0.0;
};

/// Star state by bracketed root finding on the rarefaction/shock relations.
DamBreak solve_dam_break(double hl, double hr, double g, double x0);

double dam_break_depth(const DamBreak& d, double x, double t);
double dam_break_velocity(const DamBreak& d, double x, double t);

/// Mean depth over [a, b] at time t, integrated piecewise between the wave fronts.
double dam_break_mean_depth(const DamBreak& d, double a, double b, double t);

}  // namespace covsw::oracle
