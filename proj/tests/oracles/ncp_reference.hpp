#pragma once

#include <functional>

#include "covsw/model.hpp"

namespace covsw::oracle {

/// Nonconservative matrices re-derived from the Christoffel form of the momentum
/// balance. Every metric column is the response to a unit metric derivative.
NcpPair christoffel_ncp(const Vec7& q, double g);

/// The matrices exactly as printed, alpha_ij = -(m1)^2 g_ii + (m2)^2 g_jj.
/// Agrees with the re-derivation only where g11 == g22.
NcpPair printed_ncp(const Vec7& q, double g);

/// (B1 row 1) . d1 Q + (B2 row 1) . d2 Q for a metric field, with central-difference
/// metric derivatives of `metric` at p and constant m.
double mass_row_residual_rhs(const std::function<Metric2(Point)>& metric, Point p, double m1,
                             double m2, double step);

/// Gauss-Legendre path integral with 50 nodes, fully independent of the library rule.
Vec7 path_integral_50(const Vec7& qm, const Vec7& qp, Point n, double g);

/// Central-difference d f_dir / dQ of the covariant flux.
Mat7 fd_flux_jacobian(const Vec7& q, int dir, double step);

}  // namespace covsw::oracle
