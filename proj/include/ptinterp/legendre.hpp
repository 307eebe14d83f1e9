#pragma once

#include <Eigen/Dense>

namespace ptinterp::leg {

// Orthonormal Legendre basis of an interval [a,b] with h = b - a:
//   phi_n(x) = sqrt((2n+1)/h) * P_n(xi),  xi = (2x - a - b)/h,
// so that (phi_m, phi_n)_{L^2(a,b)} = delta_{mn}.

/// Values phi_0(x), ..., phi_deg(x).
Eigen::VectorXd eval(int deg, double a, double b, double x);

/// Row q holds phi_0(xs[q]), ..., phi_deg(xs[q]).
Eigen::MatrixXd eval_at(int deg, double a, double b, const Eigen::VectorXd& xs);

/// Coefficient map of d/dx on the cell: (deg+1) x (deg+1), rows beyond deg-1 zero.
Eigen::MatrixXd diff_matrix(int deg, double h);

/// Coefficient map of x -> integral_a^x: (deg+2) x (deg+1).
Eigen::MatrixXd integral_matrix(int deg, double h);

/// Quadratic bubble with zero endpoint values and unit integral, as degree-2
/// coefficients on a cell of width h.
Eigen::Vector3d bubble_coeffs(double h);

struct Quad {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
};

/// n-point Gauss-Legendre rule on [-1,1], nodes symmetrized exactly.
Quad gauss(int n);
Quad gauss(int n, double a, double b);

/// n Gauss-Lobatto nodes on [-1,1] (endpoints included), n >= 2.
Eigen::VectorXd gauss_lobatto(int n);

/// Values at the cell's deg+1 Lobatto nodes -> orthonormal coefficients.
Eigen::MatrixXd lobatto_nodal_to_modal(int deg, double a, double b);

/// T(m,n) = integral over [ao,bo] ∩ [ai,bi] of phi^out_m * phi^in_n.
/// Exact for the given degrees. Used for sub-cell restriction and for
/// assembling projections onto coarser cells.
Eigen::MatrixXd transfer_matrix(int deg_out, double ao, double bo,
                                int deg_in, double ai, double bi);

}  // namespace ptinterp::leg
