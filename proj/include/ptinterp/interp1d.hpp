#pragma once

#include "ptinterp/field.hpp"

namespace ptinterp {

// One-dimensional building blocks, each applied everywhere in the
// complementary variable. Inputs may live on any mesh that is nested in the
// target mesh (cellwise, per direction); outputs live on the target mesh.

/// Cellwise L^2(K_t) orthogonal projection onto P_r per target time cell.
/// With r = k-1 this is the projection onto the broken space L^0_{k-1}(T_t).
TensorPolyField l2_project_time(const TensorPolyField& v, const TimeMesh& target, int r);

/// Cellwise L^2(K_x) orthogonal projection onto P_r per target space cell.
TensorPolyField l2_project_space(const TensorPolyField& v, const SpaceMesh& target, int r);

/// Bubble-corrected time interpolant of degree k >= 1: endpoint interpolation
/// plus a bubble-weighted moment correction. Satisfies, per cell,
///   d_t (interp_time v) = l2_project_time(d_t v, k-1)
/// and (v - interp_time v) vanishes at all breakpoints.
TensorPolyField interp_time(const TensorPolyField& v, const TimeMesh& target, int k);

/// L^2-stable variant: cellwise projections glued by taking breakpoint values
/// from the left-adjacent cell's projection (the leftmost cell uses itself).
/// Requires neighboring cells of comparable size (ratio <= 2).
TensorPolyField interp_time_sz(const TensorPolyField& v, const TimeMesh& target, int k);

/// Quasi-interpolation onto the continuous zero-trace space of degree
/// ell >= 1: each free Lobatto node j takes the value at j of the local L^2
/// projection onto P_ell(K(j)), K(j) the lowest-index cell containing j;
/// boundary nodes are zero.
TensorPolyField interp_space(const TensorPolyField& v, const SpaceMesh& target, int ell);

/// H(div) interpolant of degree ell >= 0 onto continuous piecewise P_{ell+1}:
/// endpoint values and moments against P_{ell-1} per cell. Commutes:
///   d_x (interp_rt tau) = l2_project_space(d_x tau, ell).
/// The input must be continuous in x.
TensorPolyField interp_rt(const TensorPolyField& v, const SpaceMesh& target, int ell);

}  // namespace ptinterp
