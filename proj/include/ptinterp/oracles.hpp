#pragma once

#include <cstdint>
#include <optional>

#include "ptinterp/norms.hpp"
#include "ptinterp/report.hpp"

namespace ptinterp {

/// Normal-equation best approximation of the target from the span of the
/// basis fields in the inner product induced by the norm kind.
struct BestApproxProblem {
  TensorPolyField target;
  std::vector<TensorPolyField> basis;
  InnerKind ip = InnerKind::L2;
  NormDomain domain;
};

struct BestApproxResult {
  TensorPolyField minimizer;
  Eigen::VectorXd coefficients;
  double min_value = 0.0;
  double residual_orthogonality = 0.0;  // max |<target - minimizer, b_i>| / scale
  double gram_condition = 0.0;
};

BestApproxResult best_approx(const BestApproxProblem& problem);

/// Tensor Legendre basis fields of P_k(K_t) (x) P_ell(K_x) supported on one
/// cell of the mesh.
std::vector<TensorPolyField> cell_poly_basis(const TensorMesh& mesh, int it, int ix,
                                             int k, int ell);

/// Residual of the best approximation from P_k(t_window; V(x_window)),
/// V selected by the inner-product kind. Exact: the minimizer is the
/// time-coefficient truncation, which is independent of V.
double time_poly_residual(const TensorPolyField& g, Interval t_window, int k,
                          InnerKind xnorm, std::optional<Interval> x_window = {});

/// Residual in L^2(t_window x x_window) of the best approximation of g by
/// broken polynomials of degree r per work cell inside the window.
double space_broken_residual(const TensorPolyField& g, const SpaceMesh& work,
                             Interval x_window, int r,
                             std::optional<Interval> t_window = {});

/// Residual of the global L^2(K) projection onto P_k(K_t) (x) P_ell(K_x).
double cell_tensor_residual(const TensorPolyField& v, Interval t_window,
                            Interval x_window, int k, int ell);

struct PoincareReport {
  double lhs = 0.0;       // || v - <v>_K ||_{L^2(K)}
  double rhs_grad = 0.0;  // h_x || d_x v ||_{L^2(K)}
  double rhs_dual = 0.0;  // (h_t/h_x) || d_t v ||_{L^2(K_t;H^-1(K_x))}
  double ratio = 0.0;     // lhs / (rhs_grad + rhs_dual)
  double gen_lhs = 0.0;   // best tensor-polynomial approximation error
  double gen_rhs = 0.0;   // weighted sum of the per-factor minima
  double classic_rhs = 0.0;  // h_x || d_x v || + h_t || d_t v ||_{L^2(K)}
};

/// Both sides of the mean-value bound on the cell K = t_window x x_window
/// (breakpoint-aligned), together with the generalized (degree k, ell) and
/// classical variants.
PoincareReport poincare_report(const TensorPolyField& v, Interval t_window,
                               Interval x_window, int k = 0, int ell = 0);
PoincareReport poincare_report(const TensorPolyField& v, int it, int ix,
                               int k = 0, int ell = 0);

struct LocalizationReport {
  double global_sq = 0.0;        // || g ||^2_{H^-1(Omega)}
  double patch_sum_sq = 0.0;     // sum_j || g ||^2_{H^-1(omega_j)}
  double weighted_sum_sq = 0.0;  // sum_j h_j^-2 || g ||^2_{H^-1(omega_j)}
  Eigen::VectorXd patch_sq;
  Eigen::VectorXd vertex_h;

  double weighted_sum(double s) const;  // sum_j h_j^-s patch_sq_j
};

/// Patchwise dual-norm decomposition of an x-profile over the vertices of a
/// work mesh (the profile mesh must be nested in it).
LocalizationReport localization_report(const XProfile& g, const SpaceMesh& work);

struct OracleFieldOptions {
  int k = 1;
  int ell = 1;
  int refine = 8;
  bool zero_trace = true;
  double decay = 0.5;
};

/// Seeded random input in oracle representation: a global polynomial with
/// Legendre coefficients decaying geometrically per total degree (times the
/// spatial bubble when a zero trace is requested), re-expanded exactly on the
/// refined mesh with degrees (k+2, ell+2).
TensorPolyField random_oracle_field(const TensorMesh& work, std::uint64_t seed,
                                    const OracleFieldOptions& opts = {});

/// Deterministic uniform draw in [lo, hi) from a 64-bit generator state.
double uniform_draw(std::uint64_t& state, double lo = 0.0, double hi = 1.0);

/// Largest relative deviation between the derivative callbacks of f and
/// central finite differences at `n` seeded random points of the cylinder.
double fd_check(const AnalyticField& f, double T, double L, std::uint64_t seed,
                int n = 10);

/// Time-independent sawtooth resolved by the bisected lattice only: piecewise
/// linear with value -1 at interior even lattice vertices, +1 at odd ones and
/// 0 on the spatial boundary. Every base-cell mean vanishes, so bilinear
/// projections onto base cells are zero at base vertices.
TensorPolyField comb_field(const TimeMesh& tm, const SpaceMesh& lattice_x);

}  // namespace ptinterp
