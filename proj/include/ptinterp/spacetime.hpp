#pragma once

#include "ptinterp/fem.hpp"
#include "ptinterp/norms.hpp"

namespace ptinterp {

/// Composition I_x ∘ I_t = I_t ∘ I_x onto X_h^{k,ell}. Both factor orders are
/// computed and their equality is asserted on every call.
FemFunction interp_X_tensor(const TensorPolyField& v, const TensorMesh& work,
                            int k, int ell);

/// L^2-stable variant I_x ∘ I_t^{SZ}; requires time-mesh neighbor ratio <= 2.
FemFunction interp_X_tensor_prime(const TensorPolyField& v, const TensorMesh& work,
                                  int k, int ell);

/// Flux interpolant onto L^0_{k-1}(T_t) (x) RT_ell(T_x):
/// time projection of the H(div) interpolant. Commutes with d_x through the
/// product of the broken L^2 projections.
TensorPolyField interp_Sigma(const TensorPolyField& tau, const TensorMesh& work,
                             int k, int ell);

/// Primal/flux pair with its space-time divergence d_t v + d_x tau cached.
class LambdaPair {
 public:
  LambdaPair(TensorPolyField v, TensorPolyField tau);

  const TensorPolyField& v() const { return v_; }
  const TensorPolyField& tau() const { return tau_; }
  const TensorPolyField& div() const { return div_; }
  TensorPolyField recompute_div() const;

 private:
  TensorPolyField v_, tau_, div_;
};

/// || (v,tau) ||_Lambda and the divergence part alone.
double lambda_norm(const LambdaPair& pair, NormTag tag);

/// Reported (not asserted) stability quotient
/// ||d_t v||_{L^2(J;H^-1)} / (||tau||_{L^2(Q)} + ||div||_{L^2(Q)}).
double lambda_stability_ratio(const LambdaPair& pair);

/// Divergence-commuting pair interpolant: the primal part is I_X^tensor and
/// the flux part receives the inverse-Laplacian correction
///   I_2(v,tau) = I_Sigma(tau - d_x (-Lap_x)^{-1} d_t (v - I_X v)),
/// computed slice-exactly per time Legendre coefficient. The commuting
/// identity is asserted on every call.
LambdaPair interp_Lambda(const LambdaPair& pair, const TensorMesh& work, int k, int ell);

/// Nodal quasi-interpolant on a 1-irregular mesh (bilinear only): every free
/// vertex j takes the value at j of the cellwise L^2(K(j)) projection onto
/// the bilinear polynomials, K(j) the lowest-(level, t, x) cell containing j.
FemFunctionIrregular interp_X_irregular(const TensorPolyField& v, const IrregularMesh& mesh);

}  // namespace ptinterp
