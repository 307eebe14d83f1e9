#include "ptinterp/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ptinterp/interp1d.hpp"
#include "ptinterp/legendre.hpp"

namespace ptinterp {

FemFunction interp_X_tensor(const TensorPolyField& v, const TensorMesh& work,
                            int k, int ell) {
  TensorPolyField xt = interp_space(interp_time(v, work.time(), k), work.space(), ell);
  TensorPolyField tx = interp_time(interp_space(v, work.space(), ell), work.time(), k);
  const double scale = std::max({1.0, xt.max_abs(), tx.max_abs()});
  const double diff = (xt.coeffs() - tx.coeffs()).cwiseAbs().maxCoeff();
  if (diff > 1e-11 * scale) {
    throw std::runtime_error("interp_X_tensor: factor orders disagree");
  }
  return FemFunction::from_field(xt, FemSpace(work, k, ell));
}

FemFunction interp_X_tensor_prime(const TensorPolyField& v, const TensorMesh& work,
                                  int k, int ell) {
  TensorPolyField out = interp_space(interp_time_sz(v, work.time(), k), work.space(), ell);
  return FemFunction::from_field(out, FemSpace(work, k, ell));
}

TensorPolyField interp_Sigma(const TensorPolyField& tau, const TensorMesh& work,
                             int k, int ell) {
  if (k < 1) throw std::invalid_argument("interp_Sigma needs k >= 1");
  return l2_project_time(interp_rt(tau, work.space(), ell), work.time(), k - 1);
}

LambdaPair::LambdaPair(TensorPolyField v, TensorPolyField tau)
    : v_(std::move(v)), tau_(std::move(tau)),
      div_(differentiate_t(v_) + differentiate_x(tau_)) {}

TensorPolyField LambdaPair::recompute_div() const {
  return differentiate_t(v_) + differentiate_x(tau_);
}

double lambda_norm(const LambdaPair& pair, NormTag tag) {
  const double dv = norm(pair.div(), NormKind::l2q());
  if (tag == NormTag::LambdaDiv) return dv;
  if (tag != NormTag::LambdaFull) throw std::invalid_argument("not a pair norm");
  const double grad = norm(pair.v(), NormKind::h1semi());
  const double tn = norm(pair.tau(), NormKind::l2q());
  return std::sqrt(grad * grad + tn * tn + dv * dv);
}

double lambda_stability_ratio(const LambdaPair& pair) {
  const double num = norm(differentiate_t(pair.v()), NormKind::hminus1());
  const double den =
      norm(pair.tau(), NormKind::l2q()) + norm(pair.div(), NormKind::l2q());
  return den > 0.0 ? num / den : 0.0;
}

LambdaPair interp_Lambda(const LambdaPair& pair, const TensorMesh& work, int k, int ell) {
  TensorPolyField vh = interp_X_tensor(pair.v(), work, k, ell).to_field();
  TensorPolyField err = differentiate_t(pair.v() - vh);

  // Correction d_x (-Lap_x)^{-1} applied to err, exactly per time Legendre
  // coefficient: each x-profile maps to w' of the zero-boundary BVP.
  TensorPolyField corr(err.mesh(), err.deg_t(), err.deg_x() + 1);
  for (int it = 0; it < err.mesh().time().cells(); ++it) {
    for (int m = 0; m <= err.deg_t(); ++m) {
      XProfile w = hminus1_profile(err.coeff_profile(it, m));
      corr.coeffs().row(it * err.bt() + m) = w.coeffs().transpose();
    }
  }
  corr.flags.continuous_x = true;

  TensorPolyField sigma_in = pair.tau() - corr;
  TensorPolyField i2 = interp_Sigma(sigma_in, work, k, ell);
  LambdaPair out(vh, i2);

  TensorPolyField lhs = out.div();
  TensorPolyField rhs = l2_project_time(
      l2_project_space(pair.div(), work.space(), ell), work.time(), k - 1);
  TensorPolyField gap = lhs - rhs;
  const double residual = norm(gap, NormKind::l2q());
  const double scale = std::max(norm(pair.div(), NormKind::l2q()),
                                norm(pair.v(), NormKind::l2q()) +
                                    norm(pair.tau(), NormKind::l2q()));
  if (residual > 1e-10 * std::max(scale, 1e-30)) {
    throw std::runtime_error("interp_Lambda: commuting identity violated");
  }
  return out;
}

FemFunctionIrregular interp_X_irregular(const TensorPolyField& v, const IrregularMesh& mesh) {
  TensorMesh cover = mesh.cover();
  Nesting nt = nesting(cover.time(), v.mesh().time());
  Nesting nx = nesting(cover.space(), v.mesh().space());

  // Bilinear projection over one rectangle, assembled from the sub-cells of
  // the input representation.
  std::vector<Eigen::MatrixXd> proj(mesh.cells().size());
  std::vector<bool> have(mesh.cells().size(), false);
  auto cell_projection = [&](int c) -> const Eigen::MatrixXd& {
    if (!have[c]) {
      const auto& cell = mesh.cells()[c];
      const Interval te = mesh.t_extent(cell), xe = mesh.x_extent(cell);
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2, 2);
      for (int it = nt.first[cell.it0]; it < nt.first[cell.it1]; ++it) {
        Eigen::MatrixXd tt = leg::transfer_matrix(
            1, te.a, te.b, v.deg_t(), v.mesh().time().a(it), v.mesh().time().b(it));
        for (int ix = nx.first[cell.ix0]; ix < nx.first[cell.ix1]; ++ix) {
          Eigen::MatrixXd tx = leg::transfer_matrix(
              1, xe.a, xe.b, v.deg_x(), v.mesh().space().a(ix), v.mesh().space().b(ix));
          block.noalias() += tt * v.cell(it, ix) * tx.transpose();
        }
      }
      proj[c] = block;
      have[c] = true;
    }
    return proj[c];
  };

  FemFunctionIrregular out(mesh);
  for (int d = 0; d < out.n_free(); ++d) {
    const int vid = out.free_ids()[d];
    std::vector<int> owners = mesh.cells_containing(vid);
    const int best = *std::min_element(owners.begin(), owners.end(), [&](int a, int b) {
      const auto& ca = mesh.cells()[a];
      const auto& cb = mesh.cells()[b];
      return std::tie(ca.level, ca.it0, ca.ix0) < std::tie(cb.level, cb.it0, cb.ix0);
    });
    const auto& cell = mesh.cells()[best];
    const Interval te = mesh.t_extent(cell), xe = mesh.x_extent(cell);
    const auto& vert = mesh.vertex_list()[vid];
    Eigen::VectorXd et = leg::eval(1, te.a, te.b, mesh.tpts()[vert.it]);
    Eigen::VectorXd ex = leg::eval(1, xe.a, xe.b, mesh.xpts()[vert.ix]);
    out.values()[d] = et.dot(cell_projection(best) * ex);
  }
  return out;
}

}  // namespace ptinterp
