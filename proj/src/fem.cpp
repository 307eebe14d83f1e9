#include "ptinterp/fem.hpp"

#include <cmath>
#include <stdexcept>

#include "ptinterp/legendre.hpp"

namespace ptinterp {

namespace {

Eigen::VectorXd lobatto_nodes_of(const IntervalMesh& mesh, int deg) {
  Eigen::VectorXd ref = leg::gauss_lobatto(deg + 1);
  Eigen::VectorXd out(mesh.cells() * deg + 1);
  for (int i = 0; i < mesh.cells(); ++i) {
    const double mid = 0.5 * (mesh.a(i) + mesh.b(i)), half = 0.5 * mesh.width(i);
    for (int p = 0; p < deg; ++p) out[i * deg + p] = mid + half * ref[p];
  }
  out[mesh.cells() * deg] = mesh.end();
  return out;
}

}  // namespace

FemSpace::FemSpace(TensorMesh m, int k_, int ell_, bool zero_trace_)
    : mesh(std::move(m)), k(k_), ell(ell_), zero_trace(zero_trace_) {
  if (k < 1 || ell < 1) throw std::invalid_argument("FemSpace needs k, ell >= 1");
}

Eigen::VectorXd FemSpace::t_nodes() const { return lobatto_nodes_of(mesh.time(), k); }
Eigen::VectorXd FemSpace::x_nodes() const { return lobatto_nodes_of(mesh.space(), ell); }

FemFunction::FemFunction(FemSpace space)
    : space_(std::move(space)),
      nodal_(Eigen::MatrixXd::Zero(space_.n_t(), space_.n_x_free())) {}

FemFunction::FemFunction(FemSpace space, Eigen::MatrixXd nodal)
    : space_(std::move(space)), nodal_(std::move(nodal)) {
  if (nodal_.rows() != space_.n_t() || nodal_.cols() != space_.n_x_free()) {
    throw std::invalid_argument("nodal coefficient shape mismatch");
  }
}

TensorPolyField FemFunction::to_field() const {
  const auto& mesh = space_.mesh;
  const int k = space_.k, ell = space_.ell;
  TensorPolyField out(mesh, k, ell);
  Eigen::MatrixXd local(k + 1, ell + 1);
  for (int it = 0; it < mesh.time().cells(); ++it) {
    Eigen::MatrixXd bt = leg::lobatto_nodal_to_modal(k, mesh.time().a(it), mesh.time().b(it));
    for (int ix = 0; ix < mesh.space().cells(); ++ix) {
      for (int p = 0; p <= k; ++p) {
        for (int q = 0; q <= ell; ++q) {
          const int gx = ix * ell + q;
          const bool bdry = space_.zero_trace && (gx == 0 || gx == space_.n_x_all() - 1);
          local(p, q) = bdry ? 0.0 : nodal_(it * k + p, space_.zero_trace ? gx - 1 : gx);
        }
      }
      Eigen::MatrixXd bx = leg::lobatto_nodal_to_modal(ell, mesh.space().a(ix), mesh.space().b(ix));
      out.cell(it, ix) = bt * local * bx.transpose();
    }
  }
  out.flags.continuous_t = true;
  out.flags.continuous_x = true;
  out.flags.zero_trace_x = space_.zero_trace;
  return out;
}

FemFunction FemFunction::from_field(const TensorPolyField& f, FemSpace space) {
  Eigen::VectorXd tn = space.t_nodes();
  Eigen::VectorXd xn = space.x_nodes();
  Eigen::MatrixXd nodal(space.n_t(), space.n_x_free());
  for (int g = 0; g < space.n_t(); ++g) {
    for (int m = 0; m < space.n_x_free(); ++m) {
      nodal(g, m) = f.value(tn[g], xn[space.x_free_to_all(m)]);
    }
  }
  return {std::move(space), std::move(nodal)};
}

FemFunctionIrregular::FemFunctionIrregular(IrregularMesh mesh) : mesh_(std::move(mesh)) {
  const int nv = static_cast<int>(mesh_.vertex_list().size());
  dof_of_vertex_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (mesh_.is_hanging(v) || mesh_.on_x_boundary(v)) continue;
    dof_of_vertex_[v] = static_cast<int>(free_ids_.size());
    free_ids_.push_back(v);
  }
  values_ = Eigen::VectorXd::Zero(free_ids_.size());
}

double FemFunctionIrregular::vertex_value(int vid) const {
  if (mesh_.on_x_boundary(vid)) return 0.0;
  if (const auto* c = mesh_.constraint_of(vid)) {
    return c->w_a * vertex_value(c->parent_a) + c->w_b * vertex_value(c->parent_b);
  }
  return values_[dof_of_vertex_[vid]];
}

TensorPolyField FemFunctionIrregular::to_field() const {
  TensorMesh cover = mesh_.cover();
  TensorPolyField out(cover, 1, 1);
  for (const auto& cell : mesh_.cells()) {
    const Interval te = mesh_.t_extent(cell), xe = mesh_.x_extent(cell);
    Eigen::Matrix2d vals;
    vals(0, 0) = vertex_value(mesh_.vertex_id(cell.it0, cell.ix0));
    vals(0, 1) = vertex_value(mesh_.vertex_id(cell.it0, cell.ix1));
    vals(1, 0) = vertex_value(mesh_.vertex_id(cell.it1, cell.ix0));
    vals(1, 1) = vertex_value(mesh_.vertex_id(cell.it1, cell.ix1));
    const double ht = te.width(), hx = xe.width();
    Eigen::Matrix2d st, sx;
    st << std::sqrt(ht) / 2, std::sqrt(ht) / 2,
        -std::sqrt(ht / 3.0) / 2, std::sqrt(ht / 3.0) / 2;
    sx << std::sqrt(hx) / 2, std::sqrt(hx) / 2,
        -std::sqrt(hx / 3.0) / 2, std::sqrt(hx / 3.0) / 2;
    Eigen::Matrix2d block = st * vals * sx.transpose();
    for (int it = cell.it0; it < cell.it1; ++it) {
      Eigen::MatrixXd tt = leg::transfer_matrix(1, cover.time().a(it), cover.time().b(it),
                                                1, te.a, te.b);
      for (int ix = cell.ix0; ix < cell.ix1; ++ix) {
        Eigen::MatrixXd tx = leg::transfer_matrix(1, cover.space().a(ix),
                                                  cover.space().b(ix), 1, xe.a, xe.b);
        out.cell(it, ix) = tt * block * tx.transpose();
      }
    }
  }
  out.flags.continuous_t = true;
  out.flags.continuous_x = true;
  out.flags.zero_trace_x = true;
  return out;
}

}  // namespace ptinterp
