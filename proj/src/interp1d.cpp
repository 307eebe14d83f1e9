#include "ptinterp/interp1d.hpp"

#include <cmath>
#include <stdexcept>

#include "ptinterp/legendre.hpp"

namespace ptinterp {

namespace {

// All 1D operators act on a channel matrix whose rows carry the cellwise
// Legendre coefficients in the operated direction and whose columns are the
// untouched degrees of freedom of the other direction.

struct Dir {
  const IntervalMesh& fine;
  int deg_in;
  const IntervalMesh& target;
  Nesting nest;  // target cell i covers fine cells [first[i], first[i+1])

  Dir(const IntervalMesh& f, int d, const IntervalMesh& t)
      : fine(f), deg_in(d), target(t), nest(nesting(t, f)) {}

  int bi() const { return deg_in + 1; }

  // Sum of transfer contributions: coefficients of the L^2(cell i) projection
  // of the input onto degree `deg_out`.
  Eigen::MatrixXd project_cell(const Eigen::MatrixXd& in, int i, int deg_out) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(deg_out + 1, in.cols());
    for (int s = nest.first[i]; s < nest.first[i + 1]; ++s) {
      Eigen::MatrixXd t = leg::transfer_matrix(deg_out, target.a(i), target.b(i),
                                               deg_in, fine.a(s), fine.b(s));
      out.noalias() += t * in.middleRows(s * bi(), bi());
    }
    return out;
  }

  // One-sided boundary values of the input on target cell i, per channel.
  Eigen::RowVectorXd value_left(const Eigen::MatrixXd& in, int i) const {
    const int s = nest.first[i];
    return leg::eval(deg_in, fine.a(s), fine.b(s), target.a(i)).transpose() *
           in.middleRows(s * bi(), bi());
  }
  Eigen::RowVectorXd value_right(const Eigen::MatrixXd& in, int i) const {
    const int s = nest.first[i + 1] - 1;
    return leg::eval(deg_in, fine.a(s), fine.b(s), target.b(i)).transpose() *
           in.middleRows(s * bi(), bi());
  }
};

Eigen::MatrixXd project_dir(const Dir& d, const Eigen::MatrixXd& in, int r) {
  Eigen::MatrixXd out(d.target.cells() * (r + 1), in.cols());
  for (int i = 0; i < d.target.cells(); ++i) {
    out.middleRows(i * (r + 1), r + 1) = d.project_cell(in, i, r);
  }
  return out;
}

// Coefficients of the linear function with the given endpoint values.
void linear_coeffs(double h, const Eigen::RowVectorXd& va, const Eigen::RowVectorXd& vb,
                   Eigen::MatrixXd& out, int row0) {
  out.row(row0) = std::sqrt(h) * 0.5 * (va + vb);
  out.row(row0 + 1) = std::sqrt(h / 3.0) * 0.5 * (vb - va);
}

Eigen::MatrixXd interp_dir(const Dir& d, const Eigen::MatrixXd& in, int k) {
  if (k < 1) throw std::invalid_argument("interp_time needs k >= 1");
  const int bo = k + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d.target.cells() * bo, in.cols());
  for (int i = 0; i < d.target.cells(); ++i) {
    const double a = d.target.a(i), b = d.target.b(i), h = b - a;
    Eigen::RowVectorXd va = d.value_left(in, i);
    Eigen::RowVectorXd vb = d.value_right(in, i);
    auto cell = out.middleRows(i * bo, bo);
    linear_coeffs(h, va, vb, out, i * bo);
    if (k < 2) continue;

    // Moment correction: g in P_{k-2} with (b_K g, w) = (v - I^1 v, w) for
    // all w in P_{k-2}; the result gains b_K * g.
    Eigen::MatrixXd mom = d.project_cell(in, i, k - 2);
    mom.row(0) -= cell.row(0);
    if (k - 2 >= 1) mom.row(1) -= cell.row(1);

    const int nq = k + 1;
    leg::Quad q = leg::gauss(nq, a, b);
    Eigen::VectorXd bubble =
        leg::eval_at(2, a, b, q.x) * leg::bubble_coeffs(h);
    Eigen::MatrixXd psi = leg::eval_at(k - 2, a, b, q.x);
    Eigen::VectorXd wb = (q.w.array() * bubble.array()).matrix();
    Eigen::MatrixXd m2 = psi.transpose() * wb.asDiagonal() * psi;
    Eigen::MatrixXd g = m2.ldlt().solve(mom);

    Eigen::MatrixXd bk = leg::eval_at(k, a, b, q.x);
    cell.noalias() += bk.transpose() * wb.asDiagonal() * psi * g;
  }
  return out;
}

Eigen::MatrixXd interp_sz_dir(const Dir& d, const Eigen::MatrixXd& in, int k) {
  if (k < 1) throw std::invalid_argument("interp_time_sz needs k >= 1");
  const int n = d.target.cells();
  for (int i = 0; i + 1 < n; ++i) {
    const double r = d.target.width(i + 1) / d.target.width(i);
    if (r > 2.0 + 1e-12 || r < 0.5 - 1e-12) {
      throw std::invalid_argument("interp_time_sz requires neighbor cell ratio <= 2");
    }
  }
  const int bo = k + 1;
  std::vector<Eigen::MatrixXd> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = d.project_cell(in, i, k);

  auto eval_proj = [&](int i, double t) {
    return (leg::eval(k, d.target.a(i), d.target.b(i), t).transpose() * proj[i]).eval();
  };
  Eigen::MatrixXd out(n * bo, in.cols());
  for (int i = 0; i < n; ++i) {
    const double a = d.target.a(i), b = d.target.b(i), h = b - a;
    // Breakpoint values come from the left-adjacent cell's projection.
    Eigen::RowVectorXd ta = (i == 0) ? eval_proj(0, a) : eval_proj(i - 1, a);
    Eigen::RowVectorXd tb = eval_proj(i, b);
    auto cell = out.middleRows(i * bo, bo);
    cell = proj[i];
    Eigen::RowVectorXd da = ta - eval_proj(i, a);
    Eigen::RowVectorXd db = tb - eval_proj(i, b);
    // Linear hat corrections keep the interior moments of the projection.
    cell.row(0) += std::sqrt(h) * 0.5 * (da + db);
    cell.row(1) += std::sqrt(h / 3.0) * 0.5 * (db - da);
  }
  return out;
}

Eigen::MatrixXd interp_nodal_dir(const Dir& d, const Eigen::MatrixXd& in, int ell) {
  if (ell < 1) throw std::invalid_argument("interp_space needs ell >= 1");
  const int n = d.target.cells();
  const int n_nodes = n * ell + 1;
  Eigen::VectorXd ref = leg::gauss_lobatto(ell + 1);

  // Per-cell local projections, shared by all nodes assigned to the cell.
  std::vector<Eigen::MatrixXd> proj(n);
  for (int i = 0; i < n; ++i) proj[i] = d.project_cell(in, i, ell);

  Eigen::MatrixXd nodal = Eigen::MatrixXd::Zero(n_nodes, in.cols());
  for (int g = 1; g + 1 < n_nodes; ++g) {
    // K(j): lowest-index cell containing the node.
    const int cell = (g % ell == 0) ? g / ell - 1 : g / ell;
    const int local = g - cell * ell;
    const double a = d.target.a(cell), b = d.target.b(cell);
    const double x = 0.5 * (a + b) + 0.5 * (b - a) * ref[local];
    nodal.row(g) = leg::eval(ell, a, b, x).transpose() * proj[cell];
  }

  const int bo = ell + 1;
  Eigen::MatrixXd out(n * bo, in.cols());
  for (int i = 0; i < n; ++i) {
    out.middleRows(i * bo, bo) =
        leg::lobatto_nodal_to_modal(ell, d.target.a(i), d.target.b(i)) *
        nodal.middleRows(i * ell, ell + 1);
  }
  return out;
}

Eigen::MatrixXd interp_rt_dir(const Dir& d, const Eigen::MatrixXd& in, int ell) {
  if (ell < 0) throw std::invalid_argument("interp_rt needs ell >= 0");
  const int n = d.target.cells();
  const int bo = ell + 2;
  const double scale = std::max(1.0, in.size() ? in.cwiseAbs().maxCoeff() : 0.0);

  // Breakpoint values of the input; interfaces must match (continuity).
  Eigen::MatrixXd bp(n + 1, in.cols());
  bp.row(0) = d.value_left(in, 0);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd right = d.value_right(in, i);
    if (i + 1 < n) {
      Eigen::RowVectorXd next = d.value_left(in, i + 1);
      if ((right - next).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw std::invalid_argument("interp_rt requires an x-continuous input");
      }
      bp.row(i + 1) = 0.5 * (right + next);
    } else {
      bp.row(i + 1) = right;
    }
  }

  Eigen::MatrixXd out(n * bo, in.cols());
  for (int i = 0; i < n; ++i) {
    const double a = d.target.a(i), b = d.target.b(i);
    auto cell = out.middleRows(i * bo, bo);
    // Moments against P_{ell-1} pin the first ell coefficients.
    if (ell >= 1) cell.topRows(ell) = d.project_cell(in, i, ell - 1).topRows(ell);
    Eigen::VectorXd ea = leg::eval(ell + 1, a, b, a);
    Eigen::VectorXd eb = leg::eval(ell + 1, a, b, b);
    Eigen::RowVectorXd ra = bp.row(i);
    Eigen::RowVectorXd rb = bp.row(i + 1);
    for (int m = 0; m < ell; ++m) {
      ra -= ea[m] * cell.row(m);
      rb -= eb[m] * cell.row(m);
    }
    Eigen::Matrix2d sys;
    sys << ea[ell], ea[ell + 1], eb[ell], eb[ell + 1];
    Eigen::MatrixXd rhs(2, in.cols());
    rhs.row(0) = ra;
    rhs.row(1) = rb;
    Eigen::MatrixXd top = sys.partialPivLu().solve(rhs);
    cell.row(ell) = top.row(0);
    cell.row(ell + 1) = top.row(1);
  }
  return out;
}

}  // namespace

TensorPolyField l2_project_time(const TensorPolyField& v, const TimeMesh& target, int r) {
  if (r < 0) throw std::invalid_argument("projection degree must be >= 0");
  Dir d(v.mesh().time(), v.deg_t(), target);
  TensorPolyField out(TensorMesh(target, v.mesh().space()), r, v.deg_x());
  out.coeffs() = project_dir(d, v.coeffs(), r);
  out.flags.continuous_x = v.flags.continuous_x;
  out.flags.zero_trace_x = v.flags.zero_trace_x;
  return out;
}

TensorPolyField l2_project_space(const TensorPolyField& v, const SpaceMesh& target, int r) {
  if (r < 0) throw std::invalid_argument("projection degree must be >= 0");
  Dir d(v.mesh().space(), v.deg_x(), target);
  TensorPolyField out(TensorMesh(v.mesh().time(), target), v.deg_t(), r);
  out.coeffs() = project_dir(d, v.coeffs().transpose(), r).transpose();
  out.flags.continuous_t = v.flags.continuous_t;
  return out;
}

TensorPolyField interp_time(const TensorPolyField& v, const TimeMesh& target, int k) {
  Dir d(v.mesh().time(), v.deg_t(), target);
  TensorPolyField out(TensorMesh(target, v.mesh().space()), k, v.deg_x());
  out.coeffs() = interp_dir(d, v.coeffs(), k);
  out.flags = v.flags;
  return out;
}

TensorPolyField interp_time_sz(const TensorPolyField& v, const TimeMesh& target, int k) {
  Dir d(v.mesh().time(), v.deg_t(), target);
  TensorPolyField out(TensorMesh(target, v.mesh().space()), k, v.deg_x());
  out.coeffs() = interp_sz_dir(d, v.coeffs(), k);
  out.flags = v.flags;
  out.flags.continuous_t = true;
  return out;
}

TensorPolyField interp_space(const TensorPolyField& v, const SpaceMesh& target, int ell) {
  Dir d(v.mesh().space(), v.deg_x(), target);
  TensorPolyField out(TensorMesh(v.mesh().time(), target), v.deg_t(), ell);
  out.coeffs() = interp_nodal_dir(d, v.coeffs().transpose(), ell).transpose();
  out.flags.continuous_t = v.flags.continuous_t;
  out.flags.continuous_x = true;
  out.flags.zero_trace_x = true;
  return out;
}

TensorPolyField interp_rt(const TensorPolyField& v, const SpaceMesh& target, int ell) {
  Dir d(v.mesh().space(), v.deg_x(), target);
  TensorPolyField out(TensorMesh(v.mesh().time(), target), v.deg_t(), ell + 1);
  out.coeffs() = interp_rt_dir(d, v.coeffs().transpose(), ell).transpose();
  out.flags.continuous_t = v.flags.continuous_t;
  out.flags.continuous_x = true;
  return out;
}

}  // namespace ptinterp
