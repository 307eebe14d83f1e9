#include "ptinterp/field.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ptinterp/legendre.hpp"

namespace ptinterp {

namespace {

int cell_index_at(const IntervalMesh& mesh, double v, const char* what) {
  const double tol = 1e-12 * std::max(std::abs(mesh.end()), 1.0);
  const auto& p = mesh.breakpoints();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (std::abs(p[i] - v) <= tol) return static_cast<int>(i);
  }
  throw std::invalid_argument(std::string(what) + ": endpoint is not a breakpoint");
}

}  // namespace

XProfile::XProfile(IntervalMesh mesh, int deg)
    : mesh_(std::move(mesh)), deg_(deg),
      coeffs_(Eigen::VectorXd::Zero(mesh_.cells() * (deg + 1))) {}

XProfile::XProfile(IntervalMesh mesh, int deg, Eigen::VectorXd coeffs)
    : mesh_(std::move(mesh)), deg_(deg), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != mesh_.cells() * (deg_ + 1)) {
    throw std::invalid_argument("profile coefficient size mismatch");
  }
}

double XProfile::value(double x) const { return value_in_cell(mesh_.locate(x), x); }

double XProfile::value_in_cell(int i, double x) const {
  return leg::eval(deg_, mesh_.a(i), mesh_.b(i), x).dot(cell(i));
}

double XProfile::integral() const {
  double s = 0.0;
  for (int i = 0; i < mesh_.cells(); ++i) s += cell(i)[0] * std::sqrt(mesh_.width(i));
  return s;
}

double XProfile::inner_l2(const XProfile& other) const {
  if (!(mesh_ == other.mesh_) || deg_ != other.deg_) {
    throw std::invalid_argument("profile inner product needs matching representations");
  }
  return coeffs_.dot(other.coeffs_);
}

XProfile XProfile::restricted(Interval dom) const {
  const int i0 = cell_index_at(mesh_, dom.a, "restricted");
  const int i1 = cell_index_at(mesh_, dom.b, "restricted");
  if (i1 <= i0) throw std::invalid_argument("restricted: empty domain");
  IntervalMesh sub(mesh_.breakpoints().segment(i0, i1 - i0 + 1));
  return {std::move(sub), deg_, coeffs_.segment(i0 * (deg_ + 1), (i1 - i0) * (deg_ + 1))};
}

XProfile XProfile::derivative() const {
  const int dd = std::max(deg_ - 1, 0);
  XProfile out(mesh_, dd);
  for (int i = 0; i < mesh_.cells(); ++i) {
    if (deg_ == 0) {
      out.cell(i).setZero();
    } else {
      out.cell(i) = leg::diff_matrix(deg_, mesh_.width(i)).topRows(deg_) * cell(i);
    }
  }
  return out;
}

XProfile XProfile::antiderivative() const {
  XProfile out(mesh_, deg_ + 1);
  double carry = 0.0;  // accumulated value at the left end of each cell
  for (int i = 0; i < mesh_.cells(); ++i) {
    const double h = mesh_.width(i);
    Eigen::VectorXd c = leg::integral_matrix(deg_, h) * cell(i);
    c[0] += carry * std::sqrt(h);
    out.cell(i) = c;
    carry = leg::eval(deg_ + 1, mesh_.a(i), mesh_.b(i), mesh_.b(i)).dot(c);
  }
  return out;
}

TensorPolyField::TensorPolyField(TensorMesh mesh, int deg_t, int deg_x)
    : mesh_(std::move(mesh)), deg_t_(deg_t), deg_x_(deg_x),
      coeffs_(Eigen::MatrixXd::Zero(mesh_.time().cells() * (deg_t + 1),
                                    mesh_.space().cells() * (deg_x + 1))) {
  if (deg_t < 0 || deg_x < 0) throw std::invalid_argument("degrees must be >= 0");
}

double TensorPolyField::value(double t, double x) const {
  const int it = mesh_.time().locate(t);
  const int ix = mesh_.space().locate(x);
  Eigen::VectorXd tb = leg::eval(deg_t_, mesh_.time().a(it), mesh_.time().b(it), t);
  Eigen::VectorXd xb = leg::eval(deg_x_, mesh_.space().a(ix), mesh_.space().b(ix), x);
  return tb.dot(cell(it, ix) * xb);
}

XProfile TensorPolyField::slice_t(double t) const {
  return slice_t_in_cell(mesh_.time().locate(t), t);
}

XProfile TensorPolyField::slice_t_in_cell(int it, double t) const {
  Eigen::VectorXd tb = leg::eval(deg_t_, mesh_.time().a(it), mesh_.time().b(it), t);
  Eigen::VectorXd c = (tb.transpose() * coeffs_.middleRows(it * bt(), bt())).transpose();
  return {mesh_.space(), deg_x_, std::move(c)};
}

XProfile TensorPolyField::coeff_profile(int it, int mode) const {
  return {mesh_.space(), deg_x_, coeffs_.row(it * bt() + mode).transpose()};
}

double TensorPolyField::trace_x_abs_max() const {
  const auto& sm = mesh_.space();
  const int nx = sm.cells();
  Eigen::VectorXd b0 = leg::eval(deg_x_, sm.a(0), sm.b(0), sm.start());
  Eigen::VectorXd b1 = leg::eval(deg_x_, sm.a(nx - 1), sm.b(nx - 1), sm.end());
  double m = 0.0;
  for (Eigen::Index r = 0; r < coeffs_.rows(); ++r) {
    m = std::max(m, std::abs(coeffs_.row(r).segment(0, bx()).dot(b0)));
    m = std::max(m, std::abs(coeffs_.row(r).segment((nx - 1) * bx(), bx()).dot(b1)));
  }
  return m;
}

double TensorPolyField::jump_t_abs_max() const {
  const auto& tm = mesh_.time();
  double m = 0.0;
  const int nq = deg_x_ + 1;
  for (int it = 0; it + 1 < tm.cells(); ++it) {
    const double tb = tm.b(it);
    Eigen::VectorXd left = leg::eval(deg_t_, tm.a(it), tm.b(it), tb);
    Eigen::VectorXd right = leg::eval(deg_t_, tm.a(it + 1), tm.b(it + 1), tb);
    Eigen::RowVectorXd dl = left.transpose() * coeffs_.middleRows(it * bt(), bt());
    Eigen::RowVectorXd dr = right.transpose() * coeffs_.middleRows((it + 1) * bt(), bt());
    // Compare slice values on a per-cell sample grid.
    for (int ix = 0; ix < mesh_.space().cells(); ++ix) {
      leg::Quad q = leg::gauss(nq, mesh_.space().a(ix), mesh_.space().b(ix));
      Eigen::MatrixXd bxv = leg::eval_at(deg_x_, mesh_.space().a(ix), mesh_.space().b(ix), q.x);
      Eigen::VectorXd vl = bxv * dl.segment(ix * bx(), bx()).transpose();
      Eigen::VectorXd vr = bxv * dr.segment(ix * bx(), bx()).transpose();
      m = std::max(m, (vl - vr).cwiseAbs().maxCoeff());
    }
  }
  return m;
}

double TensorPolyField::jump_x_abs_max() const {
  const auto& sm = mesh_.space();
  double m = 0.0;
  const int nq = deg_t_ + 1;
  for (int ix = 0; ix + 1 < sm.cells(); ++ix) {
    const double xb = sm.b(ix);
    Eigen::VectorXd left = leg::eval(deg_x_, sm.a(ix), sm.b(ix), xb);
    Eigen::VectorXd right = leg::eval(deg_x_, sm.a(ix + 1), sm.b(ix + 1), xb);
    for (int it = 0; it < mesh_.time().cells(); ++it) {
      leg::Quad q = leg::gauss(nq, mesh_.time().a(it), mesh_.time().b(it));
      Eigen::MatrixXd btv = leg::eval_at(deg_t_, mesh_.time().a(it), mesh_.time().b(it), q.x);
      Eigen::VectorXd vl = btv * (cell(it, ix) * left);
      Eigen::VectorXd vr = btv * (cell(it, ix + 1) * right);
      m = std::max(m, (vl - vr).cwiseAbs().maxCoeff());
    }
  }
  return m;
}

TensorPolyField differentiate_t(const TensorPolyField& f) {
  const int dd = std::max(f.deg_t() - 1, 0);
  TensorPolyField out(f.mesh(), dd, f.deg_x());
  if (f.deg_t() == 0) return out;
  for (int it = 0; it < f.mesh().time().cells(); ++it) {
    Eigen::MatrixXd d =
        leg::diff_matrix(f.deg_t(), f.mesh().time().width(it)).topRows(f.deg_t());
    out.coeffs().middleRows(it * (dd + 1), dd + 1) =
        d * f.coeffs().middleRows(it * f.bt(), f.bt());
  }
  return out;
}

TensorPolyField differentiate_x(const TensorPolyField& f) {
  const int dd = std::max(f.deg_x() - 1, 0);
  TensorPolyField out(f.mesh(), f.deg_t(), dd);
  if (f.deg_x() == 0) return out;
  for (int ix = 0; ix < f.mesh().space().cells(); ++ix) {
    Eigen::MatrixXd d =
        leg::diff_matrix(f.deg_x(), f.mesh().space().width(ix)).topRows(f.deg_x());
    out.coeffs().middleCols(ix * (dd + 1), dd + 1) =
        f.coeffs().middleCols(ix * f.bx(), f.bx()) * d.transpose();
  }
  return out;
}

TensorPolyField antidifferentiate_x(const TensorPolyField& f) {
  TensorPolyField out(f.mesh(), f.deg_t(), f.deg_x() + 1);
  for (Eigen::Index r = 0; r < f.coeffs().rows(); ++r) {
    XProfile p(f.mesh().space(), f.deg_x(), f.coeffs().row(r).transpose());
    out.coeffs().row(r) = p.antiderivative().coeffs().transpose();
  }
  out.flags.continuous_t = f.flags.continuous_t;
  out.flags.continuous_x = true;
  return out;
}

double cell_mean(const TensorPolyField& f, int it, int ix) {
  if (it < 0 || it >= f.mesh().time().cells() || ix < 0 || ix >= f.mesh().space().cells()) {
    throw std::invalid_argument("cell_mean: unknown cell");
  }
  const double area = f.mesh().time().width(it) * f.mesh().space().width(ix);
  return f.cell(it, ix)(0, 0) / std::sqrt(area);
}

TensorPolyField refine_onto(const TensorPolyField& f, const TensorMesh& fine,
                            int deg_t, int deg_x) {
  if (deg_t < f.deg_t() || deg_x < f.deg_x()) {
    throw std::invalid_argument("refine_onto cannot lower degrees");
  }
  Nesting nt = nesting(f.mesh().time(), fine.time());
  Nesting nx = nesting(f.mesh().space(), fine.space());

  // Per fine cell: transfer from the parent coarse cell basis.
  std::vector<Eigen::MatrixXd> tt(fine.time().cells()), tx(fine.space().cells());
  for (int i = 0; i < f.mesh().time().cells(); ++i) {
    for (int s = nt.first[i]; s < nt.first[i + 1]; ++s) {
      tt[s] = leg::transfer_matrix(deg_t, fine.time().a(s), fine.time().b(s),
                                   f.deg_t(), f.mesh().time().a(i), f.mesh().time().b(i));
    }
  }
  for (int j = 0; j < f.mesh().space().cells(); ++j) {
    for (int s = nx.first[j]; s < nx.first[j + 1]; ++s) {
      tx[s] = leg::transfer_matrix(deg_x, fine.space().a(s), fine.space().b(s),
                                   f.deg_x(), f.mesh().space().a(j), f.mesh().space().b(j));
    }
  }

  TensorPolyField out(fine, deg_t, deg_x);
  for (int i = 0; i < f.mesh().time().cells(); ++i) {
    for (int j = 0; j < f.mesh().space().cells(); ++j) {
      const auto block = f.cell(i, j);
      for (int s = nt.first[i]; s < nt.first[i + 1]; ++s) {
        Eigen::MatrixXd tb = tt[s] * block;
        for (int r = nx.first[j]; r < nx.first[j + 1]; ++r) {
          out.cell(s, r) = tb * tx[r].transpose();
        }
      }
    }
  }
  out.flags = f.flags;
  return out;
}

void to_common(TensorPolyField& a, TensorPolyField& b) {
  const int dt = std::max(a.deg_t(), b.deg_t());
  const int dx = std::max(a.deg_x(), b.deg_x());
  if (a.mesh() == b.mesh()) {
    if (a.deg_t() != dt || a.deg_x() != dx) a = refine_onto(a, a.mesh(), dt, dx);
    if (b.deg_t() != dt || b.deg_x() != dx) b = refine_onto(b, b.mesh(), dt, dx);
    return;
  }
  TimeMesh tm(merge_meshes(a.mesh().time(), b.mesh().time()).breakpoints());
  SpaceMesh sm(merge_meshes(a.mesh().space(), b.mesh().space()).breakpoints());
  TensorMesh common(tm, sm);
  a = refine_onto(a, common, dt, dx);
  b = refine_onto(b, common, dt, dx);
}

TensorPolyField operator+(const TensorPolyField& a, const TensorPolyField& b) {
  TensorPolyField x = a, y = b;
  to_common(x, y);
  x.coeffs() += y.coeffs();
  x.flags.continuous_t = a.flags.continuous_t && b.flags.continuous_t;
  x.flags.continuous_x = a.flags.continuous_x && b.flags.continuous_x;
  x.flags.zero_trace_x = a.flags.zero_trace_x && b.flags.zero_trace_x;
  return x;
}

TensorPolyField operator-(const TensorPolyField& a, const TensorPolyField& b) {
  return a + (-1.0 * b);
}

TensorPolyField operator*(double s, const TensorPolyField& f) {
  TensorPolyField out = f;
  out.coeffs() *= s;
  return out;
}

TensorPolyField project_analytic(const AnalyticField& f, const TensorMesh& mesh,
                                 int deg_t, int deg_x) {
  if (!f.value) throw std::invalid_argument("analytic field has no value callback");
  TensorPolyField out(mesh, deg_t, deg_x);
  const int nqt = deg_t + 6, nqx = deg_x + 6;
  for (int it = 0; it < mesh.time().cells(); ++it) {
    leg::Quad qt = leg::gauss(nqt, mesh.time().a(it), mesh.time().b(it));
    Eigen::MatrixXd btv = leg::eval_at(deg_t, mesh.time().a(it), mesh.time().b(it), qt.x);
    for (int ix = 0; ix < mesh.space().cells(); ++ix) {
      leg::Quad qx = leg::gauss(nqx, mesh.space().a(ix), mesh.space().b(ix));
      Eigen::MatrixXd bxv = leg::eval_at(deg_x, mesh.space().a(ix), mesh.space().b(ix), qx.x);
      Eigen::MatrixXd vals(nqt, nqx);
      for (int q = 0; q < nqt; ++q) {
        for (int r = 0; r < nqx; ++r) vals(q, r) = f.value(qt.x[q], qx.x[r]);
      }
      out.cell(it, ix) =
          btv.transpose() * qt.w.asDiagonal() * vals * qx.w.asDiagonal() * bxv;
    }
  }
  return out;
}

TensorPolyField oracle_representation(const AnalyticField& f, const TensorMesh& working,
                                      int k, int ell, int factor) {
  return project_analytic(f, working.refined(factor, factor), k + 2, ell + 2);
}

TensorPolyField oracle_representation_x_continuous(const AnalyticField& f,
                                                   const TensorMesh& working, int k,
                                                   int ell, int factor) {
  if (!f.value) throw std::invalid_argument("analytic field has no value callback");
  TensorMesh mesh = working.refined(factor, factor);
  const int deg_t = k + 2, deg_x = ell + 2;
  const int nqt = deg_t + 6;
  const int nx = mesh.space().cells();

  // Global Lobatto nodes, shared between neighbors so that traces agree
  // exactly.
  Eigen::VectorXd ref = leg::gauss_lobatto(deg_x + 1);
  Eigen::VectorXd xnodes(nx * deg_x + 1);
  for (int i = 0; i < nx; ++i) {
    const double mid = 0.5 * (mesh.space().a(i) + mesh.space().b(i));
    const double half = 0.5 * mesh.space().width(i);
    for (int p = 0; p < deg_x; ++p) xnodes[i * deg_x + p] = mid + half * ref[p];
  }
  xnodes[nx * deg_x] = mesh.space().end();

  TensorPolyField out(mesh, deg_t, deg_x);
  for (int it = 0; it < mesh.time().cells(); ++it) {
    leg::Quad qt = leg::gauss(nqt, mesh.time().a(it), mesh.time().b(it));
    Eigen::MatrixXd btv = leg::eval_at(deg_t, mesh.time().a(it), mesh.time().b(it), qt.x);
    Eigen::MatrixXd vals(nqt, xnodes.size());
    for (int q = 0; q < nqt; ++q) {
      for (Eigen::Index j = 0; j < xnodes.size(); ++j) {
        vals(q, j) = f.value(qt.x[q], xnodes[j]);
      }
    }
    Eigen::MatrixXd tmodal = btv.transpose() * qt.w.asDiagonal() * vals;
    for (int ix = 0; ix < nx; ++ix) {
      Eigen::MatrixXd xmap =
          leg::lobatto_nodal_to_modal(deg_x, mesh.space().a(ix), mesh.space().b(ix));
      out.cell(it, ix) = tmodal.middleCols(ix * deg_x, deg_x + 1) * xmap.transpose();
    }
  }
  out.flags.continuous_x = true;
  return out;
}

void export_field_csv(const TensorPolyField& f, int nt, int nx, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "t,x,value\n";
  const double T = f.mesh().time().end(), L = f.mesh().space().end();
  for (int i = 0; i < nt; ++i) {
    const double t = nt > 1 ? T * i / (nt - 1) : 0.0;
    for (int j = 0; j < nx; ++j) {
      const double x = nx > 1 ? L * j / (nx - 1) : 0.0;
      os << t << ',' << x << ',' << f.value(t, x) << '\n';
    }
  }
}

}  // namespace ptinterp
