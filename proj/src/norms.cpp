#include "ptinterp/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "ptinterp/legendre.hpp"

namespace ptinterp {

namespace {

// Cell index range [i0, i1) of a breakpoint-aligned window.
std::pair<int, int> cell_range(const IntervalMesh& mesh, const std::optional<Interval>& dom) {
  if (!dom) return {0, mesh.cells()};
  const double tol = 1e-12 * std::max(std::abs(mesh.end()), 1.0);
  int i0 = -1, i1 = -1;
  for (int i = 0; i <= mesh.cells(); ++i) {
    if (std::abs(mesh.breakpoints()[i] - dom->a) <= tol) i0 = i;
    if (std::abs(mesh.breakpoints()[i] - dom->b) <= tol) i1 = i;
  }
  if (i0 < 0 || i1 < 0 || i1 <= i0) {
    throw std::invalid_argument("norm domain is not breakpoint-aligned");
  }
  return {i0, i1};
}

double l2_sq(const TensorPolyField& f, const NormDomain& dom) {
  auto [t0, t1] = cell_range(f.mesh().time(), dom.time);
  auto [x0, x1] = cell_range(f.mesh().space(), dom.space);
  return f.coeffs()
      .block(t0 * f.bt(), x0 * f.bx(), (t1 - t0) * f.bt(), (x1 - x0) * f.bx())
      .squaredNorm();
}

double l2_hminus1_sq(const TensorPolyField& f, const NormDomain& dom) {
  auto [t0, t1] = cell_range(f.mesh().time(), dom.time);
  Interval xdom = dom.space ? *dom.space
                            : Interval{f.mesh().space().start(), f.mesh().space().end()};
  double acc = 0.0;
  const int nq = f.deg_t() + 2;
  for (int it = t0; it < t1; ++it) {
    leg::Quad q = leg::gauss(nq, f.mesh().time().a(it), f.mesh().time().b(it));
    for (int k = 0; k < nq; ++k) {
      XProfile slice = f.slice_t_in_cell(it, q.x[k]).restricted(xdom);
      acc += q.w[k] * hminus1_norm_sq(slice);
    }
  }
  return acc;
}

}  // namespace

XProfile hminus1_profile(const XProfile& g) {
  if (!(g.mesh().length() > 0.0)) throw std::invalid_argument("degenerate interval");
  XProfile big_g = g.antiderivative();
  const double c = big_g.integral() / g.mesh().length();
  XProfile w(g.mesh(), g.deg() + 1, -big_g.coeffs());
  for (int i = 0; i < g.mesh().cells(); ++i) {
    w.cell(i)[0] += c * std::sqrt(g.mesh().width(i));
  }
  return w;
}

double hminus1_norm_sq(const XProfile& g) {
  return hminus1_profile(g).coeffs().squaredNorm();
}

double hminus1_inner(const XProfile& f, const XProfile& g) {
  const int deg = std::max(f.deg(), g.deg()) + 1;
  XProfile wf = pad_profile(hminus1_profile(f), deg);
  XProfile wg = pad_profile(hminus1_profile(g), deg);
  return wf.inner_l2(wg);
}

XProfile pad_profile(const XProfile& g, int deg) {
  if (deg < g.deg()) throw std::invalid_argument("pad_profile cannot lower degree");
  if (deg == g.deg()) return g;
  XProfile out(g.mesh(), deg);
  for (int i = 0; i < g.mesh().cells(); ++i) out.cell(i).head(g.deg() + 1) = g.cell(i);
  return out;
}

double hminus1_norm_discrete(const XProfile& g, int cells) {
  const double a = g.mesh().start(), b = g.mesh().end();
  const double h = (b - a) / cells;
  const int n = cells - 1;  // interior nodes
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const int nq = g.deg() / 2 + 2;
  for (int j = 0; j < cells; ++j) {
    const double ya = a + h * j, yb = a + h * (j + 1);
    // Integrate g against the two hats over each overlap with g's cells.
    for (int c = 0; c < g.mesh().cells(); ++c) {
      const double lo = std::max(ya, g.mesh().a(c)), hi = std::min(yb, g.mesh().b(c));
      if (hi <= lo) continue;
      leg::Quad q = leg::gauss(nq, lo, hi);
      for (int k = 0; k < nq; ++k) {
        const double gv = q.w[k] * g.value_in_cell(c, q.x[k]);
        if (j >= 1) rhs[j - 1] += gv * (yb - q.x[k]) / h;
        if (j + 1 <= n) rhs[j] += gv * (q.x[k] - ya) / h;
      }
    }
  }
  // Thomas algorithm for the tridiagonal stiffness (2/h on the diagonal,
  // -1/h off-diagonal).
  Eigen::VectorXd cp(n), dp(n);
  const double diag = 2.0 / h, off = -1.0 / h;
  cp[0] = off / diag;
  dp[0] = rhs[0] / diag;
  for (int i = 1; i < n; ++i) {
    const double m = diag - off * cp[i - 1];
    cp[i] = off / m;
    dp[i] = (rhs[i] - off * dp[i - 1]) / m;
  }
  Eigen::VectorXd sol(n);
  sol[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) sol[i] = dp[i] - cp[i] * sol[i + 1];
  return std::sqrt(sol.dot(rhs));
}

NormKind NormKind::on_cell(const TensorMesh& mesh, int it, int ix) const {
  NormKind out = *this;
  out.domain.time = mesh.time().cell(it);
  out.domain.space = mesh.space().cell(ix);
  return out;
}

NormKind NormKind::on(std::optional<Interval> t, std::optional<Interval> x) const {
  NormKind out = *this;
  out.domain.time = t;
  out.domain.space = x;
  return out;
}

double norm(const TensorPolyField& f, const NormKind& kind) {
  switch (kind.tag) {
    case NormTag::L2Q:
      return std::sqrt(l2_sq(f, kind.domain));
    case NormTag::L2H1semi:
      return std::sqrt(l2_sq(differentiate_x(f), kind.domain));
    case NormTag::L2Hminus1:
      return std::sqrt(l2_hminus1_sq(f, kind.domain));
    case NormTag::Xnorm: {
      const double grad = l2_sq(differentiate_x(f), kind.domain);
      const double dual = l2_hminus1_sq(differentiate_t(f), kind.domain);
      return std::sqrt(grad + dual);
    }
    case NormTag::TraceL2: {
      const double t = kind.time_point;
      if (t < f.mesh().time().start() || t > f.mesh().time().end()) {
        throw std::invalid_argument("trace time outside the cylinder");
      }
      Interval xdom = kind.domain.space
                          ? *kind.domain.space
                          : Interval{f.mesh().space().start(), f.mesh().space().end()};
      return f.slice_t(t).restricted(xdom).norm_l2();
    }
    case NormTag::LambdaDiv:
    case NormTag::LambdaFull:
      throw std::invalid_argument("pair norms require a LambdaPair");
  }
  throw std::logic_error("unreachable");
}

double inner(const TensorPolyField& a, const TensorPolyField& b, InnerKind kind,
             const NormDomain& dom) {
  TensorPolyField x = a, y = b;
  if (kind == InnerKind::H1semiX) {
    x = differentiate_x(x);
    y = differentiate_x(y);
  }
  to_common(x, y);
  if (kind != InnerKind::L2tHminus1x) {
    auto [t0, t1] = cell_range(x.mesh().time(), dom.time);
    auto [x0, x1] = cell_range(x.mesh().space(), dom.space);
    const auto bx = x.coeffs().block(t0 * x.bt(), x0 * x.bx(), (t1 - t0) * x.bt(),
                                     (x1 - x0) * x.bx());
    const auto by = y.coeffs().block(t0 * y.bt(), x0 * y.bx(), (t1 - t0) * y.bt(),
                                     (x1 - x0) * y.bx());
    return (bx.array() * by.array()).sum();
  }
  auto [t0, t1] = cell_range(x.mesh().time(), dom.time);
  Interval xdom = dom.space ? *dom.space
                            : Interval{x.mesh().space().start(), x.mesh().space().end()};
  double acc = 0.0;
  const int nq = x.deg_t() + 2;
  for (int it = t0; it < t1; ++it) {
    leg::Quad q = leg::gauss(nq, x.mesh().time().a(it), x.mesh().time().b(it));
    for (int k = 0; k < nq; ++k) {
      XProfile sx = x.slice_t_in_cell(it, q.x[k]).restricted(xdom);
      XProfile sy = y.slice_t_in_cell(it, q.x[k]).restricted(xdom);
      acc += q.w[k] * hminus1_inner(sx, sy);
    }
  }
  return acc;
}

std::pair<double, double> embedding_gap(const TensorPolyField& v, double t) {
  if (t < v.mesh().time().start() || t > v.mesh().time().end()) {
    throw std::invalid_argument("embedding_gap: time outside the cylinder");
  }
  if (v.trace_x_abs_max() > 1e-10 * std::max(1.0, v.max_abs())) {
    throw std::invalid_argument("embedding_gap: field has a nonzero spatial trace");
  }
  const double lhs_n = norm(v, NormKind::trace(t));
  const double l2 = norm(v, NormKind::l2q());
  const double grad = norm(v, NormKind::h1semi());
  const double dual = norm(differentiate_t(v), NormKind::hminus1());
  const double T = v.mesh().time().length();
  return {lhs_n * lhs_n, l2 * l2 / T + grad * grad + dual * dual};
}

}  // namespace ptinterp
