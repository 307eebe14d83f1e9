#include "ptinterp/legendre.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ptinterp::leg {

namespace {

// P_0(xi), ..., P_deg(xi) by the three-term recurrence.
Eigen::VectorXd legendre_raw(int deg, double xi) {
  Eigen::VectorXd p(deg + 1);
  p[0] = 1.0;
  if (deg >= 1) p[1] = xi;
  for (int n = 1; n < deg; ++n) {
    p[n + 1] = ((2 * n + 1) * xi * p[n] - n * p[n - 1]) / (n + 1);
  }
  return p;
}

double legendre_deriv(int n, double xi) {
  // P_n'(xi) via (1-xi^2) P_n' = n (P_{n-1} - xi P_n), guarded at xi = +-1.
  const double one_m = 1.0 - xi * xi;
  Eigen::VectorXd p = legendre_raw(n, xi);
  if (std::abs(one_m) > 1e-10) {
    return n * (p[n - 1] - xi * p[n]) / one_m;
  }
  const double sgn = (xi > 0.0) ? 1.0 : ((n % 2 == 0) ? -1.0 : 1.0);
  return sgn * 0.5 * n * (n + 1);
}

}  // namespace

Eigen::VectorXd eval(int deg, double a, double b, double x) {
  const double h = b - a;
  const double xi = (2.0 * x - a - b) / h;
  Eigen::VectorXd p = legendre_raw(deg, xi);
  for (int n = 0; n <= deg; ++n) p[n] *= std::sqrt((2.0 * n + 1.0) / h);
  return p;
}

Eigen::MatrixXd eval_at(int deg, double a, double b, const Eigen::VectorXd& xs) {
  Eigen::MatrixXd out(xs.size(), deg + 1);
  for (Eigen::Index q = 0; q < xs.size(); ++q) out.row(q) = eval(deg, a, b, xs[q]).transpose();
  return out;
}

Eigen::MatrixXd diff_matrix(int deg, double h) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(deg + 1, deg + 1);
  for (int n = 1; n <= deg; ++n) {
    for (int m = n - 1; m >= 0; m -= 2) {
      d(m, n) = 2.0 / h * std::sqrt((2.0 * n + 1.0) * (2.0 * m + 1.0));
    }
  }
  return d;
}

Eigen::MatrixXd integral_matrix(int deg, double h) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(deg + 2, deg + 1);
  a(0, 0) = 0.5 * h;
  for (int n = 0; n <= deg; ++n) {
    a(n + 1, n) = 0.5 * h / std::sqrt((2.0 * n + 1.0) * (2.0 * n + 3.0));
    if (n >= 1) a(n - 1, n) -= 0.5 * h / std::sqrt((2.0 * n + 1.0) * (2.0 * n - 1.0));
  }
  return a;
}

Eigen::Vector3d bubble_coeffs(double h) {
  return {1.0 / std::sqrt(h), 0.0, -1.0 / std::sqrt(5.0 * h)};
}

namespace {

Quad gauss_reference(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = beta;
    jac(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Quad q;
  q.x = es.eigenvalues();
  q.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    q.w[i] = 2.0 * v0 * v0;
  }
  // Enforce exact symmetry so that odd-degree moments of the rule vanish
  // identically in floating point.
  Eigen::VectorXd xs = q.x, ws = q.w;
  for (int i = 0; i < n; ++i) {
    q.x[i] = 0.5 * (xs[i] - xs[n - 1 - i]);
    q.w[i] = 0.5 * (ws[i] + ws[n - 1 - i]);
  }
  return q;
}

}  // namespace

Quad gauss(int n) {
  if (n < 1) throw std::invalid_argument("gauss: need n >= 1");
  static std::vector<Quad> cache;
  if (n >= static_cast<int>(cache.size())) cache.resize(n + 1);
  if (cache[n].x.size() == 0) cache[n] = gauss_reference(n);
  return cache[n];
}

Quad gauss(int n, double a, double b) {
  Quad q = gauss(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  q.x = (q.x.array() * half + mid).matrix();
  q.w *= half;
  return q;
}

Eigen::VectorXd gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: need n >= 2");
  Eigen::VectorXd x(n);
  x[0] = -1.0;
  x[n - 1] = 1.0;
  const int m = n - 1;  // interior nodes are roots of P_m'
  for (int k = 1; k < m; ++k) {
    double xi = -std::cos(M_PI * k / m);
    for (int it = 0; it < 60; ++it) {
      const double f = legendre_deriv(m, xi);
      // d/dxi P_m'(xi) from the Legendre ODE: (1-xi^2) P'' = 2 xi P' - m(m+1) P.
      Eigen::VectorXd p = legendre_raw(m, xi);
      const double fp = (2.0 * xi * f - m * (m + 1.0) * p[m]) / (1.0 - xi * xi);
      const double dx = f / fp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[k] = xi;
  }
  Eigen::VectorXd xs = x;
  for (int i = 0; i < n; ++i) x[i] = 0.5 * (xs[i] - xs[n - 1 - i]);
  return x;
}

Eigen::MatrixXd lobatto_nodal_to_modal(int deg, double a, double b) {
  Eigen::VectorXd ref = gauss_lobatto(deg + 1);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Eigen::VectorXd nodes = (ref.array() * half + mid).matrix();
  return eval_at(deg, a, b, nodes).inverse();
}

Eigen::MatrixXd transfer_matrix(int deg_out, double ao, double bo,
                                int deg_in, double ai, double bi) {
  const double c = std::max(ao, ai);
  const double d = std::min(bo, bi);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(deg_out + 1, deg_in + 1);
  if (d <= c) return t;
  const int nq = (deg_out + deg_in) / 2 + 1;
  Quad q = gauss(nq, c, d);
  Eigen::MatrixXd bo_vals = eval_at(deg_out, ao, bo, q.x);
  Eigen::MatrixXd bi_vals = eval_at(deg_in, ai, bi, q.x);
  t = bo_vals.transpose() * q.w.asDiagonal() * bi_vals;
  return t;
}

}  // namespace ptinterp::leg
