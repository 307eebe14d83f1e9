#include "ptinterp/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "ptinterp/legendre.hpp"

namespace ptinterp {

namespace {

// Fine-cell index range [s0, s1) of a breakpoint-aligned window.
std::pair<int, int> window_cells(const IntervalMesh& mesh, Interval win) {
  const double tol = 1e-12 * std::max(std::abs(mesh.end()), 1.0);
  int s0 = -1, s1 = -1;
  for (int i = 0; i <= mesh.cells(); ++i) {
    if (std::abs(mesh.breakpoints()[i] - win.a) <= tol) s0 = i;
    if (std::abs(mesh.breakpoints()[i] - win.b) <= tol) s1 = i;
  }
  if (s0 < 0 || s1 < 0 || s1 <= s0) {
    throw std::invalid_argument("window is not breakpoint-aligned");
  }
  return {s0, s1};
}

double window_integral(const TensorPolyField& v, int t0, int t1, int x0, int x1) {
  double acc = 0.0;
  for (int it = t0; it < t1; ++it) {
    for (int ix = x0; ix < x1; ++ix) {
      acc += v.cell(it, ix)(0, 0) *
             std::sqrt(v.mesh().time().width(it) * v.mesh().space().width(ix));
    }
  }
  return acc;
}

}  // namespace

BestApproxResult best_approx(const BestApproxProblem& problem) {
  const int n = static_cast<int>(problem.basis.size());
  if (n == 0) throw std::invalid_argument("best_approx needs a nonempty basis");
  if (n > 5000) throw std::invalid_argument("trial space too large");
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = inner(problem.basis[i], problem.basis[j], problem.ip, problem.domain);
      gram(j, i) = gram(i, j);
    }
    rhs[i] = inner(problem.target, problem.basis[i], problem.ip, problem.domain);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  BestApproxResult out;
  out.gram_condition = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(lmin > 0.0) || out.gram_condition > 1e12) {
    throw std::runtime_error("best_approx: Gram matrix is singular or ill-conditioned");
  }
  out.coefficients = gram.ldlt().solve(rhs);

  TensorPolyField acc = out.coefficients[0] * problem.basis[0];
  for (int i = 1; i < n; ++i) acc = acc + out.coefficients[i] * problem.basis[i];
  out.minimizer = acc;

  TensorPolyField diff = problem.target - acc;
  const double dn2 = inner(diff, diff, problem.ip, problem.domain);
  out.min_value = std::sqrt(std::max(0.0, dn2));
  const double tn = std::sqrt(std::max(
      0.0, inner(problem.target, problem.target, problem.ip, problem.domain)));
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double bi = std::sqrt(std::max(0.0, gram(i, i)));
    const double ip = std::abs(inner(diff, problem.basis[i], problem.ip, problem.domain));
    worst = std::max(worst, ip / std::max(tn * bi, 1e-300));
  }
  out.residual_orthogonality = worst;
  return out;
}

std::vector<TensorPolyField> cell_poly_basis(const TensorMesh& mesh, int it, int ix,
                                             int k, int ell) {
  std::vector<TensorPolyField> out;
  out.reserve((k + 1) * (ell + 1));
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; b <= ell; ++b) {
      TensorPolyField f(mesh, k, ell);
      f.cell(it, ix)(a, b) = 1.0;
      out.push_back(std::move(f));
    }
  }
  return out;
}

double time_poly_residual(const TensorPolyField& g, Interval t_window, int k,
                          InnerKind xnorm, std::optional<Interval> x_window) {
  auto [s0, s1] = window_cells(g.mesh().time(), t_window);
  const int bt = g.bt();
  const int deg_r = std::max(g.deg_t(), std::max(k, 0));
  TimeMesh sub(g.mesh().time().breakpoints().segment(s0, s1 - s0 + 1));
  TensorPolyField res(TensorMesh(sub, g.mesh().space()), deg_r, g.deg_x());

  Eigen::MatrixXd gamma;
  if (k >= 0) {
    gamma = Eigen::MatrixXd::Zero(k + 1, g.coeffs().cols());
    for (int s = s0; s < s1; ++s) {
      Eigen::MatrixXd t = leg::transfer_matrix(k, t_window.a, t_window.b, g.deg_t(),
                                               g.mesh().time().a(s), g.mesh().time().b(s));
      gamma.noalias() += t * g.coeffs().middleRows(s * bt, bt);
    }
  }
  for (int s = s0; s < s1; ++s) {
    auto block = res.coeffs().middleRows((s - s0) * (deg_r + 1), deg_r + 1);
    block.topRows(bt) = g.coeffs().middleRows(s * bt, bt);
    if (k >= 0) {
      Eigen::MatrixXd back = leg::transfer_matrix(
          deg_r, g.mesh().time().a(s), g.mesh().time().b(s), k, t_window.a, t_window.b);
      block.noalias() -= back * gamma;
    }
  }
  NormKind kind{xnorm == InnerKind::L2tHminus1x ? NormTag::L2Hminus1 : NormTag::L2Q,
                {std::nullopt, x_window},
                0.0};
  return norm(res, kind);
}

double space_broken_residual(const TensorPolyField& g, const SpaceMesh& work,
                             Interval x_window, int r,
                             std::optional<Interval> t_window) {
  Nesting nest = nesting(work, g.mesh().space());
  auto [j0, j1] = window_cells(work, x_window);
  int s0 = 0, s1 = g.mesh().time().cells();
  if (t_window) std::tie(s0, s1) = window_cells(g.mesh().time(), *t_window);
  const int bt = g.bt(), bx = g.bx();
  const auto rows = g.coeffs().middleRows(s0 * bt, (s1 - s0) * bt);

  double total_sq = 0.0, proj_sq = 0.0;
  for (int j = j0; j < j1; ++j) {
    Eigen::MatrixXd gamma;
    if (r >= 0) gamma = Eigen::MatrixXd::Zero(rows.rows(), r + 1);
    for (int s = nest.first[j]; s < nest.first[j + 1]; ++s) {
      const auto cols = rows.middleCols(s * bx, bx);
      total_sq += cols.squaredNorm();
      if (r >= 0) {
        Eigen::MatrixXd t = leg::transfer_matrix(r, work.a(j), work.b(j), g.deg_x(),
                                                 g.mesh().space().a(s),
                                                 g.mesh().space().b(s));
        gamma.noalias() += cols * t.transpose();
      }
    }
    if (r >= 0) proj_sq += gamma.squaredNorm();
  }
  return std::sqrt(std::max(0.0, total_sq - proj_sq));
}

double cell_tensor_residual(const TensorPolyField& v, Interval t_window,
                            Interval x_window, int k, int ell) {
  auto [s0, s1] = window_cells(v.mesh().time(), t_window);
  auto [r0, r1] = window_cells(v.mesh().space(), x_window);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(k + 1, ell + 1);
  double total_sq = 0.0;
  for (int s = s0; s < s1; ++s) {
    Eigen::MatrixXd tt = leg::transfer_matrix(k, t_window.a, t_window.b, v.deg_t(),
                                              v.mesh().time().a(s), v.mesh().time().b(s));
    for (int r = r0; r < r1; ++r) {
      Eigen::MatrixXd tx = leg::transfer_matrix(ell, x_window.a, x_window.b, v.deg_x(),
                                                v.mesh().space().a(r),
                                                v.mesh().space().b(r));
      total_sq += v.cell(s, r).squaredNorm();
      gamma.noalias() += tt * v.cell(s, r) * tx.transpose();
    }
  }
  return std::sqrt(std::max(0.0, total_sq - gamma.squaredNorm()));
}

PoincareReport poincare_report(const TensorPolyField& v, Interval t_window,
                               Interval x_window, int k, int ell) {
  auto [s0, s1] = window_cells(v.mesh().time(), t_window);
  auto [r0, r1] = window_cells(v.mesh().space(), x_window);
  const double h_t = t_window.width(), h_x = x_window.width();
  const double area = h_t * h_x;

  PoincareReport rep;
  double norm_sq = 0.0;
  for (int s = s0; s < s1; ++s) {
    for (int r = r0; r < r1; ++r) norm_sq += v.cell(s, r).squaredNorm();
  }
  const double mean = window_integral(v, s0, s1, r0, r1) / area;
  rep.lhs = std::sqrt(std::max(0.0, norm_sq - mean * mean * area));

  NormDomain dom{t_window, x_window};
  TensorPolyField dxv = differentiate_x(v);
  TensorPolyField dtv = differentiate_t(v);
  const double grad = norm(dxv, {NormTag::L2Q, dom, 0.0});
  const double dual = norm(dtv, {NormTag::L2Hminus1, dom, 0.0});
  rep.rhs_grad = h_x * grad;
  rep.rhs_dual = h_t / h_x * dual;
  const double denom = rep.rhs_grad + rep.rhs_dual;
  rep.ratio = denom > 0.0 ? rep.lhs / denom : 0.0;

  rep.gen_lhs = cell_tensor_residual(v, t_window, x_window, k, ell);
  SpaceMesh xcell((Eigen::Vector2d() << x_window.a, x_window.b).finished());
  const double gen_grad = space_broken_residual(dxv, xcell, x_window, ell - 1, t_window);
  const double gen_dual =
      time_poly_residual(dtv, t_window, k - 1, InnerKind::L2tHminus1x, x_window);
  rep.gen_rhs = h_x * gen_grad + h_t / h_x * gen_dual;

  rep.classic_rhs = h_x * grad + h_t * norm(dtv, {NormTag::L2Q, dom, 0.0});
  return rep;
}

PoincareReport poincare_report(const TensorPolyField& v, int it, int ix, int k, int ell) {
  return poincare_report(v, v.mesh().time().cell(it), v.mesh().space().cell(ix), k, ell);
}

double LocalizationReport::weighted_sum(double s) const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < patch_sq.size(); ++j) {
    acc += std::pow(vertex_h[j], -s) * patch_sq[j];
  }
  return acc;
}

LocalizationReport localization_report(const XProfile& g, const SpaceMesh& work) {
  nesting(work, g.mesh());  // validates alignment
  LocalizationReport rep;
  const int nv = work.vertices();
  rep.patch_sq.resize(nv);
  rep.vertex_h.resize(nv);
  rep.global_sq = hminus1_norm_sq(g);
  for (int j = 0; j < nv; ++j) {
    rep.patch_sq[j] = hminus1_norm_sq(g.restricted(work.vertex_patch(j)));
    rep.vertex_h[j] = work.vertex_h(j);
  }
  rep.patch_sum_sq = rep.patch_sq.sum();
  rep.weighted_sum_sq = rep.weighted_sum(2.0);
  return rep;
}

double uniform_draw(std::uint64_t& state, double lo, double hi) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

TensorPolyField random_oracle_field(const TensorMesh& work, std::uint64_t seed,
                                    const OracleFieldOptions& opts) {
  const double T = work.time().end(), L = work.space().end();
  const int dt = opts.k + 2;
  const int dx_poly = opts.zero_trace ? opts.ell : opts.ell + 2;

  TensorMesh one(TimeMesh((Eigen::Vector2d() << work.time().start(), T).finished()),
                 SpaceMesh((Eigen::Vector2d() << work.space().start(), L).finished()));
  TensorPolyField global(one, dt, dx_poly);
  std::uint64_t state = seed ^ 0xA2F9C17D1E5B3A6DULL;
  for (int a = 0; a <= dt; ++a) {
    for (int b = 0; b <= dx_poly; ++b) {
      global.cell(0, 0)(a, b) = std::pow(opts.decay, a + b) * uniform_draw(state, -1.0, 1.0);
    }
  }

  if (opts.zero_trace) {
    // Multiply by the normalized spatial bubble 4x(L-x)/L^2.
    const double x0 = work.space().start();
    TensorPolyField shaped(one, dt, dx_poly + 2);
    const int nq = dx_poly + 3;
    leg::Quad q = leg::gauss(nq, x0, L);
    Eigen::MatrixXd bold = leg::eval_at(dx_poly, x0, L, q.x);
    Eigen::MatrixXd bnew = leg::eval_at(dx_poly + 2, x0, L, q.x);
    Eigen::VectorXd bub(nq);
    const double w = L - x0;
    for (int i = 0; i < nq; ++i) {
      bub[i] = 4.0 * (q.x[i] - x0) * (L - q.x[i]) / (w * w);
    }
    Eigen::MatrixXd mul =
        bnew.transpose() * (q.w.array() * bub.array()).matrix().asDiagonal() * bold;
    shaped.cell(0, 0) = global.cell(0, 0) * mul.transpose();
    global = std::move(shaped);
  }

  TensorPolyField out =
      refine_onto(global, work.refined(opts.refine, opts.refine), opts.k + 2, opts.ell + 2);
  out.flags.continuous_t = true;
  out.flags.continuous_x = true;
  out.flags.zero_trace_x = opts.zero_trace;
  return out;
}

TensorPolyField comb_field(const TimeMesh& tm, const SpaceMesh& lattice_x) {
  const int n = lattice_x.cells();
  TensorPolyField out(TensorMesh(tm, lattice_x), 0, 1);
  auto value_at = [&](int j) {
    if (j == 0 || j == n) return 0.0;
    return (j % 2 == 0) ? -1.0 : 1.0;
  };
  for (int ix = 0; ix < n; ++ix) {
    const double hx = lattice_x.width(ix);
    const double va = value_at(ix), vb = value_at(ix + 1);
    for (int it = 0; it < tm.cells(); ++it) {
      const double st = std::sqrt(tm.width(it));
      out.cell(it, ix)(0, 0) = st * std::sqrt(hx) * 0.5 * (va + vb);
      out.cell(it, ix)(0, 1) = st * std::sqrt(hx / 3.0) * 0.5 * (vb - va);
    }
  }
  out.flags.continuous_t = true;
  out.flags.continuous_x = true;
  out.flags.zero_trace_x = true;
  return out;
}

double fd_check(const AnalyticField& f, double T, double L, std::uint64_t seed, int n) {
  std::uint64_t state = seed;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = uniform_draw(state, 0.1 * T, 0.9 * T);
    const double x = uniform_draw(state, 0.1 * L, 0.9 * L);
    const double h1 = 1e-5 * std::max(T, L), h2 = 1e-4 * std::max(T, L);
    auto rel = [](double got, double ref) {
      return std::abs(got - ref) / std::max(1.0, std::abs(ref));
    };
    if (f.dt) {
      const double fd = (f.value(t + h1, x) - f.value(t - h1, x)) / (2 * h1);
      worst = std::max(worst, rel(fd, f.dt(t, x)));
    }
    if (f.dx) {
      const double fd = (f.value(t, x + h1) - f.value(t, x - h1)) / (2 * h1);
      worst = std::max(worst, rel(fd, f.dx(t, x)));
    }
    if (f.dxx) {
      const double fd =
          (f.value(t, x + h2) - 2 * f.value(t, x) + f.value(t, x - h2)) / (h2 * h2);
      worst = std::max(worst, rel(fd, f.dxx(t, x)));
    }
  }
  return worst;
}

}  // namespace ptinterp
