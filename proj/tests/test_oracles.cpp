#include <doctest.h>

#include <cmath>

#include "ptinterp/fem.hpp"
#include "ptinterp/lab.hpp"
#include "ptinterp/oracles.hpp"

#include "test_util.hpp"

using namespace ptinterp;

TEST_CASE("rate fitting") {
  ExperimentReport rep;
  rep.columns = {"err"};
  rep.add_row({0, 1.0, 1.0, {1.0}});
  rep.add_row({1, 0.5, 0.5, {0.5}});
  rep.add_row({2, 0.25, 0.25, {0.25}});
  CHECK(fit_rate(rep, "err") == doctest::Approx(1.0).epsilon(1e-12));

  ExperimentReport quad;
  quad.columns = {"err"};
  quad.add_row({0, 1.0, 1.0, {1.0}});
  quad.add_row({1, 0.5, 0.5, {0.25}});
  quad.add_row({2, 0.25, 0.25, {1.0 / 16}});
  CHECK(fit_rate(quad, "err") == doctest::Approx(2.0).epsilon(1e-12));

  // Jittered first-order data stays within 0.1 of slope one.
  std::uint64_t s = 12;
  ExperimentReport jit;
  jit.columns = {"err"};
  for (int i = 0; i < 5; ++i) {
    const double h = std::pow(0.5, i);
    jit.add_row({i, h, h, {h * (1.0 + uniform_draw(s, -0.05, 0.05))}});
  }
  CHECK(std::abs(fit_rate(jit, "err") - 1.0) < 0.1);

  ExperimentReport thin;
  thin.columns = {"err"};
  thin.add_row({0, 1.0, 1.0, {1.0}});
  CHECK_THROWS(fit_rate(thin, "err"));
  ExperimentReport neg;
  neg.columns = {"err"};
  neg.add_row({0, 1.0, 1.0, {1.0}});
  neg.add_row({1, 0.5, 0.5, {0.0}});
  neg.add_row({2, 0.25, 0.25, {0.1}});
  CHECK_THROWS(fit_rate(neg, "err"));
  CHECK_THROWS(neg.add_row({3, 0.5, 0.5, {0.1}}));  // h_x must not increase
  CHECK_THROWS(rep.column_index("missing"));
}

TEST_CASE("random oracle fields are exactly representable and reproducible") {
  TensorMesh mesh = build_uniform_tensor(1.0, 1.0, 2, 3);
  TensorPolyField a = random_oracle_field(mesh, 42, {1, 1, 8, true});
  TensorPolyField b = random_oracle_field(mesh, 42, {1, 1, 8, true});
  CHECK((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() == 0.0);

  // Re-representation on a further refinement changes nothing.
  TensorPolyField fine = refine_onto(a, a.mesh().refined(2, 2), a.deg_t(), a.deg_x());
  std::uint64_t s = 7;
  for (int i = 0; i < 10; ++i) {
    const double t = uniform_draw(s, 0.0, 1.0), x = uniform_draw(s, 0.0, 1.0);
    CHECK(fine.value(t, x) == doctest::Approx(a.value(t, x)).epsilon(1e-13));
  }
  CHECK(a.trace_x_abs_max() < 1e-13);
  CHECK(a.jump_t_abs_max() < 1e-12);
  CHECK(a.jump_x_abs_max() < 1e-12);
  CHECK(a.flags.zero_trace_x);

  TensorPolyField c = random_oracle_field(mesh, 43, {1, 1, 8, true});
  CHECK((a.coeffs() - c.coeffs()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("finite-difference check accepts the manufactured solutions") {
  for (const char* name : {"heat-mode-1", "heat-mode-3", "poly-separable"}) {
    AnalyticField f = lab::manufactured_solution(name, 1.0, 1.0);
    CHECK(fd_check(f, 1.0, 1.0, 99) < 1e-6);
  }
  AnalyticField rough = lab::manufactured_solution("rough-in-time", 1.0, 1.0);
  CHECK(rough.smoothness == "rough");
  CHECK_THROWS(lab::manufactured_solution("unknown", 1.0, 1.0));

  AnalyticField u = lab::manufactured_solution("heat-mode-1", 1.0, 1.0);
  AnalyticField q = lab::manufactured_flux("heat-mode-1", 1.0, 1.0);
  CHECK(q.value(0.3, 0.4) == doctest::Approx(-u.dx(0.3, 0.4)).epsilon(1e-13));
}

TEST_CASE("semidiscrete residual helpers agree with the generic gram oracle") {
  TensorMesh mesh = build_uniform_tensor(1.0, 1.0, 2, 3);
  TensorPolyField v = random_oracle_field(mesh, 1234, {1, 1, 2, true});
  TensorPolyField dtv = differentiate_t(v);
  const Interval tcell = mesh.time().cell(1);
  const Interval patch = mesh.space().cell_patch(1);

  // Dual-norm time residual: trial space P_0(K_t) (x) (fine x-structure on
  // the patch), Gram assembled in the time-integrated dual inner product.
  const double fast = time_poly_residual(dtv, tcell, 0, InnerKind::L2tHminus1x, patch);
  BestApproxProblem prob;
  prob.target = dtv;
  prob.ip = InnerKind::L2tHminus1x;
  prob.domain = {tcell, patch};
  const auto& fx = dtv.mesh().space();
  for (int ix = 0; ix < fx.cells(); ++ix) {
    if (fx.a(ix) < patch.a - 1e-14 || fx.b(ix) > patch.b + 1e-14) continue;
    for (int m = 0; m <= dtv.deg_x(); ++m) {
      TensorPolyField b(dtv.mesh(), 0, dtv.deg_x());
      // Constant in time over the window, one x-mode per fine cell.
      for (int it = 0; it < dtv.mesh().time().cells(); ++it) {
        const Interval tc = dtv.mesh().time().cell(it);
        if (tc.a < tcell.a - 1e-14 || tc.b > tcell.b + 1e-14) continue;
        b.cell(it, ix)(0, m) = std::sqrt(tc.width());
      }
      prob.basis.push_back(std::move(b));
    }
  }
  BestApproxResult res = best_approx(prob);
  CHECK(res.min_value == doctest::Approx(fast).epsilon(1e-10));
  CHECK(res.residual_orthogonality < 1e-10);

  // Broken-space residual in L^2: trial = constants per *work* cell of the
  // patch, free in time.
  TensorPolyField dxv = differentiate_x(v);
  const double fast2 = space_broken_residual(dxv, mesh.space(), patch, 0, tcell);
  BestApproxProblem prob2;
  prob2.target = dxv;
  prob2.ip = InnerKind::L2;
  prob2.domain = {tcell, patch};
  for (int j = 0; j < mesh.space().cells(); ++j) {
    const Interval wc = mesh.space().cell(j);
    if (wc.a < patch.a - 1e-14 || wc.b > patch.b + 1e-14) continue;
    for (int it = 0; it < dxv.mesh().time().cells(); ++it) {
      const Interval tc = dxv.mesh().time().cell(it);
      if (tc.a < tcell.a - 1e-14 || tc.b > tcell.b + 1e-14) continue;
      for (int m = 0; m <= dxv.deg_t(); ++m) {
        TensorPolyField b(dxv.mesh(), dxv.deg_t(), 0);
        for (int s = 0; s < fx.cells(); ++s) {
          if (fx.a(s) >= wc.a - 1e-14 && fx.b(s) <= wc.b + 1e-14) {
            b.cell(it, s)(m, 0) = std::sqrt(fx.width(s));
          }
        }
        prob2.basis.push_back(std::move(b));
      }
    }
  }
  BestApproxResult res2 = best_approx(prob2);
  CHECK(res2.min_value == doctest::Approx(fast2).epsilon(1e-10));
}

TEST_CASE("gram assembly rejects degenerate trial spaces") {
  TensorMesh cell = build_uniform_tensor(1.0, 1.0, 1, 1);
  TensorPolyField b(cell, 1, 1);
  b.cell(0, 0)(0, 0) = 1.0;
  BestApproxProblem prob;
  prob.target = b;
  prob.basis = {b, b};  // linearly dependent
  CHECK_THROWS(best_approx(prob));
  BestApproxProblem empty;
  empty.target = b;
  CHECK_THROWS(best_approx(empty));
}

TEST_CASE("poincare ratio is uniformly bounded over the anisotropy sweep") {
  std::uint64_t seed = 11;
  double worst = 0.0;
  for (double a : {1e-3, 1.0, 1e3}) {
    TensorMesh cell(TimeMesh((Eigen::Vector2d() << 0.0, a).finished()),
                    SpaceMesh((Eigen::Vector2d() << 0.0, 1.0).finished()));
    for (int i = 0; i < 100; ++i) {
      TensorPolyField v = random_oracle_field(cell, seed + i, {1, 1, 1, false});
      worst = std::max(worst, poincare_report(v, 0, 0, 1, 1).ratio);
    }
  }
  CHECK(worst < 1.0);  // sanity ceiling far above the measured constant
  CHECK(worst > 0.01);
}
