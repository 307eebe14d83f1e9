// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ptinterp/fem.hpp"
#include "ptinterp/interp1d.hpp"
#include "ptinterp/lab.hpp"
#include "ptinterp/oracles.hpp"
#include "ptinterp/spacetime.hpp"

using namespace ptinterp;

namespace {

std::string g_constants = "frozen_constants.json";
std::string g_outdir = "acceptance_out";

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double rel(double err, double scale) { return err / std::max(scale, 1e-30); }

TensorPolyField random_member_field(const TensorMesh& mesh, int k, int ell,
                                    std::uint64_t seed) {
  FemSpace space(mesh, k, ell);
  Eigen::MatrixXd nodal(space.n_t(), space.n_x_free());
  std::uint64_t s = seed;
  for (int i = 0; i < nodal.size(); ++i) nodal.data()[i] = uniform_draw(s, -1.0, 1.0);
  return FemFunction(space, nodal).to_field();
}

// 1 & 2: time commuting diagram and best-approximation equality, k in
// {1,2,3}, 100 seeded random fields each, both at 1e-11 relative.
void criterion_time(Check& commute, Check& best) {
  TensorMesh mesh = build_uniform_tensor(1.0, 1.0, 4, 2);
  for (int k = 1; k <= 3; ++k) {
    for (int i = 0; i < 100; ++i) {
      TensorPolyField v = random_oracle_field(mesh, 100000 + 977 * k + i, {k, 1, 8, true});
      TensorPolyField dtv = differentiate_t(v);
      TensorPolyField lhs = differentiate_t(interp_time(v, mesh.time(), k));
      TensorPolyField rhs = l2_project_time(dtv, mesh.time(), k - 1);
      const double scale = norm(dtv, NormKind::l2q());
      const double res = rel(norm(lhs - rhs, NormKind::l2q()), scale);
      commute.require(res <= 1e-11, "residual " + std::to_string(res));

      const double err = norm(dtv - lhs, NormKind::l2q());
      const double bst = norm(dtv - rhs, NormKind::l2q());
      const double gap = rel(std::abs(err - bst), bst);
      best.require(gap <= 1e-11, "gap " + std::to_string(gap));
    }
  }
}

// 3: H(div) and flux diagrams, exact at 1e-11 relative, for ell in {0,1,2}
// and k in {1,2}.
void criterion_div_diagrams(Check& c) {
  TensorMesh mesh = build_uniform_tensor(1.0, 1.0, 3, 3);
  for (int ell : {0, 1, 2}) {
    for (int i = 0; i < 25; ++i) {
      TensorPolyField tau =
          random_oracle_field(mesh, 31000 + 59 * ell + i, {2, ell + 1, 8, false});
      TensorPolyField dxt = differentiate_x(tau);
      const double scale = norm(dxt, NormKind::l2q());
      TensorPolyField lhs = differentiate_x(interp_rt(tau, mesh.space(), ell));
      TensorPolyField rhs = l2_project_space(dxt, mesh.space(), ell);
      c.require(rel(norm(lhs - rhs, NormKind::l2q()), scale) <= 1e-11, "rt diagram");
      for (int k : {1, 2}) {
        TensorPolyField slhs = differentiate_x(interp_Sigma(tau, mesh, k, ell));
        TensorPolyField srhs = l2_project_time(rhs, mesh.time(), k - 1);
        c.require(rel(norm(slhs - srhs, NormKind::l2q()), scale) <= 1e-11,
                  "sigma diagram");
      }
    }
  }
}

// 4: pair diagram at 1e-10 over 50 random pairs including exactly
// divergence-free ones and the projected heat pair.
void criterion_lambda(Check& c) {
  TensorMesh mesh = build_uniform_tensor(1.0, 1.0, 4, 4);
  for (int i = 0; i < 50; ++i) {
    TensorPolyField v = random_oracle_field(mesh, 41000 + i, {1, 1, 8, true});
    TensorPolyField tau;
    if (i % 5 == 0) {
      tau = -1.0 * differentiate_t(antidifferentiate_x(v));
    } else {
      tau = random_oracle_field(mesh, 41500 + i, {1, 2, 8, false});
    }
    LambdaPair pair(v, tau);
    LambdaPair out = interp_Lambda(pair, mesh, 1, 1);
    TensorPolyField target =
        l2_project_time(l2_project_space(pair.div(), mesh.space(), 1), mesh.time(), 0);
    const double dv = norm(pair.div(), NormKind::l2q());
    const double scale = (i % 5 == 0) ? lambda_norm(pair, NormTag::LambdaFull) : dv;
    c.require(rel(norm(out.div() - target, NormKind::l2q()), scale) <= 1e-10,
              "pair diagram, pair " + std::to_string(i));
  }

  // Heat solution and its flux, in reference representation.
  AnalyticField u = lab::manufactured_solution("heat-mode-1", 1.0, 1.0);
  AnalyticField q = lab::manufactured_flux("heat-mode-1", 1.0, 1.0);
  TensorPolyField uh = oracle_representation(u, mesh, 1, 1, 8);
  TensorPolyField qh = oracle_representation_x_continuous(q, mesh, 1, 2, 8);
  LambdaPair heat(uh, qh);
  LambdaPair out = interp_Lambda(heat, mesh, 1, 1);
  TensorPolyField target =
      l2_project_time(l2_project_space(heat.div(), mesh.space(), 1), mesh.time(), 0);
  const double scale = lambda_norm(heat, NormTag::LambdaFull);
  c.require(rel(norm(out.div() - target, NormKind::l2q()), scale) <= 1e-10, "heat pair");
  // The analytic pair is divergence-free; what remains in the representation
  // is its projection error only.
  c.require(norm(heat.div(), NormKind::l2q()) <= 1e-3 * scale,
            "projected heat pair has large divergence");
}

// 6: every operator is idempotent to 1e-12 coefficientwise on 100 random
// inputs (spread across the operator set, plus the irregular-mesh operator).
void criterion_idempotency(Check& c) {
  TensorMesh mesh = build_uniform_tensor(1.0, 1.0, 4, 4);
  using Op = std::function<TensorPolyField(const TensorPolyField&)>;
  std::vector<std::pair<std::string, Op>> ops = {
      {"interp_time", [&](const TensorPolyField& f) { return interp_time(f, mesh.time(), 2); }},
      {"interp_time_sz",
       [&](const TensorPolyField& f) { return interp_time_sz(f, mesh.time(), 2); }},
      {"l2_project_time",
       [&](const TensorPolyField& f) { return l2_project_time(f, mesh.time(), 1); }},
      {"interp_space",
       [&](const TensorPolyField& f) { return interp_space(f, mesh.space(), 2); }},
      {"interp_rt", [&](const TensorPolyField& f) { return interp_rt(f, mesh.space(), 1); }},
      {"interp_X_tensor",
       [&](const TensorPolyField& f) { return interp_X_tensor(f, mesh, 1, 1).to_field(); }},
      {"interp_X_tensor_prime",
       [&](const TensorPolyField& f) {
         return interp_X_tensor_prime(f, mesh, 1, 1).to_field();
       }},
      {"interp_Sigma",
       [&](const TensorPolyField& f) { return interp_Sigma(f, mesh, 1, 1); }},
  };
  for (std::size_t o = 0; o < ops.size(); ++o) {
    for (int i = 0; i < 12; ++i) {
      TensorPolyField v =
          random_oracle_field(mesh, 61000 + 100 * o + i, {2, 2, 4, true});
      TensorPolyField a = ops[o].second(v);
      TensorPolyField b = ops[o].second(a);
      const double d =
          rel((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(), std::max(1.0, v.max_abs()));
      c.require(d <= 1e-12, ops[o].first + " input " + std::to_string(i));
    }
  }

  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 8, 2), 4);
  for (int i = 0; i < 4; ++i) {
    FemFunctionIrregular seed_fn(fig);
    std::uint64_t s = 62000 + i;
    for (int d = 0; d < seed_fn.n_free(); ++d) seed_fn.values()[d] = uniform_draw(s, -1, 1);
    TensorPolyField v = seed_fn.to_field();
    FemFunctionIrregular a = interp_X_irregular(v, fig);
    FemFunctionIrregular b = interp_X_irregular(a.to_field(), fig);
    const double d = (a.values() - b.values()).cwiseAbs().maxCoeff();
    c.require(d <= 1e-12, "interp_X_irregular input " + std::to_string(i));
  }

  // Pair operator: a second application is the identity on both components.
  for (int i = 0; i < 4; ++i) {
    TensorPolyField v = random_oracle_field(mesh, 63000 + i, {1, 1, 4, true});
    TensorPolyField tau = random_oracle_field(mesh, 63500 + i, {1, 2, 4, false});
    LambdaPair out = interp_Lambda(LambdaPair(v, tau), mesh, 1, 1);
    LambdaPair twice = interp_Lambda(out, mesh, 1, 1);
    const double dv =
        rel((out.v() - twice.v()).max_abs(), std::max(1.0, out.v().max_abs()));
    const double dt =
        rel((out.tau() - twice.tau()).max_abs(), std::max(1.0, out.tau().max_abs()));
    c.require(dv <= 1e-12 && dt <= 1e-12, "interp_Lambda input " + std::to_string(i));
  }
}

// 7: the closed-form dual norm and the brute-force discrete sup agree within
// 0.5% on 20 random profiles.
void criterion_dual_oracle(Check& c) {
  std::uint64_t seed = 71000;
  for (int trial = 0; trial < 20; ++trial) {
    const double len = uniform_draw(seed, 0.25, 2.0);
    Eigen::VectorXd pts(4);
    pts << 0.0, 0.35 * len, 0.65 * len, len;
    XProfile g(IntervalMesh(pts), 3);
    for (int i = 0; i < g.coeffs().size(); ++i) g.coeffs()[i] = uniform_draw(seed, -1, 1);
    const double exact = std::sqrt(hminus1_norm_sq(g));
    const double sup = hminus1_norm_discrete(g, 200);
    c.require(std::abs(sup - exact) / exact < 5e-3,
              "deviation " + std::to_string(std::abs(sup - exact) / exact));
  }
}

int run_all() {
  struct Item {
    std::string name;
    std::function<void(Check&)> fn;
    double budget_s;  // stated runtime budget, 0 = none
  };
  Check time_commute, time_best;
  bool time_ran = false;
  auto ensure_time = [&]() {
    if (!time_ran) {
      criterion_time(time_commute, time_best);
      time_ran = true;
    }
  };

  std::vector<Item> items;
  items.push_back({"commuting diagram in time (k = 1,2,3; 100 fields; 1e-11)",
                   [&](Check& c) {
                     ensure_time();
                     c = time_commute;
                   },
                   10.0});
  items.push_back({"best approximation in time equals the projection route (1e-11)",
                   [&](Check& c) {
                     ensure_time();
                     c = time_best;
                   },
                   0.0});
  items.push_back({"H(div) and flux commuting diagrams (ell = 0,1,2; k = 1,2; 1e-11)",
                   criterion_div_diagrams, 0.0});
  items.push_back({"pair commuting diagram (50 pairs incl. divergence-free; 1e-10)",
                   criterion_lambda, 30.0});
  items.push_back({"mean-value inequality sweep within +10% of frozen bounds",
                   [&](Check& c) {
                     lab::RunConfig cfg;
                     cfg.command = "poincare";
                     cfg.constants_file = g_constants;
                     cfg.out_dir = g_outdir + "/poincare";
                     ExperimentReport rep = lab::run_poincare(cfg);
                     c.require(rep.passed,
                               rep.failures.empty() ? "failed" : rep.failures.front());
                   },
                   60.0});
  items.push_back({"idempotency of every operator (1e-12 coefficientwise)",
                   criterion_idempotency, 0.0});
  items.push_back({"closed-form dual norm vs discrete sup within 0.5%",
                   criterion_dual_oracle, 0.0});
  items.push_back({"convergence rates for the heat solution (alpha = 1, 2)",
                   [&](Check& c) {
                     lab::RunConfig cfg;
                     cfg.command = "converge";
                     cfg.constants_file = g_constants;
                     cfg.base_n = 8;
                     cfg.levels = 4;
                     cfg.alpha = 1.0;
                     cfg.out_dir = g_outdir + "/converge_a1";
                     ExperimentReport a1 = lab::run_converge(cfg);
                     c.require(a1.passed,
                               a1.failures.empty() ? "alpha 1 failed" : a1.failures.front());
                     cfg.base_n = 2;
                     cfg.alpha = 2.0;
                     cfg.out_dir = g_outdir + "/converge_a2";
                     ExperimentReport a2 = lab::run_converge(cfg);
                     c.require(a2.passed,
                               a2.failures.empty() ? "alpha 2 failed" : a2.failures.front());
                   },
                   120.0});
  items.push_back({"time oscillation ratio inside the frozen band, conforming control 0",
                   [&](Check& c) {
                     lab::RunConfig cfg;
                     cfg.command = "counterexample";
                     cfg.constants_file = g_constants;
                     cfg.out_dir = g_outdir + "/counterexample";
                     ExperimentReport rep = lab::run_counterexample(cfg);
                     c.require(rep.passed,
                               rep.failures.empty() ? "failed" : rep.failures.front());
                   },
                   0.0});
  items.push_back({"localization constants stable, unweighted slope -2 +- 0.3",
                   [&](Check& c) {
                     lab::RunConfig cfg;
                     cfg.command = "localize";
                     cfg.constants_file = g_constants;
                     cfg.out_dir = g_outdir + "/localize";
                     ExperimentReport rep = lab::run_localize(cfg);
                     c.require(rep.passed,
                               rep.failures.empty() ? "failed" : rep.failures.front());
                   },
                   0.0});

  int failures = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      items[i].fn(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (items[i].budget_s > 0.0 && secs > items[i].budget_s) {
      c.ok = false;
      c.detail = "runtime " + std::to_string(secs) + " s over budget";
    }
    std::printf("[%s] %2zu. %s (%.1f s)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1,
                items[i].name.c_str(), secs, c.ok ? "" : " -- ",
                c.ok ? "" : c.detail.c_str());
    std::fflush(stdout);
    failures += c.ok ? 0 : 1;
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_constants = argv[1];
  if (argc > 2) g_outdir = argv[2];
  const int failures = run_all();
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
