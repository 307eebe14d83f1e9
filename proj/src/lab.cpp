#include "ptinterp/lab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ptinterp/fem.hpp"
#include "ptinterp/interp1d.hpp"
#include "ptinterp/oracles.hpp"
#include "ptinterp/spacetime.hpp"

namespace ptinterp::lab {

namespace {

const char* const kKnownKeys[] = {
    "command", "T", "L", "base_N", "levels", "alpha", "k", "ell", "op",
    "solution", "seed", "out_dir", "constants_file", "freeze", "fault_inject",
    "period", "refine", "dump_field_res", "mesh_file"};

int resolved_base(const RunConfig& cfg) {
  if (cfg.base_n > 0) return cfg.base_n;
  if (cfg.command == "converge") return 8;
  if (cfg.command == "counterexample") return 2;
  if (cfg.command == "localize") return 8;
  return 4;
}

TensorMesh commute_mesh(const RunConfig& cfg) {
  if (cfg.mesh_file.empty()) {
    const int n = resolved_base(cfg);
    return build_uniform_tensor(cfg.T, cfg.L, n, n);
  }
  std::ifstream is(cfg.mesh_file);
  if (!is) throw std::runtime_error("cannot open mesh file " + cfg.mesh_file);
  return tensor_mesh_from_json(nlohmann::json::parse(is));
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double rel(double err, double scale) { return err / std::max(scale, 1e-30); }

TensorPolyField random_member_field(const TensorMesh& mesh, int k, int ell,
                                    std::uint64_t seed) {
  FemSpace space(mesh, k, ell);
  Eigen::MatrixXd nodal(space.n_t(), space.n_x_free());
  std::uint64_t s = seed;
  for (int i = 0; i < nodal.size(); ++i) nodal.data()[i] = uniform_draw(s, -1.0, 1.0);
  return FemFunction(space, nodal).to_field();
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const bool known = std::any_of(std::begin(kKnownKeys), std::end(kKnownKeys),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw std::invalid_argument("unknown config key: " + it.key());
  }
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("command", c.command);
  get("T", c.T);
  get("L", c.L);
  get("base_N", c.base_n);
  get("levels", c.levels);
  get("alpha", c.alpha);
  get("k", c.k);
  get("ell", c.ell);
  get("op", c.op);
  get("solution", c.solution);
  get("seed", c.seed);
  get("out_dir", c.out_dir);
  get("constants_file", c.constants_file);
  get("freeze", c.freeze);
  get("fault_inject", c.fault_inject);
  get("period", c.period);
  get("refine", c.refine);
  get("dump_field_res", c.dump_field_res);
  get("mesh_file", c.mesh_file);
  if (!(c.T > 0) || !(c.L > 0)) throw std::invalid_argument("config: extents must be positive");
  if (c.base_n < 0 || c.levels < 1) throw std::invalid_argument("config: bad mesh family");
  if (c.alpha < 1.0 || c.alpha > 2.0) throw std::invalid_argument("config: alpha in [1,2]");
  if (c.k < 1 || c.ell < 1) throw std::invalid_argument("config: degrees must be >= 1");
  if (c.op != "ix_tensor" && c.op != "ix_tensor_prime" && c.op != "ix_irregular") {
    throw std::invalid_argument("config: unknown operator " + c.op);
  }
  if (c.refine < 1) throw std::invalid_argument("config: refine must be >= 1");
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["T"] = T;
  j["L"] = L;
  j["base_N"] = base_n;
  j["levels"] = levels;
  j["alpha"] = alpha;
  j["k"] = k;
  j["ell"] = ell;
  j["op"] = op;
  j["solution"] = solution;
  j["seed"] = seed;
  j["period"] = period;
  j["refine"] = refine;
  j["fault_inject"] = fault_inject;
  return j;
}

std::string RunConfig::digest() const { return hex64(fnv1a(to_json().dump())); }

FrozenConstants FrozenConstants::load(const std::string& path) {
  FrozenConstants c;
  std::ifstream is(path);
  if (!is) return c;
  nlohmann::json j = nlohmann::json::parse(is);
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  get("poincare_cpp", c.poincare_cpp);
  get("poincare_sharpness", c.poincare_sharpness);
  get("counterexample_r0", c.counterexample_r0);
  get("localization_c1", c.localization_c1);
  get("localization_c2", c.localization_c2);
  return c;
}

void FrozenConstants::save(const std::string& path) const {
  FrozenConstants merged = load(path);
  auto pick = [](double fresh, double old) { return fresh >= 0.0 ? fresh : old; };
  nlohmann::ordered_json j;
  j["poincare_cpp"] = pick(poincare_cpp, merged.poincare_cpp);
  j["poincare_sharpness"] = pick(poincare_sharpness, merged.poincare_sharpness);
  j["counterexample_r0"] = pick(counterexample_r0, merged.counterexample_r0);
  j["localization_c1"] = pick(localization_c1, merged.localization_c1);
  j["localization_c2"] = pick(localization_c2, merged.localization_c2);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << '\n';
}

AnalyticField manufactured_solution(const std::string& name, double T, double L) {
  AnalyticField f;
  const double pi = M_PI;
  if (name == "heat-mode-1" || name == "heat-mode-3") {
    const double m = (name == "heat-mode-1") ? 1.0 : 3.0;
    const double kx = m * pi / L, lam = kx * kx;
    f.value = [=](double t, double x) { return std::sin(kx * x) * std::exp(-lam * t); };
    f.dt = [=](double t, double x) { return -lam * std::sin(kx * x) * std::exp(-lam * t); };
    f.dx = [=](double t, double x) { return kx * std::cos(kx * x) * std::exp(-lam * t); };
    f.dxx = [=](double t, double x) {
      return -kx * kx * std::sin(kx * x) * std::exp(-lam * t);
    };
    return f;
  }
  if (name == "poly-separable") {
    f.value = [=](double t, double x) {
      return (1.0 + t + 0.5 * t * t) * x * (L - x) / (L * L);
    };
    f.dt = [=](double t, double x) { return (1.0 + t) * x * (L - x) / (L * L); };
    f.dx = [=](double t, double x) {
      return (1.0 + t + 0.5 * t * t) * (L - 2 * x) / (L * L);
    };
    f.dxx = [=](double t, double) { return (1.0 + t + 0.5 * t * t) * (-2.0) / (L * L); };
    return f;
  }
  if (name == "rough-in-time") {
    f.value = [=](double t, double x) {
      return std::pow(std::abs(t - T / 2), 0.6) * std::sin(pi * x / L);
    };
    f.smoothness = "rough";
    return f;
  }
  throw std::invalid_argument("unknown manufactured solution " + name);
}

AnalyticField manufactured_flux(const std::string& name, double T, double L) {
  AnalyticField u = manufactured_solution(name, T, L);
  if (!u.dx) throw std::invalid_argument("solution has no flux callback");
  AnalyticField f;
  f.value = [dx = u.dx](double t, double x) { return -dx(t, x); };
  return f;
}

ExperimentReport run_commute(const RunConfig& cfg) {
  ExperimentReport rep;
  rep.command = "commute";
  rep.seed = cfg.seed;
  rep.config_digest = cfg.digest();
  rep.columns = {"res_time_commute", "res_time_best", "res_time_endpoint",
                 "res_rt",           "res_sigma",     "res_lambda",
                 "res_factor_order", "res_idempotent"};
  rep.notes.push_back("residuals are relative maxima over seeded random suites");

  TensorMesh mesh = commute_mesh(cfg);
  // A graded but admissible time mesh exercises the non-uniform paths.
  const int m = mesh.time().cells();
  Eigen::VectorXd graded(m + 1);
  double pos = 0.0, step = 1.0;
  graded[0] = mesh.time().start();
  for (int i = 1; i <= m; ++i) {
    pos += step;
    graded[i] = pos;
    step *= 1.4;
  }
  for (int i = 1; i <= m; ++i) graded[i] = graded[0] + graded[i] * mesh.time().length() / pos;
  graded[m] = mesh.time().end();
  TensorMesh mesh_graded(TimeMesh(graded), mesh.space());

  const int nfields = 100;
  double res_commute = 0, res_best = 0, res_endpoint = 0;
  std::vector<int> time_ks = {1, 2, 3};
  if (std::find(time_ks.begin(), time_ks.end(), cfg.k) == time_ks.end()) {
    time_ks.push_back(cfg.k);
  }
  for (int k : time_ks) {
    for (int i = 0; i < nfields; ++i) {
      const TensorMesh& m = (i % 2 == 0) ? mesh : mesh_graded;
      TensorPolyField v =
          random_oracle_field(m, cfg.seed + 131 * k + i, {k, cfg.ell, cfg.refine, true});
      TensorPolyField iv = interp_time(v, m.time(), k);
      if (cfg.fault_inject) iv.coeffs().row(1).array() += 1e-6;
      TensorPolyField dtv = differentiate_t(v);
      TensorPolyField lhs = differentiate_t(iv);
      TensorPolyField rhs = l2_project_time(dtv, m.time(), k - 1);
      const double scale = norm(dtv, NormKind::l2q());
      res_commute = std::max(res_commute, rel(norm(lhs - rhs, NormKind::l2q()), scale));
      const double err = norm(dtv - lhs, NormKind::l2q());
      const double best = norm(dtv - rhs, NormKind::l2q());
      res_best = std::max(res_best, rel(std::abs(err - best), best));
      TensorPolyField diff = v - iv;
      for (int b = 0; b <= m.time().cells(); ++b) {
        const double tr = norm(diff, NormKind::trace(m.time().breakpoints()[b]));
        res_endpoint = std::max(res_endpoint, rel(tr, std::max(1.0, v.max_abs())));
      }
    }
  }

  double res_rt = 0, res_sigma = 0;
  for (int ell : {0, 1, 2}) {
    for (int i = 0; i < 20; ++i) {
      TensorPolyField tau = random_oracle_field(mesh, cfg.seed + 17 * ell + i,
                                                {cfg.k, ell + 1, cfg.refine, false});
      TensorPolyField dxt = differentiate_x(tau);
      const double scale = norm(dxt, NormKind::l2q());
      TensorPolyField lhs = differentiate_x(interp_rt(tau, mesh.space(), ell));
      TensorPolyField rhs = l2_project_space(dxt, mesh.space(), ell);
      res_rt = std::max(res_rt, rel(norm(lhs - rhs, NormKind::l2q()), scale));
      for (int k : {1, 2}) {
        TensorPolyField slhs = differentiate_x(interp_Sigma(tau, mesh, k, ell));
        TensorPolyField srhs = l2_project_time(rhs, mesh.time(), k - 1);
        res_sigma = std::max(res_sigma, rel(norm(slhs - srhs, NormKind::l2q()), scale));
      }
    }
  }

  double res_lambda = 0;
  for (int i = 0; i < 50; ++i) {
    TensorPolyField v =
        random_oracle_field(mesh, cfg.seed + 7000 + i, {cfg.k, cfg.ell, cfg.refine, true});
    TensorPolyField tau;
    if (i % 5 == 0) {
      // Exactly divergence-free pair via the stream-function construction.
      tau = -1.0 * differentiate_t(antidifferentiate_x(v));
    } else {
      tau = random_oracle_field(mesh, cfg.seed + 7500 + i,
                                {cfg.k, cfg.ell + 1, cfg.refine, false});
    }
    LambdaPair pair(v, tau);
    LambdaPair out = interp_Lambda(pair, mesh, cfg.k, cfg.ell);
    TensorPolyField target = l2_project_time(
        l2_project_space(pair.div(), mesh.space(), cfg.ell), mesh.time(), cfg.k - 1);
    const double scale =
        std::max(norm(pair.div(), NormKind::l2q()), lambda_norm(pair, NormTag::LambdaFull));
    res_lambda = std::max(res_lambda, rel(norm(out.div() - target, NormKind::l2q()), scale));
  }

  double res_order = 0;
  double res_idem = 0;
  for (int i = 0; i < 20; ++i) {
    TensorPolyField v =
        random_oracle_field(mesh, cfg.seed + 9000 + i, {cfg.k, cfg.ell, cfg.refine, true});
    const double scale = std::max(1.0, v.max_abs());
    TensorPolyField xt =
        interp_space(interp_time(v, mesh.time(), cfg.k), mesh.space(), cfg.ell);
    TensorPolyField tx =
        interp_time(interp_space(v, mesh.space(), cfg.ell), mesh.time(), cfg.k);
    res_order = std::max(res_order,
                         rel((xt.coeffs() - tx.coeffs()).cwiseAbs().maxCoeff(), scale));

    auto idem = [&](auto&& op) {
      TensorPolyField a = op(v);
      TensorPolyField b = op(a);
      res_idem = std::max(
          res_idem, rel((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(), scale));
    };
    idem([&](const TensorPolyField& f) { return interp_time(f, mesh.time(), cfg.k); });
    idem([&](const TensorPolyField& f) { return interp_time_sz(f, mesh.time(), cfg.k); });
    idem([&](const TensorPolyField& f) {
      return l2_project_time(f, mesh.time(), cfg.k - 1);
    });
    idem([&](const TensorPolyField& f) { return interp_space(f, mesh.space(), cfg.ell); });
    idem([&](const TensorPolyField& f) { return interp_rt(f, mesh.space(), cfg.ell); });
    idem([&](const TensorPolyField& f) {
      return interp_X_tensor(f, mesh, cfg.k, cfg.ell).to_field();
    });
    idem([&](const TensorPolyField& f) {
      return interp_X_tensor_prime(f, mesh, cfg.k, cfg.ell).to_field();
    });
  }

  ExperimentReport::Row row;
  row.level = 0;
  row.h_t = mesh.time().width(0);
  row.h_x = mesh.space().width(0);
  row.metrics = {res_commute, res_best,   res_endpoint, res_rt,
                 res_sigma,   res_lambda, res_order,    res_idem};
  rep.add_row(std::move(row));

  auto gate = [&](const char* name, double value, double tol) {
    if (!(value <= tol)) {
      rep.fail(std::string(name) + " residual " + std::to_string(value) + " exceeds " +
               std::to_string(tol));
    }
  };
  gate("time-commuting", res_commute, 1e-11);
  gate("time-best-approximation", res_best, 1e-11);
  gate("time-endpoint", res_endpoint, 1e-12);
  gate("rt-diagram", res_rt, 1e-11);
  gate("sigma-diagram", res_sigma, 1e-11);
  gate("lambda-diagram", res_lambda, 1e-10);
  gate("factor-order", res_order, 1e-11);
  gate("idempotency", res_idem, 1e-12);
  return rep;
}

ExperimentReport run_poincare(const RunConfig& cfg) {
  ExperimentReport rep;
  rep.command = "poincare";
  rep.seed = cfg.seed;
  rep.config_digest = cfg.digest();
  rep.columns = {"max_ratio", "sharpness_max", "gen_ratio_max", "classic_ratio_max"};
  rep.notes.push_back(
      "regression bounds: measured maxima must stay within +10% of the frozen "
      "constants (zero-boundary patch duals throughout)");

  const int per_anisotropy = 500;
  const double anisotropies[] = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  double cpp = 0.0, sharp = 0.0;
  int level = 0;
  for (double a : anisotropies) {
    const double h_t = a, h_x = 1.0;  // h_t / h_x^2 = a on the reference family
    TensorMesh cell(TimeMesh((Eigen::Vector2d() << 0.0, h_t).finished()),
                    SpaceMesh((Eigen::Vector2d() << 0.0, h_x).finished()));
    double max_ratio = 0.0, max_sharp = 0.0, max_gen = 0.0, max_classic = 0.0;
    std::uint64_t s = cfg.seed + 100000 * (level + 1);
    for (int i = 0; i < per_anisotropy; ++i) {
      TensorPolyField v = random_oracle_field(cell, s + i, {cfg.k, cfg.ell, 1, false});
      PoincareReport pr = poincare_report(v, 0, 0, cfg.k, cfg.ell);
      max_ratio = std::max(max_ratio, pr.ratio);
      if (pr.gen_rhs > 0) max_gen = std::max(max_gen, pr.gen_lhs / pr.gen_rhs);
      if (pr.classic_rhs > 0) max_classic = std::max(max_classic, pr.lhs / pr.classic_rhs);

      // Sharpness family: tensor-product polynomials with zero cell mean.
      TensorPolyField w(cell, cfg.k, cfg.ell);
      Eigen::VectorXd ct(cfg.k + 1), cx(cfg.ell + 1);
      for (int m = 0; m <= cfg.k; ++m) ct[m] = uniform_draw(s, -1.0, 1.0);
      for (int m = 0; m <= cfg.ell; ++m) cx[m] = uniform_draw(s, -1.0, 1.0);
      if (i % 2 == 0) {
        ct[0] = 0.0;
      } else {
        cx[0] = 0.0;
      }
      w.cell(0, 0) = ct * cx.transpose();
      PoincareReport pw = poincare_report(w, 0, 0, cfg.k, cfg.ell);
      if (pw.lhs > 1e-14) {
        max_sharp = std::max(max_sharp, (pw.rhs_grad + pw.rhs_dual) / pw.lhs);
      }
    }
    if (cfg.fault_inject) max_ratio *= 10.0;
    cpp = std::max(cpp, max_ratio);
    sharp = std::max(sharp, max_sharp);
    ExperimentReport::Row row;
    row.level = level++;
    row.h_t = h_t;
    row.h_x = h_x;
    row.metrics = {max_ratio, max_sharp, max_gen, max_classic};
    rep.add_row(std::move(row));
  }

  FrozenConstants frozen = FrozenConstants::load(cfg.constants_file);
  if (cfg.freeze) {
    FrozenConstants out;
    out.poincare_cpp = cpp;
    out.poincare_sharpness = sharp;
    out.save(cfg.constants_file);
    frozen.poincare_cpp = cpp;
    frozen.poincare_sharpness = sharp;
    rep.notes.push_back("constants frozen by this run");
  }
  if (frozen.poincare_cpp < 0) {
    rep.fail("no frozen poincare constant; run with --freeze first");
  } else {
    rep.notes.push_back("frozen poincare_cpp = " + std::to_string(frozen.poincare_cpp));
    rep.notes.push_back("frozen poincare_sharpness = " +
                        std::to_string(frozen.poincare_sharpness));
    if (!std::isfinite(cpp) || cpp > 1.1 * frozen.poincare_cpp) {
      rep.fail("poincare ratio " + std::to_string(cpp) + " above frozen bound");
    }
    if (!std::isfinite(sharp) || sharp > 1.1 * frozen.poincare_sharpness) {
      rep.fail("sharpness ratio " + std::to_string(sharp) + " above frozen bound");
    }
  }
  return rep;
}

ExperimentReport run_converge(const RunConfig& cfg) {
  ExperimentReport rep;
  rep.command = "converge";
  rep.seed = cfg.seed;
  rep.config_digest = cfg.digest();
  rep.columns = {"err_dx_l2", "err_dt_hminus1", "err_dt_l2",
                 "err_c0_l2", "thm51_c",        "discrete_residual"};
  rep.notes.push_back("operator " + cfg.op + ", solution " + cfg.solution);
  if (cfg.op == "ix_irregular" && (cfg.k != 1 || cfg.ell != 1)) {
    throw std::invalid_argument("ix_irregular supports k = ell = 1 only");
  }

  AnalyticField u = manufactured_solution(cfg.solution, cfg.T, cfg.L);
  std::vector<double> thm51;
  const int base = resolved_base(cfg);
  for (int level = 0; level < cfg.levels; ++level) {
    const int n = base << level;
    ScaledTensor st = build_scaled_tensor(cfg.T, cfg.L, cfg.L / n, cfg.alpha);
    const TensorMesh& mesh = st.mesh;
    TensorPolyField uh = oracle_representation(u, mesh, cfg.k, cfg.ell, cfg.refine);

    TensorPolyField iu;
    if (cfg.op == "ix_tensor") {
      iu = interp_X_tensor(uh, mesh, cfg.k, cfg.ell).to_field();
    } else if (cfg.op == "ix_tensor_prime") {
      iu = interp_X_tensor_prime(uh, mesh, cfg.k, cfg.ell).to_field();
    } else {
      iu = interp_X_irregular(uh, IrregularMesh::from_tensor(mesh)).to_field();
    }
    if (cfg.fault_inject) iu = 1.001 * iu;

    TensorPolyField e = uh - iu;
    const double err_dx = norm(differentiate_x(e), NormKind::l2q());
    TensorPolyField dte = differentiate_t(e);
    const double err_dt_dual = norm(dte, NormKind::hminus1());
    const double err_dt_l2 = norm(dte, NormKind::l2q());
    double c0 = 0.0;
    for (int b = 0; b <= mesh.time().cells(); ++b) {
      c0 = std::max(c0, norm(e, NormKind::trace(mesh.time().breakpoints()[b])));
    }

    // Localized gradient bound: measured constant against the per-cell
    // best-approximation right-hand side.
    double c51 = 0.0;
    if (cfg.op == "ix_tensor") {
      TensorPolyField dxu = differentiate_x(uh);
      TensorPolyField dtu = differentiate_t(uh);
      double rhs = 0.0;
      for (int it = 0; it < mesh.time().cells(); ++it) {
        const Interval tcell = mesh.time().cell(it);
        for (int ix = 0; ix < mesh.space().cells(); ++ix) {
          const Interval patch = mesh.space().cell_patch(ix);
          const double a =
              space_broken_residual(dxu, mesh.space(), patch, cfg.ell - 1, tcell);
          const double b =
              time_poly_residual(dtu, tcell, cfg.k - 1, InnerKind::L2tHminus1x, patch);
          rhs += a * a + st.h_t * st.h_t / std::pow(st.h_x, 4) * b * b;
        }
      }
      c51 = err_dx * err_dx / rhs;
      thm51.push_back(c51);
    }

    // Discrete inputs must reproduce to near machine precision.
    TensorPolyField member = random_member_field(mesh, cfg.k, cfg.ell, cfg.seed + level);
    TensorPolyField imember;
    if (cfg.op == "ix_tensor") {
      imember = interp_X_tensor(member, mesh, cfg.k, cfg.ell).to_field();
    } else if (cfg.op == "ix_tensor_prime") {
      imember = interp_X_tensor_prime(member, mesh, cfg.k, cfg.ell).to_field();
    } else {
      imember = interp_X_irregular(member, IrregularMesh::from_tensor(mesh)).to_field();
    }
    double disc = rel((member - imember).max_abs(), std::max(1.0, member.max_abs()));
    if (cfg.fault_inject) disc += 1e-6;

    ExperimentReport::Row row;
    row.level = level;
    row.h_t = st.h_t;
    row.h_x = st.h_x;
    row.metrics = {err_dx, err_dt_dual, err_dt_l2, c0, c51, disc};
    rep.add_row(std::move(row));

    if (disc > 1e-11) {
      rep.fail("discrete input not reproduced at level " + std::to_string(level));
    }
    if (cfg.dump_field_res > 0 && level == cfg.levels - 1) {
      std::filesystem::create_directories(cfg.out_dir);
      export_field_csv(uh, cfg.dump_field_res, cfg.dump_field_res,
                       cfg.out_dir + "/solution.csv");
      export_field_csv(iu, cfg.dump_field_res, cfg.dump_field_res,
                       cfg.out_dir + "/interpolant.csv");
    }
  }

  if (cfg.levels >= 3) {
    for (const char* col : {"err_dx_l2", "err_dt_hminus1", "err_dt_l2", "err_c0_l2"}) {
      rep.rates.emplace_back(col, fit_rate(rep, col));
    }
    if (cfg.k == 1 && cfg.ell == 1 && cfg.solution != "rough-in-time") {
      const double r = rep.rates[0].second;
      if (r < 0.8 || r > 1.2) {
        rep.fail("gradient error rate " + std::to_string(r) + " outside 1.0 +- 0.2");
      }
    }
  }
  for (std::size_t i = 1; i < thm51.size(); ++i) {
    if (thm51[i] > 1.2 * thm51[i - 1]) {
      rep.fail("localized gradient bound constant grew by more than 20%");
    }
  }
  return rep;
}

ExperimentReport run_counterexample(const RunConfig& cfg) {
  ExperimentReport rep;
  rep.command = "counterexample";
  rep.seed = cfg.seed;
  rep.config_digest = cfg.digest();
  rep.columns = {"ratio", "numerator", "denominator", "conforming_dt", "hanging"};
  rep.notes.push_back(
      "input: time-independent sawtooth, +-1 at the bisected lattice vertices, "
      "zero on the spatial boundary");

  std::vector<double> ratios;
  const int base = resolved_base(cfg);
  for (int level = 0; level < cfg.levels; ++level) {
    const int n = base << level;
    ScaledTensor st = build_scaled_tensor(cfg.T, cfg.L, cfg.L / n, 2.0);
    IrregularMesh fig = build_figure1_mesh(st.mesh, cfg.period);
    TensorMesh cover = fig.cover();

    TensorPolyField v = comb_field(cover.time(), cover.space());
    TensorPolyField iv = interp_X_irregular(v, fig).to_field();
    double num = norm(differentiate_t(v - iv), NormKind::l2q());
    const double den = st.h_x / st.h_t * norm(differentiate_x(v), NormKind::l2q());
    if (cfg.fault_inject) num *= 10.0;
    const double ratio = num / den;

    // Control: the same input on the conforming base mesh.
    TensorPolyField vb = comb_field(st.mesh.time(), cover.space());
    TensorPolyField ivb =
        interp_X_irregular(vb, IrregularMesh::from_tensor(st.mesh)).to_field();
    const double conforming = norm(differentiate_t(vb - ivb), NormKind::l2q());

    ExperimentReport::Row row;
    row.level = level;
    row.h_t = st.h_t;
    row.h_x = st.h_x;
    row.metrics = {ratio, num, den, conforming,
                   static_cast<double>(fig.constraints().size())};
    rep.add_row(std::move(row));
    ratios.push_back(ratio);

    if (conforming != 0.0) {
      rep.fail("conforming control is not exactly zero at level " + std::to_string(level));
    }
    if (!(num > 0.0)) {
      rep.fail("interpolant did not oscillate in time at level " + std::to_string(level));
    }
  }

  FrozenConstants frozen = FrozenConstants::load(cfg.constants_file);
  const double r_min = *std::min_element(ratios.begin(), ratios.end());
  if (cfg.freeze) {
    FrozenConstants out;
    out.counterexample_r0 = r_min;
    out.save(cfg.constants_file);
    frozen.counterexample_r0 = r_min;
    rep.notes.push_back("constants frozen by this run");
  }
  if (frozen.counterexample_r0 < 0) {
    rep.fail("no frozen counterexample ratio; run with --freeze first");
  } else {
    rep.notes.push_back("frozen r0 = " + std::to_string(frozen.counterexample_r0));
    for (double r : ratios) {
      if (r < frozen.counterexample_r0 * (1 - 1e-9) ||
          r > 3 * frozen.counterexample_r0) {
        rep.fail("ratio " + std::to_string(r) + " left the frozen band [r0, 3 r0]");
      }
    }
  }
  return rep;
}

ExperimentReport run_localize(const RunConfig& cfg) {
  ExperimentReport rep;
  rep.command = "localize";
  rep.seed = cfg.seed;
  rep.config_digest = cfg.digest();
  rep.columns = {"c1",  "c2",  "c1_random", "c2_random", "one_patch_sum",
                 "cs0", "cs1", "cs15",      "cs2"};
  rep.notes.push_back(
      "c1/c2 include deterministic self-similar witnesses; zero-boundary patch "
      "duals; cs* columns use the discrete all-ones family");

  const int n0 = resolved_base(cfg);
  std::vector<double> c1s, c2s;
  for (int level = 0; level < cfg.levels; ++level) {
    const int n = n0 << level;
    SpaceMesh work(build_uniform_tensor(cfg.T, cfg.L, 1, n).space());

    double c1r = 0.0, c2r = 0.0;
    std::uint64_t s = cfg.seed + 1000 * level;
    for (int trial = 0; trial < 50; ++trial) {
      XProfile g(work, 1);
      for (int i = 0; i < n; ++i) {
        g.cell(i)[0] = 0.0;
        g.cell(i)[1] = uniform_draw(s, -1.0, 1.0);
      }
      LocalizationReport r = localization_report(g, work);
      c1r = std::max(c1r, r.patch_sum_sq / r.global_sq);
      c2r = std::max(c2r, r.global_sq / r.weighted_sum_sq);
    }
    XProfile alt(work, 1);
    for (int i = 0; i < n; ++i) alt.cell(i)[1] = (i % 2 == 0) ? 1.0 : -1.0;
    LocalizationReport ra = localization_report(alt, work);
    XProfile one(work, 0);
    for (int i = 0; i < n; ++i) one.cell(i)[0] = std::sqrt(work.width(i));
    LocalizationReport ro = localization_report(one, work);
    double c1 = std::max(c1r, ra.patch_sum_sq / ra.global_sq);
    double c2 = std::max(c2r, ro.global_sq / ro.weighted_sum_sq);

    // Discrete all-ones family (nodal interpolant of 1) drives the
    // weight-exponent sweep.
    FemSpace hats(build_uniform_tensor(cfg.T, cfg.L, 1, n), 1, 1);
    Eigen::MatrixXd nodal = Eigen::MatrixXd::Ones(hats.n_t(), hats.n_x_free());
    XProfile disc = FemFunction(hats, nodal).to_field().slice_t(cfg.T / 2);
    LocalizationReport rd = localization_report(disc, work);
    double cs[4];
    const double sgrid[4] = {0.0, 1.0, 1.5, 2.0};
    for (int i = 0; i < 4; ++i) cs[i] = rd.global_sq / rd.weighted_sum(sgrid[i]);
    if (cfg.fault_inject) {
      c1 *= 2.0;
      cs[0] *= 0.1;
    }
    c1s.push_back(c1);
    c2s.push_back(c2);

    ExperimentReport::Row row;
    row.level = level;
    row.h_t = cfg.T;
    row.h_x = work.width(0);
    row.metrics = {c1, c2, c1r, c2r, ro.patch_sum_sq, cs[0], cs[1], cs[2], cs[3]};
    rep.add_row(std::move(row));
  }

  FrozenConstants frozen = FrozenConstants::load(cfg.constants_file);
  if (cfg.freeze) {
    FrozenConstants out;
    out.localization_c1 = c1s[0];
    out.localization_c2 = c2s[0];
    out.save(cfg.constants_file);
    frozen.localization_c1 = c1s[0];
    frozen.localization_c2 = c2s[0];
    rep.notes.push_back("constants frozen by this run");
  }
  if (frozen.localization_c1 < 0) {
    rep.fail("no frozen localization constants; run with --freeze first");
  } else {
    rep.notes.push_back("frozen c1 = " + std::to_string(frozen.localization_c1) +
                        ", c2 = " + std::to_string(frozen.localization_c2));
    for (int level = 0; level < cfg.levels; ++level) {
      if (c1s[level] < 0.8 * frozen.localization_c1 ||
          c1s[level] > 1.2 * frozen.localization_c1) {
        rep.fail("c1 at level " + std::to_string(level) + " outside +-20% of frozen");
      }
      if (c2s[level] < 0.8 * frozen.localization_c2 ||
          c2s[level] > 1.2 * frozen.localization_c2) {
        rep.fail("c2 at level " + std::to_string(level) + " outside +-20% of frozen");
      }
    }
  }
  if (cfg.levels >= 3) {
    for (const char* col : {"cs0", "cs1", "cs15", "cs2"}) {
      rep.rates.emplace_back(col, fit_rate(rep, col));
    }
    const double slope0 = rep.rates[0].second;
    if (slope0 < -2.3 || slope0 > -1.7) {
      rep.fail("unweighted patch bound slope " + std::to_string(slope0) +
               " outside -2 +- 0.3");
    }
  }
  // The constant function: global dual norm fixed, patch sum decaying at h^2.
  if (rep.rows.size() >= 2) {
    const int col = rep.column_index("one_patch_sum");
    const std::size_t last = rep.rows.size() - 1;
    const double expected =
        rep.rows[0].metrics[col] * std::pow(0.25, static_cast<double>(last));
    const double end = rep.rows[last].metrics[col];
    if (end > 2.0 * expected || end < 0.5 * expected) {
      rep.fail("constant-function patch sum does not decay like h^2");
    }
  }
  return rep;
}

int run_command(const RunConfig& cfg) {
  ExperimentReport rep;
  nlohmann::json mesh_doc;
  if (cfg.command == "commute") {
    rep = run_commute(cfg);
    mesh_doc = to_json(commute_mesh(cfg));
  } else if (cfg.command == "poincare") {
    rep = run_poincare(cfg);
    mesh_doc = to_json(build_uniform_tensor(1.0, 1.0, 1, 1));
  } else if (cfg.command == "converge") {
    rep = run_converge(cfg);
    mesh_doc = to_json(
        build_scaled_tensor(cfg.T, cfg.L, cfg.L / resolved_base(cfg), cfg.alpha).mesh);
  } else if (cfg.command == "counterexample") {
    rep = run_counterexample(cfg);
    mesh_doc = to_json(build_figure1_mesh(
        build_scaled_tensor(cfg.T, cfg.L, cfg.L / resolved_base(cfg), 2.0).mesh, cfg.period));
  } else if (cfg.command == "localize") {
    rep = run_localize(cfg);
    mesh_doc = to_json(build_uniform_tensor(cfg.T, cfg.L, 1, resolved_base(cfg)));
  } else {
    throw std::invalid_argument("unknown command " + cfg.command);
  }

  std::filesystem::create_directories(cfg.out_dir);
  rep.write_json(cfg.out_dir + "/report.json");
  rep.write_csv(cfg.out_dir + "/table.csv");
  std::ofstream ms(cfg.out_dir + "/mesh.json");
  ms << mesh_doc.dump(2) << '\n';
  return rep.passed ? 0 : 1;
}

}  // namespace ptinterp::lab
