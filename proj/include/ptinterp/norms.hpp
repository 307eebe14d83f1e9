#pragma once

#include <optional>

#include "ptinterp/field.hpp"

namespace ptinterp {

// The one-dimensional inverse Laplacian with zero boundary values has a
// closed form: for -w'' = g on (a,b), w(a) = w(b) = 0,
//   w'(x) = c - G(x),  G = antiderivative of g with G(a) = 0,
//   c = (b-a)^{-1} * integral of G,
// and ||g||_{H^{-1}(a,b)} = ||w'||_{L^2(a,b)} exactly.

/// w' of the zero-boundary inverse Laplacian applied to g on its interval.
XProfile hminus1_profile(const XProfile& g);

double hminus1_norm_sq(const XProfile& g);
double hminus1_inner(const XProfile& f, const XProfile& g);

/// Brute-force reference: sup over a discrete H^1_0 hat space on a uniform
/// grid of `cells` cells. Independent of the closed-form route.
double hminus1_norm_discrete(const XProfile& g, int cells = 200);

/// Zero-extend the per-cell coefficient blocks to a higher degree.
XProfile pad_profile(const XProfile& g, int deg);

enum class NormTag {
  L2Q,        // L^2 over the (restricted) cylinder
  L2H1semi,   // || d_x f ||_{L^2}
  L2Hminus1,  // || f ||_{L^2(J; H^-1(Omega))}, time-integrated dual norm
  Xnorm,      // (L2H1semi^2 + L2Hminus1(d_t f)^2)^(1/2)
  TraceL2,    // || f(t) ||_{L^2} at a fixed time
  LambdaDiv,  // pair norms; see spacetime.hpp
  LambdaFull,
};

struct NormDomain {
  std::optional<Interval> time;   // breakpoint-aligned time window
  std::optional<Interval> space;  // breakpoint-aligned space window
};

struct NormKind {
  NormTag tag = NormTag::L2Q;
  NormDomain domain;
  double time_point = 0.0;  // used by TraceL2 only

  static NormKind l2q() { return {}; }
  static NormKind h1semi() { return {NormTag::L2H1semi, {}, 0.0}; }
  static NormKind hminus1() { return {NormTag::L2Hminus1, {}, 0.0}; }
  static NormKind x() { return {NormTag::Xnorm, {}, 0.0}; }
  static NormKind trace(double t) { return {NormTag::TraceL2, {}, t}; }
  NormKind on_cell(const TensorMesh& mesh, int it, int ix) const;
  NormKind on(std::optional<Interval> t, std::optional<Interval> x) const;
};

double norm(const TensorPolyField& f, const NormKind& kind);

/// Inner products matching the norm tags, used for Gram assembly.
enum class InnerKind { L2, H1semiX, L2tHminus1x };
double inner(const TensorPolyField& a, const TensorPolyField& b, InnerKind kind,
             const NormDomain& domain = {});

/// Both sides of the pointwise-in-time embedding bound:
///   lhs = ||v(t)||^2_{L^2},
///   rhs = T^-1 ||v||^2_{L^2(Q)} + ||d_x v||^2_{L^2(Q)} + ||d_t v||^2_{L^2(J;H^-1)}.
std::pair<double, double> embedding_gap(const TensorPolyField& v, double t);

}  // namespace ptinterp
