#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "ptinterp/mesh.hpp"

namespace ptinterp {

/// Piecewise polynomial over a 1D mesh, stored as cellwise orthonormal
/// Legendre coefficients (cell i occupies coeffs[i*(deg+1) .. i*(deg+1)+deg]).
class XProfile {
 public:
  XProfile() = default;
  XProfile(IntervalMesh mesh, int deg);
  XProfile(IntervalMesh mesh, int deg, Eigen::VectorXd coeffs);

  const IntervalMesh& mesh() const { return mesh_; }
  int deg() const { return deg_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  auto cell(int i) { return coeffs_.segment(i * (deg_ + 1), deg_ + 1); }
  auto cell(int i) const { return coeffs_.segment(i * (deg_ + 1), deg_ + 1); }

  double value(double x) const;
  double value_in_cell(int i, double x) const;
  double integral() const;
  double norm_l2() const { return coeffs_.norm(); }
  double inner_l2(const XProfile& other) const;

  /// Sub-profile on [dom.a, dom.b]; the endpoints must be breakpoints.
  XProfile restricted(Interval dom) const;
  XProfile derivative() const;
  /// Continuous antiderivative vanishing at the left end; degree + 1.
  XProfile antiderivative() const;

 private:
  IntervalMesh mesh_;
  int deg_ = 0;
  Eigen::VectorXd coeffs_;
};

struct FieldFlags {
  bool continuous_t = false;
  bool continuous_x = false;
  bool zero_trace_x = false;
};

/// Piecewise tensor-polynomial function on a tensor mesh. Coefficient layout:
/// row it*(deg_t+1)+a, column ix*(deg_x+1)+b holds the (a,b) orthonormal
/// Legendre coefficient of cell (it, ix). All calculus on this type is exact.
class TensorPolyField {
 public:
  TensorPolyField() = default;
  TensorPolyField(TensorMesh mesh, int deg_t, int deg_x);

  const TensorMesh& mesh() const { return mesh_; }
  int deg_t() const { return deg_t_; }
  int deg_x() const { return deg_x_; }
  int bt() const { return deg_t_ + 1; }
  int bx() const { return deg_x_ + 1; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  Eigen::MatrixXd& coeffs() { return coeffs_; }
  auto cell(int it, int ix) { return coeffs_.block(it * bt(), ix * bx(), bt(), bx()); }
  auto cell(int it, int ix) const { return coeffs_.block(it * bt(), ix * bx(), bt(), bx()); }

  double value(double t, double x) const;
  /// x-profile of the field at time t, one-sided from within the located cell.
  XProfile slice_t(double t) const;
  XProfile slice_t_in_cell(int it, double t) const;
  /// x-profile of one t-Legendre coefficient (row of the layout).
  XProfile coeff_profile(int it, int mode) const;

  double max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }
  double trace_x_abs_max() const;       // largest value magnitude on x = 0, L
  double jump_t_abs_max() const;        // largest trace mismatch across t-interfaces
  double jump_x_abs_max() const;

  FieldFlags flags;

 private:
  TensorMesh mesh_;
  int deg_t_ = 0;
  int deg_x_ = 0;
  Eigen::MatrixXd coeffs_;
};

TensorPolyField differentiate_t(const TensorPolyField& f);
TensorPolyField differentiate_x(const TensorPolyField& f);
double cell_mean(const TensorPolyField& f, int it, int ix);

/// Exact x-antiderivative vanishing at x = 0, continuous in x; degree + 1.
TensorPolyField antidifferentiate_x(const TensorPolyField& f);

/// Exact re-representation on a nested finer mesh with degrees >= current.
TensorPolyField refine_onto(const TensorPolyField& f, const TensorMesh& fine,
                            int deg_t, int deg_x);
/// Bring both fields onto the union mesh with common degrees.
void to_common(TensorPolyField& a, TensorPolyField& b);

TensorPolyField operator+(const TensorPolyField& a, const TensorPolyField& b);
TensorPolyField operator-(const TensorPolyField& a, const TensorPolyField& b);
TensorPolyField operator*(double s, const TensorPolyField& f);

/// Callback-backed function of (t,x) with optional derivative callbacks.
struct AnalyticField {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dxx;
  std::string smoothness = "smooth";
};

/// Cellwise L^2 projection with Gauss quadrature of deg+6 points per
/// direction; exact whenever f is a polynomial of degree <= deg+5 per
/// variable.
TensorPolyField project_analytic(const AnalyticField& f, const TensorMesh& mesh,
                                 int deg_t, int deg_x);

/// Reference representation of a continuous input: projection onto degrees
/// (k+2, ell+2) on the working mesh refined by `factor` per direction. Every
/// subsequent operator and norm in the library is exact on this space.
TensorPolyField oracle_representation(const AnalyticField& f, const TensorMesh& working,
                                      int k, int ell, int factor = 8);

/// Variant for flux-type inputs that must stay continuous in x: Lobatto
/// interpolation in space (shared nodes, hence exactly continuous), cellwise
/// L^2 projection in time.
TensorPolyField oracle_representation_x_continuous(const AnalyticField& f,
                                                   const TensorMesh& working, int k,
                                                   int ell, int factor = 8);

/// Snapshot on a uniform nt x nx sampling grid as "t,x,value" rows.
void export_field_csv(const TensorPolyField& f, int nt, int nx, const std::string& path);

}  // namespace ptinterp
