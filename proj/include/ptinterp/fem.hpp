#pragma once

#include "ptinterp/field.hpp"

namespace ptinterp {

/// Descriptor of the continuous tensor-product space
/// L^1_k(T_t) (x) L^1_{ell,0}(T_x) with Gauss-Lobatto nodal points.
struct FemSpace {
  TensorMesh mesh;
  int k = 1;
  int ell = 1;
  bool zero_trace = true;

  FemSpace() = default;
  FemSpace(TensorMesh m, int k_, int ell_, bool zero_trace_ = true);

  int n_t() const { return mesh.time().cells() * k + 1; }
  int n_x_all() const { return mesh.space().cells() * ell + 1; }
  int n_x_free() const { return zero_trace ? n_x_all() - 2 : n_x_all(); }
  Eigen::VectorXd t_nodes() const;
  Eigen::VectorXd x_nodes() const;  // all nodes including boundary
  int x_free_to_all(int j) const { return zero_trace ? j + 1 : j; }
};

/// Coefficient view of a member of X_h^{k,ell}: values at the tensor
/// Gauss-Lobatto nodes, spatial boundary nodes omitted for zero-trace spaces.
class FemFunction {
 public:
  FemFunction() = default;
  explicit FemFunction(FemSpace space);
  FemFunction(FemSpace space, Eigen::MatrixXd nodal);

  const FemSpace& space() const { return space_; }
  const Eigen::MatrixXd& nodal() const { return nodal_; }
  Eigen::MatrixXd& nodal() { return nodal_; }

  TensorPolyField to_field() const;
  /// Nodal sampling; exact on members of the space.
  static FemFunction from_field(const TensorPolyField& f, FemSpace space);

 private:
  FemSpace space_;
  Eigen::MatrixXd nodal_;  // n_t x n_x_free
};

/// Bilinear finite element function on a 1-irregular mesh: values at the free
/// vertices; hanging vertices carry the weighted parent combination and
/// spatial boundary vertices are zero.
class FemFunctionIrregular {
 public:
  FemFunctionIrregular() = default;
  explicit FemFunctionIrregular(IrregularMesh mesh);

  const IrregularMesh& mesh() const { return mesh_; }
  int n_free() const { return static_cast<int>(free_ids_.size()); }
  const std::vector<int>& free_ids() const { return free_ids_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }

  int dof_of_vertex(int vid) const { return dof_of_vertex_[vid]; }
  /// Value at any mesh vertex with constraints and boundary conditions
  /// resolved.
  double vertex_value(int vid) const;

  /// Expansion on the cover tensor mesh; exact.
  TensorPolyField to_field() const;

 private:
  IrregularMesh mesh_;
  std::vector<int> free_ids_;
  std::vector<int> dof_of_vertex_;
  Eigen::VectorXd values_;
};

}  // namespace ptinterp
