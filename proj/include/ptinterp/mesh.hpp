#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ptinterp {

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double width() const { return b - a; }
};

/// Partition of an interval into cells by strictly increasing breakpoints.
class IntervalMesh {
 public:
  IntervalMesh() = default;
  explicit IntervalMesh(Eigen::VectorXd breakpoints);

  int cells() const { return static_cast<int>(pts_.size()) - 1; }
  int vertices() const { return static_cast<int>(pts_.size()); }
  double start() const { return pts_[0]; }
  double end() const { return pts_[pts_.size() - 1]; }
  double length() const { return end() - start(); }
  double a(int i) const { return pts_[i]; }
  double b(int i) const { return pts_[i + 1]; }
  double width(int i) const { return pts_[i + 1] - pts_[i]; }
  double max_width() const;
  Interval cell(int i) const { return {pts_[i], pts_[i + 1]}; }
  const Eigen::VectorXd& breakpoints() const { return pts_; }

  /// Index of the cell containing x; points on interior breakpoints are
  /// assigned to the right cell, x = end() to the last cell.
  int locate(double x) const;

  bool operator==(const IntervalMesh& o) const { return pts_ == o.pts_; }

  /// Split every cell into `factor` equal parts; original breakpoints are kept
  /// bit-exactly.
  IntervalMesh refined(int factor) const;

 private:
  Eigen::VectorXd pts_;
};

class TimeMesh : public IntervalMesh {
 public:
  TimeMesh() = default;
  explicit TimeMesh(Eigen::VectorXd breakpoints);
};

class SpaceMesh : public IntervalMesh {
 public:
  SpaceMesh() = default;
  explicit SpaceMesh(Eigen::VectorXd breakpoints);

  /// Vertex patch omega_{x,j}: union of the cells containing vertex j.
  Interval vertex_patch(int j) const;
  /// Second-order patch omega^2_{x,j}.
  Interval vertex_patch2(int j) const;
  /// Cell neighborhood omega_{K_x}: the cell together with its neighbors.
  Interval cell_patch(int i) const;
  /// Local mesh size at a vertex: the largest adjacent cell width.
  double vertex_h(int j) const;
};

/// Cylindrical tensor-product partition of Q = (0,T) x (0,L).
class TensorMesh {
 public:
  TensorMesh() = default;
  TensorMesh(TimeMesh time, SpaceMesh space)
      : time_(std::move(time)), space_(std::move(space)) {}

  const TimeMesh& time() const { return time_; }
  const SpaceMesh& space() const { return space_; }
  int cells() const { return time_.cells() * space_.cells(); }
  double area() const { return time_.length() * space_.length(); }

  bool operator==(const TensorMesh& o) const {
    return time_ == o.time_ && space_ == o.space_;
  }

  TensorMesh refined(int factor_t, int factor_x) const {
    return {TimeMesh(time_.refined(factor_t).breakpoints()),
            SpaceMesh(space_.refined(factor_x).breakpoints())};
  }

 private:
  TimeMesh time_;
  SpaceMesh space_;
};

TensorMesh build_uniform_tensor(double T, double L, int M, int N);

struct ScaledTensor {
  TensorMesh mesh;
  double h_t_nominal = 0.0;
  double h_t = 0.0;
  double h_x = 0.0;
};

/// Uniform tensor mesh with h_x ~ given width and h_t = h_x^alpha rounded to
/// the nearest divisor T/m of the time horizon.
ScaledTensor build_scaled_tensor(double T, double L, double h_x, double alpha);

/// Axis-aligned rectangle of a locally refined mesh, addressed on the cover
/// lattice (tpts, xpts) of the owning IrregularMesh.
struct IrregularCell {
  int it0 = 0, it1 = 0;  // lattice index range in time
  int ix0 = 0, ix1 = 0;  // lattice index range in space
  int level = 0;
};

/// 1-irregular partition of Q into rectangles with hanging-vertex constraints.
class IrregularMesh {
 public:
  struct Vertex {
    int it = 0, ix = 0;
  };
  struct Constraint {
    int hanging = -1;
    int parent_a = -1;
    int parent_b = -1;
    double w_a = 0.5;
    double w_b = 0.5;
  };

  IrregularMesh() = default;
  IrregularMesh(Eigen::VectorXd tpts, Eigen::VectorXd xpts,
                std::vector<IrregularCell> cells);

  const Eigen::VectorXd& tpts() const { return tpts_; }
  const Eigen::VectorXd& xpts() const { return xpts_; }
  const std::vector<IrregularCell>& cells() const { return cells_; }
  const std::vector<Vertex>& vertex_list() const { return vertices_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  int vertex_id(int it, int ix) const;  // -1 if not a mesh vertex
  double t_of(const Vertex& v) const { return tpts_[v.it]; }
  double x_of(const Vertex& v) const { return xpts_[v.ix]; }
  Interval t_extent(const IrregularCell& c) const { return {tpts_[c.it0], tpts_[c.it1]}; }
  Interval x_extent(const IrregularCell& c) const { return {xpts_[c.ix0], xpts_[c.ix1]}; }
  double area() const;

  bool is_hanging(int vid) const { return constraint_of_[vid] >= 0; }
  const Constraint* constraint_of(int vid) const {
    return constraint_of_[vid] >= 0 ? &constraints_[constraint_of_[vid]] : nullptr;
  }
  bool on_x_boundary(int vid) const;

  /// Cells containing the vertex as a point of their closure.
  std::vector<int> cells_containing(int vid) const;

  /// Patch omega_K = omega_{K,t} x omega_{K,x}: the smallest cylinder holding
  /// the supports of all basis functions whose support contains cell c,
  /// with hanging-vertex couplings followed.
  void cell_patch(int c, Interval& t_patch, Interval& x_patch) const;

  /// Tensor mesh over the full cover lattice; every rectangle is a union of
  /// its cells.
  TensorMesh cover() const;

  static IrregularMesh from_tensor(const TensorMesh& mesh);

 private:
  void build_topology();

  Eigen::VectorXd tpts_, xpts_;
  std::vector<IrregularCell> cells_;
  std::vector<Vertex> vertices_;
  std::vector<int> vertex_index_;     // dense (it,ix) -> id map, -1 if absent
  std::vector<Constraint> constraints_;
  std::vector<int> constraint_of_;    // vertex id -> constraint index or -1
};

/// Refine every period-th time slab of a uniform tensor mesh once in both
/// directions, producing the alternating locally refined family.
IrregularMesh build_figure1_mesh(const TensorMesh& base, int period = 4);

/// Cell lists of a coarse mesh in terms of a nested finer mesh.
struct Nesting {
  std::vector<int> first;  // coarse cell i covers fine cells [first[i], first[i+1])
  bool identity = false;
};
Nesting nesting(const IntervalMesh& coarse, const IntervalMesh& fine);

/// Union of two breakpoint sets (must span the same interval).
IntervalMesh merge_meshes(const IntervalMesh& a, const IntervalMesh& b);

nlohmann::json to_json(const TensorMesh& mesh);
nlohmann::json to_json(const IrregularMesh& mesh);
TensorMesh tensor_mesh_from_json(const nlohmann::json& j);
IrregularMesh irregular_mesh_from_json(const nlohmann::json& j);

}  // namespace ptinterp
