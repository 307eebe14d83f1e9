#include "ptinterp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ptinterp {

namespace {

void check_increasing(const Eigen::VectorXd& pts) {
  if (pts.size() < 2) throw std::invalid_argument("mesh needs at least one cell");
  for (Eigen::Index i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i] < pts[i + 1])) {
      throw std::invalid_argument("mesh breakpoints must be strictly increasing");
    }
  }
}

}  // namespace

IntervalMesh::IntervalMesh(Eigen::VectorXd breakpoints) : pts_(std::move(breakpoints)) {
  check_increasing(pts_);
}

double IntervalMesh::max_width() const {
  double w = 0.0;
  for (int i = 0; i < cells(); ++i) w = std::max(w, width(i));
  return w;
}

int IntervalMesh::locate(double x) const {
  const double* begin = pts_.data();
  const double* end_ptr = pts_.data() + pts_.size();
  auto it = std::upper_bound(begin, end_ptr, x);
  int i = static_cast<int>(it - begin) - 1;
  return std::clamp(i, 0, cells() - 1);
}

IntervalMesh IntervalMesh::refined(int factor) const {
  if (factor < 1) throw std::invalid_argument("refinement factor must be >= 1");
  Eigen::VectorXd out(cells() * factor + 1);
  int k = 0;
  for (int i = 0; i < cells(); ++i) {
    const double ca = pts_[i], w = width(i);
    for (int s = 0; s < factor; ++s) out[k++] = (s == 0) ? ca : ca + w * s / factor;
  }
  out[k] = pts_[pts_.size() - 1];
  return IntervalMesh(std::move(out));
}

TimeMesh::TimeMesh(Eigen::VectorXd breakpoints) : IntervalMesh(std::move(breakpoints)) {}

SpaceMesh::SpaceMesh(Eigen::VectorXd breakpoints) : IntervalMesh(std::move(breakpoints)) {}

Interval SpaceMesh::vertex_patch(int j) const {
  const auto& p = breakpoints();
  return {p[std::max(j - 1, 0)], p[std::min(j + 1, cells())]};
}

Interval SpaceMesh::vertex_patch2(int j) const {
  const auto& p = breakpoints();
  return {p[std::max(j - 2, 0)], p[std::min(j + 2, cells())]};
}

Interval SpaceMesh::cell_patch(int i) const {
  const auto& p = breakpoints();
  return {p[std::max(i - 1, 0)], p[std::min(i + 2, cells())]};
}

double SpaceMesh::vertex_h(int j) const {
  double h = 0.0;
  if (j > 0) h = std::max(h, width(j - 1));
  if (j < cells()) h = std::max(h, width(j));
  return h;
}

TensorMesh build_uniform_tensor(double T, double L, int M, int N) {
  if (!(T > 0.0) || !(L > 0.0)) throw std::invalid_argument("extents must be positive");
  if (M < 1 || N < 1) throw std::invalid_argument("cell counts must be >= 1");
  Eigen::VectorXd tp(M + 1), xp(N + 1);
  for (int i = 0; i <= M; ++i) tp[i] = T * i / M;
  for (int j = 0; j <= N; ++j) xp[j] = L * j / N;
  return {TimeMesh(std::move(tp)), SpaceMesh(std::move(xp))};
}

ScaledTensor build_scaled_tensor(double T, double L, double h_x, double alpha) {
  if (!(h_x > 0.0) || h_x > L) throw std::invalid_argument("need 0 < h_x <= L");
  if (alpha < 1.0 || alpha > 2.0) throw std::invalid_argument("need alpha in [1,2]");
  const int n = std::max(1, static_cast<int>(std::lround(L / h_x)));
  const double hx_actual = L / n;
  const double ht_nominal = std::pow(hx_actual, alpha);
  if (ht_nominal > T) throw std::invalid_argument("h_x^alpha exceeds the time horizon");
  // Divisor rounding: the nearest value T/m keeps the time mesh uniform.
  int best_m = 1;
  double best_err = std::abs(T - ht_nominal);
  const int m0 = static_cast<int>(std::floor(T / ht_nominal));
  for (int m = std::max(1, m0 - 1); m <= m0 + 2; ++m) {
    const double err = std::abs(T / m - ht_nominal);
    if (err < best_err) {
      best_err = err;
      best_m = m;
    }
  }
  ScaledTensor out;
  out.mesh = build_uniform_tensor(T, L, best_m, n);
  out.h_t_nominal = ht_nominal;
  out.h_t = T / best_m;
  out.h_x = hx_actual;
  return out;
}

IrregularMesh::IrregularMesh(Eigen::VectorXd tpts, Eigen::VectorXd xpts,
                             std::vector<IrregularCell> cells)
    : tpts_(std::move(tpts)), xpts_(std::move(xpts)), cells_(std::move(cells)) {
  check_increasing(tpts_);
  check_increasing(xpts_);
  build_topology();
}

int IrregularMesh::vertex_id(int it, int ix) const {
  const int nx = static_cast<int>(xpts_.size());
  if (it < 0 || it >= static_cast<int>(tpts_.size()) || ix < 0 || ix >= nx) return -1;
  return vertex_index_[it * nx + ix];
}

double IrregularMesh::area() const {
  double a = 0.0;
  for (const auto& c : cells_) a += t_extent(c).width() * x_extent(c).width();
  return a;
}

bool IrregularMesh::on_x_boundary(int vid) const {
  const auto& v = vertices_[vid];
  return v.ix == 0 || v.ix == static_cast<int>(xpts_.size()) - 1;
}

std::vector<int> IrregularMesh::cells_containing(int vid) const {
  const auto& v = vertices_[vid];
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(cells_.size()); ++c) {
    const auto& k = cells_[c];
    if (k.it0 <= v.it && v.it <= k.it1 && k.ix0 <= v.ix && v.ix <= k.ix1) out.push_back(c);
  }
  return out;
}

void IrregularMesh::build_topology() {
  const int nt = static_cast<int>(tpts_.size());
  const int nx = static_cast<int>(xpts_.size());
  vertex_index_.assign(nt * nx, -1);
  vertices_.clear();

  // Exact micro-cell coverage check: the rectangles must tile the lattice.
  std::vector<int> covered((nt - 1) * (nx - 1), 0);
  for (const auto& c : cells_) {
    if (c.it0 >= c.it1 || c.ix0 >= c.ix1 || c.it1 >= nt || c.ix1 >= nx) {
      throw std::invalid_argument("irregular cell out of range");
    }
    for (int it = c.it0; it < c.it1; ++it) {
      for (int ix = c.ix0; ix < c.ix1; ++ix) covered[it * (nx - 1) + ix] += 1;
    }
  }
  for (int v : covered) {
    if (v != 1) throw std::invalid_argument("irregular cells must tile the cylinder");
  }

  auto add_vertex = [&](int it, int ix) {
    int& slot = vertex_index_[it * nx + ix];
    if (slot < 0) {
      slot = static_cast<int>(vertices_.size());
      vertices_.push_back({it, ix});
    }
    return slot;
  };
  for (const auto& c : cells_) {
    add_vertex(c.it0, c.ix0);
    add_vertex(c.it0, c.ix1);
    add_vertex(c.it1, c.ix0);
    add_vertex(c.it1, c.ix1);
  }

  // Hanging vertices: mesh vertices in the interior of another cell's edge.
  constraints_.clear();
  constraint_of_.assign(vertices_.size(), -1);
  auto scan_edge = [&](int pa_it, int pa_ix, int pb_it, int pb_ix) {
    int interior = 0;
    if (pa_it == pb_it) {
      for (int ix = pa_ix + 1; ix < pb_ix; ++ix) {
        const int vid = vertex_id(pa_it, ix);
        if (vid < 0) continue;
        ++interior;
        if (constraint_of_[vid] >= 0) continue;
        constraint_of_[vid] = static_cast<int>(constraints_.size());
        constraints_.push_back(
            {vid, vertex_id(pa_it, pa_ix), vertex_id(pb_it, pb_ix), 0.5, 0.5});
      }
    } else {
      for (int it = pa_it + 1; it < pb_it; ++it) {
        const int vid = vertex_id(it, pa_ix);
        if (vid < 0) continue;
        ++interior;
        if (constraint_of_[vid] >= 0) continue;
        constraint_of_[vid] = static_cast<int>(constraints_.size());
        constraints_.push_back(
            {vid, vertex_id(pa_it, pa_ix), vertex_id(pb_it, pb_ix), 0.5, 0.5});
      }
    }
    if (interior > 1) throw std::invalid_argument("mesh violates the 1-irregular rule");
  };
  for (const auto& c : cells_) {
    scan_edge(c.it0, c.ix0, c.it0, c.ix1);
    scan_edge(c.it1, c.ix0, c.it1, c.ix1);
    scan_edge(c.it0, c.ix0, c.it1, c.ix0);
    scan_edge(c.it0, c.ix1, c.it1, c.ix1);
  }
  for (const auto& cons : constraints_) {
    if (constraint_of_[cons.parent_a] >= 0 || constraint_of_[cons.parent_b] >= 0) {
      throw std::invalid_argument("hanging vertex has a hanging parent");
    }
  }
}

void IrregularMesh::cell_patch(int c, Interval& t_patch, Interval& x_patch) const {
  // Support of the basis function of a free vertex: cells having it as a
  // corner, plus cells whose corner is a hanging vertex it parents.
  auto support_of = [&](int vid, std::vector<int>& cells_out) {
    const auto& v = vertices_[vid];
    auto corner_cells = [&](int it, int ix) {
      for (int k = 0; k < static_cast<int>(cells_.size()); ++k) {
        const auto& cc = cells_[k];
        const bool corner = (cc.it0 == it || cc.it1 == it) && (cc.ix0 == ix || cc.ix1 == ix);
        if (corner) cells_out.push_back(k);
      }
    };
    corner_cells(v.it, v.ix);
    for (const auto& cons : constraints_) {
      if (cons.parent_a == vid || cons.parent_b == vid) {
        const auto& h = vertices_[cons.hanging];
        corner_cells(h.it, h.ix);
      }
    }
  };

  const auto& cell = cells_[c];
  int it0 = cell.it0, it1 = cell.it1, ix0 = cell.ix0, ix1 = cell.ix1;
  for (int vid = 0; vid < static_cast<int>(vertices_.size()); ++vid) {
    if (is_hanging(vid) || on_x_boundary(vid)) continue;
    std::vector<int> supp;
    support_of(vid, supp);
    const bool covers = std::find(supp.begin(), supp.end(), c) != supp.end();
    if (!covers) continue;
    for (int k : supp) {
      it0 = std::min(it0, cells_[k].it0);
      it1 = std::max(it1, cells_[k].it1);
      ix0 = std::min(ix0, cells_[k].ix0);
      ix1 = std::max(ix1, cells_[k].ix1);
    }
  }
  t_patch = {tpts_[it0], tpts_[it1]};
  x_patch = {xpts_[ix0], xpts_[ix1]};
}

TensorMesh IrregularMesh::cover() const {
  return {TimeMesh(tpts_), SpaceMesh(xpts_)};
}

IrregularMesh IrregularMesh::from_tensor(const TensorMesh& mesh) {
  std::vector<IrregularCell> cells;
  cells.reserve(mesh.cells());
  for (int i = 0; i < mesh.time().cells(); ++i) {
    for (int j = 0; j < mesh.space().cells(); ++j) {
      cells.push_back({i, i + 1, j, j + 1, 0});
    }
  }
  return {mesh.time().breakpoints(), mesh.space().breakpoints(), std::move(cells)};
}

IrregularMesh build_figure1_mesh(const TensorMesh& base, int period) {
  const int m = base.time().cells();
  const int n = base.space().cells();
  if (period < 2) throw std::invalid_argument("period must be >= 2");
  if (m < period) throw std::invalid_argument("need at least one refinable slab");
  const double ht0 = base.time().width(0);
  const double hx0 = base.space().width(0);
  for (int i = 0; i < m; ++i) {
    if (std::abs(base.time().width(i) - ht0) > 1e-12 * ht0) {
      throw std::invalid_argument("base mesh must be uniform");
    }
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(base.space().width(j) - hx0) > 1e-12 * hx0) {
      throw std::invalid_argument("base mesh must be uniform");
    }
  }

  auto refined_slab = [&](int i) { return (i + 1) % period == 0; };

  // Cover lattice: base breakpoints plus slab midlines in time, all
  // midpoints in space.
  const auto& tb = base.time().breakpoints();
  const auto& xb = base.space().breakpoints();
  std::vector<double> tl;
  std::vector<int> slab_lt(m + 1);  // base time index -> lattice index
  for (int i = 0; i < m; ++i) {
    slab_lt[i] = static_cast<int>(tl.size());
    tl.push_back(tb[i]);
    if (refined_slab(i)) tl.push_back(0.5 * (tb[i] + tb[i + 1]));
  }
  slab_lt[m] = static_cast<int>(tl.size());
  tl.push_back(tb[m]);

  Eigen::VectorXd xl(2 * n + 1);
  for (int j = 0; j < n; ++j) {
    xl[2 * j] = xb[j];
    xl[2 * j + 1] = 0.5 * (xb[j] + xb[j + 1]);
  }
  xl[2 * n] = xb[n];

  std::vector<IrregularCell> cells;
  for (int i = 0; i < m; ++i) {
    const int lt0 = slab_lt[i], lt1 = slab_lt[i + 1];
    if (!refined_slab(i)) {
      for (int j = 0; j < n; ++j) cells.push_back({lt0, lt1, 2 * j, 2 * j + 2, 0});
    } else {
      for (int half = 0; half < 2; ++half) {
        for (int j = 0; j < 2 * n; ++j) {
          cells.push_back({lt0 + half, lt0 + half + 1, j, j + 1, 1});
        }
      }
    }
  }
  Eigen::VectorXd tlv = Eigen::Map<Eigen::VectorXd>(tl.data(), tl.size());
  return {std::move(tlv), std::move(xl), std::move(cells)};
}

Nesting nesting(const IntervalMesh& coarse, const IntervalMesh& fine) {
  const auto& cp = coarse.breakpoints();
  const auto& fp = fine.breakpoints();
  const double tol = 1e-12 * std::max(std::abs(cp[cp.size() - 1]), 1.0);
  Nesting out;
  out.first.resize(coarse.cells() + 1);
  Eigen::Index k = 0;
  for (int i = 0; i <= coarse.cells(); ++i) {
    while (k < fp.size() && fp[k] < cp[i] - tol) ++k;
    if (k >= fp.size() || std::abs(fp[k] - cp[i]) > tol) {
      throw std::invalid_argument("meshes are not nested");
    }
    out.first[i] = static_cast<int>(k);
  }
  out.identity = (cp.size() == fp.size());
  return out;
}

IntervalMesh merge_meshes(const IntervalMesh& a, const IntervalMesh& b) {
  const auto& pa = a.breakpoints();
  const auto& pb = b.breakpoints();
  const double tol = 1e-12 * std::max({std::abs(a.end()), std::abs(b.end()), 1.0});
  if (std::abs(a.start() - b.start()) > tol || std::abs(a.end() - b.end()) > tol) {
    throw std::invalid_argument("meshes cover different intervals");
  }
  std::vector<double> merged;
  Eigen::Index i = 0, j = 0;
  while (i < pa.size() || j < pb.size()) {
    double v;
    if (j >= pb.size() || (i < pa.size() && pa[i] <= pb[j])) {
      v = pa[i++];
    } else {
      v = pb[j++];
    }
    if (merged.empty() || v - merged.back() > tol) merged.push_back(v);
  }
  return IntervalMesh(Eigen::Map<Eigen::VectorXd>(merged.data(), merged.size()));
}

nlohmann::json to_json(const TensorMesh& mesh) {
  nlohmann::ordered_json j;
  j["type"] = "tensor";
  j["t_breakpoints"] = std::vector<double>(
      mesh.time().breakpoints().data(),
      mesh.time().breakpoints().data() + mesh.time().breakpoints().size());
  j["x_breakpoints"] = std::vector<double>(
      mesh.space().breakpoints().data(),
      mesh.space().breakpoints().data() + mesh.space().breakpoints().size());
  return j;
}

nlohmann::json to_json(const IrregularMesh& mesh) {
  nlohmann::ordered_json j;
  j["type"] = "irregular";
  j["t_lattice"] = std::vector<double>(mesh.tpts().data(),
                                       mesh.tpts().data() + mesh.tpts().size());
  j["x_lattice"] = std::vector<double>(mesh.xpts().data(),
                                       mesh.xpts().data() + mesh.xpts().size());
  nlohmann::ordered_json cells = nlohmann::json::array();
  for (const auto& c : mesh.cells()) {
    cells.push_back({c.it0, c.it1, c.ix0, c.ix1, c.level});
  }
  j["cells"] = cells;
  nlohmann::ordered_json cons = nlohmann::json::array();
  for (const auto& c : mesh.constraints()) {
    const auto& h = mesh.vertex_list()[c.hanging];
    const auto& pa = mesh.vertex_list()[c.parent_a];
    const auto& pb = mesh.vertex_list()[c.parent_b];
    cons.push_back({{"hanging", {h.it, h.ix}},
                    {"parent_a", {pa.it, pa.ix}},
                    {"parent_b", {pb.it, pb.ix}},
                    {"w_a", c.w_a},
                    {"w_b", c.w_b}});
  }
  j["constraints"] = cons;
  return j;
}

TensorMesh tensor_mesh_from_json(const nlohmann::json& j) {
  if (j.at("type") != "tensor") throw std::invalid_argument("not a tensor mesh document");
  std::vector<double> tp = j.at("t_breakpoints").get<std::vector<double>>();
  std::vector<double> xp = j.at("x_breakpoints").get<std::vector<double>>();
  return {TimeMesh(Eigen::Map<Eigen::VectorXd>(tp.data(), tp.size())),
          SpaceMesh(Eigen::Map<Eigen::VectorXd>(xp.data(), xp.size()))};
}

IrregularMesh irregular_mesh_from_json(const nlohmann::json& j) {
  if (j.at("type") != "irregular") throw std::invalid_argument("not an irregular mesh document");
  std::vector<double> tp = j.at("t_lattice").get<std::vector<double>>();
  std::vector<double> xp = j.at("x_lattice").get<std::vector<double>>();
  std::vector<IrregularCell> cells;
  for (const auto& c : j.at("cells")) {
    cells.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>(),
                     c.at(3).get<int>(), c.at(4).get<int>()});
  }
  return {Eigen::Map<Eigen::VectorXd>(tp.data(), tp.size()),
          Eigen::Map<Eigen::VectorXd>(xp.data(), xp.size()), std::move(cells)};
}

}  // namespace ptinterp
