#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "ptinterp/mesh.hpp"

using namespace ptinterp;

TEST_CASE("uniform tensor mesh splits as requested") {
  TensorMesh m = build_uniform_tensor(1.0, 1.0, 2, 2);
  CHECK(m.cells() == 4);
  CHECK(m.time().width(0) == doctest::Approx(0.5));
  CHECK(m.space().width(1) == doctest::Approx(0.5));

  TensorMesh one = build_uniform_tensor(1.0, 1.0, 1, 1);
  CHECK(one.cells() == 1);

  TensorMesh r = build_uniform_tensor(1.0, 1.0, 4, 2);
  for (int i = 0; i < 4; ++i) CHECK(r.time().width(i) == doctest::Approx(0.25));
  for (int j = 0; j < 2; ++j) CHECK(r.space().width(j) == doctest::Approx(0.5));

  CHECK(m.time().start() == 0.0);
  CHECK(m.space().start() == 0.0);
  CHECK_THROWS(build_uniform_tensor(-1.0, 1.0, 2, 2));
  CHECK_THROWS(build_uniform_tensor(1.0, 1.0, 0, 2));
}

TEST_CASE("scaled tensor mesh rounds h_t to a divisor of T") {
  ScaledTensor a = build_scaled_tensor(1.0, 1.0, 0.25, 2.0);
  CHECK(a.h_t == doctest::Approx(0.0625));
  CHECK(a.mesh.time().cells() == 16);

  ScaledTensor b = build_scaled_tensor(1.0, 1.0, 0.25, 1.0);
  CHECK(b.h_t == doctest::Approx(0.25));

  ScaledTensor c = build_scaled_tensor(1.0, 1.0, 0.1, 1.5);
  CHECK(c.mesh.time().cells() == 32);
  CHECK(c.h_t == doctest::Approx(1.0 / 32));

  CHECK_THROWS(build_scaled_tensor(0.01, 1.0, 0.5, 2.0));  // h_x^alpha > T
}

TEST_CASE("tiling: cell areas sum to the cylinder area") {
  TensorMesh m = build_uniform_tensor(2.0, 3.0, 5, 7);
  double area = 0.0;
  for (int i = 0; i < m.time().cells(); ++i) {
    for (int j = 0; j < m.space().cells(); ++j) {
      area += m.time().width(i) * m.space().width(j);
    }
  }
  CHECK(area == doctest::Approx(6.0).epsilon(1e-12));

  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(2.0, 3.0, 8, 3), 4);
  CHECK(fig.area() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("patch maps match a brute-force adjacency scan") {
  SpaceMesh sm(build_uniform_tensor(1.0, 1.0, 1, 6).space());
  for (int i = 0; i < sm.cells(); ++i) {
    double lo = sm.a(i), hi = sm.b(i);
    for (int j = 0; j < sm.cells(); ++j) {
      const bool adjacent = !(sm.b(j) < sm.a(i) || sm.a(j) > sm.b(i));
      if (adjacent) {
        lo = std::min(lo, sm.a(j));
        hi = std::max(hi, sm.b(j));
      }
    }
    CHECK(sm.cell_patch(i).a == doctest::Approx(lo));
    CHECK(sm.cell_patch(i).b == doctest::Approx(hi));
  }
  CHECK(sm.vertex_patch(0).a == 0.0);
  CHECK(sm.vertex_patch(3).width() == doctest::Approx(2.0 / 6));
  CHECK(sm.vertex_patch2(3).width() == doctest::Approx(4.0 / 6));
}

TEST_CASE("figure-1 mesh refines every period-th slab") {
  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 14, 7), 4);
  int refined = 0, coarse = 0;
  for (const auto& c : fig.cells()) (c.level == 1 ? refined : coarse)++;
  CHECK(coarse == 11 * 7);
  CHECK(refined == 3 * 2 * 14);
  // Three interior slabs with two interfaces each, one hanging vertex per
  // coarse edge on the interface.
  CHECK(fig.constraints().size() == 6 * 7);
  for (const auto& cons : fig.constraints()) {
    CHECK(cons.w_a == 0.5);
    CHECK(cons.w_b == 0.5);
  }

  CHECK_THROWS(build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 2, 7), 4));
  CHECK_THROWS(build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 14, 7), 1));
}

TEST_CASE("figure-1 mesh on a 4x1 base") {
  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 4, 1), 4);
  int refined = 0;
  for (const auto& c : fig.cells()) refined += (c.level == 1);
  CHECK(refined == 4);
  // The single refined slab is the last one, so only its left interface line
  // is shared with a coarse neighbor; the midpoint vertex on t = T is a free
  // corner, not a hanging vertex.
  CHECK(fig.constraints().size() == 1);

  IrregularMesh two = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 4, 1), 2);
  int slabs = 0;
  for (const auto& c : two.cells()) slabs += (c.level == 1);
  CHECK(slabs == 2 * 2 * 2);  // two refined slabs
}

TEST_CASE("1-irregularity holds under an exhaustive edge scan") {
  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 8, 3), 4);
  // Independent scan: for every cell edge, count mesh vertices strictly
  // inside it.
  for (const auto& c : fig.cells()) {
    int worst = 0;
    int count = 0;
    for (int ix = c.ix0 + 1; ix < c.ix1; ++ix) {
      count += (fig.vertex_id(c.it0, ix) >= 0) ? 1 : 0;
    }
    worst = std::max(worst, count);
    count = 0;
    for (int ix = c.ix0 + 1; ix < c.ix1; ++ix) {
      count += (fig.vertex_id(c.it1, ix) >= 0) ? 1 : 0;
    }
    worst = std::max(worst, count);
    count = 0;
    for (int it = c.it0 + 1; it < c.it1; ++it) {
      count += (fig.vertex_id(it, c.ix0) >= 0) ? 1 : 0;
    }
    worst = std::max(worst, count);
    count = 0;
    for (int it = c.it0 + 1; it < c.it1; ++it) {
      count += (fig.vertex_id(it, c.ix1) >= 0) ? 1 : 0;
    }
    worst = std::max(worst, count);
    CHECK(worst <= 1);
  }
}

TEST_CASE("local grading: cells inside a patch have comparable sizes") {
  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 8, 2), 4);
  for (int c = 0; c < static_cast<int>(fig.cells().size()); ++c) {
    Interval tp, xp;
    fig.cell_patch(c, tp, xp);
    const double ht = fig.t_extent(fig.cells()[c]).width();
    const double hx = fig.x_extent(fig.cells()[c]).width();
    for (const auto& other : fig.cells()) {
      const Interval ot = fig.t_extent(other), ox = fig.x_extent(other);
      const bool inside = ot.a >= tp.a - 1e-14 && ot.b <= tp.b + 1e-14 &&
                          ox.a >= xp.a - 1e-14 && ox.b <= xp.b + 1e-14;
      if (!inside) continue;
      CHECK(ot.width() / ht >= 0.5 - 1e-12);
      CHECK(ot.width() / ht <= 2.0 + 1e-12);
      CHECK(ox.width() / hx >= 0.5 - 1e-12);
      CHECK(ox.width() / hx <= 2.0 + 1e-12);
    }
  }
}

TEST_CASE("irregular constructor rejects broken tilings") {
  Eigen::VectorXd pts(3);
  pts << 0.0, 0.5, 1.0;
  std::vector<IrregularCell> overlap = {{0, 2, 0, 2, 0}, {0, 1, 0, 1, 0}};
  CHECK_THROWS(IrregularMesh(pts, pts, overlap));
  std::vector<IrregularCell> gap = {{0, 1, 0, 2, 0}};
  CHECK_THROWS(IrregularMesh(pts, pts, gap));
}

TEST_CASE("mesh JSON round trips") {
  TensorMesh m = build_uniform_tensor(2.0, 1.0, 3, 5);
  TensorMesh m2 = tensor_mesh_from_json(to_json(m));
  CHECK(m2 == m);

  IrregularMesh fig = build_figure1_mesh(build_uniform_tensor(1.0, 1.0, 8, 2), 4);
  nlohmann::json doc = to_json(fig);
  IrregularMesh fig2 = irregular_mesh_from_json(doc);
  CHECK(fig2.cells().size() == fig.cells().size());
  CHECK(fig2.constraints().size() == fig.constraints().size());
  CHECK(to_json(fig2) == doc);
}

TEST_CASE("nesting and merge helpers") {
  IntervalMesh coarse(build_uniform_tensor(1.0, 1.0, 4, 1).time());
  IntervalMesh fine = coarse.refined(8);
  Nesting n = nesting(coarse, fine);
  CHECK(n.first[0] == 0);
  CHECK(n.first[4] == 32);
  CHECK_THROWS(nesting(fine, coarse));

  IntervalMesh other(build_uniform_tensor(1.0, 1.0, 3, 1).time());
  IntervalMesh merged = merge_meshes(coarse, other);
  CHECK(merged.cells() == 4 + 3 - 1);  // shared endpoints collapse
}
