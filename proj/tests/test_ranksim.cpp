#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "doctest.h"
#include "rfem/errors.hpp"
#include "rfem/ranksim.hpp"
#include "rfem/solve.hpp"

using namespace rfem;

namespace {

std::shared_ptr<const Plex> square(int nx, int ny) {
  return std::make_shared<const Plex>(Plex::unit_square(nx, ny));
}

std::shared_ptr<const Plex> line(int n) {
  return std::make_shared<const Plex>(Plex::interval(n));
}

LagrangeElement tri(int k) { return lagrange_element(CellType::triangle, k); }

ScalarExpr xy() {
  return [](double x, double y) { return x + 10 * y; };
}

}  // namespace

TEST_SUITE("ranksim") {

TEST_CASE("cells split into contiguous blocks") {
  Plex m = Plex::interval(4);
  Partition p = partition_cells(m, 3);
  CHECK(p.nranks == 3);
  CHECK(p.cell_owner == std::vector<int>{0, 0, 1, 1});  // rank 2 stays empty

  CHECK(partition_cells(m, 1).cell_owner == std::vector<int>{0, 0, 0, 0});
  CHECK(partition_cells(m, 4).cell_owner == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(partition_cells(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(partition_cells(m, 5), std::invalid_argument);
}

TEST_CASE("doublet views see the whole mesh with split ownership") {
  auto mesh = square(1, 1);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 2));
  REQUIRE(views.size() == 2);

  for (const RankView& v : views) {
    // Both cells share the diagonal, so each rank's halo is everything.
    CHECK(v.local_plex->chart_size() == 11);
    CHECK((int)v.to_global.size() == 11);
    for (PointId p = 0; p < 11; ++p) CHECK(v.to_global[p] == p);
    CHECK(v.owned_cells.size() == 1);
  }
  CHECK(views[0].owned_cells[0] == 0);
  CHECK(views[1].owned_cells[0] == 1);

  // The closure of cell 0 belongs to rank 0, the rest to rank 1.
  std::set<PointId> rank0 = {0, 2, 3, 5, 6, 9, 10};
  for (PointId p = 0; p < 11; ++p) {
    CHECK(views[0].owner[p] == (rank0.count(p) ? 0 : 1));
    CHECK(views[1].owner[p] == views[0].owner[p]);
    CHECK((views[0].classes[p] == PointClass::ghost) == !rank0.count(p));
    CHECK((views[1].classes[p] == PointClass::ghost) == !!rank0.count(p));
  }
}

TEST_CASE("view construction invariants hold across meshes and rank counts") {
  std::vector<std::shared_ptr<const Plex>> meshes = {line(4), square(1, 1), square(2, 2),
                                                     square(3, 2)};
  for (const auto& mesh : meshes)
    for (int nranks = 1; nranks <= std::min(4, mesh->num_cells()); ++nranks) {
      Partition part = partition_cells(*mesh, nranks);
      auto views = build_rank_views(mesh, part);
      REQUIRE((int)views.size() == nranks);

      std::map<PointId, int> owner_of;
      for (const RankView& v : views) {
        CHECK(std::is_sorted(v.to_global.begin(), v.to_global.end()));
        for (size_t lp = 0; lp < v.to_global.size(); ++lp) {
          PointId gp = v.to_global[lp];
          bool ghost = v.classes[lp] == PointClass::ghost;
          CHECK(ghost == (v.owner[lp] != v.rank));
          if (!ghost) {
            CHECK(owner_of.emplace(gp, v.rank).second);  // one owner overall
            // Core points must not touch ghosts anywhere in their star.
            if (v.classes[lp] == PointClass::core)
              for (PointId q : v.local_plex->star((PointId)lp))
                CHECK(v.classes[q] != PointClass::ghost);
          }
          // Every rank agrees on who owns what it can see.
          CHECK(v.owner[lp] == views[v.owner[lp]].rank);
        }
        for (PointId lc : v.owned_cells)
          CHECK(part.cell_owner[v.to_global[lc]] == v.rank);
      }
      // Ownership covers the global chart.
      CHECK((int)owner_of.size() == mesh->chart_size());
      for (const auto& [gp, r] : owner_of) {
        bool cell = mesh->is_cell(gp);
        if (cell) CHECK(part.cell_owner[gp] == r);
      }
    }
}

TEST_CASE("an empty rank carries an empty view") {
  auto mesh = line(4);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 3));
  CHECK(views[2].local_plex->chart_size() == 0);
  CHECK(views[2].owned_cells.empty());
  auto spaces = build_rank_spaces(*mesh, views, lagrange_element(CellType::interval, 1), {1});
  CHECK(spaces[2].dim_total() == 0);
}

TEST_CASE("rank spaces agree with the global boundary classification") {
  auto mesh = square(2, 2);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 3));
  auto spaces = build_rank_spaces(*mesh, views, tri(2), {1, 2});
  FunctionSpace serial = function_space(mesh, tri(2));
  FunctionSpace serial_res = restricted(serial, {1, 2});

  for (size_t r = 0; r < views.size(); ++r) {
    REQUIRE(spaces[r].dim_total() > 0);
    for (size_t lp = 0; lp < views[r].to_global.size(); ++lp) {
      PointId gp = views[r].to_global[lp];
      CHECK(spaces[r].section.dof_count[lp] == serial_res.section.dof_count[gp]);
      CHECK((spaces[r].section.constrained_count[lp] > 0) ==
            (serial_res.section.constrained_count[gp] > 0));
    }
  }
}

TEST_CASE("star forest roots every ghost dof exactly once") {
  auto mesh = square(2, 2);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 2));
  auto spaces = build_rank_spaces(*mesh, views, tri(2), {1, 2});
  StarForest forest = build_star_forest(views, spaces);

  int expected_leaves = 0;
  for (size_t r = 0; r < views.size(); ++r)
    for (size_t lp = 0; lp < views[r].to_global.size(); ++lp)
      if (views[r].classes[lp] == PointClass::ghost)
        expected_leaves += spaces[r].section.dof_count[lp];
  CHECK((int)forest.edges.size() == expected_leaves);

  std::set<std::pair<int, int>> leaves;
  for (const StarForestEdge& e : forest.edges) {
    CHECK(leaves.emplace(e.leaf_rank, e.leaf_dof).second);
    CHECK(views[e.root_rank].classes.size() > 0);
    CHECK(e.root_rank != e.leaf_rank);
  }
  CHECK(forest.local_sizes[0] == spaces[0].dim_total());

  // The legacy forest forgets dofs sitting on constrained points.
  StarForest legacy = build_star_forest(views, spaces, false);
  int constrained_ghost_dofs = 0;
  for (size_t r = 0; r < views.size(); ++r)
    for (size_t lp = 0; lp < views[r].to_global.size(); ++lp)
      if (views[r].classes[lp] == PointClass::ghost &&
          spaces[r].section.constrained_count[lp] > 0)
        constrained_ghost_dofs += spaces[r].section.dof_count[lp];
  CHECK(constrained_ghost_dofs > 0);
  CHECK((int)legacy.edges.size() == expected_leaves - constrained_ghost_dofs);
}

TEST_CASE("halo exchange fills every ghost with the owner value") {
  auto mesh = square(2, 2);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 2));
  auto spaces = build_rank_spaces(*mesh, views, tri(2), {1, 2});
  StarForest forest = build_star_forest(views, spaces);

  std::vector<Vector> vals;
  for (size_t r = 0; r < views.size(); ++r)
    vals.push_back(interpolate_owned(xy(), views[r], spaces[r]));
  halo_exchange(forest, vals);

  for (size_t r = 0; r < views.size(); ++r) {
    Vector direct = interpolate(xy(), spaces[r]).values;
    CHECK((vals[r] - direct).cwiseAbs().maxCoeff() == 0.0);
  }

  // Idempotence: a second exchange moves nothing.
  std::vector<Vector> again = vals;
  halo_exchange(forest, again);
  for (size_t r = 0; r < views.size(); ++r) CHECK((again[r] - vals[r]).norm() == 0.0);

  // The legacy forest leaves some constrained ghost dof stale.
  StarForest legacy = build_star_forest(views, spaces, false);
  std::vector<Vector> stale;
  for (size_t r = 0; r < views.size(); ++r)
    stale.push_back(interpolate_owned(xy(), views[r], spaces[r]));
  halo_exchange(legacy, stale);
  double worst = 0.0;
  for (size_t r = 0; r < views.size(); ++r) {
    Vector direct = interpolate(xy(), spaces[r]).values;
    worst = std::max(worst, (stale[r] - direct).cwiseAbs().maxCoeff());
  }
  CHECK(worst > 0.0);
}

TEST_CASE("exchange validates its input") {
  auto mesh = square(1, 1);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 2));
  auto spaces = build_rank_spaces(*mesh, views, tri(1), {});
  StarForest forest = build_star_forest(views, spaces);

  std::vector<Vector> one(1, Vector::Zero(spaces[0].dim_total()));
  CHECK_THROWS_AS(halo_exchange(forest, one), std::invalid_argument);
  std::vector<Vector> bad = {Vector::Zero(2), Vector::Zero(spaces[1].dim_total())};
  CHECK_THROWS_AS(halo_exchange(forest, bad), std::invalid_argument);
}

TEST_CASE("parallel numbering covers the free dofs once") {
  for (int nranks : {1, 2, 3}) {
    auto mesh = square(2, 2);
    auto views = build_rank_views(mesh, partition_cells(*mesh, nranks));
    auto spaces = build_rank_spaces(*mesh, views, tri(2), {1});
    ParallelNumbering num = parallel_global_numbering(views, spaces);

    FunctionSpace serial = restricted(function_space(mesh, tri(2)), {1});
    CHECK(num.global_size == serial.dim_free());

    std::set<int> owned_ids;
    for (size_t r = 0; r < views.size(); ++r) {
      CHECK(num.lgmaps[r].global_size == num.global_size);
      CHECK(num.global_sections[r].total == num.global_size);
      for (size_t lp = 0; lp < views[r].to_global.size(); ++lp) {
        int dofs = spaces[r].section.dof_count[lp];
        int off = spaces[r].section.offset[lp];
        bool constrained = spaces[r].section.constrained_count[lp] > 0;
        bool ghost = views[r].classes[lp] == PointClass::ghost;
        for (int k = 0; k < dofs; ++k) {
          int g = num.lgmaps[r].indices[off + k];
          if (constrained) {
            CHECK(g == -1);
          } else {
            CHECK(g >= 0);
            CHECK(g < num.global_size);
            if (!ghost) CHECK(owned_ids.insert(g).second);
          }
        }
      }
    }
    CHECK((int)owned_ids.size() == num.global_size);

    // Ghost dofs resolve to the same global index as on the owner.
    std::map<std::pair<PointId, int>, int> by_point;
    for (size_t r = 0; r < views.size(); ++r)
      for (size_t lp = 0; lp < views[r].to_global.size(); ++lp) {
        if (views[r].classes[lp] == PointClass::ghost) continue;
        int off = spaces[r].section.offset[lp];
        for (int k = 0; k < spaces[r].section.dof_count[lp]; ++k)
          by_point[{views[r].to_global[lp], k}] = num.lgmaps[r].indices[off + k];
      }
    for (size_t r = 0; r < views.size(); ++r)
      for (size_t lp = 0; lp < views[r].to_global.size(); ++lp) {
        int off = spaces[r].section.offset[lp];
        for (int k = 0; k < spaces[r].section.dof_count[lp]; ++k)
          CHECK(num.lgmaps[r].indices[off + k] == by_point.at({views[r].to_global[lp], k}));
      }
  }
}

TEST_CASE("distributed assembly matches the serial solve at every rank count") {
  auto mesh = square(2, 2);
  LagrangeElement el = tri(2);
  ScalarExpr f = [](double x, double y) { return std::cos(x) + y; };

  FunctionSpace serial = function_space(mesh, el);
  std::vector<DirichletBC> bcs = {
      dirichlet_bc(serial, [](double, double) { return 0.0; }, 1),
      dirichlet_bc(serial, [](double, double) { return 0.0; }, 2)};
  Function reference = solve_variational({stiffness_form(), source_form(f), &serial, bcs,
                                          true});

  for (int nranks : {1, 2, 3}) {
    auto views = build_rank_views(mesh, partition_cells(*mesh, nranks));
    auto spaces = build_rank_spaces(*mesh, views, el, {1, 2});
    std::vector<LinearForm> Ls(views.size(), source_form(f));
    ParallelSystem sys = assemble_parallel(stiffness_form(), Ls, views, spaces);
    Vector x = linear_solve(sys.A, sys.b);
    Function u = gather_solution(x, views, spaces, sys.numbering, serial);
    CHECK((u.values - reference.values).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("gather rejects a mismatched solution vector") {
  auto mesh = square(1, 1);
  auto views = build_rank_views(mesh, partition_cells(*mesh, 2));
  auto spaces = build_rank_spaces(*mesh, views, tri(1), {1});
  ParallelNumbering num = parallel_global_numbering(views, spaces);
  FunctionSpace serial = function_space(mesh, tri(1));
  CHECK_THROWS_AS(gather_solution(Vector::Zero(num.global_size + 1), views, spaces, num, serial),
                  std::invalid_argument);
}

}  // TEST_SUITE
