#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rfem/errors.hpp"
#include "rfem/plex.hpp"

using namespace rfem;

namespace {

// Independent transitive-closure walk used as the oracle for closure()/star().
std::vector<PointId> walk(const Plex& m, PointId p, bool up) {
  std::set<PointId> seen{p};
  std::vector<PointId> work{p};
  while (!work.empty()) {
    PointId q = work.back();
    work.pop_back();
    for (PointId r : up ? m.support(q) : m.cone(q))
      if (seen.insert(r).second) work.push_back(r);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

TEST_SUITE("plex") {

TEST_CASE("interval strata and labels") {
  Plex m = Plex::interval(4);
  CHECK(m.dim() == 1);
  CHECK(m.chart_size() == 9);
  CHECK(m.num_cells() == 4);
  CHECK(m.num_vertices() == 5);
  CHECK(m.num_edges() == 0);
  CHECK(m.cells_end() == 4);
  CHECK(m.vertices_begin() == 4);
  CHECK(m.vertices_end() == 9);

  CHECK(m.cone(0) == std::vector<PointId>{4, 5});
  CHECK(m.cone(3) == std::vector<PointId>{7, 8});
  CHECK(m.cell_vertices(2) == std::vector<PointId>{6, 7});

  CHECK(m.face_sets().at(1) == std::vector<PointId>{4});
  CHECK(m.face_sets().at(2) == std::vector<PointId>{8});
  CHECK(m.coordinates(4)[0] == 0.0);
  CHECK(m.coordinates(8)[0] == 1.0);
  CHECK(m.coordinates(6)[0] == doctest::Approx(0.5));

  Plex scaled = Plex::interval(2, 3.0);
  CHECK(scaled.coordinates(4)[0] == doctest::Approx(3.0));
}

TEST_CASE("interval rejects degenerate input") {
  CHECK_THROWS_AS(Plex::interval(0), std::invalid_argument);
  CHECK_THROWS_AS(Plex::interval(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Plex::interval(3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Plex::unit_square(0, 2), std::invalid_argument);
}

TEST_CASE("unit square doublet layout") {
  Plex m = Plex::unit_square(1, 1);
  CHECK(m.chart_size() == 11);
  CHECK(m.num_cells() == 2);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_edges() == 5);

  // Vertices are row-major from the origin, edges horizontal/vertical/diagonal.
  CHECK(m.coordinates(2) == std::array<double, 2>{0.0, 0.0});
  CHECK(m.coordinates(3) == std::array<double, 2>{1.0, 0.0});
  CHECK(m.coordinates(4) == std::array<double, 2>{0.0, 1.0});
  CHECK(m.coordinates(5) == std::array<double, 2>{1.0, 1.0});

  CHECK(m.cone(6) == std::vector<PointId>{2, 3});   // bottom
  CHECK(m.cone(7) == std::vector<PointId>{4, 5});   // top
  CHECK(m.cone(8) == std::vector<PointId>{2, 4});   // left
  CHECK(m.cone(9) == std::vector<PointId>{3, 5});   // right
  CHECK(m.cone(10) == std::vector<PointId>{2, 5});  // diagonal

  // The cell cone lists the edge opposite each corner in turn.
  CHECK(m.cell_vertices(0) == std::vector<PointId>{2, 3, 5});
  CHECK(m.cone(0) == std::vector<PointId>{9, 10, 6});
  CHECK(m.cell_vertices(1) == std::vector<PointId>{2, 5, 4});
  CHECK(m.cone(1) == std::vector<PointId>{7, 8, 10});

  CHECK(m.face_sets().at(1) == std::vector<PointId>{8});
  CHECK(m.face_sets().at(2) == std::vector<PointId>{9});
  CHECK(m.face_sets().at(3) == std::vector<PointId>{6});
  CHECK(m.face_sets().at(4) == std::vector<PointId>{7});
}

TEST_CASE("square mesh counts and Euler characteristic") {
  for (int nx = 1; nx <= 4; ++nx)
    for (int ny = 1; ny <= 3; ++ny) {
      Plex m = Plex::unit_square(nx, ny);
      CHECK(m.num_cells() == 2 * nx * ny);
      CHECK(m.num_vertices() == (nx + 1) * (ny + 1));
      CHECK(m.num_edges() == 3 * nx * ny + nx + ny);
      // A triangulated disc: V - E + F = 1.
      CHECK(m.num_vertices() - m.num_edges() + m.num_cells() == 1);
      CHECK((int)m.face_sets().at(1).size() == ny);
      CHECK((int)m.face_sets().at(3).size() == nx);
    }
}

TEST_CASE("cone and support are dual") {
  for (const Plex& m : {Plex::unit_square(2, 2), Plex::interval(5)}) {
    for (PointId p = 0; p < m.chart_size(); ++p) {
      for (PointId q : m.cone(p)) {
        const auto& sup = m.support(q);
        CHECK(std::count(sup.begin(), sup.end(), p) == 1);
      }
      for (PointId q : m.support(p)) {
        const auto& con = m.cone(q);
        CHECK(std::count(con.begin(), con.end(), p) == 1);
      }
      CHECK(std::is_sorted(m.support(p).begin(), m.support(p).end()));
    }
  }
}

TEST_CASE("closure and star match a brute-force walk") {
  for (const Plex& m : {Plex::unit_square(2, 2), Plex::interval(4)}) {
    for (PointId p = 0; p < m.chart_size(); ++p) {
      CHECK(m.closure(p) == walk(m, p, false));
      CHECK(m.star(p) == walk(m, p, true));
    }
  }
}

TEST_CASE("doublet closure and star spot values") {
  Plex m = Plex::unit_square(1, 1);
  CHECK(m.closure(0) == std::vector<PointId>{0, 2, 3, 5, 6, 9, 10});
  CHECK(m.closure(10) == std::vector<PointId>{2, 5, 10});
  CHECK(m.star(10) == std::vector<PointId>{0, 1, 10});
  CHECK(m.star(2) == std::vector<PointId>{0, 1, 2, 6, 8, 10});
  CHECK(m.point_dim(0) == 2);
  CHECK(m.point_dim(3) == 0);
  CHECK(m.point_dim(7) == 1);
}

TEST_CASE("point queries are bounds-checked") {
  Plex m = Plex::unit_square(1, 1);
  CHECK_THROWS_AS(m.cone(-1), std::out_of_range);
  CHECK_THROWS_AS(m.closure(11), std::out_of_range);
  CHECK_THROWS_AS(m.cell_vertices(2), std::out_of_range);
  CHECK_THROWS_AS(m.coordinates(0), std::out_of_range);
  CHECK_THROWS_AS(m.edge_between(2, 3 + 100), std::out_of_range);
}

TEST_CASE("edge lookup is orientation-free") {
  Plex m = Plex::unit_square(1, 1);
  CHECK(m.edge_between(2, 5) == 10);
  CHECK(m.edge_between(5, 2) == 10);
  CHECK(m.edge_between(3, 5) == 9);
  CHECK_THROWS_AS(m.edge_between(3, 4), std::out_of_range);  // not an edge here
}

TEST_CASE("boundary points take the closure of labelled facets") {
  Plex m = Plex::unit_square(1, 1);
  CHECK(m.boundary_points({1}) == std::set<PointId>{2, 4, 8});
  CHECK(m.boundary_points({1, 2}) == std::set<PointId>{2, 3, 4, 5, 8, 9});
  CHECK(m.boundary_points({}) == std::set<PointId>{});
  // Unknown labels warn on stderr but contribute nothing.
  CHECK(m.boundary_points({1, 99}) == m.boundary_points({1}));

  Plex iv = Plex::interval(3);
  CHECK(iv.boundary_points({1, 2}) == std::set<PointId>{3, 6});
}

TEST_CASE("restriction to a cell closure keeps structure") {
  Plex m = Plex::unit_square(1, 1);
  Plex sub = m.restrict_to(m.closure(0));  // {0, 2, 3, 5, 6, 9, 10}

  CHECK(sub.dim() == 2);
  CHECK(sub.num_cells() == 1);
  CHECK(sub.num_vertices() == 3);
  CHECK(sub.num_edges() == 3);
  CHECK(sub.cone(0) == std::vector<PointId>{5, 6, 4});
  CHECK(sub.cell_vertices(0) == std::vector<PointId>{1, 2, 3});
  CHECK(sub.coordinates(1) == std::array<double, 2>{0.0, 0.0});
  CHECK(sub.coordinates(3) == std::array<double, 2>{1.0, 1.0});
  CHECK(sub.edge_between(1, 3) == 6);

  // Labels survive, keeping empty facet lists where the facet fell away.
  CHECK(sub.face_sets().at(2) == std::vector<PointId>{5});
  CHECK(sub.face_sets().at(3) == std::vector<PointId>{4});
  CHECK(sub.face_sets().at(1).empty());
  CHECK(sub.face_sets().at(4).empty());
}

TEST_CASE("restriction to the full chart is the identity") {
  Plex m = Plex::unit_square(2, 1);
  std::vector<PointId> all(m.chart_size());
  for (PointId p = 0; p < m.chart_size(); ++p) all[p] = p;
  Plex sub = m.restrict_to(all);
  CHECK(sub.chart_size() == m.chart_size());
  for (PointId p = 0; p < m.chart_size(); ++p) {
    CHECK(sub.cone(p) == m.cone(p));
    CHECK(sub.support(p) == m.support(p));
  }
  CHECK(sub.face_sets() == m.face_sets());
  CHECK(sub.id() != m.id());
}

TEST_CASE("empty restriction gives an empty mesh of the same dimension") {
  Plex m = Plex::unit_square(1, 1);
  Plex sub = m.restrict_to({});
  CHECK(sub.dim() == 2);
  CHECK(sub.chart_size() == 0);
  CHECK(sub.num_cells() == 0);
}

TEST_CASE("restriction validates its input") {
  Plex m = Plex::unit_square(1, 1);
  CHECK_THROWS_AS(m.restrict_to({3, 2}), std::invalid_argument);   // unsorted
  CHECK_THROWS_AS(m.restrict_to({2, 2}), std::invalid_argument);   // duplicate
  CHECK_THROWS_AS(m.restrict_to({0, 11}), std::out_of_range);      // outside chart
  CHECK_THROWS_AS(m.restrict_to({0}), InternalError);              // missing closure
}

TEST_CASE("mesh instance ids are unique") {
  Plex a = Plex::interval(2);
  Plex b = Plex::interval(2);
  CHECK(a.id() != b.id());
}

}  // TEST_SUITE
