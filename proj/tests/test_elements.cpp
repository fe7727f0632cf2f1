#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rfem/element.hpp"

using namespace rfem;

namespace {

// Exact reference moments: int_0^1 x^a = 1/(a+1) on the interval and
// int_T x^a y^b = a! b! / (a+b+2)! on the unit right triangle.
double interval_moment(int a) { return 1.0 / (a + 1); }

double triangle_moment(int a, int b) {
  double v = 1.0;
  for (int k = 1; k <= a; ++k) v *= k;
  for (int k = 1; k <= b; ++k) v *= k;
  for (int k = 1; k <= a + b + 2; ++k) v /= k;
  return v;
}

double integrate_monomial(const QuadratureRule& rule, int a, int b) {
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    acc += rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b);
  return acc;
}

}  // namespace

TEST_SUITE("elements") {

TEST_CASE("gauss points integrate to the stated degree") {
  std::vector<double> x, w;
  for (int n = 1; n <= 8; ++n) {
    gauss_legendre_01(n, x, w);
    REQUIRE((int)x.size() == n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(w[i] > 0.0);
      CHECK(x[i] > 0.0);
      CHECK(x[i] < 1.0);
      wsum += w[i];
      // Nodes come symmetric about the midpoint.
      CHECK(x[i] + x[n - 1 - i] == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    // Exact through degree 2n-1, and strictly not beyond for the monomial x^2n.
    for (int a = 0; a <= 2 * n - 1; ++a) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += w[i] * std::pow(x[i], a);
      CHECK(acc == doctest::Approx(interval_moment(a)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre_01(0, x, w), std::invalid_argument);
}

TEST_CASE("interval quadrature hits every requested precision") {
  for (int p = 0; p <= 12; ++p) {
    QuadratureRule rule = quadrature(CellType::interval, p);
    for (int a = 0; a <= p; ++a)
      CHECK(integrate_monomial(rule, a, 0) ==
            doctest::Approx(interval_moment(a)).epsilon(1e-13));
  }
}

TEST_CASE("triangle quadrature matches factorial moments") {
  for (int p = 0; p <= 10; ++p) {
    QuadratureRule rule = quadrature(CellType::triangle, p);
    double wsum = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      wsum += rule.weights[q];
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a + 0 <= p; ++a)
      for (int b = 0; a + b <= p; ++b)
        CHECK(integrate_monomial(rule, a, b) ==
              doctest::Approx(triangle_moment(a, b)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(quadrature(CellType::triangle, -1), std::invalid_argument);
}

TEST_CASE("node counts and entity layout") {
  for (int k = 1; k <= 8; ++k) {
    LagrangeElement iv = lagrange_element(CellType::interval, k);
    CHECK(iv.node_count() == k + 1);
    CHECK(iv.dofs_per_dim() == std::array<int, 3>{1, k - 1, 0});

    LagrangeElement tr = lagrange_element(CellType::triangle, k);
    CHECK(tr.node_count() == (k + 1) * (k + 2) / 2);
    CHECK(tr.dofs_per_dim() ==
          std::array<int, 3>{1, k - 1, (k - 1) * (k - 2) / 2});
    CHECK((int)tr.entity_dofs[0].size() == 3);
    CHECK((int)tr.entity_dofs[1].size() == 3);
    CHECK((int)tr.entity_dofs[2].size() == 1);
  }
  CHECK_THROWS_AS(lagrange_element(CellType::triangle, 0), std::invalid_argument);
  CHECK_THROWS_AS(lagrange_element(CellType::triangle, 9), std::invalid_argument);
}

TEST_CASE("degree 1 and 2 triangle nodes sit where expected") {
  LagrangeElement p1 = lagrange_element(CellType::triangle, 1);
  CHECK(p1.nodes[0] == std::array<double, 2>{0.0, 0.0});
  CHECK(p1.nodes[1] == std::array<double, 2>{1.0, 0.0});
  CHECK(p1.nodes[2] == std::array<double, 2>{0.0, 1.0});

  LagrangeElement p2 = lagrange_element(CellType::triangle, 2);
  REQUIRE(p2.node_count() == 6);
  // One midpoint per edge, edge e opposite corner e.
  CHECK(p2.entity_dofs[1][0] == std::vector<int>{3});
  CHECK(p2.nodes[3] == std::array<double, 2>{0.5, 0.5});
  CHECK(p2.nodes[4] == std::array<double, 2>{0.0, 0.5});
  CHECK(p2.nodes[5] == std::array<double, 2>{0.5, 0.0});

  LagrangeElement p3 = lagrange_element(CellType::triangle, 3);
  CHECK(p3.entity_dofs[2][0] == std::vector<int>{9});
  // Edge nodes run from the lower local corner to the higher one.
  CHECK(p3.nodes[p3.entity_dofs[1][0][0]][1] == doctest::Approx(1.0 / 3));
  CHECK(p3.nodes[p3.entity_dofs[1][0][1]][1] == doctest::Approx(2.0 / 3));
}

TEST_CASE("basis is nodal: tabulation at the nodes is the identity") {
  for (CellType cell : {CellType::interval, CellType::triangle})
    for (int k = 1; k <= 8; ++k) {
      LagrangeElement el = lagrange_element(cell, k);
      Tabulation tab = tabulate(el, el.nodes);
      int n = el.node_count();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          CHECK(tab.values(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(5e-10));
    }
}

TEST_CASE("partition of unity at interior points") {
  std::vector<std::array<double, 2>> pts = {
      {0.17, 0.21}, {0.05, 0.9}, {0.4, 0.11}, {1.0 / 3, 1.0 / 3}};
  for (int k = 1; k <= 6; ++k) {
    LagrangeElement el = lagrange_element(CellType::triangle, k);
    Tabulation tab = tabulate(el, pts);
    for (size_t q = 0; q < pts.size(); ++q) {
      double vsum = 0.0, gx = 0.0, gy = 0.0;
      for (int j = 0; j < el.node_count(); ++j) {
        vsum += tab.values((int)q, j);
        gx += tab.grads[0]((int)q, j);
        gy += tab.grads[1]((int)q, j);
      }
      CHECK(vsum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(gx == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(gy == doctest::Approx(0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("tabulated gradients agree with central differences") {
  const double h = 1e-6;
  std::vector<std::array<double, 2>> pts = {{0.3, 0.25}, {0.12, 0.5}};
  for (CellType cell : {CellType::interval, CellType::triangle}) {
    int dims = cell_dim(cell);
    for (int k : {1, 2, 4}) {
      LagrangeElement el = lagrange_element(cell, k);
      Tabulation tab = tabulate(el, pts);
      for (size_t q = 0; q < pts.size(); ++q)
        for (int d = 0; d < dims; ++d) {
          auto lo = pts[q], hi = pts[q];
          lo[d] -= h;
          hi[d] += h;
          Tabulation t2 = tabulate(el, {lo, hi});
          for (int j = 0; j < el.node_count(); ++j) {
            double fd = (t2.values(1, j) - t2.values(0, j)) / (2 * h);
            CHECK(tab.grads[d]((int)q, j) == doctest::Approx(fd).epsilon(1e-5));
          }
        }
    }
  }
}

TEST_CASE("degree 1 basis reproduces barycentric coordinates") {
  LagrangeElement el = lagrange_element(CellType::triangle, 1);
  Tabulation tab = tabulate(el, {{0.3, 0.5}});
  CHECK(tab.values(0, 0) == doctest::Approx(1.0 - 0.3 - 0.5));
  CHECK(tab.values(0, 1) == doctest::Approx(0.3));
  CHECK(tab.values(0, 2) == doctest::Approx(0.5));
  CHECK(tab.grads[0](0, 0) == doctest::Approx(-1.0));
  CHECK(tab.grads[1](0, 2) == doctest::Approx(1.0));
}

TEST_CASE("element ids name cell and degree") {
  CHECK(lagrange_element(CellType::interval, 3).id() ==
        std::string(cell_name(CellType::interval)) + ":3");
  CHECK(lagrange_element(CellType::triangle, 2).id() !=
        lagrange_element(CellType::triangle, 4).id());
}

}  // TEST_SUITE
