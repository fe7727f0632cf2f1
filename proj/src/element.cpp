#include "rfem/element.hpp"

#include <cmath>
#include <stdexcept>

#include "rfem/errors.hpp"

namespace rfem {

int cell_dim(CellType cell) { return cell == CellType::interval ? 1 : 2; }

const char* cell_name(CellType cell) {
  return cell == CellType::interval ? "interval" : "triangle";
}

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss rule needs at least one point");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  // Newton on P_n, seeded with the Chebyshev estimate; nodes on [-1,1] are
  // symmetric so only the lower half is computed.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p1 = 0, p2 = 0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k + 1.0) * z * p2 - k * p3) / (k + 1.0);
      }
      double dp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    p1 = 1.0;
    p2 = 0.0;
    for (int k = 0; k < n; ++k) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * k + 1.0) * z * p2 - k * p3) / (k + 1.0);
    }
    double dp = n * (z * p1 - p2) / (z * z - 1.0);
    double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = 0.5 * (1.0 - z);  // z descends, so this fills from the left
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[n - 1 - i] = 0.5 * wi;
  }
}

QuadratureRule quadrature(CellType cell, int precision) {
  if (precision < 0) throw std::invalid_argument("quadrature precision must be >= 0");
  QuadratureRule rule;
  if (cell == CellType::interval) {
    int n = (precision + 2) / 2;
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    for (int q = 0; q < n; ++q) {
      rule.points.push_back({x[q], 0.0});
      rule.weights.push_back(w[q]);
    }
    return rule;
  }
  // Collapse the square onto the triangle via (u, v) -> (u(1-v), v); the
  // Jacobian factor (1-v) raises the v-degree by one.
  int nu = (precision + 2) / 2;
  int nv = (precision + 3) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre_01(nu, xu, wu);
  gauss_legendre_01(nv, xv, wv);
  for (int a = 0; a < nv; ++a)
    for (int b = 0; b < nu; ++b) {
      double v = xv[a], u = xu[b];
      rule.points.push_back({u * (1.0 - v), v});
      rule.weights.push_back(wu[b] * wv[a] * (1.0 - v));
    }
  return rule;
}

namespace {

double mono_eval(const std::array<int, 2>& m, double x, double y) {
  double r = 1.0;
  for (int k = 0; k < m[0]; ++k) r *= x;
  for (int k = 0; k < m[1]; ++k) r *= y;
  return r;
}

void build_interval(LagrangeElement& el) {
  int k = el.degree;
  el.nodes.push_back({0.0, 0.0});
  el.nodes.push_back({1.0, 0.0});
  el.entity_dofs.assign(2, {});
  el.entity_dofs[0] = {{0}, {1}};
  el.entity_dofs[1] = {{}};
  for (int m = 1; m < k; ++m) {
    el.entity_dofs[1][0].push_back(el.node_count());
    el.nodes.push_back({double(m) / k, 0.0});
  }
  for (int a = 0; a <= k; ++a) el.monomials.push_back({a, 0});
}

void build_triangle(LagrangeElement& el) {
  int k = el.degree;
  const std::array<double, 2> corner[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (auto& c : corner) el.nodes.push_back(c);
  el.entity_dofs.assign(3, {});
  el.entity_dofs[0] = {{0}, {1}, {2}};
  el.entity_dofs[1] = {{}, {}, {}};
  el.entity_dofs[2] = {{}};
  // Edge e is opposite corner e; interior edge nodes run from the edge's
  // lower local corner to its higher one.
  const int ends[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  for (int e = 0; e < 3; ++e) {
    const auto& a = corner[ends[e][0]];
    const auto& b = corner[ends[e][1]];
    for (int m = 1; m < k; ++m) {
      el.entity_dofs[1][e].push_back(el.node_count());
      double t = double(m) / k;
      el.nodes.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  for (int j = 1; j < k; ++j)
    for (int i = 1; i + j < k; ++i) {
      el.entity_dofs[2][0].push_back(el.node_count());
      el.nodes.push_back({double(i) / k, double(j) / k});
    }
  for (int s = 0; s <= k; ++s)
    for (int b = 0; b <= s; ++b) el.monomials.push_back({s - b, b});
}

}  // namespace

LagrangeElement lagrange_element(CellType cell, int degree) {
  if (degree < 1 || degree > 8)
    throw std::invalid_argument(
        "lagrange degree must be in 1..8; the monomial intermediate basis is "
        "too ill-conditioned beyond that");
  LagrangeElement el;
  el.cell = cell;
  el.degree = degree;
  if (cell == CellType::interval)
    build_interval(el);
  else
    build_triangle(el);

  int n = el.node_count();
  Eigen::MatrixXd vand(n, n);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      vand(i, m) = mono_eval(el.monomials[m], el.nodes[i][0], el.nodes[i][1]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(vand);
  if (!lu.isInvertible())
    throw SingularSystemError("element Vandermonde matrix is singular");
  el.coeffs = lu.inverse();
  return el;
}

std::array<int, 3> LagrangeElement::dofs_per_dim() const {
  std::array<int, 3> d{0, 0, 0};
  for (int dm = 0; dm < static_cast<int>(entity_dofs.size()); ++dm)
    if (!entity_dofs[dm].empty()) d[dm] = static_cast<int>(entity_dofs[dm][0].size());
  return d;
}

std::string LagrangeElement::id() const {
  return std::string(cell_name(cell)) + ":" + std::to_string(degree);
}

Tabulation tabulate(const LagrangeElement& element,
                    const std::vector<std::array<double, 2>>& points) {
  int np = static_cast<int>(points.size());
  int n = element.node_count();
  int dim = element.dim();
  Eigen::MatrixXd vals(np, n);
  std::vector<Eigen::MatrixXd> dmono(dim, Eigen::MatrixXd(np, n));
  Eigen::MatrixXd mono(np, n);
  for (int q = 0; q < np; ++q) {
    double x = points[q][0], y = points[q][1];
    for (int m = 0; m < n; ++m) {
      const auto& e = element.monomials[m];
      mono(q, m) = mono_eval(e, x, y);
      dmono[0](q, m) = e[0] == 0 ? 0.0 : e[0] * mono_eval({e[0] - 1, e[1]}, x, y);
      if (dim == 2)
        dmono[1](q, m) = e[1] == 0 ? 0.0 : e[1] * mono_eval({e[0], e[1] - 1}, x, y);
    }
  }
  Tabulation tab;
  tab.values = mono * element.coeffs;
  for (int d = 0; d < dim; ++d) tab.grads.push_back(dmono[d] * element.coeffs);
  return tab;
}

}  // namespace rfem
