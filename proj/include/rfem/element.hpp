#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace rfem {

enum class CellType { interval, triangle };

int cell_dim(CellType cell);
const char* cell_name(CellType cell);

/// Points and positive weights on the reference cell ([0,1] or the unit
/// right triangle).  Weights sum to the reference measure (1 resp. 1/2).
struct QuadratureRule {
  std::vector<std::array<double, 2>> points;  // y = 0 on the interval
  std::vector<double> weights;
  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule integrating all polynomials of total degree <= precision exactly.
/// Gauss-Legendre on the interval; a collapsed tensor rule on the triangle.
QuadratureRule quadrature(CellType cell, int precision);

/// Gauss-Legendre nodes/weights on [0,1]; exposed for reuse and testing.
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

/// Nodal Lagrange element of the given degree on the reference cell.  Nodes
/// sit on the evenly spaced lattice and are listed entity by entity: corner
/// vertices, then each edge's interior nodes (from the edge's first corner to
/// its second), then cell-interior nodes.  Basis functions are stored as
/// monomial coefficient columns obtained by inverting the Vandermonde matrix,
/// which stays adequately conditioned for the supported degrees (1..8).
struct LagrangeElement {
  CellType cell = CellType::interval;
  int degree = 1;
  std::vector<std::array<double, 2>> nodes;     // reference coordinates
  std::vector<std::array<int, 2>> monomials;    // exponent pairs (a, b)
  Eigen::MatrixXd coeffs;                       // column j: coefficients of basis j
  // entity_dofs[d][e]: node ids on entity e of dimension d.  Edge lists run
  // from the lower-numbered local corner to the higher one.
  std::vector<std::vector<std::vector<int>>> entity_dofs;

  int dim() const { return cell_dim(cell); }
  int node_count() const { return static_cast<int>(nodes.size()); }
  /// Dofs per point of each topological dimension, indexed 0..2.
  std::array<int, 3> dofs_per_dim() const;
  /// Short "cell:degree" tag used in form signatures.
  std::string id() const;
};

LagrangeElement lagrange_element(CellType cell, int degree);

/// Basis values and reference-space gradients at the given points.
/// values(q, j) and grads[d](q, j) for direction d < element dim.
struct Tabulation {
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
};

Tabulation tabulate(const LagrangeElement& element,
                    const std::vector<std::array<double, 2>>& points);

}  // namespace rfem
