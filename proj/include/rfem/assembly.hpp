#pragma once

#include <vector>

#include "rfem/space.hpp"

namespace rfem {

/// Compressed sparse rows with sorted, unique column indices per row.
struct CompressedSparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;   // size rows + 1
  std::vector<int> col_idx;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(col_idx.size()); }
  /// Stored entry reference; throws std::out_of_range if the slot is absent.
  double& coeff_ref(int r, int c);
  /// Entry value, 0 for slots outside the pattern.
  double value_at(int r, int c) const;
  void scale_row(int r, double s);
  Vector multiply(const Vector& x) const;
  DenseMatrix to_dense() const;
};

/// Affine map data for one cell: x = origin + J * xhat.
struct CellGeometry {
  int dim = 1;
  std::array<double, 2> origin{};
  Eigen::Matrix2d J = Eigen::Matrix2d::Identity();     // top-left block used in 1D
  Eigen::Matrix2d Jinv = Eigen::Matrix2d::Identity();
  double detJ = 1.0;
  double absdetJ = 1.0;
};

CellGeometry affine_geometry(const FunctionSpace& V, PointId cell);

/// Element matrix of one kernel on one cell, rows = test nodes.  The
/// quadrature rule must integrate the integrand exactly (2*degree here).
DenseMatrix element_kernel(KernelType kernel, const LagrangeElement& element,
                           const CellGeometry& geom, const QuadratureRule& rule,
                           const Tabulation& tab);

/// Convenience overload building the 2*degree rule and tabulation itself.
DenseMatrix element_kernel(KernelType kernel, const LagrangeElement& element,
                           const CellGeometry& geom);

/// Weighted sum of kernel matrices for a whole form.
DenseMatrix element_matrix(const BilinearForm& form, const LagrangeElement& element,
                           const CellGeometry& geom, const QuadratureRule& rule,
                           const Tabulation& tab);

/// Two-pass assembly.  Restricted spaces drop constrained dofs through the
/// -1 entries of their maps and ignore bcs; on unrestricted spaces bcs leave
/// identity rows and columns.  Mixing restricted and unrestricted argument
/// spaces is rejected.
CompressedSparseMatrix assemble_bilinear(const BilinearForm& form, const FunctionSpace& test,
                                         const FunctionSpace& trial,
                                         const std::vector<DirichletBC>& bcs);

/// Right-hand side with the same dof conventions.  Inhomogeneous bcs need the
/// unrestricted no-bc matrix of the same form (`lift`) so the constrained
/// values can be moved to the right-hand side.
Vector assemble_linear(const LinearForm& form, const FunctionSpace& V,
                       const std::vector<DirichletBC>& bcs,
                       const CompressedSparseMatrix* lift = nullptr);

/// Internal core shared with the rank simulator: assembles `form` over
/// `cells` (all cells when null) scattering through explicit index maps;
/// negative map entries are skipped.
CompressedSparseMatrix assemble_matrix_mapped(const BilinearForm& form,
                                              const FunctionSpace& test,
                                              const FunctionSpace& trial,
                                              const std::vector<int>& test_map,
                                              const std::vector<int>& trial_map, int nrows,
                                              int ncols, const std::vector<PointId>* cells);

void assemble_vector_mapped(const LinearForm& form, const FunctionSpace& V,
                            const std::vector<int>& map, Vector& out,
                            const std::vector<PointId>* cells);

/// L2 norm of (u - f) over the mesh, integrated with a rule of the given
/// precision (defaults to a margin over the manufactured-solution degree).
double error_norm(const Function& u, const ScalarExpr& f, int precision = -1);

/// L2 distance between two functions on the same space (exact quadrature).
double error_norm(const Function& u, const Function& v, int precision = -1);

}  // namespace rfem
