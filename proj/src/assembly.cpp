#include "rfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rfem/errors.hpp"

namespace rfem {

double& CompressedSparseMatrix::coeff_ref(int r, int c) {
  if (r < 0 || r >= rows) throw std::out_of_range("row outside matrix");
  auto b = col_idx.begin() + row_ptr[r], e = col_idx.begin() + row_ptr[r + 1];
  auto it = std::lower_bound(b, e, c);
  if (it == e || *it != c) throw std::out_of_range("entry outside sparsity pattern");
  return values[it - col_idx.begin()];
}

double CompressedSparseMatrix::value_at(int r, int c) const {
  if (r < 0 || r >= rows) throw std::out_of_range("row outside matrix");
  auto b = col_idx.begin() + row_ptr[r], e = col_idx.begin() + row_ptr[r + 1];
  auto it = std::lower_bound(b, e, c);
  return (it == e || *it != c) ? 0.0 : values[it - col_idx.begin()];
}

void CompressedSparseMatrix::scale_row(int r, double s) {
  if (r < 0 || r >= rows) throw std::out_of_range("row outside matrix");
  for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) values[k] *= s;
}

Vector CompressedSparseMatrix::multiply(const Vector& x) const {
  if (x.size() != cols) throw std::invalid_argument("matvec size mismatch");
  Vector y = Vector::Zero(rows);
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) y[r] += values[k] * x[col_idx[k]];
  return y;
}

DenseMatrix CompressedSparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col_idx[k]) = values[k];
  return d;
}

CellGeometry affine_geometry(const FunctionSpace& V, PointId cell) {
  const Plex& mesh = *V.mesh;
  const auto& verts = mesh.cell_vertices(cell);
  CellGeometry g;
  g.dim = mesh.dim();
  const auto& p0 = mesh.coordinates(verts[0]);
  g.origin = p0;
  if (g.dim == 1) {
    const auto& p1 = mesh.coordinates(verts[1]);
    double h = p1[0] - p0[0];
    g.J.setIdentity();
    g.J(0, 0) = h;
    g.detJ = h;
  } else {
    const auto& p1 = mesh.coordinates(verts[1]);
    const auto& p2 = mesh.coordinates(verts[2]);
    g.J << p1[0] - p0[0], p2[0] - p0[0], p1[1] - p0[1], p2[1] - p0[1];
    g.detJ = g.J(0, 0) * g.J(1, 1) - g.J(0, 1) * g.J(1, 0);
  }
  g.absdetJ = std::abs(g.detJ);
  if (g.absdetJ < 1e-14)
    throw GeometryError("degenerate cell " + std::to_string(cell));
  g.Jinv.setIdentity();
  if (g.dim == 1)
    g.Jinv(0, 0) = 1.0 / g.detJ;
  else
    g.Jinv << g.J(1, 1) / g.detJ, -g.J(0, 1) / g.detJ, -g.J(1, 0) / g.detJ,
        g.J(0, 0) / g.detJ;
  return g;
}

DenseMatrix element_kernel(KernelType kernel, const LagrangeElement& element,
                           const CellGeometry& geom, const QuadratureRule& rule,
                           const Tabulation& tab) {
  int n = element.node_count();
  int dim = element.dim();
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (int q = 0; q < rule.size(); ++q) {
    double w = rule.weights[q] * geom.absdetJ;
    switch (kernel) {
      case KernelType::mass:
        out.noalias() += w * tab.values.row(q).transpose() * tab.values.row(q);
        break;
      case KernelType::stiffness: {
        // Physical gradients: grad phi = Jinv^T grad_ref phi.
        Eigen::MatrixXd gp(dim, n);
        for (int d = 0; d < dim; ++d) gp.row(d) = tab.grads[d].row(q);
        Eigen::MatrixXd phys =
            geom.Jinv.topLeftCorner(dim, dim).transpose() * gp;
        out.noalias() += w * phys.transpose() * phys;
        break;
      }
      case KernelType::advection_x: {
        // (phi_i, d phi_j / dx)
        Eigen::RowVectorXd dx = Eigen::RowVectorXd::Zero(n);
        for (int d = 0; d < dim; ++d) dx += geom.Jinv(d, 0) * tab.grads[d].row(q);
        out.noalias() += w * tab.values.row(q).transpose() * dx;
        break;
      }
    }
  }
  return out;
}

DenseMatrix element_kernel(KernelType kernel, const LagrangeElement& element,
                           const CellGeometry& geom) {
  QuadratureRule rule = quadrature(element.cell, 2 * element.degree);
  Tabulation tab = tabulate(element, rule.points);
  return element_kernel(kernel, element, geom, rule, tab);
}

DenseMatrix element_matrix(const BilinearForm& form, const LagrangeElement& element,
                           const CellGeometry& geom, const QuadratureRule& rule,
                           const Tabulation& tab) {
  DenseMatrix out = DenseMatrix::Zero(element.node_count(), element.node_count());
  for (const auto& term : form.terms)
    out += term.weight * element_kernel(term.kernel, element, geom, rule, tab);
  return out;
}

namespace {

std::vector<PointId> all_cells(const Plex& mesh) {
  std::vector<PointId> cells(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) cells[c] = c;
  return cells;
}

void check_spaces(const FunctionSpace& test, const FunctionSpace& trial) {
  if (test.mesh.get() != trial.mesh.get())
    throw std::invalid_argument("test and trial spaces live on different meshes");
  if (test.element.id() != trial.element.id())
    throw std::invalid_argument("test and trial spaces must share an element");
  if (test.restricted_space() != trial.restricted_space())
    throw std::invalid_argument(
        "cannot assemble a form mixing restricted and unrestricted spaces");
}

std::vector<int> bc_dof_union(const std::vector<DirichletBC>& bcs) {
  std::vector<int> dofs;
  for (const auto& bc : bcs) dofs.insert(dofs.end(), bc.dofs.begin(), bc.dofs.end());
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

}  // namespace

CompressedSparseMatrix assemble_matrix_mapped(const BilinearForm& form,
                                              const FunctionSpace& test,
                                              const FunctionSpace& trial,
                                              const std::vector<int>& test_map,
                                              const std::vector<int>& trial_map, int nrows,
                                              int ncols, const std::vector<PointId>* cells) {
  const Plex& mesh = *test.mesh;
  std::vector<PointId> cell_store;
  if (!cells) {
    cell_store = all_cells(mesh);
    cells = &cell_store;
  }
  QuadratureRule rule = quadrature(test.element.cell, 2 * test.element.degree);
  Tabulation tab = tabulate(test.element, rule.points);

  // Pass one: sparsity pattern.
  std::vector<std::vector<int>> pattern(nrows);
  for (PointId cell : *cells) {
    std::vector<int> ti = cell_dof_map(test, cell);
    std::vector<int> tj = cell_dof_map(trial, cell);
    for (int i : ti) {
      int gi = test_map[i];
      if (gi < 0) continue;
      for (int j : tj) {
        int gj = trial_map[j];
        if (gj >= 0) pattern[gi].push_back(gj);
      }
    }
  }
  CompressedSparseMatrix A;
  A.rows = nrows;
  A.cols = ncols;
  A.row_ptr.assign(nrows + 1, 0);
  for (int r = 0; r < nrows; ++r) {
    auto& row = pattern[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    A.row_ptr[r + 1] = A.row_ptr[r] + static_cast<int>(row.size());
  }
  A.col_idx.reserve(A.row_ptr[nrows]);
  for (int r = 0; r < nrows; ++r)
    A.col_idx.insert(A.col_idx.end(), pattern[r].begin(), pattern[r].end());
  A.values.assign(A.col_idx.size(), 0.0);

  // Pass two: numeric fill.
  for (PointId cell : *cells) {
    CellGeometry geom = affine_geometry(test, cell);
    DenseMatrix ke = element_matrix(form, test.element, geom, rule, tab);
    std::vector<int> ti = cell_dof_map(test, cell);
    std::vector<int> tj = cell_dof_map(trial, cell);
    for (size_t i = 0; i < ti.size(); ++i) {
      int gi = test_map[ti[i]];
      if (gi < 0) continue;
      for (size_t j = 0; j < tj.size(); ++j) {
        int gj = trial_map[tj[j]];
        if (gj < 0) continue;
        A.coeff_ref(gi, gj) += ke(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return A;
}

CompressedSparseMatrix assemble_bilinear(const BilinearForm& form, const FunctionSpace& test,
                                         const FunctionSpace& trial,
                                         const std::vector<DirichletBC>& bcs) {
  check_spaces(test, trial);
  if (test.restricted_space()) {
    // Constrained dofs are already outside the numbering; bcs only supply
    // boundary values and do not shape the operator.
    return assemble_matrix_mapped(form, test, trial, test.lgmap.indices,
                                  trial.lgmap.indices, test.dim_free(), trial.dim_free(),
                                  nullptr);
  }
  if (bcs.empty())
    return assemble_matrix_mapped(form, test, trial, test.lgmap.indices,
                                  trial.lgmap.indices, test.dim_free(), trial.dim_free(),
                                  nullptr);

  for (const auto& bc : bcs)
    if (bc.space != &test)
      throw std::invalid_argument("bcs must be defined on the (unrestricted) test space");
  std::vector<int> bdofs = bc_dof_union(bcs);
  LocalGlobalMap masked = lgmap_with_bcs(test.section, bdofs);
  CompressedSparseMatrix A =
      assemble_matrix_mapped(form, test, trial, masked.indices, masked.indices,
                             test.dim_total(), trial.dim_total(), nullptr);
  // Boundary rows and columns stay empty above; give them a unit diagonal.
  CompressedSparseMatrix B;
  B.rows = A.rows;
  B.cols = A.cols;
  B.row_ptr.assign(A.rows + 1, 0);
  std::vector<bool> is_bc(test.dim_total(), false);
  for (int d : bdofs) is_bc[d] = true;
  for (int r = 0; r < A.rows; ++r) {
    int extra = is_bc[r] ? 1 : (A.row_ptr[r + 1] - A.row_ptr[r]);
    B.row_ptr[r + 1] = B.row_ptr[r] + extra;
  }
  B.col_idx.resize(B.row_ptr[A.rows]);
  B.values.resize(B.row_ptr[A.rows]);
  for (int r = 0; r < A.rows; ++r) {
    int at = B.row_ptr[r];
    if (is_bc[r]) {
      B.col_idx[at] = r;
      B.values[at] = 1.0;
      continue;
    }
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k, ++at) {
      B.col_idx[at] = A.col_idx[k];
      B.values[at] = A.values[k];
    }
  }
  return B;
}

namespace {

double source_at(const SourceTerm& term, const Eigen::RowVectorXd& phi,
                 const std::vector<int>& dofs, const std::array<double, 2>& x) {
  if (term.coefficient) {
    double v = 0.0;
    for (size_t j = 0; j < dofs.size(); ++j)
      v += phi[static_cast<long>(j)] * term.coefficient->values[dofs[j]];
    return v;
  }
  return term.expr(x[0], x[1]);
}

void check_sources(const LinearForm& form, const FunctionSpace& V) {
  for (const auto& term : form.terms) {
    if (term.coefficient) {
      if (!term.coefficient->space || term.coefficient->space->mesh.get() != V.mesh.get())
        throw std::invalid_argument("source coefficient lives on a different mesh");
      if (term.coefficient->space->element.id() != V.element.id())
        throw std::invalid_argument("source coefficient must share the space's element");
    } else if (!term.expr) {
      throw std::invalid_argument("source term needs an expression or a coefficient");
    }
  }
}

}  // namespace

void assemble_vector_mapped(const LinearForm& form, const FunctionSpace& V,
                            const std::vector<int>& map, Vector& out,
                            const std::vector<PointId>* cells) {
  check_sources(form, V);
  const Plex& mesh = *V.mesh;
  std::vector<PointId> cell_store;
  if (!cells) {
    cell_store = all_cells(mesh);
    cells = &cell_store;
  }
  QuadratureRule rule = quadrature(V.element.cell, 2 * V.element.degree);
  Tabulation tab = tabulate(V.element, rule.points);

  for (PointId cell : *cells) {
    CellGeometry geom = affine_geometry(V, cell);
    std::vector<int> dofs = cell_dof_map(V, cell);
    // Coefficient sources gather through their own space's section.
    std::vector<std::vector<int>> cdofs(form.terms.size());
    for (size_t t = 0; t < form.terms.size(); ++t)
      if (form.terms[t].coefficient)
        cdofs[t] = cell_dof_map(*form.terms[t].coefficient->space, cell);
    for (int q = 0; q < rule.size(); ++q) {
      double w = rule.weights[q] * geom.absdetJ;
      std::array<double, 2> x{
          geom.origin[0] + geom.J(0, 0) * rule.points[q][0] +
              (geom.dim == 2 ? geom.J(0, 1) * rule.points[q][1] : 0.0),
          geom.dim == 2 ? geom.origin[1] + geom.J(1, 0) * rule.points[q][0] +
                              geom.J(1, 1) * rule.points[q][1]
                        : 0.0};
      double f = 0.0;
      for (size_t t = 0; t < form.terms.size(); ++t) {
        const auto& term = form.terms[t];
        f += term.weight *
             source_at(term, tab.values.row(q), term.coefficient ? cdofs[t] : dofs, x);
      }
      for (size_t i = 0; i < dofs.size(); ++i) {
        int gi = map[dofs[i]];
        if (gi >= 0) out[gi] += w * f * tab.values(q, static_cast<int>(i));
      }
    }
  }
}

namespace {

// b_free -= A(free, constrained) * g using the unrestricted no-bc matrix.
// free_of / gslot_of map unrestricted dofs to rhs rows resp. g entries.
void lift_into(const CompressedSparseMatrix& A, const std::vector<int>& free_of,
               const std::vector<int>& gslot_of, const Vector& g, Vector& b) {
  for (int r = 0; r < A.rows; ++r) {
    int fr = free_of[r];
    if (fr < 0) continue;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      int t = gslot_of[A.col_idx[k]];
      if (t >= 0) b[fr] -= A.values[k] * g[t];
    }
  }
}

}  // namespace

Vector assemble_linear(const LinearForm& form, const FunctionSpace& V,
                       const std::vector<DirichletBC>& bcs,
                       const CompressedSparseMatrix* lift) {
  bool inhomogeneous = false;
  for (const auto& bc : bcs)
    if (!bc.homogeneous) inhomogeneous = true;

  if (V.restricted_space()) {
    Vector b = Vector::Zero(V.dim_free());
    assemble_vector_mapped(form, V, V.lgmap.indices, b, nullptr);
    if (!bcs.empty() && inhomogeneous) {
      if (!lift)
        throw std::invalid_argument(
            "inhomogeneous bcs on a restricted space need the unrestricted matrix for "
            "lifting");
      if (lift->rows != V.dim_total() || lift->cols != V.dim_total())
        throw std::invalid_argument("lift matrix has the wrong shape");
      // g holds bc values per constrained dof; later bcs win on overlaps.
      Vector g = Vector::Zero(V.dim_constrained());
      std::map<std::pair<PointId, int>, double> bcval;
      for (const auto& bc : bcs)
        for (size_t i = 0; i < bc.point_dofs.size(); ++i)
          bcval[bc.point_dofs[i]] = bc.values[static_cast<long>(i)];

      // Unrestricted dof -> rhs row / g slot, through the shared points.
      Section base = create_section(*V.mesh, V.classes, V.element.dofs_per_dim(), {}).section;
      std::vector<int> free_of(V.dim_total(), -1), gslot_of(V.dim_total(), -1);
      int nfree = V.dim_free();
      for (PointId p = 0; p < V.mesh->chart_size(); ++p)
        for (int k = 0; k < V.section.dof_count[p]; ++k) {
          int res = V.section.offset[p] + k;
          int unres = base.offset[p] + k;
          if (V.lgmap.indices[res] >= 0) {
            free_of[unres] = V.lgmap.indices[res];
          } else {
            int slot = res - nfree;  // constrained block sits behind the free dofs
            if (slot < 0 || slot >= V.dim_constrained())
              throw InternalError("constrained dof outside the tail block");
            gslot_of[unres] = slot;
            auto it = bcval.find({p, k});
            if (it != bcval.end()) g[slot] = it->second;
          }
        }
      lift_into(*lift, free_of, gslot_of, g, b);
    }
    return b;
  }

  Vector b = Vector::Zero(V.dim_total());
  if (bcs.empty()) {
    assemble_vector_mapped(form, V, V.lgmap.indices, b, nullptr);
    return b;
  }
  for (const auto& bc : bcs)
    if (bc.space != &V)
      throw std::invalid_argument("bcs must be defined on the assembled space");
  std::vector<int> bdofs = bc_dof_union(bcs);
  LocalGlobalMap masked = lgmap_with_bcs(V.section, bdofs);
  assemble_vector_mapped(form, V, masked.indices, b, nullptr);
  if (inhomogeneous) {
    if (!lift)
      throw std::invalid_argument(
          "inhomogeneous bcs need the no-bc matrix for lifting");
    if (lift->rows != V.dim_total() || lift->cols != V.dim_total())
      throw std::invalid_argument("lift matrix has the wrong shape");
    Vector g = Vector::Zero(V.dim_total());
    std::vector<int> gslot_of(V.dim_total(), -1);
    for (const auto& bc : bcs)
      for (size_t i = 0; i < bc.dofs.size(); ++i) {
        gslot_of[bc.dofs[i]] = bc.dofs[i];
        g[bc.dofs[i]] = bc.values[static_cast<long>(i)];
      }
    lift_into(*lift, masked.indices, gslot_of, g, b);
  }
  // Boundary rows carry the bc values themselves.
  for (const auto& bc : bcs)
    for (size_t i = 0; i < bc.dofs.size(); ++i)
      b[bc.dofs[i]] = bc.values[static_cast<long>(i)];
  return b;
}

double error_norm(const Function& u, const ScalarExpr& f, int precision) {
  if (!u.space) throw std::invalid_argument("function has no space");
  const FunctionSpace& V = *u.space;
  if (precision < 0) precision = 2 * V.element.degree + 8;
  QuadratureRule rule = quadrature(V.element.cell, precision);
  Tabulation tab = tabulate(V.element, rule.points);
  double acc = 0.0;
  for (PointId cell = 0; cell < V.mesh->num_cells(); ++cell) {
    CellGeometry geom = affine_geometry(V, cell);
    std::vector<int> dofs = cell_dof_map(V, cell);
    for (int q = 0; q < rule.size(); ++q) {
      double uh = 0.0;
      for (size_t j = 0; j < dofs.size(); ++j)
        uh += tab.values(q, static_cast<int>(j)) * u.values[dofs[j]];
      double x = geom.origin[0] + geom.J(0, 0) * rule.points[q][0] +
                 (geom.dim == 2 ? geom.J(0, 1) * rule.points[q][1] : 0.0);
      double y = geom.dim == 2 ? geom.origin[1] + geom.J(1, 0) * rule.points[q][0] +
                                     geom.J(1, 1) * rule.points[q][1]
                               : 0.0;
      double d = uh - f(x, y);
      acc += rule.weights[q] * geom.absdetJ * d * d;
    }
  }
  return std::sqrt(acc);
}

double error_norm(const Function& u, const Function& v, int precision) {
  if (!u.space || !v.space) throw std::invalid_argument("function has no space");
  if (u.space != v.space)
    throw std::invalid_argument("error_norm needs both functions on the same space");
  Function d{u.space, u.values - v.values};
  return error_norm(d, [](double, double) { return 0.0; }, precision);
}

}  // namespace rfem
