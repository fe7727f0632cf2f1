#include "rfem/solve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rfem/errors.hpp"

namespace rfem {

namespace {
constexpr int kDenseLimit = 2000;
constexpr double kRelResidual = 1e-10;

Vector cg_solve(const CompressedSparseMatrix& A, const Vector& b) {
  Vector x = Vector::Zero(A.rows);
  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  int maxit = 20 * A.rows;
  for (int it = 0; it < maxit; ++it) {
    if (std::sqrt(rr) <= kRelResidual * bnorm) return x;
    Vector Ap = A.multiply(p);
    double pAp = p.dot(Ap);
    if (pAp <= 0.0)
      throw SingularSystemError("cg hit a non-positive curvature direction");
    double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  throw ConvergenceError("cg failed to reach tolerance");
}

Vector dense_lu_solve(const DenseMatrix& A, const Vector& b) {
  Eigen::FullPivLU<DenseMatrix> lu(A);
  if (!lu.isInvertible()) throw SingularSystemError("matrix is singular");
  Vector x = lu.solve(b);
  // One refinement step keeps the residual at the contract even for the
  // occasional ill-conditioned system.
  x += lu.solve(b - A * x);
  double bnorm = b.norm();
  if (bnorm > 0.0 && (A * x - b).norm() > kRelResidual * bnorm)
    throw SingularSystemError("direct solve could not reach the residual tolerance");
  return x;
}
}  // namespace

Vector linear_solve(const CompressedSparseMatrix& A, const Vector& b) {
  if (A.rows != A.cols) throw std::invalid_argument("linear_solve needs a square matrix");
  if (b.size() != A.rows) throw std::invalid_argument("rhs size mismatch");
  if (A.rows <= kDenseLimit) return dense_lu_solve(A.to_dense(), b);
  return cg_solve(A, b);
}

Vector linear_solve(const DenseMatrix& A, const Vector& b) {
  if (A.rows() != A.cols()) throw std::invalid_argument("linear_solve needs a square matrix");
  if (b.size() != A.rows()) throw std::invalid_argument("rhs size mismatch");
  return dense_lu_solve(A, b);
}

namespace {

std::set<int> bc_subdomains(const std::vector<DirichletBC>& bcs) {
  std::set<int> subs;
  for (const auto& bc : bcs) subs.insert(bc.subdomain);
  return subs;
}

void check_problem_space(const FunctionSpace* space, const std::vector<DirichletBC>& bcs) {
  if (!space) throw std::invalid_argument("problem has no space");
  if (space->restricted_space())
    throw std::invalid_argument("problems are posed on the unrestricted space");
  for (const auto& bc : bcs)
    if (bc.space != space)
      throw std::invalid_argument("bcs must be defined on the problem space");
}

/// Writes the solved free values and the bc values into a Function on V.
Function scatter_restricted_solution(const FunctionSpace& V, const FunctionSpace& Vres,
                                     const Vector& x, const std::vector<DirichletBC>& bcs) {
  std::map<std::pair<PointId, int>, double> bcval;
  for (const auto& bc : bcs)
    for (size_t i = 0; i < bc.point_dofs.size(); ++i)
      bcval[bc.point_dofs[i]] = bc.values[static_cast<long>(i)];

  Function u;
  u.space = &V;
  u.values = Vector::Zero(V.dim_total());
  for (PointId p = 0; p < V.mesh->chart_size(); ++p)
    for (int k = 0; k < V.section.dof_count[p]; ++k) {
      int res = Vres.section.offset[p] + k;
      int unres = V.section.offset[p] + k;
      int g = Vres.lgmap.indices[res];
      if (g >= 0) {
        u.values[unres] = x[g];
      } else {
        auto it = bcval.find({p, k});
        u.values[unres] = it == bcval.end() ? 0.0 : it->second;
      }
    }
  return u;
}

}  // namespace

Function solve_variational(const LinearVariationalProblem& problem) {
  check_problem_space(problem.space, problem.bcs);
  const FunctionSpace& V = *problem.space;
  bool inhomogeneous = false;
  for (const auto& bc : problem.bcs)
    if (!bc.homogeneous) inhomogeneous = true;

  if (problem.restrict_space) {
    FunctionSpace Vres = restricted(V, bc_subdomains(problem.bcs));
    CompressedSparseMatrix A = assemble_bilinear(problem.a, Vres, Vres, {});
    CompressedSparseMatrix lift;
    if (inhomogeneous) lift = assemble_bilinear(problem.a, V, V, {});
    Vector b = assemble_linear(problem.L, Vres, problem.bcs,
                               inhomogeneous ? &lift : nullptr);
    Vector x = linear_solve(A, b);
    return scatter_restricted_solution(V, Vres, x, problem.bcs);
  }

  CompressedSparseMatrix A = assemble_bilinear(problem.a, V, V, problem.bcs);
  CompressedSparseMatrix lift;
  if (inhomogeneous) lift = assemble_bilinear(problem.a, V, V, {});
  Vector b = assemble_linear(problem.L, V, problem.bcs, inhomogeneous ? &lift : nullptr);
  Vector x = linear_solve(A, b);
  Function u;
  u.space = &V;
  u.values = x;
  return u;
}

namespace {

struct EigenPairs {
  std::vector<std::complex<double>> values;
  Eigen::MatrixXcd vectors;
};

EigenPairs dense_generalized_eigen(const DenseMatrix& A, const DenseMatrix& M,
                                   bool with_vectors) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
    throw std::invalid_argument("eigen pencil matrices must be square and equal-sized");
  Eigen::GeneralizedEigenSolver<DenseMatrix> ges;
  ges.setMaxIterations(400 * static_cast<int>(A.rows()));
  ges.compute(A, M, with_vectors);
  if (ges.info() != Eigen::Success)
    throw ConvergenceError("qz iteration failed on the eigen pencil");

  double scale = std::max(A.norm(), M.norm());
  EigenPairs out;
  std::vector<int> keep;
  for (int i = 0; i < A.rows(); ++i) {
    std::complex<double> alpha = ges.alphas()[i];
    double beta = ges.betas()[i];
    // beta ~ 0 marks an infinite eigenvalue (singular M direction).
    if (std::abs(beta) <= 1e-14 * std::max(1.0, scale)) continue;
    keep.push_back(i);
    out.values.push_back(alpha / beta);
  }
  if (with_vectors) {
    out.vectors.resize(A.rows(), static_cast<long>(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k)
      out.vectors.col(static_cast<long>(k)) = ges.eigenvectors().col(keep[k]);
  }
  return out;
}

std::vector<int> sort_order(const std::vector<std::complex<double>>& vals, EigenWhich which) {
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](int i) {
    switch (which) {
      case EigenWhich::smallest_real: return vals[i].real();
      case EigenWhich::largest_imag: return -vals[i].imag();
      case EigenWhich::largest_magnitude: return -std::abs(vals[i]);
    }
    return vals[i].real();
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  return order;
}

void normalize_vector(Eigen::VectorXcd& v) {
  double n = v.norm();
  if (n == 0.0) return;
  v /= n;
  double maxabs = 0.0;
  for (long i = 0; i < v.size(); ++i) maxabs = std::max(maxabs, std::abs(v[i]));
  for (long i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12 * maxabs) {
      v *= std::conj(v[i]) / std::abs(v[i]);  // rotate the first nonzero positive
      break;
    }
}

}  // namespace

std::vector<std::complex<double>> generalized_eigenvalues(const DenseMatrix& A,
                                                          const DenseMatrix& M) {
  return dense_generalized_eigen(A, M, false).values;
}

EigenResult eigensolve(const LinearEigenproblem& problem, int nev, EigenWhich which) {
  check_problem_space(problem.space, problem.bcs);
  if (nev < 1) throw std::invalid_argument("eigensolve needs nev >= 1");
  for (const auto& bc : problem.bcs)
    if (!bc.homogeneous)
      throw std::invalid_argument("eigenproblems support homogeneous bcs only");
  const FunctionSpace& V = *problem.space;
  BilinearForm Mform = problem.M.terms.empty() ? mass_form() : problem.M;

  DenseMatrix A, M;
  const FunctionSpace* solve_space = &V;
  FunctionSpace Vres;
  if (problem.restrict_space) {
    Vres = restricted(V, bc_subdomains(problem.bcs));
    solve_space = &Vres;
    A = assemble_bilinear(problem.A, Vres, Vres, {}).to_dense();
    M = assemble_bilinear(Mform, Vres, Vres, {}).to_dense();
  } else {
    CompressedSparseMatrix Mcsr = assemble_bilinear(Mform, V, V, problem.bcs);
    if (problem.theta != 0.0) {
      std::set<int> bdofs;
      for (const auto& bc : problem.bcs) bdofs.insert(bc.dofs.begin(), bc.dofs.end());
      for (int d : bdofs) Mcsr.scale_row(d, 1.0 / problem.theta);
    }
    A = assemble_bilinear(problem.A, V, V, problem.bcs).to_dense();
    M = Mcsr.to_dense();
  }

  int dim = static_cast<int>(A.rows());
  if (nev > dim) {
    emit_warning(Warning::nev_clamped, "requested " + std::to_string(nev) +
                                           " pairs from a space of dimension " +
                                           std::to_string(dim));
    nev = dim;
  }

  EigenPairs pairs = dense_generalized_eigen(A, M, true);
  std::vector<int> order = sort_order(pairs.values, which);
  int take = std::min<int>(nev, static_cast<int>(order.size()));

  EigenResult result;
  result.nconverged = take;
  for (int k = 0; k < take; ++k) {
    int i = order[k];
    result.eigenvalues.push_back(pairs.values[i]);
    Eigen::VectorXcd v = pairs.vectors.col(i);
    normalize_vector(v);

    Function uf;
    uf.space = &V;
    uf.values = Vector::Zero(V.dim_total());
    if (problem.restrict_space) {
      // Map back through the shared points; constrained dofs stay zero.
      for (PointId p = 0; p < V.mesh->chart_size(); ++p)
        for (int kk = 0; kk < V.section.dof_count[p]; ++kk) {
          int g = solve_space->lgmap.indices[solve_space->section.offset[p] + kk];
          if (g >= 0) uf.values[V.section.offset[p] + kk] = v[g].real();
        }
    } else {
      for (int d = 0; d < V.dim_total(); ++d) uf.values[d] = v[d].real();
    }
    result.eigenvectors.push_back(std::move(uf));
  }
  return result;
}

Function eigenfunction(const EigenResult& result, int k) {
  if (k < 0 || k >= static_cast<int>(result.eigenvectors.size()))
    throw std::out_of_range("eigenfunction index outside the converged set");
  return result.eigenvectors[static_cast<size_t>(k)];
}

ShiftDemo shift_demo_matrices() {
  ShiftDemo d;
  d.A.resize(3, 3);
  d.M.resize(3, 3);
  d.A << 1, 0, 0, 0, 0.5, 1, 0, 3, 2;
  d.M << 1, 0, 0, 0, 0.5, 0.25, 0, 3, -0.5;
  d.bc_row = 0;
  return d;
}

std::vector<std::complex<double>> shift_demo_spectrum(double theta) {
  ShiftDemo d = shift_demo_matrices();
  if (theta != 0.0) d.M.row(d.bc_row) /= theta;
  return generalized_eigenvalues(d.A, d.M);
}

}  // namespace rfem
