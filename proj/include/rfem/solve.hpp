#pragma once

#include <complex>
#include <vector>

#include "rfem/assembly.hpp"

namespace rfem {

/// Direct dense LU for systems up to 2000 unknowns, unpreconditioned CG
/// beyond that (the operator must then be SPD).  The result satisfies
/// ||Ax-b|| <= 1e-10 ||b|| or an error is thrown.
Vector linear_solve(const CompressedSparseMatrix& A, const Vector& b);
Vector linear_solve(const DenseMatrix& A, const Vector& b);

struct LinearVariationalProblem {
  BilinearForm a;
  LinearForm L;
  const FunctionSpace* space = nullptr;  // unrestricted
  std::vector<DirichletBC> bcs;
  /// Solve on the restricted space built from the bc subdomains (dropping
  /// constrained dofs) rather than with identity boundary rows.
  bool restrict_space = true;
};

/// Solves a = L subject to the bcs and returns a Function on the original
/// space satisfying every bc exactly.  Both paths agree up to solver
/// tolerance; they differ only in how constrained dofs are carried.
Function solve_variational(const LinearVariationalProblem& problem);

enum class EigenWhich { smallest_real, largest_imag, largest_magnitude };

struct LinearEigenproblem {
  BilinearForm A;
  BilinearForm M;  // defaults to the mass form when empty
  const FunctionSpace* space = nullptr;  // unrestricted
  std::vector<DirichletBC> bcs;          // must be homogeneous
  /// Boundary shift: with restrict_space false, bc rows of M are scaled by
  /// 1/theta so the spurious boundary eigenvalues land on theta instead
  /// of 1.  Zero means no shift.  Ignored on the restricted path, which has
  /// no boundary rows to shift.
  double theta = 0.0;
  bool restrict_space = true;
};

struct EigenResult {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<Function> eigenvectors;  // on the original space; constrained dofs zero
  int nconverged = 0;
};

/// Dense generalized eigensolve of the assembled pencil.  Returns the first
/// nev pairs in `which` order; pairs with an (numerically) infinite
/// eigenvalue are dropped from the converged set.  Eigenvectors have unit
/// 2-norm with their first nonzero component rotated positive.
EigenResult eigensolve(const LinearEigenproblem& problem, int nev,
                       EigenWhich which = EigenWhich::smallest_real);

/// k-th eigenvector as a Function; bounds-checked.
Function eigenfunction(const EigenResult& result, int k);

/// QZ eigenvalues of a raw dense pencil (beta ~ 0 pairs dropped).
std::vector<std::complex<double>> generalized_eigenvalues(const DenseMatrix& A,
                                                          const DenseMatrix& M);

/// The 3x3 demonstration pencil with one boundary row: both matrices carry an
/// identity first row, so the pencil has the spurious unit eigenvalue next to
/// the genuine spectrum {1, 2}.
struct ShiftDemo {
  DenseMatrix A;
  DenseMatrix M;
  int bc_row = 0;
};

ShiftDemo shift_demo_matrices();

/// Spectrum of the demo pencil after scaling the bc row of M by 1/theta
/// (theta = 0 leaves the pencil alone).
std::vector<std::complex<double>> shift_demo_spectrum(double theta);

}  // namespace rfem
