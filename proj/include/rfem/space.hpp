#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rfem/diagnostics.hpp"
#include "rfem/element.hpp"
#include "rfem/numbering.hpp"
#include "rfem/plex.hpp"

namespace rfem {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Scalar coordinate expression; the y argument is 0 on interval meshes.
using ScalarExpr = std::function<double(double, double)>;

/// A scalar Lagrange space over a mesh, optionally restricted by a boundary
/// set: dofs on the closure of the named boundary subdomains are constrained,
/// renumbered behind the unconstrained block and dropped from the global
/// numbering.  An empty boundary set gives a plain unrestricted space.
struct FunctionSpace {
  std::shared_ptr<const Plex> mesh;
  LagrangeElement element;
  std::set<int> boundary_set;
  std::vector<PointClass> classes;  // per point; all owned on serial meshes
  Section section;
  Renumbering renumbering;
  LocalGlobalMap lgmap;
  int constrained_point_count = 0;
  std::vector<Warning> warnings;

  bool restricted_space() const { return !boundary_set.empty(); }
  int dim_total() const { return section.total_dofs; }
  int dim_constrained() const { return section.total_constrained; }
  int dim_free() const { return lgmap.global_size; }
  /// Boundary set rendered "{1,2}"; "{}" when unrestricted.
  std::string label() const;
};

FunctionSpace function_space(std::shared_ptr<const Plex> mesh, const LagrangeElement& element);

/// Space over the same mesh and element with every dof on the closure of the
/// given subdomains constrained.  Unknown labels warn; so does restricting
/// every dof away.
FunctionSpace restricted(const FunctionSpace& base, const std::set<int>& boundary_set);

/// Rank-view construction: like function_space but with explicit point
/// classes (ghosts keep their dofs, behind everything else).
FunctionSpace function_space_with_classes(std::shared_ptr<const Plex> mesh,
                                          const LagrangeElement& element,
                                          std::vector<PointClass> classes,
                                          const std::set<int>& boundary_set);

/// Section dof ids for each element node of a cell.  Shared edge dofs follow
/// the global orientation convention (lower vertex id towards higher), so
/// neighbouring cells agree on them.
std::vector<int> cell_dof_map(const FunctionSpace& V, PointId cell);

/// Physical coordinates of one dof / all dofs.  Computed entity-locally
/// (vertex dofs from vertex coordinates, edge dofs by interpolating the edge
/// endpoints, interior dofs from the owning cell), so the result does not
/// depend on which neighbouring cell is asked.
std::array<double, 2> dof_coordinate(const FunctionSpace& V, PointId p, int k);
std::vector<std::array<double, 2>> dof_coordinates(const FunctionSpace& V);

struct Function {
  const FunctionSpace* space = nullptr;
  Vector values;
};

/// Nodal interpolation: evaluates the expression at every dof coordinate,
/// constrained dofs included.
Function interpolate(const ScalarExpr& f, const FunctionSpace& V);

/// Strong boundary condition u = g on one labelled subdomain.  Dof values are
/// evaluated eagerly; `homogeneous` records whether they are all zero.
struct DirichletBC {
  const FunctionSpace* space = nullptr;
  int subdomain = 0;
  std::vector<int> dofs;                          // in the space's section
  std::vector<std::pair<PointId, int>> point_dofs;  // (point, dof-within-point)
  Vector values;
  bool homogeneous = true;
  bool mismatch_warning = false;
};

DirichletBC dirichlet_bc(const FunctionSpace& V, const ScalarExpr& g, int subdomain);

// ---------------------------------------------------------------- forms --

/// The closed kernel algebra: weighted sums of these integrands.
enum class KernelType { mass, stiffness, advection_x };

const char* kernel_name(KernelType k);

struct BilinearTerm {
  double weight = 1.0;
  KernelType kernel = KernelType::mass;
};

struct BilinearForm {
  std::vector<BilinearTerm> terms;
};

inline BilinearForm mass_form() { return {{{1.0, KernelType::mass}}}; }
inline BilinearForm stiffness_form() { return {{{1.0, KernelType::stiffness}}}; }

/// Right-hand side term (f, v): f is either a coordinate expression or a
/// coefficient Function on a space over the same mesh.
struct SourceTerm {
  double weight = 1.0;
  ScalarExpr expr;                    // used when coefficient is null
  const Function* coefficient = nullptr;
};

struct LinearForm {
  std::vector<SourceTerm> terms;
};

LinearForm source_form(const ScalarExpr& f);
LinearForm source_form(const Function& f);

/// Cache key: injective over kernel multiset, weights, element, mesh instance
/// and the two space labels.  A space restricted by an empty boundary set
/// shares the signature of its unrestricted base.
std::string form_signature(const BilinearForm& form, const FunctionSpace& test,
                           const FunctionSpace& trial);

}  // namespace rfem
