#pragma once

#include <memory>
#include <set>
#include <vector>

#include "rfem/space.hpp"

namespace rfem {

/// Contiguous-block assignment of cells to simulated ranks.
struct Partition {
  int nranks = 1;
  std::vector<int> cell_owner;  // per cell
};

/// Blocks of ceil(cells/nranks) cells by ascending cell id.  Trailing ranks
/// may come out empty when nranks does not divide the cell count evenly.
Partition partition_cells(const Plex& plex, int nranks);

/// What one simulated process sees: every point in the closure of a cell the
/// rank touches (its own cells plus cells sharing a point with them).  Local
/// ids follow global order, so shared-entity conventions agree across ranks.
struct RankView {
  int rank = 0;
  std::shared_ptr<const Plex> local_plex;
  std::vector<PointId> to_global;     // local point -> global point, ascending
  std::vector<PointClass> classes;    // per local point
  std::vector<int> owner;             // owning rank per local point
  std::vector<PointId> owned_cells;   // local cell ids this rank assembles
};

/// Ownership of a shared point goes to the lowest rank whose own cells'
/// closures contain it.  Owned points are core when their star stays clear
/// of ghosts.
std::vector<RankView> build_rank_views(const std::shared_ptr<const Plex>& mesh,
                                       const Partition& partition);

/// Per-rank spaces over the local plexes.  Each rank classifies boundary
/// points from its own view; any disagreement with the global mesh is an
/// internal-consistency error rather than silent corruption.
std::vector<FunctionSpace> build_rank_spaces(const Plex& global_mesh,
                                             const std::vector<RankView>& views,
                                             const LagrangeElement& element,
                                             const std::set<int>& boundary_set);

struct StarForestEdge {
  int leaf_rank = 0;
  int leaf_dof = 0;  // rank-local dof index
  int root_rank = 0;
  int root_dof = 0;
};

/// Leaf -> root graph driving the halo exchange.  Roots are owned dofs on the
/// owner rank; every dof of every ghost point is a leaf.
struct StarForest {
  std::vector<StarForestEdge> edges;
  std::vector<int> local_sizes;  // dofs per rank, for exchange validation
};

/// include_constrained = false reproduces the historical bug where dofs of
/// constrained points were left out of the forest and went stale.
StarForest build_star_forest(const std::vector<RankView>& views,
                             const std::vector<FunctionSpace>& spaces,
                             bool include_constrained = true);

/// Overwrites every leaf dof with its root's current value.  Owned dofs are
/// never modified, so the exchange is idempotent.
void halo_exchange(const StarForest& forest, std::vector<Vector>& rank_values);

/// Evaluates f at this rank's owned dofs (constrained ones included) and
/// leaves ghost dofs zero; exchange then fills the ghosts from their owners.
Vector interpolate_owned(const ScalarExpr& f, const RankView& view,
                         const FunctionSpace& space);

/// Rank-by-rank global numbering: rank r's owned unconstrained dofs take the
/// indices after every lower rank's, in local renumbered order; ghosts copy
/// the owner's index and constrained dofs map to -1.
struct ParallelNumbering {
  std::vector<GlobalSection> global_sections;
  std::vector<LocalGlobalMap> lgmaps;
  int global_size = 0;
};

ParallelNumbering parallel_global_numbering(const std::vector<RankView>& views,
                                            const std::vector<FunctionSpace>& spaces);

/// Each rank assembles its owned cells and scatters through its parallel
/// numbering; contributions to shared rows simply add up.
struct ParallelSystem {
  DenseMatrix A;
  Vector b;
  ParallelNumbering numbering;
};

ParallelSystem assemble_parallel(const BilinearForm& a, const std::vector<LinearForm>& Ls,
                                 const std::vector<RankView>& views,
                                 const std::vector<FunctionSpace>& spaces);

/// Copies a solved global vector back onto a whole-mesh space through each
/// rank's owned dofs; constrained dofs are left at zero.
Function gather_solution(const Vector& x, const std::vector<RankView>& views,
                         const std::vector<FunctionSpace>& spaces,
                         const ParallelNumbering& numbering, const FunctionSpace& serial);

}  // namespace rfem
