#pragma once

#include <array>
#include <set>
#include <vector>

#include "rfem/plex.hpp"

namespace rfem {

/// Parallel point class.  Core points can be processed without halo data;
/// owned points are this rank's responsibility; ghosts belong elsewhere.
enum class PointClass : unsigned char { core = 0, owned = 1, ghost = 2 };

const char* point_class_name(PointClass c);

/// Permutation of the chart placing unconstrained core points first, then
/// unconstrained owned points, then constrained core/owned points, then
/// ghosts.  The sort is stable, so original point order breaks ties.
struct Renumbering {
  std::vector<PointId> points;   // points[new_index] = old point
  std::vector<int> index_of;     // index_of[old point] = new index
  int constrained_begin = 0;     // constrained core/owned block, half-open
  int constrained_end = 0;
};

Renumbering plex_renumbering(const Plex& plex, const std::vector<PointClass>& classes,
                             const std::set<PointId>& constrained_points);

/// Per-point dof layout.  Offsets follow the renumbering, so on a restricted
/// space every unconstrained core/owned dof precedes every constrained one.
struct Section {
  std::vector<int> dof_count;
  std::vector<int> constrained_count;  // 0 or dof_count for Lagrange layouts
  std::vector<int> offset;
  int total_dofs = 0;
  int total_constrained = 0;
};

struct SectionResult {
  Section section;
  Renumbering renumbering;
  int constrained_point_count = 0;  // constrained core/owned points with dofs
};

/// Lays out dofs_per_dim[point_dim] dofs per point, marking every dof on the
/// closure of the boundary_set facets as constrained.
SectionResult create_section(const Plex& plex, const std::vector<PointClass>& classes,
                             const std::array<int, 3>& dofs_per_dim,
                             const std::set<int>& boundary_set);

/// Global counterpart of a Section: offsets number only unconstrained dofs of
/// owned points.  Offsets of remotely owned points are stored as -(start+1).
struct GlobalSection {
  std::vector<int> offset;
  int total = 0;
};

/// Global section for a single-process section: identical layout minus the
/// constrained dofs.
GlobalSection serial_global_section(const Section& local);

/// Local index -> global index; -1 marks constrained dofs.
struct LocalGlobalMap {
  std::vector<int> indices;
  int global_size = 0;
};

/// Walks the chart writing -1 for every constrained dof and the decoded
/// global offset for the rest.
LocalGlobalMap make_global_numbering(const Section& local, const GlobalSection& global);

/// Identity map with -1 at the given dofs; the unrestricted assembly path
/// uses it to drop boundary rows and columns.  The section must not carry
/// constraints of its own.
LocalGlobalMap lgmap_with_bcs(const Section& section, const std::vector<int>& bc_dofs);

}  // namespace rfem
