#include "rfem/ranksim.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rfem/assembly.hpp"
#include "rfem/errors.hpp"

namespace rfem {

namespace {

int local_index(const RankView& view, PointId global_point) {
  auto it = std::lower_bound(view.to_global.begin(), view.to_global.end(), global_point);
  if (it == view.to_global.end() || *it != global_point) return -1;
  return static_cast<int>(it - view.to_global.begin());
}

}  // namespace

Partition partition_cells(const Plex& plex, int nranks) {
  int ncells = plex.num_cells();
  if (nranks < 1) throw std::invalid_argument("partition needs at least one rank");
  if (nranks > ncells)
    throw std::invalid_argument("cannot split " + std::to_string(ncells) + " cells over " +
                                std::to_string(nranks) + " ranks");
  Partition part;
  part.nranks = nranks;
  part.cell_owner.resize(ncells);
  int block = (ncells + nranks - 1) / nranks;
  for (int c = 0; c < ncells; ++c) part.cell_owner[c] = c / block;
  return part;
}

std::vector<RankView> build_rank_views(const std::shared_ptr<const Plex>& mesh,
                                       const Partition& partition) {
  const Plex& plex = *mesh;
  int ncells = plex.num_cells();
  int npoints = plex.chart_size();
  if (static_cast<int>(partition.cell_owner.size()) != ncells)
    throw std::invalid_argument("partition does not cover the mesh");

  // Global ownership first: lowest rank whose own cells' closures reach the
  // point.  Every point is in some cell's closure, so this is total.
  std::vector<int> owner(npoints, partition.nranks);
  for (PointId c = 0; c < ncells; ++c) {
    int r = partition.cell_owner[c];
    for (PointId p : plex.closure(c)) owner[p] = std::min(owner[p], r);
  }

  std::vector<RankView> views(partition.nranks);
  for (int r = 0; r < partition.nranks; ++r) {
    RankView& view = views[r];
    view.rank = r;

    std::vector<char> touched(npoints, 0);  // points of this rank's own cells
    std::vector<char> in_halo(ncells, 0);
    for (PointId c = 0; c < ncells; ++c)
      if (partition.cell_owner[c] == r) {
        in_halo[c] = 1;
        for (PointId p : plex.closure(c)) touched[p] = 1;
      }
    for (PointId c = 0; c < ncells; ++c) {
      if (in_halo[c]) continue;
      for (PointId p : plex.closure(c))
        if (touched[p]) {
          in_halo[c] = 1;
          break;
        }
    }

    std::vector<char> in_view(npoints, 0);
    for (PointId c = 0; c < ncells; ++c)
      if (in_halo[c])
        for (PointId p : plex.closure(c)) in_view[p] = 1;
    for (PointId p = 0; p < npoints; ++p)
      if (in_view[p]) view.to_global.push_back(p);

    view.local_plex = std::make_shared<Plex>(plex.restrict_to(view.to_global));
    int nlocal = static_cast<int>(view.to_global.size());
    view.owner.resize(nlocal);
    view.classes.resize(nlocal);
    for (int lp = 0; lp < nlocal; ++lp) view.owner[lp] = owner[view.to_global[lp]];
    for (int lp = 0; lp < nlocal; ++lp) {
      if (view.owner[lp] != r) {
        view.classes[lp] = PointClass::ghost;
        continue;
      }
      bool core = true;
      for (PointId q : view.local_plex->star(lp))
        if (view.owner[q] != r) {
          core = false;
          break;
        }
      view.classes[lp] = core ? PointClass::core : PointClass::owned;
    }
    for (PointId lc = 0; lc < view.local_plex->num_cells(); ++lc)
      if (view.owner[lc] == r) view.owned_cells.push_back(lc);
  }
  return views;
}

std::vector<FunctionSpace> build_rank_spaces(const Plex& global_mesh,
                                             const std::vector<RankView>& views,
                                             const LagrangeElement& element,
                                             const std::set<int>& boundary_set) {
  std::set<PointId> global_constrained = global_mesh.boundary_points(boundary_set);
  std::vector<FunctionSpace> spaces;
  spaces.reserve(views.size());
  for (const RankView& view : views) {
    FunctionSpace V =
        function_space_with_classes(view.local_plex, element, view.classes, boundary_set);
    // The view must be wide enough to classify its own boundary points; a
    // disagreement with the global mesh would corrupt the shared numbering.
    std::set<PointId> local_constrained = view.local_plex->boundary_points(boundary_set);
    int nlocal = static_cast<int>(view.to_global.size());
    for (int lp = 0; lp < nlocal; ++lp) {
      bool local_flag = local_constrained.count(lp) > 0;
      bool global_flag = global_constrained.count(view.to_global[lp]) > 0;
      if (local_flag != global_flag)
        throw InternalError("rank " + std::to_string(view.rank) +
                            " misclassifies boundary point " +
                            std::to_string(view.to_global[lp]));
    }
    spaces.push_back(std::move(V));
  }
  return spaces;
}

StarForest build_star_forest(const std::vector<RankView>& views,
                             const std::vector<FunctionSpace>& spaces,
                             bool include_constrained) {
  if (views.size() != spaces.size())
    throw std::invalid_argument("need one space per rank view");
  int nranks = static_cast<int>(views.size());
  StarForest forest;
  forest.local_sizes.resize(nranks);
  for (int r = 0; r < nranks; ++r) forest.local_sizes[r] = spaces[r].section.total_dofs;

  for (int r = 0; r < nranks; ++r) {
    const RankView& view = views[r];
    const Section& sec = spaces[r].section;
    int nlocal = static_cast<int>(view.to_global.size());
    for (int lp = 0; lp < nlocal; ++lp) {
      if (view.classes[lp] != PointClass::ghost) continue;
      int dofs = sec.dof_count[lp];
      if (dofs == 0) continue;
      if (!include_constrained && sec.constrained_count[lp] > 0)
        continue;  // the historical omission: constrained ghosts go stale
      int o = view.owner[lp];
      int lo = local_index(views[o], view.to_global[lp]);
      if (lo < 0 || views[o].classes[lo] == PointClass::ghost)
        throw InternalError("owner rank " + std::to_string(o) + " is missing point " +
                            std::to_string(view.to_global[lp]));
      const Section& osec = spaces[o].section;
      if (osec.dof_count[lo] != dofs)
        throw InternalError("dof layout differs across ranks at point " +
                            std::to_string(view.to_global[lp]));
      for (int k = 0; k < dofs; ++k)
        forest.edges.push_back({r, sec.offset[lp] + k, o, osec.offset[lo] + k});
    }
  }
  return forest;
}

void halo_exchange(const StarForest& forest, std::vector<Vector>& rank_values) {
  if (rank_values.size() != forest.local_sizes.size())
    throw std::invalid_argument("halo exchange needs one vector per rank");
  for (size_t r = 0; r < rank_values.size(); ++r)
    if (rank_values[r].size() != forest.local_sizes[r])
      throw std::invalid_argument("rank " + std::to_string(r) + " vector has length " +
                                  std::to_string(rank_values[r].size()) + ", expected " +
                                  std::to_string(forest.local_sizes[r]));
  for (const StarForestEdge& e : forest.edges)
    rank_values[e.leaf_rank](e.leaf_dof) = rank_values[e.root_rank](e.root_dof);
}

Vector interpolate_owned(const ScalarExpr& f, const RankView& view, const FunctionSpace& space) {
  if (space.mesh.get() != view.local_plex.get())
    throw std::invalid_argument("space does not live on the rank view's mesh");
  Vector out = Vector::Zero(space.section.total_dofs);
  int nlocal = static_cast<int>(view.to_global.size());
  for (int lp = 0; lp < nlocal; ++lp) {
    if (view.owner[lp] != view.rank) continue;
    for (int k = 0; k < space.section.dof_count[lp]; ++k) {
      auto xy = dof_coordinate(space, lp, k);
      out(space.section.offset[lp] + k) = f(xy[0], xy[1]);
    }
  }
  return out;
}

ParallelNumbering parallel_global_numbering(const std::vector<RankView>& views,
                                            const std::vector<FunctionSpace>& spaces) {
  if (views.size() != spaces.size())
    throw std::invalid_argument("need one space per rank view");
  int nranks = static_cast<int>(views.size());

  PointId npoints = 0;
  for (const RankView& v : views)
    if (!v.to_global.empty()) npoints = std::max(npoints, v.to_global.back() + 1);

  // Owned unconstrained dofs take ascending global indices rank by rank,
  // following each rank's renumbered (offset) order within the rank.
  std::vector<int> point_start(npoints, -1);
  int running = 0;
  for (int r = 0; r < nranks; ++r) {
    const Section& sec = spaces[r].section;
    int nlocal = static_cast<int>(views[r].to_global.size());
    std::vector<int> by_offset(nlocal);
    std::iota(by_offset.begin(), by_offset.end(), 0);
    std::sort(by_offset.begin(), by_offset.end(),
              [&](int a, int b) { return sec.offset[a] < sec.offset[b]; });
    for (int lp : by_offset) {
      if (views[r].owner[lp] != r) continue;
      if (sec.dof_count[lp] == 0 || sec.constrained_count[lp] > 0) continue;
      point_start[views[r].to_global[lp]] = running;
      running += sec.dof_count[lp];
    }
  }

  ParallelNumbering num;
  num.global_size = running;
  num.global_sections.resize(nranks);
  num.lgmaps.resize(nranks);
  for (int r = 0; r < nranks; ++r) {
    const Section& sec = spaces[r].section;
    int nlocal = static_cast<int>(views[r].to_global.size());
    GlobalSection gs;
    gs.offset.assign(nlocal, 0);
    gs.total = running;
    for (int lp = 0; lp < nlocal; ++lp) {
      if (sec.dof_count[lp] == 0 || sec.constrained_count[lp] > 0) continue;
      int start = point_start[views[r].to_global[lp]];
      if (start < 0)
        throw InternalError("point " + std::to_string(views[r].to_global[lp]) +
                            " is unconstrained on rank " + std::to_string(r) +
                            " but its owner assigned it no dofs");
      gs.offset[lp] = views[r].owner[lp] == r ? start : -(start + 1);
    }
    num.lgmaps[r] = make_global_numbering(sec, gs);
    num.global_sections[r] = std::move(gs);
  }
  return num;
}

ParallelSystem assemble_parallel(const BilinearForm& a, const std::vector<LinearForm>& Ls,
                                 const std::vector<RankView>& views,
                                 const std::vector<FunctionSpace>& spaces) {
  if (views.size() != spaces.size() || Ls.size() != views.size())
    throw std::invalid_argument("need one space and one right-hand side per rank");
  ParallelSystem sys;
  sys.numbering = parallel_global_numbering(views, spaces);
  int n = sys.numbering.global_size;
  sys.A = DenseMatrix::Zero(n, n);
  sys.b = Vector::Zero(n);
  for (size_t r = 0; r < views.size(); ++r) {
    const std::vector<int>& map = sys.numbering.lgmaps[r].indices;
    CompressedSparseMatrix Ar = assemble_matrix_mapped(a, spaces[r], spaces[r], map, map, n, n,
                                                       &views[r].owned_cells);
    for (int i = 0; i < Ar.rows; ++i)
      for (int s = Ar.row_ptr[i]; s < Ar.row_ptr[i + 1]; ++s)
        sys.A(i, Ar.col_idx[s]) += Ar.values[s];
    Vector br = Vector::Zero(n);
    assemble_vector_mapped(Ls[r], spaces[r], map, br, &views[r].owned_cells);
    sys.b += br;
  }
  return sys;
}

Function gather_solution(const Vector& x, const std::vector<RankView>& views,
                         const std::vector<FunctionSpace>& spaces,
                         const ParallelNumbering& numbering, const FunctionSpace& serial) {
  if (x.size() != numbering.global_size)
    throw std::invalid_argument("solution length does not match the global numbering");
  Function u;
  u.space = &serial;
  u.values = Vector::Zero(serial.section.total_dofs);
  for (size_t r = 0; r < views.size(); ++r) {
    const RankView& view = views[r];
    const Section& sec = spaces[r].section;
    const std::vector<int>& map = numbering.lgmaps[r].indices;
    int nlocal = static_cast<int>(view.to_global.size());
    for (int lp = 0; lp < nlocal; ++lp) {
      if (view.owner[lp] != view.rank) continue;
      PointId gp = view.to_global[lp];
      int dofs = sec.dof_count[lp];
      if (serial.section.dof_count[gp] != dofs)
        throw InternalError("rank space dof layout differs from the gathered space");
      for (int k = 0; k < dofs; ++k) {
        int g = map[sec.offset[lp] + k];
        if (g >= 0) u.values(serial.section.offset[gp] + k) = x(g);
      }
    }
  }
  return u;
}

}  // namespace rfem
