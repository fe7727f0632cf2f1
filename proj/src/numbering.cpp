#include "rfem/numbering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rfem/errors.hpp"

namespace rfem {

const char* point_class_name(PointClass c) {
  switch (c) {
    case PointClass::core: return "core";
    case PointClass::owned: return "owned";
    case PointClass::ghost: return "ghost";
  }
  return "?";
}

Renumbering plex_renumbering(const Plex& plex, const std::vector<PointClass>& classes,
                             const std::set<PointId>& constrained_points) {
  int n = plex.chart_size();
  if (static_cast<int>(classes.size()) != n)
    throw std::invalid_argument("classes size does not match plex chart");
  for (PointId p : constrained_points)
    if (p < 0 || p >= n) throw std::out_of_range("constrained point outside chart");

  auto rank = [&](PointId p) {
    if (classes[p] == PointClass::ghost) return 3;
    if (constrained_points.count(p)) return 2;
    return classes[p] == PointClass::core ? 0 : 1;
  };

  Renumbering r;
  r.points.resize(n);
  std::iota(r.points.begin(), r.points.end(), 0);
  std::stable_sort(r.points.begin(), r.points.end(),
                   [&](PointId a, PointId b) { return rank(a) < rank(b); });
  r.index_of.assign(n, 0);
  int owned_free = 0, owned_total = 0;
  for (int i = 0; i < n; ++i) {
    r.index_of[r.points[i]] = i;
    int rk = rank(r.points[i]);
    if (rk < 2) ++owned_free;
    if (rk < 3) ++owned_total;
  }
  r.constrained_begin = owned_free;
  r.constrained_end = owned_total;
  return r;
}

SectionResult create_section(const Plex& plex, const std::vector<PointClass>& classes,
                             const std::array<int, 3>& dofs_per_dim,
                             const std::set<int>& boundary_set) {
  for (int d : dofs_per_dim)
    if (d < 0) throw std::invalid_argument("dofs per dimension must be >= 0");
  std::set<PointId> constrained = plex.boundary_points(boundary_set);
  SectionResult out;
  out.renumbering = plex_renumbering(plex, classes, constrained);

  int n = plex.chart_size();
  Section& sec = out.section;
  sec.dof_count.assign(n, 0);
  sec.constrained_count.assign(n, 0);
  sec.offset.assign(n, 0);
  int running = 0;
  for (PointId p : out.renumbering.points) {
    int d = dofs_per_dim[plex.point_dim(p)];
    sec.dof_count[p] = d;
    sec.offset[p] = running;
    running += d;
    if (constrained.count(p)) {
      sec.constrained_count[p] = d;
      sec.total_constrained += d;
      if (classes[p] != PointClass::ghost && d > 0) ++out.constrained_point_count;
    }
  }
  sec.total_dofs = running;
  return out;
}

GlobalSection serial_global_section(const Section& local) {
  int n = static_cast<int>(local.dof_count.size());
  std::vector<PointId> by_offset(n);
  std::iota(by_offset.begin(), by_offset.end(), 0);
  std::sort(by_offset.begin(), by_offset.end(),
            [&](PointId a, PointId b) { return local.offset[a] < local.offset[b]; });
  GlobalSection g;
  g.offset.assign(n, 0);
  for (PointId p : by_offset) {
    if (local.constrained_count[p] > 0) continue;
    g.offset[p] = g.total;
    g.total += local.dof_count[p];
  }
  return g;
}

LocalGlobalMap make_global_numbering(const Section& local, const GlobalSection& global) {
  if (global.offset.size() != local.dof_count.size())
    throw std::invalid_argument("local and global sections cover different charts");
  LocalGlobalMap map;
  map.indices.assign(local.total_dofs, -1);
  map.global_size = global.total;
  int n = static_cast<int>(local.dof_count.size());
  for (PointId p = 0; p < n; ++p) {
    int dofs = local.dof_count[p];
    int cdofs = local.constrained_count[p];
    int loff = local.offset[p];
    if (cdofs > 0) {
      for (int c = 0; c < cdofs; ++c) map.indices[loff + c] = -1;
      continue;
    }
    int goff = global.offset[p];
    if (goff < 0) goff = -(goff + 1);  // remotely owned points store -(start+1)
    for (int c = 0; c < dofs; ++c) map.indices[loff + c] = goff + c;
  }
  return map;
}

LocalGlobalMap lgmap_with_bcs(const Section& section, const std::vector<int>& bc_dofs) {
  if (section.total_constrained != 0)
    throw std::invalid_argument("lgmap_with_bcs expects an unrestricted section");
  LocalGlobalMap map;
  map.indices.resize(section.total_dofs);
  std::iota(map.indices.begin(), map.indices.end(), 0);
  map.global_size = section.total_dofs;
  for (int d : bc_dofs) {
    if (d < 0 || d >= section.total_dofs)
      throw std::out_of_range("bc dof " + std::to_string(d) + " outside section");
    map.indices[d] = -1;
  }
  return map;
}

}  // namespace rfem
