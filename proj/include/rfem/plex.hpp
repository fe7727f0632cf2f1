#pragma once

#include <array>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace rfem {

using PointId = int;

/// Mesh topology as a layered DAG: every point covers the points in its cone
/// and is covered by the points in its support.  Points are numbered cells
/// first, then vertices, then (in 2D) edges, so each stratum is a contiguous
/// id range.  Instances are immutable once built.
class Plex {
public:
  /// 1D mesh of [0, length] with ncells equal cells.  Facets are the two end
  /// vertices, labelled 1 (left) and 2 (right).
  static Plex interval(int ncells, double length = 1.0);

  /// Triangulated [0,1]^2 with nx*ny squares, each split along the diagonal
  /// from its lower-left to its upper-right corner.  Boundary edges carry
  /// labels 1 (x=0), 2 (x=1), 3 (y=0), 4 (y=1).
  static Plex unit_square(int nx, int ny);

  int dim() const { return m_dim; }
  int chart_size() const { return static_cast<int>(m_cone.size()); }
  int num_cells() const { return m_num_cells; }
  int num_vertices() const { return m_num_vertices; }
  int num_edges() const { return m_num_edges; }

  PointId cells_begin() const { return 0; }
  PointId cells_end() const { return m_num_cells; }
  PointId vertices_begin() const { return m_num_cells; }
  PointId vertices_end() const { return m_num_cells + m_num_vertices; }
  PointId edges_begin() const { return vertices_end(); }
  PointId edges_end() const { return vertices_end() + m_num_edges; }

  bool is_cell(PointId p) const { return p >= 0 && p < m_num_cells; }
  bool is_vertex(PointId p) const { return p >= vertices_begin() && p < vertices_end(); }

  /// Topological dimension of a point: 0 for vertices, 1 for edges, dim()
  /// for cells (which is also 1 on interval meshes).
  int point_dim(PointId p) const;

  const std::vector<PointId>& cone(PointId p) const;
  const std::vector<PointId>& support(PointId p) const;

  /// Transitive closure of cone() including p itself, ascending ids.
  std::vector<PointId> closure(PointId p) const;

  /// Transitive closure of support() including p itself, ascending ids.
  std::vector<PointId> star(PointId p) const;

  /// Cell corner vertices in generator order; the affine cell map and the
  /// reference element follow this order.
  const std::vector<PointId>& cell_vertices(PointId cell) const;

  const std::array<double, 2>& coordinates(PointId vertex) const;

  /// Subdomain label -> facets carrying it (2D: boundary edges, 1D: end
  /// vertices), ascending ids.  Labels with no local facet may be present
  /// with an empty list on restricted copies.
  const std::map<int, std::vector<PointId>>& face_sets() const { return m_face_sets; }

  /// Union of closures of all facets carrying one of the labels.  Unknown
  /// labels warn on stderr and contribute nothing.
  std::set<PointId> boundary_points(const std::set<int>& labels) const;

  /// The edge whose endpoints are {a, b}; throws std::out_of_range if absent.
  PointId edge_between(PointId a, PointId b) const;

  /// Topology induced by `points` (sorted ascending, closure-complete).
  /// Point k of the copy is points[k]; labels, coordinates and cell corners
  /// carry over, labels keeping empty facet lists rather than vanishing.
  Plex restrict_to(const std::vector<PointId>& points) const;

  /// Process-unique instance id; distinguishes meshes in form signatures.
  int id() const { return m_id; }

private:
  Plex() = default;
  void finalize();
  void check_point(PointId p) const;

  int m_dim = 0;
  int m_num_cells = 0;
  int m_num_vertices = 0;
  int m_num_edges = 0;
  int m_id = 0;
  std::vector<std::vector<PointId>> m_cone;
  std::vector<std::vector<PointId>> m_support;
  std::vector<std::vector<PointId>> m_cell_vertices;
  std::vector<std::array<double, 2>> m_coords;  // indexed by vertex - vertices_begin()
  std::map<int, std::vector<PointId>> m_face_sets;
  std::map<std::pair<PointId, PointId>, PointId> m_edge_of;
};

}  // namespace rfem
