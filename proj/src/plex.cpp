#include "rfem/plex.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>

#include "rfem/diagnostics.hpp"
#include "rfem/errors.hpp"

namespace rfem {

namespace {
std::atomic<int> next_plex_id{1};
}

void Plex::check_point(PointId p) const {
  if (p < 0 || p >= chart_size())
    throw std::out_of_range("plex point " + std::to_string(p) + " outside chart");
}

int Plex::point_dim(PointId p) const {
  check_point(p);
  if (p < m_num_cells) return m_dim;
  if (p < vertices_end()) return 0;
  return 1;
}

const std::vector<PointId>& Plex::cone(PointId p) const {
  check_point(p);
  return m_cone[p];
}

const std::vector<PointId>& Plex::support(PointId p) const {
  check_point(p);
  return m_support[p];
}

std::vector<PointId> Plex::closure(PointId p) const {
  check_point(p);
  std::set<PointId> seen;
  std::vector<PointId> work{p};
  while (!work.empty()) {
    PointId q = work.back();
    work.pop_back();
    if (!seen.insert(q).second) continue;
    for (PointId r : m_cone[q]) work.push_back(r);
  }
  return {seen.begin(), seen.end()};
}

std::vector<PointId> Plex::star(PointId p) const {
  check_point(p);
  std::set<PointId> seen;
  std::vector<PointId> work{p};
  while (!work.empty()) {
    PointId q = work.back();
    work.pop_back();
    if (!seen.insert(q).second) continue;
    for (PointId r : m_support[q]) work.push_back(r);
  }
  return {seen.begin(), seen.end()};
}

const std::vector<PointId>& Plex::cell_vertices(PointId cell) const {
  if (!is_cell(cell))
    throw std::out_of_range("point " + std::to_string(cell) + " is not a cell");
  return m_cell_vertices[cell];
}

const std::array<double, 2>& Plex::coordinates(PointId vertex) const {
  if (!is_vertex(vertex))
    throw std::out_of_range("point " + std::to_string(vertex) + " is not a vertex");
  return m_coords[vertex - vertices_begin()];
}

std::set<PointId> Plex::boundary_points(const std::set<int>& labels) const {
  std::set<PointId> out;
  for (int label : labels) {
    auto it = m_face_sets.find(label);
    if (it == m_face_sets.end()) {
      emit_warning(Warning::unknown_subdomain,
                   "label " + std::to_string(label) + " not present; ignored");
      continue;
    }
    for (PointId f : it->second)
      for (PointId q : closure(f)) out.insert(q);
  }
  return out;
}

PointId Plex::edge_between(PointId a, PointId b) const {
  auto key = std::minmax(a, b);
  auto it = m_edge_of.find({key.first, key.second});
  if (it == m_edge_of.end())
    throw std::out_of_range("no edge between vertices " + std::to_string(a) + " and " +
                            std::to_string(b));
  return it->second;
}

void Plex::finalize() {
  m_support.assign(m_cone.size(), {});
  for (PointId p = 0; p < chart_size(); ++p)
    for (PointId q : m_cone[p]) m_support[q].push_back(p);
  for (auto& s : m_support) std::sort(s.begin(), s.end());
  m_edge_of.clear();
  for (PointId e = edges_begin(); e < edges_end(); ++e) {
    const auto& c = m_cone[e];
    m_edge_of[{std::min(c[0], c[1]), std::max(c[0], c[1])}] = e;
  }
  m_id = next_plex_id.fetch_add(1);
}

Plex Plex::interval(int ncells, double length) {
  if (ncells < 1) throw std::invalid_argument("interval mesh needs at least one cell");
  if (!(length > 0.0)) throw std::invalid_argument("interval length must be positive");
  Plex m;
  m.m_dim = 1;
  m.m_num_cells = ncells;
  m.m_num_vertices = ncells + 1;
  m.m_num_edges = 0;
  m.m_cone.assign(m.m_num_cells + m.m_num_vertices, {});
  m.m_cell_vertices.resize(ncells);
  m.m_coords.resize(m.m_num_vertices);
  for (int c = 0; c < ncells; ++c) {
    PointId va = ncells + c, vb = ncells + c + 1;
    m.m_cone[c] = {va, vb};
    m.m_cell_vertices[c] = {va, vb};
  }
  for (int i = 0; i <= ncells; ++i)
    m.m_coords[i] = {length * i / ncells, 0.0};
  m.m_face_sets[1] = {ncells};
  m.m_face_sets[2] = {2 * ncells};
  m.finalize();
  return m;
}

Plex Plex::unit_square(int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("square mesh needs nx, ny >= 1");
  Plex m;
  m.m_dim = 2;
  m.m_num_cells = 2 * nx * ny;
  m.m_num_vertices = (nx + 1) * (ny + 1);
  m.m_num_edges = 3 * nx * ny + nx + ny;
  m.m_cone.assign(m.m_num_cells + m.m_num_vertices + m.m_num_edges, {});
  m.m_cell_vertices.resize(m.m_num_cells);
  m.m_coords.resize(m.m_num_vertices);

  auto vid = [&](int i, int j) { return m.vertices_begin() + j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.m_coords[vid(i, j) - m.vertices_begin()] = {double(i) / nx, double(j) / ny};

  // Edge ids: horizontals, then verticals, then diagonals, row-major each.
  PointId e0 = m.edges_begin();
  auto horiz = [&](int i, int j) { return e0 + j * nx + i; };
  PointId v0 = e0 + nx * (ny + 1);
  auto vert = [&](int i, int j) { return v0 + j * (nx + 1) + i; };
  PointId d0 = v0 + (nx + 1) * ny;
  auto diag = [&](int i, int j) { return d0 + j * nx + i; };

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) m.m_cone[horiz(i, j)] = {vid(i, j), vid(i + 1, j)};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) m.m_cone[vert(i, j)] = {vid(i, j), vid(i, j + 1)};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m.m_cone[diag(i, j)] = {vid(i, j), vid(i + 1, j + 1)};

  // Each square splits into the triangle below the diagonal and the one
  // above it.  Cell cones list the edge opposite each corner in turn.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      PointId lower = 2 * (j * nx + i), upper = lower + 1;
      m.m_cell_vertices[lower] = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
      m.m_cone[lower] = {vert(i + 1, j), diag(i, j), horiz(i, j)};
      m.m_cell_vertices[upper] = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
      m.m_cone[upper] = {horiz(i, j + 1), vert(i, j), diag(i, j)};
    }

  for (int j = 0; j < ny; ++j) {
    m.m_face_sets[1].push_back(vert(0, j));
    m.m_face_sets[2].push_back(vert(nx, j));
  }
  for (int i = 0; i < nx; ++i) {
    m.m_face_sets[3].push_back(horiz(i, 0));
    m.m_face_sets[4].push_back(horiz(i, ny));
  }
  m.finalize();
  return m;
}

Plex Plex::restrict_to(const std::vector<PointId>& points) const {
  // An empty subset is legal: a rank owning no cells sees an empty mesh.
  std::vector<int> local(chart_size(), -1);
  for (size_t k = 0; k < points.size(); ++k) {
    check_point(points[k]);
    if (k > 0 && points[k] <= points[k - 1])
      throw std::invalid_argument("restriction points must be sorted and unique");
    local[points[k]] = static_cast<int>(k);
  }

  Plex m;
  m.m_dim = m_dim;
  for (PointId p : points) {
    if (p < m_num_cells)
      ++m.m_num_cells;
    else if (p < vertices_end())
      ++m.m_num_vertices;
    else
      ++m.m_num_edges;
  }
  m.m_cone.resize(points.size());
  m.m_cell_vertices.resize(m.m_num_cells);
  m.m_coords.resize(m.m_num_vertices);

  for (size_t k = 0; k < points.size(); ++k) {
    PointId p = points[k];
    for (PointId q : m_cone[p]) {
      if (local[q] < 0)
        throw InternalError("restriction set is not closure-complete at point " +
                            std::to_string(p));
      m.m_cone[k].push_back(local[q]);
    }
    if (is_cell(p)) {
      for (PointId v : m_cell_vertices[p])
        m.m_cell_vertices[k].push_back(local[v]);
    } else if (is_vertex(p)) {
      m.m_coords[k - m.m_num_cells] = m_coords[p - vertices_begin()];
    }
  }
  for (const auto& [label, facets] : m_face_sets) {
    auto& out = m.m_face_sets[label];
    for (PointId f : facets)
      if (local[f] >= 0) out.push_back(local[f]);
  }
  m.finalize();
  return m;
}

}  // namespace rfem
