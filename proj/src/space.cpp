#include "rfem/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rfem/errors.hpp"

namespace rfem {

std::string FunctionSpace::label() const {
  std::string s = "{";
  for (int b : boundary_set) {
    if (s.size() > 1) s += ",";
    s += std::to_string(b);
  }
  return s + "}";
}

static FunctionSpace build_space(std::shared_ptr<const Plex> mesh,
                                 const LagrangeElement& element,
                                 std::vector<PointClass> classes,
                                 const std::set<int>& boundary_set) {
  if (!mesh) throw std::invalid_argument("function space needs a mesh");
  if (element.dim() != mesh->dim())
    throw std::invalid_argument("element dimension does not match the mesh");
  FunctionSpace V;
  V.mesh = std::move(mesh);
  V.element = element;
  V.boundary_set = boundary_set;
  if (classes.empty()) classes.assign(V.mesh->chart_size(), PointClass::owned);
  if (static_cast<int>(classes.size()) != V.mesh->chart_size())
    throw std::invalid_argument("point classes do not cover the chart");
  V.classes = std::move(classes);

  for (int label : boundary_set)
    if (!V.mesh->face_sets().count(label)) V.warnings.push_back(Warning::unknown_subdomain);

  SectionResult sr =
      create_section(*V.mesh, V.classes, element.dofs_per_dim(), boundary_set);
  V.section = std::move(sr.section);
  V.renumbering = std::move(sr.renumbering);
  V.constrained_point_count = sr.constrained_point_count;
  V.lgmap = make_global_numbering(V.section, serial_global_section(V.section));

  if (!boundary_set.empty() && V.lgmap.global_size == 0) {
    V.warnings.push_back(Warning::restrict_everything);
    emit_warning(Warning::restrict_everything,
                 "boundary set " + V.label() + " constrains every dof");
  }
  return V;
}

FunctionSpace function_space(std::shared_ptr<const Plex> mesh, const LagrangeElement& element) {
  return build_space(std::move(mesh), element, {}, {});
}

FunctionSpace restricted(const FunctionSpace& base, const std::set<int>& boundary_set) {
  return build_space(base.mesh, base.element, base.classes, boundary_set);
}

FunctionSpace function_space_with_classes(std::shared_ptr<const Plex> mesh,
                                          const LagrangeElement& element,
                                          std::vector<PointClass> classes,
                                          const std::set<int>& boundary_set) {
  return build_space(std::move(mesh), element, std::move(classes), boundary_set);
}

std::vector<int> cell_dof_map(const FunctionSpace& V, PointId cell) {
  const Plex& mesh = *V.mesh;
  const LagrangeElement& el = V.element;
  const auto& verts = mesh.cell_vertices(cell);
  std::vector<int> map(el.node_count(), -1);

  for (size_t v = 0; v < verts.size(); ++v)
    for (size_t k = 0; k < el.entity_dofs[0][v].size(); ++k)
      map[el.entity_dofs[0][v][k]] = V.section.offset[verts[v]] + static_cast<int>(k);

  if (mesh.dim() == 2) {
    static const int ends[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    for (int e = 0; e < 3; ++e) {
      const auto& nodes = el.entity_dofs[1][e];
      if (nodes.empty()) continue;
      PointId ga = verts[ends[e][0]], gb = verts[ends[e][1]];
      PointId edge = mesh.edge_between(ga, gb);
      int ned = static_cast<int>(nodes.size());
      bool forward = ga < gb;  // section dofs run from the lower vertex id
      for (int m = 0; m < ned; ++m) {
        int k = forward ? m : ned - 1 - m;
        map[nodes[m]] = V.section.offset[edge] + k;
      }
    }
  }
  int dm = mesh.dim();
  for (size_t k = 0; k < el.entity_dofs[dm][0].size(); ++k)
    map[el.entity_dofs[dm][0][k]] = V.section.offset[cell] + static_cast<int>(k);
  return map;
}

std::array<double, 2> dof_coordinate(const FunctionSpace& V, PointId p, int k) {
  const Plex& mesh = *V.mesh;
  if (k < 0 || k >= V.section.dof_count[p])
    throw std::out_of_range("dof index outside point");
  int deg = V.element.degree;
  if (mesh.is_vertex(p)) return mesh.coordinates(p);

  auto along = [&](const std::array<double, 2>& a, const std::array<double, 2>& b,
                   int m) -> std::array<double, 2> {
    double t = double(m) / deg;
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  if (!mesh.is_cell(p) || mesh.dim() == 1) {
    // Edge in 2D, or the cell interior of an interval cell: dofs run from
    // the lower-numbered end vertex to the higher one.
    const auto& c = mesh.is_cell(p) ? mesh.cell_vertices(p) : mesh.cone(p);
    PointId a = std::min(c[0], c[1]), b = std::max(c[0], c[1]);
    return along(mesh.coordinates(a), mesh.coordinates(b), k + 1);
  }

  // Triangle interior: entity order of the reference lattice.
  const auto& verts = mesh.cell_vertices(p);
  const auto& a = mesh.coordinates(verts[0]);
  const auto& b = mesh.coordinates(verts[1]);
  const auto& c = mesh.coordinates(verts[2]);
  int idx = 0;
  for (int j = 1; j < deg; ++j)
    for (int i = 1; i + j < deg; ++i, ++idx)
      if (idx == k) {
        double ti = double(i) / deg, tj = double(j) / deg;
        return {a[0] + ti * (b[0] - a[0]) + tj * (c[0] - a[0]),
                a[1] + ti * (b[1] - a[1]) + tj * (c[1] - a[1])};
      }
  throw InternalError("interior dof index not found on cell");
}

std::vector<std::array<double, 2>> dof_coordinates(const FunctionSpace& V) {
  std::vector<std::array<double, 2>> xy(V.dim_total());
  for (PointId p = 0; p < V.mesh->chart_size(); ++p)
    for (int k = 0; k < V.section.dof_count[p]; ++k)
      xy[V.section.offset[p] + k] = dof_coordinate(V, p, k);
  return xy;
}

Function interpolate(const ScalarExpr& f, const FunctionSpace& V) {
  if (!f) throw std::invalid_argument("interpolate needs an expression");
  Function u;
  u.space = &V;
  u.values.resize(V.dim_total());
  auto xy = dof_coordinates(V);
  for (int d = 0; d < V.dim_total(); ++d) u.values[d] = f(xy[d][0], xy[d][1]);
  return u;
}

DirichletBC dirichlet_bc(const FunctionSpace& V, const ScalarExpr& g, int subdomain) {
  if (!g) throw std::invalid_argument("dirichlet bc needs a value expression");
  DirichletBC bc;
  bc.space = &V;
  bc.subdomain = subdomain;
  if (V.restricted_space() && !V.boundary_set.count(subdomain)) {
    bc.mismatch_warning = true;
    emit_warning(Warning::bc_outside_restriction,
                 "bc on subdomain " + std::to_string(subdomain) +
                     " but the space only restricts " + V.label());
  }
  std::set<PointId> pts = V.mesh->boundary_points({subdomain});
  std::vector<double> vals;
  for (PointId p : pts)
    for (int k = 0; k < V.section.dof_count[p]; ++k) {
      bc.dofs.push_back(V.section.offset[p] + k);
      bc.point_dofs.emplace_back(p, k);
      auto x = dof_coordinate(V, p, k);
      vals.push_back(g(x[0], x[1]));
    }
  bc.values.resize(static_cast<long>(vals.size()));
  bc.homogeneous = true;
  for (size_t i = 0; i < vals.size(); ++i) {
    bc.values[static_cast<long>(i)] = vals[i];
    if (vals[i] != 0.0) bc.homogeneous = false;
  }
  return bc;
}

const char* kernel_name(KernelType k) {
  switch (k) {
    case KernelType::mass: return "mass";
    case KernelType::stiffness: return "stiffness";
    case KernelType::advection_x: return "advection_x";
  }
  return "?";
}

LinearForm source_form(const ScalarExpr& f) {
  LinearForm L;
  L.terms.push_back({1.0, f, nullptr});
  return L;
}

LinearForm source_form(const Function& f) {
  LinearForm L;
  L.terms.push_back({1.0, {}, &f});
  return L;
}

std::string form_signature(const BilinearForm& form, const FunctionSpace& test,
                           const FunctionSpace& trial) {
  std::vector<BilinearTerm> terms = form.terms;
  std::stable_sort(terms.begin(), terms.end(), [](const BilinearTerm& a, const BilinearTerm& b) {
    if (a.kernel != b.kernel) return a.kernel < b.kernel;
    return a.weight < b.weight;
  });
  std::string s = "bilinear[";
  char buf[64];
  for (const auto& t : terms) {
    std::snprintf(buf, sizeof buf, "%s*%.17g;", kernel_name(t.kernel), t.weight);
    s += buf;
  }
  s += "]element=" + test.element.id();
  s += ";mesh=" + std::to_string(test.mesh->id());
  s += ";test=" + test.label();
  s += ";trial=" + trial.label();
  return s;
}

}  // namespace rfem
