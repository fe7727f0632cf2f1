#include "rfem/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "rfem/assembly.hpp"
#include "rfem/errors.hpp"
#include "rfem/ranksim.hpp"
#include "rfem/solve.hpp"

namespace rfem {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string num17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string numg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int parse_int(const std::string& s) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

/// Writes to the path when given, otherwise to the stream.
void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
  f << text;
}

LagrangeElement element_for(const Plex& mesh, int degree) {
  return lagrange_element(mesh.dim() == 1 ? CellType::interval : CellType::triangle, degree);
}

ScalarExpr zero_expr() {
  return [](double, double) { return 0.0; };
}

}  // namespace

std::shared_ptr<const Plex> parse_mesh_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("mesh spec '" + spec +
                                "' is not square:NX,NY or interval:N[,LENGTH]");
  std::string kind = spec.substr(0, colon);
  std::vector<std::string> parts = split(spec.substr(colon + 1), ',');
  if (kind == "square") {
    if (parts.size() != 2)
      throw std::invalid_argument("square mesh spec needs NX,NY: '" + spec + "'");
    return std::make_shared<Plex>(Plex::unit_square(parse_int(parts[0]), parse_int(parts[1])));
  }
  if (kind == "interval") {
    if (parts.size() != 1 && parts.size() != 2)
      throw std::invalid_argument("interval mesh spec needs N[,LENGTH]: '" + spec + "'");
    double length = parts.size() == 2 ? parse_double(parts[1]) : 1.0;
    return std::make_shared<Plex>(Plex::interval(parse_int(parts[0]), length));
  }
  throw std::invalid_argument("unknown mesh kind '" + kind + "'");
}

ScalarExpr parse_expr(const std::string& name) {
  if (name == "x") return [](double x, double) { return x; };
  if (name == "y") return [](double, double y) { return y; };
  if (name == "x*y") return [](double x, double y) { return x * y; };
  throw std::invalid_argument("unknown expression '" + name + "' (use x, y or x*y)");
}

namespace {

int cmd_plexinfo(const std::string& mesh_spec, int point, bool has_point, std::ostream& out) {
  auto mesh = parse_mesh_spec(mesh_spec);
  ordered_json info{{"dim", mesh->dim()},
                    {"chart", mesh->chart_size()},
                    {"cells", mesh->num_cells()},
                    {"vertices", mesh->num_vertices()},
                    {"edges", mesh->num_edges()}};
  out << info.dump() << "\n";
  if (has_point) {
    ordered_json pj{{"point", point},
                    {"cone", mesh->cone(point)},
                    {"support", mesh->support(point)},
                    {"closure", mesh->closure(point)},
                    {"star", mesh->star(point)}};
    out << pj.dump() << "\n";
  }
  return 0;
}

int cmd_element(const std::string& cell_arg, int degree, std::ostream& out) {
  CellType cell;
  if (cell_arg == "interval")
    cell = CellType::interval;
  else if (cell_arg == "triangle")
    cell = CellType::triangle;
  else
    throw std::invalid_argument("unknown cell '" + cell_arg + "' (use interval or triangle)");
  LagrangeElement el = lagrange_element(cell, degree);
  ordered_json j{{"cell", cell_name(cell)}, {"degree", degree}, {"dofs", el.node_count()}};
  auto nodes = ordered_json::array();
  for (const auto& n : el.nodes) nodes.push_back({n[0], n[1]});
  j["nodes"] = std::move(nodes);
  ordered_json ed;
  for (size_t d = 0; d < el.entity_dofs.size(); ++d)
    ed[std::to_string(d)] = el.entity_dofs[d];
  j["entity_dofs"] = std::move(ed);
  out << j.dump() << "\n";
  return 0;
}

int cmd_numbering(const std::string& mesh_spec, int degree, const std::set<int>& boundary,
                  std::ostream& out) {
  auto mesh = parse_mesh_spec(mesh_spec);
  FunctionSpace V = function_space(mesh, element_for(*mesh, degree));
  if (!boundary.empty()) V = restricted(V, boundary);
  out << "point dofs constrained offset\n";
  for (PointId p = 0; p < mesh->chart_size(); ++p)
    out << p << " " << V.section.dof_count[p] << " " << V.section.constrained_count[p] << " "
        << V.section.offset[p] << "\n";
  out << nlohmann::json(V.lgmap.indices).dump() << "\n";
  return 0;
}

int cmd_interpolate(const std::string& mesh_spec, int degree, const std::string& expr_name,
                    const std::set<int>& boundary, std::ostream& out) {
  auto mesh = parse_mesh_spec(mesh_spec);
  FunctionSpace V = function_space(mesh, element_for(*mesh, degree));
  if (!boundary.empty()) V = restricted(V, boundary);
  Function u = interpolate(parse_expr(expr_name), V);
  auto coords = dof_coordinates(V);
  out << "dof,x,y,value\n";
  for (int i = 0; i < V.dim_total(); ++i)
    out << i << "," << num12(coords[i][0]) << "," << num12(coords[i][1]) << ","
        << num12(u.values(i)) << "\n";
  return 0;
}

int cmd_assemble(const std::string& mesh_spec, int degree, const std::string& form_name,
                 const std::set<int>& boundary, bool restrict_space, const std::string& out_path) {
  auto mesh = parse_mesh_spec(mesh_spec);
  FunctionSpace V = function_space(mesh, element_for(*mesh, degree));

  BilinearForm form;
  if (form_name == "mass")
    form = mass_form();
  else if (form_name == "stiffness")
    form = stiffness_form();
  else if (form_name == "helmholtz")
    form = {{{1.0, KernelType::stiffness}, {1.0, KernelType::mass}}};
  else
    throw std::invalid_argument("unknown form '" + form_name +
                                "' (use mass, stiffness or helmholtz)");

  CompressedSparseMatrix A;
  if (restrict_space) {
    FunctionSpace Vres = restricted(V, boundary);
    A = assemble_bilinear(form, Vres, Vres, {});
  } else {
    std::vector<DirichletBC> bcs;
    for (int label : boundary) bcs.push_back(dirichlet_bc(V, zero_expr(), label));
    A = assemble_bilinear(form, V, V, bcs);
  }

  DenseMatrix dense = A.to_dense();
  std::ostringstream csv;
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (j) csv << ",";
      csv << num12(dense(i, j));
    }
    csv << "\n";
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file '" + out_path + "'");
  f << csv.str();

  ordered_json side{{"rows", A.rows},
                    {"cols", A.cols},
                    {"nnz", A.nnz()},
                    {"restricted", restrict_space},
                    {"boundary_set", boundary}};
  std::ofstream sf(out_path + ".json", std::ios::binary);
  if (!sf) throw std::invalid_argument("cannot open output file '" + out_path + ".json'");
  sf << side.dump() << "\n";
  return 0;
}

int cmd_poisson(const std::string& mesh_spec, int degree, bool restrict_space,
                const std::string& out_path, std::ostream& out) {
  auto mesh = parse_mesh_spec(mesh_spec);
  if (mesh->dim() != 2) throw std::invalid_argument("the poisson demo runs on square meshes");
  FunctionSpace V = function_space(mesh, element_for(*mesh, degree));

  // u = -(y^3 - 3/2 y^2) x (1 - x): zero on x = 0 and x = 1, zero normal
  // derivative on y = 0 and y = 1, so only the two side conditions are set.
  ScalarExpr exact = [](double x, double y) {
    return -(y * y * y - 1.5 * y * y) * x * (1.0 - x);
  };
  ScalarExpr source = [](double x, double y) {
    return -2.0 * (y * y * y - 1.5 * y * y) + (6.0 * y - 3.0) * (x - x * x);
  };

  std::vector<DirichletBC> bcs = {dirichlet_bc(V, zero_expr(), 1),
                                  dirichlet_bc(V, zero_expr(), 2)};
  Function fh = interpolate(source, V);
  LinearVariationalProblem problem{stiffness_form(), source_form(fh), &V, bcs, restrict_space};
  Function u = solve_variational(problem);

  // Reported against the nodal interpolant of u, the usual errornorm between
  // two functions of V.  The distance to u itself is one order larger (h^3).
  out << "L2 error: " << num17(error_norm(u, interpolate(exact, V))) << "\n";
  if (!out_path.empty()) {
    auto coords = dof_coordinates(V);
    std::ostringstream csv;
    csv << "x,y,value\n";
    for (int i = 0; i < V.dim_total(); ++i)
      csv << num12(coords[i][0]) << "," << num12(coords[i][1]) << "," << num12(u.values(i))
          << "\n";
    write_text(out_path, csv.str(), out);
  }
  return 0;
}

int cmd_eigen1d(int cells, int degree, int nev, bool restrict_space, double theta,
                const std::string& out_path, std::ostream& out) {
  if (theta < 0) throw std::invalid_argument("the boundary shift must be nonnegative");
  auto mesh = std::make_shared<Plex>(Plex::interval(cells, M_PI));
  FunctionSpace V = function_space(mesh, lagrange_element(CellType::interval, degree));
  std::vector<DirichletBC> bcs = {dirichlet_bc(V, zero_expr(), 1),
                                  dirichlet_bc(V, zero_expr(), 2)};
  LinearEigenproblem problem{stiffness_form(), mass_form(), &V, bcs, theta, restrict_space};
  EigenResult res = eigensolve(problem, nev, EigenWhich::smallest_real);

  ordered_json j;
  j["eigenvalues"] = ordered_json::array();
  for (const auto& ev : res.eigenvalues)
    j["eigenvalues"].push_back(ordered_json{{"re", ev.real()}, {"im", ev.imag()}});
  j["nconverged"] = res.nconverged;
  j["mode"] = restrict_space ? "restricted" : "shifted";
  write_text(out_path, j.dump() + "\n", out);
  return 0;
}

int cmd_shiftdemo(double theta, std::ostream& out) {
  if (theta < 0) throw std::invalid_argument("the boundary shift must be nonnegative");
  ShiftDemo demo = shift_demo_matrices();
  // The boundary row is decoupled, so its eigenvalue is read off directly
  // and the physical pair comes from the trailing 2x2 block.
  auto physical = generalized_eigenvalues(demo.A.bottomRightCorner(2, 2),
                                          demo.M.bottomRightCorner(2, 2));
  std::sort(physical.begin(), physical.end(),
            [](std::complex<double> a, std::complex<double> b) { return a.real() < b.real(); });

  auto line = [&](const char* tag, double bc_value) {
    out << tag << " " << numg(bc_value);
    for (const auto& ev : physical) out << " " << numg(ev.real());
    out << "\n";
  };
  double m00 = demo.M(demo.bc_row, demo.bc_row);
  line("eigenvalues (no shift):", demo.A(demo.bc_row, demo.bc_row) / m00);
  std::string tag = "eigenvalues (theta=" + numg(theta) + "):";
  double scaled = theta == 0 ? m00 : m00 / theta;
  line(tag.c_str(), demo.A(demo.bc_row, demo.bc_row) / scaled);
  return 0;
}

int cmd_ranksim(const std::string& mesh_spec, int degree, int nranks,
                const std::set<int>& boundary, bool legacy_sf, const std::string& check_expr,
                std::ostream& out) {
  auto mesh = parse_mesh_spec(mesh_spec);
  Partition part = partition_cells(*mesh, nranks);
  std::vector<RankView> views = build_rank_views(mesh, part);
  std::vector<FunctionSpace> spaces =
      build_rank_spaces(*mesh, views, element_for(*mesh, degree), boundary);
  ParallelNumbering numbering = parallel_global_numbering(views, spaces);
  StarForest forest = build_star_forest(views, spaces, !legacy_sf);

  std::vector<Vector> exchanged;
  if (!check_expr.empty()) {
    ScalarExpr expr = parse_expr(check_expr);
    for (size_t r = 0; r < views.size(); ++r)
      exchanged.push_back(interpolate_owned(expr, views[r], spaces[r]));
    halo_exchange(forest, exchanged);
  }

  ordered_json doc{{"mesh", mesh_spec}, {"degree", degree},    {"nranks", nranks},
                   {"boundary", boundary}, {"legacy_sf", legacy_sf},
                   {"global_size", numbering.global_size}};
  auto ranks = ordered_json::array();
  for (size_t r = 0; r < views.size(); ++r) {
    const RankView& view = views[r];
    const Section& sec = spaces[r].section;
    ordered_json rj{{"rank", view.rank}};
    auto points = ordered_json::array();
    for (size_t lp = 0; lp < view.to_global.size(); ++lp) {
      PointId p = static_cast<PointId>(lp);
      ordered_json row{{"point", p},
                       {"class", point_class_name(view.classes[lp])},
                       {"offset", sec.offset[p]},
                       {"lgmap", sec.dof_count[p] > 0
                                     ? ordered_json(numbering.lgmaps[r].indices[sec.offset[p]])
                                     : ordered_json(nullptr)},
                       {"renumbering", spaces[r].renumbering.index_of[p]},
                       {"constrained", sec.constrained_count[p] > 0}};
      points.push_back(std::move(row));
    }
    rj["points"] = std::move(points);
    if (!check_expr.empty()) {
      Function direct = interpolate(parse_expr(check_expr), spaces[r]);
      double diff = sec.total_dofs > 0
                        ? (exchanged[r] - direct.values).cwiseAbs().maxCoeff()
                        : 0.0;
      rj["exchange"] =
          ordered_json{{"expr", check_expr}, {"max_abs_diff", diff}, {"ok", diff == 0.0}};
    }
    ranks.push_back(std::move(rj));
  }
  doc["ranks"] = std::move(ranks);
  out << doc.dump() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"restricted function space demos"};
  app.require_subcommand(1);

  std::string mesh_spec, cell_arg = "triangle", expr_name = "x", form_name = "mass";
  std::string out_path, check_expr;
  std::vector<int> boundary_list;
  int degree = 1, point = 0, cells = 10, nev = 10, nranks = 1;
  double theta = 5.0, shift = 0.0;
  bool restrict_space = false, legacy_sf = false;

  CLI::App* plexinfo = app.add_subcommand("plexinfo", "dump mesh topology");
  plexinfo->add_option("--mesh", mesh_spec, "square:NX,NY or interval:N[,LENGTH]")->required();
  CLI::Option* point_opt = plexinfo->add_option("--point", point, "point to expand");

  CLI::App* element = app.add_subcommand("element", "dump a reference element");
  element->add_option("--cell", cell_arg, "interval or triangle")->required();
  element->add_option("--degree", degree, "polynomial degree");

  CLI::App* numbering = app.add_subcommand("numbering", "dump section and local-to-global map");
  numbering->add_option("--mesh", mesh_spec)->required();
  numbering->add_option("--degree", degree);
  numbering->add_option("--boundary", boundary_list)->delimiter(',');

  CLI::App* interp = app.add_subcommand("interpolate", "evaluate an expression at the dofs");
  interp->add_option("--mesh", mesh_spec)->required();
  interp->add_option("--degree", degree);
  interp->add_option("--expr", expr_name, "x, y or x*y");
  interp->add_option("--boundary", boundary_list)->delimiter(',');

  CLI::App* assemble = app.add_subcommand("assemble", "write an assembled matrix as CSV");
  assemble->add_option("--mesh", mesh_spec)->required();
  assemble->add_option("--degree", degree);
  assemble->add_option("--form", form_name, "mass, stiffness or helmholtz");
  assemble->add_option("--boundary", boundary_list)->delimiter(',');
  assemble->add_flag("--restricted", restrict_space, "assemble on the restricted space");
  assemble->add_option("--out", out_path, "matrix CSV path (JSON sidecar alongside)")->required();

  CLI::App* poisson = app.add_subcommand("poisson", "manufactured Poisson problem");
  poisson->add_option("--mesh", mesh_spec);
  poisson->add_option("--degree", degree);
  poisson->add_flag("--restricted", restrict_space, "solve on the restricted space");
  poisson->add_option("--out", out_path, "solution CSV path");

  CLI::App* eigen1d = app.add_subcommand("eigen1d", "Poisson eigenproblem on [0,pi]");
  eigen1d->add_option("--cells", cells);
  eigen1d->add_option("--degree", degree);
  eigen1d->add_option("--nev", nev, "number of eigenpairs");
  CLI::Option* res_opt = eigen1d->add_flag("--restricted", restrict_space,
                                           "solve on the restricted space");
  eigen1d->add_option("--shift", shift, "boundary eigenvalue shift")->excludes(res_opt);
  eigen1d->add_option("--out", out_path, "eigenvalue JSON path");

  CLI::App* shiftdemo = app.add_subcommand("shiftdemo", "3x3 boundary shift example");
  shiftdemo->add_option("--theta", theta, "boundary eigenvalue shift");

  CLI::App* ranksim = app.add_subcommand("ranksim", "simulated multi-rank numbering");
  ranksim->add_option("--mesh", mesh_spec)->required();
  ranksim->add_option("--degree", degree);
  ranksim->add_option("--ranks", nranks, "simulated rank count")->required();
  ranksim->add_option("--boundary", boundary_list)->delimiter(',');
  ranksim->add_flag("--legacy-sf", legacy_sf, "leave constrained dofs out of the star forest");
  ranksim->add_option("--check", check_expr, "verify a halo exchange of this expression");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("rfem");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::set<int> boundary(boundary_list.begin(), boundary_list.end());
  try {
    if (plexinfo->parsed())
      return cmd_plexinfo(mesh_spec, point, point_opt->count() > 0, out);
    if (element->parsed()) return cmd_element(cell_arg, degree, out);
    if (numbering->parsed()) return cmd_numbering(mesh_spec, degree, boundary, out);
    if (interp->parsed()) return cmd_interpolate(mesh_spec, degree, expr_name, boundary, out);
    if (assemble->parsed())
      return cmd_assemble(mesh_spec, degree, form_name, boundary, restrict_space, out_path);
    if (poisson->parsed()) {
      if (mesh_spec.empty()) mesh_spec = "square:16,16";
      if (poisson->count("--degree") == 0) degree = 2;
      return cmd_poisson(mesh_spec, degree, restrict_space, out_path, out);
    }
    if (eigen1d->parsed()) {
      if (eigen1d->count("--degree") == 0) degree = 4;
      if (!restrict_space && eigen1d->count("--shift") == 0)
        throw std::invalid_argument("eigen1d needs --restricted or --shift");
      return cmd_eigen1d(cells, degree, nev, restrict_space, shift, out_path, out);
    }
    if (shiftdemo->parsed()) return cmd_shiftdemo(theta, out);
    if (ranksim->parsed())
      return cmd_ranksim(mesh_spec, degree, nranks, boundary, legacy_sf, check_expr, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace rfem
