#include "commands.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "figures.hpp"
#include "s3tori/deform.hpp"
#include "s3tori/descriptor.hpp"
#include "s3tori/errors.hpp"
#include "s3tori/serialize.hpp"
#include "s3tori/spectral.hpp"
#include "s3tori/version.hpp"

namespace s3tori::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json vec_json(const std::optional<Vec4>& v) {
  return v ? to_json(*v) : json(nullptr);
}

// Tolerances are reported as strings when infinite; JSON has no infinity.
json tol_json(double x) { return std::isfinite(x) ? json(x) : json("inf"); }

struct Check {
  std::string name;
  bool pass = false;
  double value = 0;
  double tolerance = 0;
};

json checks_json(const std::vector<Check>& checks, std::vector<std::string>& failed) {
  json j = json::object();
  for (const auto& c : checks) {
    j[c.name] = {{"pass", c.pass}, {"value", c.value}, {"tolerance", tol_json(c.tolerance)}};
    if (!c.pass) failed.push_back(c.name);
  }
  return j;
}

Equator require_pole(const CommandConfig& c) {
  if (!c.pole) throw std::invalid_argument(c.command + " needs --pole x,y,z,w");
  return Equator(SpherePoint::normalize(*c.pole));
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

// Intersection data for surfaces outside the classifier's precondition.
IntersectionReport trace_only(const TorusImmersion& m, const Equator& eq, int n) {
  IntersectionReport rep;
  rep.equator = eq.pole().x();
  const CriticalPointReport cp = find_critical_points(m, eq);
  rep.tangencies = cp.tangencies;
  rep.newton_divergences = cp.divergences;
  TraceOptions opt;
  for (const auto& t : cp.tangencies) opt.pins.push_back({t.u, t.v});
  rep.curves = trace_zero_set(height_grid(m, eq, n, 0.31, 0.17), m, eq, opt);
  rep.component_count = component_count_allow_tangent(m, eq, n);
  rep.resolution = n;
  return rep;
}

IntersectionReport intersect(SurfacePtr m, const Equator& eq, int n, bool& classified) {
  try {
    require_negative_curvature(*m);
  } catch (const PreconditionError&) {
    classified = false;
    return trace_only(*m, eq, n);
  }
  classified = true;
  ClassifyOptions opt;
  opt.resolution = n;
  return classify(std::move(m), eq, opt);
}

void export_figures(const CommandConfig& c, const TorusImmersion& m, const Equator& eq,
                    const IntersectionReport& rep, json& out) {
  const SurfaceMesh mesh = sample_mesh(m, c.resolution, c.resolution);
  const Vec4 q = c.projection_pole ? *c.projection_pole : auto_projection_pole(mesh, eq);
  const Projection proj = make_projection(mesh, eq, q);
  const Figure fig = build_figure(mesh, rep, proj);
  std::vector<Eigen::Vector3d> curve_pts;
  for (const auto& cv : fig.curves) curve_pts.insert(curve_pts.end(), cv.begin(), cv.end());
  out["projection"] = {{"pole", to_json(proj.pole)},
                       {"min_distance", proj.min_distance},
                       {"plane_residual", plane_residual(fig.equator)},
                       {"curve_plane_residual", plane_residual(curve_pts)},
                       {"equator_samples", fig.equator.size()}};
  const std::string title = m.describe() + " type " + to_string(rep.type);
  if (!c.ply_path.empty()) {
    write_file_atomic(c.ply_path, to_ply(fig, "s3tori " + std::string(kVersion) + " " + title));
  }
  if (!c.svg_path.empty()) write_file_atomic(c.svg_path, to_svg(fig, title));
}

// ---------------------------------------------------------------------------

CommandOutcome verify_clifford(const CommandConfig& c) {
  CommandOutcome out;
  const SurfacePtr m = clifford_torus();
  std::vector<Check> checks;

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  double dh = 0, dk = 0, d1 = 0, d2 = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = angle(rng), v = angle(rng);
    const CurvatureSample s = curvatures(*m, u, v);
    dh = std::max(dh, std::abs(s.H));
    dk = std::max(dk, std::abs(s.K));
    d1 = std::max(d1, std::abs(s.k1 - 1.0));
    d2 = std::max(d2, std::abs(s.k2 + 1.0));
  }
  const double tc = c.tol("curvature");
  checks.push_back({"mean_curvature", dh < tc, dh, tc});
  checks.push_back({"gauss_curvature", dk < tc, dk, tc});
  checks.push_back({"k1_equals_one", d1 < tc, d1, tc});
  checks.push_back({"k2_equals_minus_one", d2 < tc, d2, tc});

  ScanOptions so;
  so.classify_types = true;
  const ScanReport scan = scan_two_piece(m, c.samples_or(1000), c.seed, so);
  checks.push_back({"two_piece_scan", scan.pass, static_cast<double>(scan.failures.size()), 0});
  int off_type = 0;
  for (const auto& [t, n] : scan.type_histogram) {
    if (t != "2" && t != "4") off_type += n;
  }
  checks.push_back({"types_2_or_4", off_type == 0, static_cast<double>(off_type), 0});

  const SurfaceMesh mesh = sample_mesh(*m, c.resolution, c.resolution);
  const Operators ops = assemble_operators(mesh);
  const SpectralResult spec = first_eigenpairs(ops, c.resolution, c.resolution, 8);
  const double lambda1 = spec.eigenvalues.at(1);
  const double rel = std::abs(lambda1 - 2.0) / 2.0;
  checks.push_back({"lambda1_equals_two", rel < c.tol("lambda"), rel, c.tol("lambda")});
  int group = 0;
  for (const auto& g : spec.groups) {
    if (g.first == 1) group = g.size;
  }
  checks.push_back({"first_group_dimension_4", group == 4, static_cast<double>(group), 0});
  const double res = coordinate_eigenresidual(ops, mesh);
  checks.push_back({"coordinate_eigenresidual", res < c.tol("residual"), res, c.tol("residual")});

  std::vector<std::string> failed;
  out.report["checks"] = checks_json(checks, failed);
  out.report["failed"] = failed;
  out.report["scan"] = to_json(scan);
  out.report["spectrum"] = to_json(spec);
  out.report["pass"] = failed.empty();
  out.exit_code = failed.empty() ? kPass : kCheckFail;
  std::ostringstream os;
  for (const auto& ch : checks) {
    os << (ch.pass ? "PASS " : "FAIL ") << ch.name << " = " << fixed(ch.value) << "\n";
  }
  out.summary = os.str();
  return out;
}

CommandOutcome classify_cmd(const CommandConfig& c) {
  CommandOutcome out;
  const SurfacePtr m = parse_surface(c.surface);
  const Equator eq = require_pole(c);
  ClassifyOptions opt;
  opt.resolution = c.resolution;
  const IntersectionReport rep = classify(m, eq, opt);
  out.report["intersection"] = to_json(rep);
  if (!c.ply_path.empty() || !c.svg_path.empty()) export_figures(c, *m, eq, rep, out.report);
  const bool pass = rep.type != IntersectionType::kUnclassified;
  out.report["pass"] = pass;
  out.exit_code = pass ? kPass : kCheckFail;
  out.summary = "type " + to_string(rep.type) + ", " + std::to_string(rep.curves.size()) +
                " curve(s), " + std::to_string(rep.tangencies.size()) + " tangency point(s), " +
                std::to_string(rep.component_count) + " component(s)\n";
  return out;
}

CommandOutcome scan_cmd(const CommandConfig& c) {
  CommandOutcome out;
  const SurfacePtr m = parse_surface(c.surface);
  ScanOptions opt;
  opt.resolution = c.resolution;
  opt.classify_types = c.types;
  const ScanReport rep = scan_two_piece(m, c.samples_or(1000), c.seed, opt);
  out.report["scan"] = to_json(rep);
  out.report["pass"] = rep.pass;
  out.exit_code = rep.pass ? kPass : kCheckFail;
  std::ostringstream os;
  os << (rep.pass ? "pass" : "fail") << ": component counts";
  for (const auto& [k, n] : rep.count_histogram) os << " " << k << ":" << n;
  os << "\n";
  out.summary = os.str();
  return out;
}

CommandOutcome spectrum_cmd(const CommandConfig& c) {
  CommandOutcome out;
  const SurfacePtr m = parse_surface(c.surface);
  const SurfaceMesh mesh = sample_mesh(*m, c.resolution, c.resolution);
  const Operators ops = assemble_operators(mesh);
  const SpectralResult spec = first_eigenpairs(ops, c.resolution, c.resolution, c.count);
  out.report["spectrum"] = to_json(spec);
  const double res = coordinate_eigenresidual(ops, mesh);
  out.report["coordinate_residual"] = res;
  try {
    out.report["montiel_ros"] = to_json(montiel_ros_test(mesh, c.tol("margin")));
  } catch (const NotMinimalError& e) {
    out.report["montiel_ros"] = {{"applicable", false}, {"reason", e.what()}};
  }
  if (!c.eigenfunctions_path.empty()) write_eigenfunctions(c.eigenfunctions_path, spec);
  out.report["pass"] = true;
  std::ostringstream os;
  os << "  k  lambda_k\n";
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    os << std::setw(3) << k << "  " << std::setprecision(10) << spec.eigenvalues[k] << "\n";
  }
  os << "coordinate residual " << fixed(res) << "\n";
  out.summary = os.str();
  return out;
}

CommandOutcome project_cmd(const CommandConfig& c) {
  CommandOutcome out;
  const SurfacePtr m = parse_surface(c.surface);
  const Equator eq = require_pole(c);
  bool classified = false;
  const IntersectionReport rep = intersect(m, eq, std::max(64, c.resolution / 2), classified);
  export_figures(c, *m, eq, rep, out.report);
  out.report["intersection"] = to_json(rep, false);
  out.report["classified"] = classified;
  const double pr = out.report["projection"]["plane_residual"].get<double>();
  const bool pass = pr < c.tol("plane");
  out.report["pass"] = pass;
  out.exit_code = pass ? kPass : kCheckFail;
  out.summary = "type " + to_string(rep.type) + ", " + std::to_string(rep.curves.size()) +
                " curve(s); plane residual " + fixed(pr, 3) + "\n";
  return out;
}

SphereMapPtr parse_map(const std::string& s) {
  if (s == "identity") return identity_map();
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("unknown map '" + s + "'");
  const std::string head = s.substr(0, colon);
  double x = 0;
  try {
    std::size_t used = 0;
    x = std::stod(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw ParseError("trailing characters in '" + s + "'");
  } catch (const std::logic_error&) {
    throw ParseError("invalid number in map '" + s + "'");
  }
  if (head == "twist") return twist_map(x);
  if (head == "bump") return radial_normal_bump(x);
  if (head == "rotation") {
    Mat4 q = Mat4::Identity();
    q(0, 0) = q(1, 1) = std::cos(x);
    q(1, 0) = std::sin(x);
    q(0, 1) = -std::sin(x);
    return orthogonal_map(Congruence(q));
  }
  throw ParseError("unknown map '" + s + "'");
}

CommandOutcome tau_cmd(const CommandConfig& c) {
  CommandOutcome out;
  const SphereMapPtr xi = parse_map(c.map);
  TauOptions opt;
  opt.samples = c.samples_or(10000);
  opt.pairs = c.pairs;
  opt.seed = c.seed;
  const TauReport rep = tau(xi, c.alpha, opt);
  out.report["tau"] = to_json(rep);
  json lattice = json::object();
  for (int n : {1, 2, 4, 8}) lattice[std::to_string(n)] = minimality_residual_at_lattice(xi, n);
  out.report["lattice_residual"] = lattice;
  out.report["notes"] = {"sampled Holder seminorms are lower bounds",
                         "smallness thresholds for tau are engineering choices"};
  const bool pass = rep.tau <= c.tol("tau");
  out.report["pass"] = pass;
  out.exit_code = pass ? kPass : kCheckFail;
  out.summary = "tau = " + fixed(rep.tau, 10) + "\n";
  return out;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> d{
      {"curvature", 1e-9}, {"lambda", 5e-3}, {"residual", 1e-2},
      {"plane", 1e-8},     {"margin", 1e-2}, {"tau", kInf},
  };
  return d;
}

double CommandConfig::tol(const std::string& name) const {
  if (const auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

json CommandConfig::to_json() const {
  json tols = json::object();
  for (const auto& [k, v] : default_tolerances()) tols[k] = tol_json(tol(k));
  return {{"command", command},
          {"surface", surface},
          {"pole", vec_json(pole)},
          {"projection_pole", vec_json(projection_pole)},
          {"resolution", resolution},
          {"samples", samples ? json(*samples) : json(nullptr)},
          {"seed", seed},
          {"alpha", alpha},
          {"count", count},
          {"pairs", pairs},
          {"map", map},
          {"types", types},
          {"tolerances", tols},
          {"json", json_path},
          {"ply", ply_path},
          {"svg", svg_path},
          {"eigenfunctions", eigenfunctions_path}};
}

Vec4 parse_vec4(const std::string& s) {
  std::vector<double> x;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      x.push_back(std::stod(item, &used));
      if (used != item.size()) throw ParseError("bad vector component '" + item + "'");
    } catch (const std::logic_error&) {
      throw ParseError("bad vector component '" + item + "'");
    }
  }
  if (x.size() != 4) throw ParseError("expected x,y,z,w, got '" + s + "'");
  const Vec4 v(x[0], x[1], x[2], x[3]);
  if (!v.allFinite() || v.norm() < 1e-12) throw ParseError("vector must be finite and nonzero");
  return v;
}

CommandOutcome run_command(const CommandConfig& c) {
  CommandOutcome out;
  try {
    for (const auto& [k, v] : c.tolerances) {
      if (!default_tolerances().count(k)) throw std::invalid_argument("unknown tolerance --tol-" + k);
      if (!(v > 0)) throw std::invalid_argument("tolerance --tol-" + k + " must be positive");
    }
    if (!power_of_two(c.resolution) || c.resolution < 32 || c.resolution > 512) {
      throw std::invalid_argument("resolution must be a power of two in [32, 512]");
    }
    if (c.command == "verify-clifford") {
      out = verify_clifford(c);
    } else if (c.command == "classify") {
      out = classify_cmd(c);
    } else if (c.command == "scan") {
      out = scan_cmd(c);
    } else if (c.command == "spectrum") {
      out = spectrum_cmd(c);
    } else if (c.command == "project") {
      out = project_cmd(c);
    } else if (c.command == "tau") {
      out = tau_cmd(c);
    } else {
      throw std::invalid_argument("unknown command '" + c.command + "'");
    }
  } catch (const NumericalError& e) {
    out = {};
    out.exit_code = kNumerical;
    out.report["error"] = {{"kind", "numerical"}, {"message", e.what()}};
  } catch (const std::invalid_argument& e) {
    out = {};
    out.exit_code = kUsage;
    out.report["error"] = {{"kind", "usage"}, {"message", e.what()}};
  } catch (const std::logic_error& e) {
    out = {};
    out.exit_code = kUsage;
    out.report["error"] = {{"kind", "usage"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    out = {};
    out.exit_code = kNumerical;
    out.report["error"] = {{"kind", "runtime"}, {"message", e.what()}};
  }
  if (out.report.contains("error")) {
    out.report["pass"] = false;
    out.summary = "error: " + out.report["error"]["message"].get<std::string>() + "\n";
  }
  out.report["tool"] = "s3tori";
  out.report["version"] = kVersion;
  out.report["config"] = c.to_json();
  return out;
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tori in S^3: intersections with equators, spectra and figures", "s3tori"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommandConfig cfg;
  std::string pole, projection_pole;
  std::map<std::string, double> tols;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--surface", cfg.surface, "surface descriptor or JSON file");
    sub->add_option("--resolution", cfg.resolution, "grid resolution, a power of two in [32, 512]");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--json", cfg.json_path, "write the JSON report here");
    for (const auto& [name, value] : default_tolerances()) {
      sub->add_option("--tol-" + name, tols[name], "tolerance override")
          ->default_str(std::isfinite(value) ? fixed(value) : "inf");
    }
  };
  const auto pole_opt = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--pole", pole, "equator pole x,y,z,w (normalized internally)");
    if (required) o->required();
  };
  const auto figure_opts = [&](CLI::App* sub) {
    sub->add_option("--ply", cfg.ply_path, "write the projected mesh and curves (ASCII PLY)");
    sub->add_option("--svg", cfg.svg_path, "write the projected curves (SVG)");
    sub->add_option("--projection-pole", projection_pole,
                    "projection pole on S(v); chosen away from the surface by default");
  };

  auto* verify = app.add_subcommand("verify-clifford", "run the Clifford torus identity suite");
  common(verify);
  verify->add_option("--samples", cfg.samples, "equators in the two-piece scan");

  auto* cls = app.add_subcommand("classify", "classify S(v) intersected with the surface");
  common(cls);
  pole_opt(cls, true);
  figure_opts(cls);

  auto* scan = app.add_subcommand("scan", "two-piece scan over seeded random equators");
  common(scan);
  scan->add_option("--samples", cfg.samples, "number of equators");
  scan->add_flag("--types", cfg.types, "also classify each intersection (needs S < 0)");

  auto* spec = app.add_subcommand("spectrum", "first Laplace-Beltrami eigenvalues");
  common(spec);
  spec->add_option("--count", cfg.count, "number of eigenpairs, including lambda_0");
  spec->add_option("--eigenfunctions", cfg.eigenfunctions_path, "binary dump of eigenfunctions");

  auto* proj = app.add_subcommand("project", "stereographic figure of S(v) and the surface");
  common(proj);
  pole_opt(proj, true);
  figure_opts(proj);

  auto* tau = app.add_subcommand("tau", "C^{2,alpha} distance of a sphere map to the identity");
  common(tau);
  tau->add_option("--map", cfg.map, "identity | twist:<eps> | rotation:<angle> | bump:<eps>");
  tau->add_option("--alpha", cfg.alpha, "Holder exponent in (0, 1]");
  tau->add_option("--samples", cfg.samples, "supremum samples (at least 10000)");
  tau->add_option("--pairs", cfg.pairs, "Holder pairs (at least 1000)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
    cfg.command = app.get_subcommands().front()->get_name();
    if (!pole.empty()) cfg.pole = parse_vec4(pole);
    if (!projection_pole.empty()) cfg.projection_pole = parse_vec4(projection_pole);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  for (const auto& [name, value] : tols) {
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--tol-" + name) > 0) cfg.tolerances[name] = value;
  }

  const CommandOutcome res = run_command(cfg);
  (res.exit_code == kPass || res.exit_code == kCheckFail ? out : err) << res.summary;
  if (!cfg.json_path.empty()) {
    try {
      write_file_atomic(cfg.json_path, res.report.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kNumerical;
    }
  }
  return res.exit_code;
}

}  // namespace s3tori::cli
