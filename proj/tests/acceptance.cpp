// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Tolerances are the constants next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "s3tori/deform.hpp"
#include "s3tori/descriptor.hpp"
#include "s3tori/errors.hpp"
#include "s3tori/intersection.hpp"
#include "s3tori/spectral.hpp"

using namespace s3tori;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

json fixture(const std::string& name) {
  std::ifstream is(std::string(S3TORI_FIXTURE_DIR) + "/" + name);
  if (!is) throw std::runtime_error("missing fixture " + name);
  return json::parse(is);
}

Vec4 vec(const json& j) { return Vec4(j[0], j[1], j[2], j[3]); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome clifford_identities() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SurfacePtr m = clifford_torus();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  double h = 0, k = 0, d1 = 0, d2 = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = angle(rng), v = angle(rng);
    const CurvatureSample s = curvatures(*m, u, v);
    h = std::max(h, std::abs(s.H));
    k = std::max(k, std::abs(s.K));
    d1 = std::max(d1, std::abs(s.k1 - 1.0));
    d2 = std::max(d2, std::abs(s.k2 + 1.0));
  }
  const double t = seconds_since(t0);
  o.require(h < 1e-9, "max|H| " + fmt("%.2e", h));
  o.require(k < 1e-9, "max|K| " + fmt("%.2e", k));
  o.require(d1 < 1e-9, "max|k1-1| " + fmt("%.2e", d1));
  o.require(d2 < 1e-9, "max|k2+1| " + fmt("%.2e", d2));
  o.require(t < 1.0, "runtime " + fmt("%.2f s", t));
  return o;
}

Outcome clifford_spectrum() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SurfacePtr m = clifford_torus();
  std::vector<double> res;
  for (int n : {32, 64, 128}) {
    const SurfaceMesh mesh = sample_mesh(*m, n, n);
    const Operators ops = assemble_operators(mesh);
    res.push_back(coordinate_eigenresidual(ops, mesh));
    if (n == 128) {
      const SpectralResult r = first_eigenpairs(ops, n, n, 8);
      const double lambda1 = r.eigenvalues[1];
      o.require(std::abs(lambda1 - 2.0) / 2.0 < 0.005, "lambda1 " + fmt("%.6f", lambda1));
      int dim = 0;
      for (const auto& g : r.groups) {
        if (g.first == 1) dim = g.size;
      }
      o.require(dim == 4, "first group dimension " + std::to_string(dim));
    }
  }
  const double p1 = std::log2(res[0] / res[1]), p2 = std::log2(res[1] / res[2]);
  o.require(res[0] < 1e-2 && res[1] < 1e-2 && res[2] < 1e-2,
            "coordinate residuals " + fmt("%.2e", res[0]) + ", " + fmt("%.2e", res[1]) + ", " +
                fmt("%.2e", res[2]));
  o.require(p1 >= 2.0 && p2 >= 2.0, "orders " + fmt("%.4f", p1) + ", " + fmt("%.4f", p2));
  const double t = seconds_since(t0);
  o.require(t < 60.0, "runtime " + fmt("%.1f s", t));
  return o;
}

Outcome homogeneous_oracle() {
  Outcome o;
  const double r = kPi / 6;
  const double expected = std::min(1.0 / (std::cos(r) * std::cos(r)), 1.0 / (std::sin(r) * std::sin(r)));
  const SurfacePtr m = homogeneous_torus(r);
  const SurfaceMesh mesh = sample_mesh(*m, 128, 128);
  const SpectralResult res = first_eigenpairs(mesh, 6);
  const double lambda1 = res.eigenvalues[1];
  o.require(std::abs(lambda1 - expected) / expected < 0.005,
            "lambda1 " + fmt("%.6f", lambda1) + " vs " + fmt("%.6f", expected));
  double ds = 0, dk = 0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int i = 0; i < 10000; ++i) {
    const CurvatureSample s = curvatures(*m, angle(rng), angle(rng));
    ds = std::max(ds, std::abs(s.S + 1.0));
    dk = std::max(dk, std::abs(s.K));
  }
  o.require(ds < 1e-9, "max|S+1| " + fmt("%.2e", ds));
  o.require(dk < 1e-9, "max|K| " + fmt("%.2e", dk));
  return o;
}

// Distance from x to the circle (sqrt2/2)(a, 0, cos t, sin t), a = +-1.
double phi_distance(const Vec4& x, double a) {
  const double s = std::sqrt(0.5);
  const double d12 = std::hypot(x[0] - a * s, x[1]);
  const double d34 = std::hypot(x[2], x[3]) - s;
  return std::hypot(d12, d34);
}

Outcome classification() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SurfacePtr m = clifford_torus();

  const IntersectionReport r2 = classify(m, Equator(Vec4(0, 1, 0, 0)));
  o.require(r2.type == IntersectionType::kType2, "v0 type " + to_string(r2.type));
  double worst = 0;
  bool hit_plus = false, hit_minus = false;
  for (const auto& c : r2.curves) {
    const double a = c.points.front().x[0] > 0 ? 1.0 : -1.0;
    (a > 0 ? hit_plus : hit_minus) = true;
    for (const auto& p : c.points) worst = std::max(worst, phi_distance(p.x, a));
  }
  o.require(r2.curves.size() == 2 && hit_plus && hit_minus && worst < 1e-8,
            "distance to phi^0, phi^n " + fmt("%.2e", worst));

  const double s = std::sqrt(0.5);
  const IntersectionReport r4 = classify(m, Equator(Vec4(s, 0, s, 0)));
  o.require(r4.type == IntersectionType::kType4, "tangent pole type " + to_string(r4.type));
  if (r4.tangencies.size() == 2) {
    const double anti = (r4.tangencies[0].x + r4.tangencies[1].x).norm();
    o.require(anti < 1e-8, "tangencies antipodal " + fmt("%.2e", anti));
  } else {
    o.require(false, std::to_string(r4.tangencies.size()) + " tangencies");
  }
  double angle_err = 0;
  for (double a : r4.crossing_angles) angle_err = std::max(angle_err, std::abs(a - kPi / 2));
  o.require(r4.crossing_angles.size() == 2 && angle_err < 1e-3,
            "crossing angle error " + fmt("%.2e", angle_err));

  ScanOptions opt;
  opt.classify_types = true;
  const ScanReport scan = scan_two_piece(m, 1000, 42, opt);
  int other = 0;
  for (const auto& [t, n] : scan.type_histogram) {
    if (t != "2" && t != "4") other += n;
  }
  o.require(scan.pass && other == 0 && scan.count_histogram.size() == 1,
            "1000 equators: " + std::to_string(scan.failures.size()) + " count failures, " +
                std::to_string(other) + " off-type");
  const double t = seconds_since(t0);
  o.require(t < 120.0, "runtime " + fmt("%.1f s", t));
  return o;
}

Outcome curvature_blowup() {
  Outcome o;
  const SurfacePtr m = clifford_torus();
  const double s = std::sqrt(0.5);
  const Vec4 tangent(s, 0, s, 0), away(s, 0, -s, 0);
  std::vector<double> kmax, kmin;
  for (int k = 12; k <= 22; ++k) {
    const double d = std::ldexp(1.0, -k);
    const Vec4 v = std::cos(d) * tangent + std::sin(d) * away;
    const IntersectionReport r = classify(m, Equator(v));
    double hi = 0, lo = 1e300;
    for (const auto& c : r.curves) {
      hi = std::max(hi, c.max_curvature);
      lo = std::min(lo, c.min_curvature);
    }
    kmax.push_back(hi);
    kmin.push_back(lo);
  }
  const std::size_t n = kmax.size();
  bool mono = true;
  for (std::size_t i = n - 3; i < n; ++i) mono = mono && kmax[i] > kmax[i - 1] && kmin[i] < kmin[i - 1];
  o.require(kmax.back() > 1e3, "max curvature " + fmt("%.1f", kmax.back()));
  o.require(kmin.back() < 1e-3, "min curvature " + fmt("%.2e", kmin.back()));
  o.require(mono, "monotone over the last 4 terms");
  return o;
}

// Sign regions of an n x n periodic height grid, counted by flood fill.
int region_count(const TorusImmersion& m, const Vec4& pole, int n) {
  std::vector<int> sign(n * n), label(n * n, -1);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sign[i * n + j] = m.eval((i + 0.37) * h, (j + 0.61) * h).dot(pole) > 0;
  int regions = 0;
  std::vector<int> stack;
  for (int s0 = 0; s0 < n * n; ++s0) {
    if (label[s0] >= 0) continue;
    label[s0] = regions;
    stack.push_back(s0);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int i = c / n, j = c % n;
      const int nb[4] = {((i + 1) % n) * n + j, ((i + n - 1) % n) * n + j, i * n + (j + 1) % n,
                         i * n + (j + n - 1) % n};
      for (int q : nb) {
        if (label[q] < 0 && sign[q] == sign[c]) {
          label[q] = regions;
          stack.push_back(q);
        }
      }
    }
    ++regions;
  }
  return regions;
}

Outcome two_piece_failure() {
  Outcome o;
  const json fx = fixture("two_piece_failure.json");
  const SurfacePtr m = parse_surface(fx["surface"]);
  const Vec4 pole = vec(fx["pole"]);
  const int count = component_count(*m, Equator(pole), 64);
  const int oracle = region_count(*m, pole, 256);
  o.require(count >= 3, "fixture component_count " + std::to_string(count));
  o.require(oracle == count, "256-grid oracle " + std::to_string(oracle));
  const ScanReport bad = scan_two_piece(m, 200, 42);
  o.require(!bad.pass, std::string("fixture scan ") + (bad.pass ? "passes" : "fails"));
  const ScanReport cl = scan_two_piece(clifford_torus(), 200, 42);
  o.require(cl.pass, std::string("clifford scan ") + (cl.pass ? "passes" : "fails"));
  const ScanReport pc = scan_two_piece(parse_surface("perturbed:clifford:bump=2,1,0.001,0"), 200, 42);
  o.require(pc.pass, std::string("perturbed clifford scan ") + (pc.pass ? "passes" : "fails"));
  return o;
}

Outcome holder_tau() {
  Outcome o;
  const TauReport id = tau(identity_map(), 0.5);
  o.require(id.tau == 0.0, "tau(identity) " + fmt("%.1e", id.tau));

  const SphereMapPtr twist = twist_map(0.05);
  const double a = tau(twist, 0.5).tau, b = tau(twist->inverse(), 0.5).tau;
  o.require(std::abs(a - b) < 1e-12, "|tau(X) - tau(X^-1)| " + fmt("%.1e", std::abs(a - b)));

  const AnnulusMapPtr d = difference(canonical_extend(twist), annulus_identity());
  double prev = -1;
  bool mono = true;
  for (int k = 0; k < 3; ++k) {
    const HolderReport h = c2alpha_norm(*d, 0.5, 10000 << k, 1000 << k, 42);
    mono = mono && h.total >= prev;
    prev = h.total;
  }
  o.require(mono, "norm monotone in budget");

  const AnnulusMapPtr f = canonical_extend(twist);
  double worst = 0;
  for (const Vec4& x : annulus_samples(10000, 5)) {
    const double r = x.norm();
    worst = std::max(worst, ((*f)(x) - r * (*twist)(Vec4(x / r))).norm());
  }
  o.require(worst < 1e-12, "radial identity " + fmt("%.1e", worst));
  return o;
}

Outcome lattice_residual() {
  Outcome o;
  for (int n : {1, 2, 4, 8}) {
    const double id = minimality_residual_at_lattice(identity_map(), n);
    const double bump = minimality_residual_at_lattice(radial_normal_bump(1e-3), n);
    o.require(id < 1e-9, "n=" + std::to_string(n) + " identity " + fmt("%.1e", id));
    o.require(bump > 0 && bump <= 1e-2, "bump " + fmt("%.2e", bump));
  }
  return o;
}

// Max distance of points to their least-squares plane.
double coplanarity(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Eigen::MatrixXd a(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) a.row(i) = (pts[i] - c).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::Vector3d nrm = svd.matrixV().col(2);
  double worst = 0;
  for (const auto& p : pts) worst = std::max(worst, std::abs((p - c).dot(nrm)));
  return worst;
}

std::vector<Eigen::Vector3d> ply_part(const std::string& path, int part) {
  std::ifstream is(path);
  std::string line;
  long nv = 0;
  while (std::getline(is, line) && line != "end_header") {
    if (line.rfind("element vertex ", 0) == 0) nv = std::stol(line.substr(15));
  }
  std::vector<Eigen::Vector3d> out;
  for (long i = 0; i < nv && std::getline(is, line); ++i) {
    std::istringstream ls(line);
    double x, y, z;
    int p;
    ls >> x >> y >> z >> p;
    if (p == part) out.emplace_back(x, y, z);
  }
  return out;
}

using Polyline = std::vector<Eigen::Vector2d>;

std::vector<Polyline> svg_paths(const std::string& svg) {
  std::vector<Polyline> out;
  for (auto k = svg.find(" d=\"M "); k != std::string::npos; k = svg.find(" d=\"M ", k + 1)) {
    const auto end = svg.find('"', k + 5);
    std::string d = svg.substr(k + 5, end - k - 5);
    std::replace(d.begin(), d.end(), 'M', ' ');
    std::replace(d.begin(), d.end(), 'L', ' ');
    std::replace(d.begin(), d.end(), 'Z', ' ');
    std::istringstream is(d);
    Polyline p;
    double x, y;
    while (is >> x >> y) p.emplace_back(x, y);
    out.push_back(std::move(p));
  }
  return out;
}

// Places where two closed polylines meet, merged within `radius`.
int meeting_points(const Polyline& a, const Polyline& b, double radius) {
  std::vector<Eigen::Vector2d> hits;
  const auto cross = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    return p[0] * q[1] - p[1] * q[0];
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Eigen::Vector2d p = a[i], r = a[(i + 1) % a.size()] - p;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Eigen::Vector2d q = b[j], s = b[(j + 1) % b.size()] - q;
      const double den = cross(r, s);
      if (std::abs(den) < 1e-12) {
        if ((p - q).norm() < 1e-6) hits.push_back(p);
        continue;
      }
      const double t = cross(q - p, s) / den, u = cross(q - p, r) / den;
      constexpr double e = 1e-9;
      if (t >= -e && t <= 1 + e && u >= -e && u <= 1 + e) hits.push_back(p + t * r);
    }
  }
  std::vector<Eigen::Vector2d> centers;
  for (const auto& h : hits) {
    bool known = false;
    for (const auto& c : centers) known = known || (h - c).norm() < radius;
    if (!known) centers.push_back(h);
  }
  return static_cast<int>(centers.size());
}

std::size_t count_of(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto k = s.find(what); k != std::string::npos; k = s.find(what, k + 1)) ++n;
  return n;
}

Outcome figures() {
  Outcome o;
  for (int t = 1; t <= 4; ++t) {
    const json fx = fixture("panel_type" + std::to_string(t) + ".json");
    cli::CommandConfig c;
    c.command = "project";
    c.surface = fx["surface"];
    c.pole = vec(fx["pole"]);
    c.resolution = 64;
    const std::string base = std::string(S3TORI_BINARY_DIR) + "/acceptance_panel" + std::to_string(t);
    c.ply_path = base + ".ply";
    c.svg_path = base + ".svg";
    const cli::CommandOutcome r = cli::run_command(c);
    const int type = r.report.contains("intersection") ? r.report["intersection"]["type"].get<int>() : -1;
    std::ifstream svg_in(c.svg_path);
    const std::string svg((std::istreambuf_iterator<char>(svg_in)), std::istreambuf_iterator<char>());
    const std::size_t paths = count_of(svg, "<path"), marks = count_of(svg, "class=\"tangency\"");
    const std::size_t want_paths = t == 1 ? 1 : 2, want_marks = t <= 2 ? 0 : t - 2;
    const double plane = coplanarity(ply_part(c.ply_path, 2));
    const auto curves = svg_paths(svg);
    // Disjoint for type 2, touching once for type 3, crossing twice for type 4.
    const int meets = curves.size() == 2 ? meeting_points(curves[0], curves[1], 5.0) : 0;
    const int want_meets = t == 1 ? 0 : t - 2;
    o.require(r.exit_code == 0 && type == fx["type"].get<int>() && paths == want_paths &&
                  marks == want_marks && meets == want_meets && plane < 1e-8,
              "panel " + std::to_string(t) + ": type " + std::to_string(type) + ", " +
                  std::to_string(paths) + " paths, " + std::to_string(marks) + " tangencies, " + std::to_string(meets) + " meeting points, plane " +
                  fmt("%.1e", plane));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 clifford identities", clifford_identities},
      {"2 clifford spectrum", clifford_spectrum},
      {"3 homogeneous oracle", homogeneous_oracle},
      {"4 classification", classification},
      {"5 curvature blow-up", curvature_blowup},
      {"6 two-piece failure", two_piece_failure},
      {"7 holder and tau", holder_tau},
      {"8 lattice residual", lattice_residual},
      {"9 figures", figures},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
