#include "s3tori/surface.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include "s3tori/errors.hpp"

namespace s3tori {

namespace {

// Shortest representation that parses back to x.
std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Vec4 to_vec(const V4<double>& a) { return Vec4(a[0], a[1], a[2], a[3]); }

}  // namespace

HomogeneousTorus::HomogeneousTorus(double r) : r_(r), cr_(std::cos(r)), sr_(std::sin(r)) {
  if (!(r > 0.0 && r < kPi / 2)) throw std::domain_error("homogeneous torus needs 0 < r < pi/2");
}

std::string HomogeneousTorus::describe() const { return "homogeneous:" + fmt(r_); }

CyclideTorus::CyclideTorus(const CyclideParams& p) : p_(p) {
  if (!(p.minor > 0.0 && p.major > p.minor) || !std::isfinite(p.offset)) {
    throw std::domain_error("cyclide needs major > minor > 0");
  }
}

std::string CyclideTorus::describe() const {
  return "cyclide:" + fmt(p_.major) + "," + fmt(p_.minor) + "," + fmt(p_.offset);
}

double TrigBump::amplitude_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.amplitude);
  return s;
}

PerturbedTorus::PerturbedTorus(SurfacePtr base, TrigBump bump)
    : base_(std::move(base)), bump_(std::move(bump)) {
  if (base_->max_jet_order() < 2) {
    throw std::invalid_argument("base surface is nested too deeply to perturb");
  }
}

std::string PerturbedTorus::describe() const {
  std::string s = "perturbed:" + base_->describe() + ":bump=";
  for (std::size_t i = 0; i < bump_.terms().size(); ++i) {
    const auto& t = bump_.terms()[i];
    if (i) s += ";";
    s += std::to_string(t.m) + "," + std::to_string(t.k) + "," + fmt(t.amplitude) + "," +
         fmt(t.phase);
  }
  return s;
}

std::string TransformedTorus::describe() const {
  // Congruence images are not expressible as descriptor strings; record the
  // base so reports stay informative.
  return "transformed:" + base_->describe();
}

SurfacePtr clifford_torus() { return std::make_shared<CliffordTorus>(); }
SurfacePtr homogeneous_torus(double r) { return std::make_shared<HomogeneousTorus>(r); }
SurfacePtr cyclide_torus(const CyclideParams& p) { return std::make_shared<CyclideTorus>(p); }
SurfacePtr transformed(const Congruence& q, SurfacePtr base) {
  return std::make_shared<TransformedTorus>(q, std::move(base));
}

SurfacePtr perturb_normal(SurfacePtr base, const TrigBump& bump) {
  if (bump.amplitude_bound() >= kPi / 2) {
    throw PerturbationTooLargeError("bump amplitude reaches pi/2");
  }
  auto out = std::make_shared<PerturbedTorus>(base, bump);
  if (bump.empty()) return out;
  constexpr int n = 64;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = kTwoPi * i / n, v = kTwoPi * j / n;
      const auto g0 = metric(*base, u, v);
      const auto g1 = metric(*out, u, v);
      const double d0 = g0[0] * g0[2] - g0[1] * g0[1];
      const double d1 = g1[0] * g1[2] - g1[1] * g1[1];
      if (!(d1 > 1e-6 * d0)) {
        throw PerturbationTooLargeError("perturbed surface is not immersed near (u, v) = (" +
                                        fmt(u) + ", " + fmt(v) + ")");
      }
    }
  }
  return out;
}

Vec4 clifford_eval(double u, double v) { return CliffordTorus().eval(u, v); }

Vec4 homogeneous_eval(double r, double u, double v) { return HomogeneousTorus(r).eval(u, v); }

std::array<double, 3> metric(const TorusImmersion& m, double u, double v) {
  const auto x = m.jet1(u, v);
  double e = 0, f = 0, g = 0;
  for (int c = 0; c < 4; ++c) {
    e += x[c].d(0) * x[c].d(0);
    f += x[c].d(0) * x[c].d(1);
    g += x[c].d(1) * x[c].d(1);
  }
  return {e, f, g};
}

CurvatureSample curvatures(const TorusImmersion& m, double u, double v) {
  const auto x = m.jet2(u, v);
  V4<double> p, xu, xv;
  Vec4 xuu, xuv, xvv;
  for (int c = 0; c < 4; ++c) {
    p[c] = x[c].value();
    xu[c] = x[c].d(0);
    xv[c] = x[c].d(1);
    xuu[c] = x[c].d2(0, 0);
    xuv[c] = x[c].d2(0, 1);
    xvv[c] = x[c].d2(1, 1);
  }
  const double e = dot(xu, xu), f = dot(xu, xv), g = dot(xv, xv);
  const double det_g = e * g - f * f;
  if (!(det_g > 1e-14 * (e + g) * (e + g))) {
    throw DegenerateImmersionError("degenerate metric at (u, v) = (" + fmt(u) + ", " + fmt(v) +
                                   ")");
  }
  const Vec4 n = to_vec(normalized(cross3(p, xu, xv)));
  const double l11 = xuu.dot(n), l12 = xuv.dot(n), l22 = xvv.dot(n);
  // W = -g^{-1} L
  const double w11 = -(g * l11 - f * l12) / det_g;
  const double w22 = -(-f * l12 + e * l22) / det_g;
  CurvatureSample s;
  s.H = 0.5 * (w11 + w22);
  s.S = (l11 * l22 - l12 * l12) / det_g;
  const double disc = std::sqrt(std::max(0.0, s.H * s.H - s.S));
  s.k1 = s.H + disc;
  s.k2 = s.H - disc;
  s.K = 1.0 + s.S;
  return s;
}

double immersion_margin(const TorusImmersion& m, int n) {
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto g = metric(m, kTwoPi * i / n, kTwoPi * j / n);
      const double d = g[0] * g[2] - g[1] * g[1];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

std::vector<SpherePoint> lattice_points(int n) {
  if (n < 1) throw std::invalid_argument("lattice order must be positive");
  std::vector<SpherePoint> out;
  out.reserve(4 * n * n);
  for (int j = 0; j < 2 * n; ++j) {
    for (int k = 0; k < 2 * n; ++k) {
      out.push_back(SpherePoint::normalize(clifford_eval(kPi * j / n, kPi * k / n)));
    }
  }
  return out;
}

GeodesicCircle line_of_curvature(int n, int k, CurvatureFamily family) {
  if (n < 1 || k < 0 || k >= 2 * n) throw std::out_of_range("line of curvature index out of range");
  const double a = kPi * k / n;
  if (family == CurvatureFamily::kPhi) {
    return GeodesicCircle(SpherePoint(std::cos(a), std::sin(a), 0, 0), Vec4::Unit(2),
                          Vec4::Unit(3), kPi / 4);
  }
  return GeodesicCircle(SpherePoint(0, 0, std::cos(a), std::sin(a)), Vec4::Unit(0), Vec4::Unit(1),
                        kPi / 4);
}

SurfaceMesh sample_mesh(const TorusImmersion& m, int n_u, int n_v) {
  if (n_u < 8 || n_v < 8) throw std::invalid_argument("mesh resolution must be at least 8");
  SurfaceMesh mesh;
  mesh.n_u = n_u;
  mesh.n_v = n_v;
  mesh.du = kTwoPi / n_u;
  mesh.dv = kTwoPi / n_v;
  const int nv = n_u * n_v;
  mesh.points.resize(nv);
  mesh.metric.resize(nv);
  mesh.area_weight.assign(nv, 0.0);
  for (int i = 0; i < n_u; ++i) {
    for (int j = 0; j < n_v; ++j) {
      const double u = i * mesh.du, v = j * mesh.dv;
      const auto x = m.jet1(u, v);
      const int id = mesh.index(i, j);
      double e = 0, f = 0, g = 0;
      for (int c = 0; c < 4; ++c) {
        mesh.points[id][c] = x[c].value();
        e += x[c].d(0) * x[c].d(0);
        f += x[c].d(0) * x[c].d(1);
        g += x[c].d(1) * x[c].d(1);
      }
      if (!(e * g - f * f > 1e-14 * (e + g) * (e + g))) {
        throw DegenerateImmersionError("degenerate metric at mesh vertex " + std::to_string(id));
      }
      mesh.metric[id] = {e, f, g};
      mesh.area_weight[id] = std::sqrt(e * g - f * f) * mesh.du * mesh.dv;
    }
  }
  for (double w : mesh.area_weight) mesh.total_area += w;
  return mesh;
}

}  // namespace s3tori
