#include "figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "s3tori/errors.hpp"

namespace s3tori::cli {

namespace {

// Fibonacci lattice on the unit 2-sphere.
std::vector<Eigen::Vector3d> fibonacci(int count) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(1.0 - z * z);
    const double t = golden * i;
    out.emplace_back(r * std::cos(t), r * std::sin(t), z);
  }
  return out;
}

Vec4 on_equator(const std::array<Vec4, 3>& b, const Eigen::Vector3d& w) {
  return w[0] * b[0] + w[1] * b[1] + w[2] * b[2];
}

double min_distance(const SurfaceMesh& mesh, const Vec4& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : mesh.points) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

std::string num(double x, const char* f = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

Eigen::Vector3d Projection::operator()(const Vec4& p) const {
  return rotation * stereographic_project(SpherePoint(pole), SpherePoint::normalize(p));
}

Vec4 auto_projection_pole(const SurfaceMesh& mesh, const Equator& eq, int candidates) {
  const auto b = complement_frame(eq.pole());
  Vec4 best = b[0];
  double best_d = -1.0;
  for (const auto& w : fibonacci(candidates)) {
    const Vec4 q = on_equator(b, w);
    const double d = min_distance(mesh, q);
    if (d > best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

Projection make_projection(const SurfaceMesh& mesh, const Equator& eq, const Vec4& q_in) {
  const Vec4& v = eq.pole().x();
  if (q_in.norm() < 1e-12) throw std::invalid_argument("projection pole is zero");
  const Vec4 q = q_in.normalized();
  if (std::abs(q.dot(v)) > 1e-9) throw std::invalid_argument("projection pole is not on S(v)");
  Projection proj;
  proj.pole = q;
  proj.equator = v;
  proj.min_distance = min_distance(mesh, q);
  if (proj.min_distance <= kMinPoleDistance) {
    throw SingularPointError("projection pole lies on the surface (distance " +
                             num(proj.min_distance, "%.3g") + ")");
  }
  // In the frame of q, S(v) projects to the plane through 0 normal to c.
  const auto b = complement_frame(SpherePoint(q));
  Eigen::Vector3d c(b[0].dot(v), b[1].dot(v), b[2].dot(v));
  c.normalize();
  Eigen::Vector3d a = std::abs(c[0]) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  a = (a - a.dot(c) * c).normalized();
  proj.rotation.row(0) = a.transpose();
  proj.rotation.row(1) = c.transpose();
  proj.rotation.row(2) = a.cross(c).transpose();
  return proj;
}

std::vector<Eigen::Vector3d> equator_samples(const Projection& proj, int count) {
  const auto b = complement_frame(SpherePoint(proj.equator));
  std::vector<Eigen::Vector3d> out;
  for (const auto& w : fibonacci(count)) {
    const Vec4 p = on_equator(b, w);
    if (p.dot(proj.pole) > std::cos(0.2)) continue;
    out.push_back(proj(p));
  }
  return out;
}

double plane_residual(const std::vector<Eigen::Vector3d>& pts) {
  double r = 0.0;
  for (const auto& p : pts) r = std::max(r, std::abs(p[1]));
  return r;
}

Figure build_figure(const SurfaceMesh& mesh, const IntersectionReport& rep,
                    const Projection& proj) {
  Figure fig;
  fig.n_u = mesh.n_u;
  fig.n_v = mesh.n_v;
  fig.mesh_vertices.reserve(mesh.points.size());
  for (const auto& p : mesh.points) fig.mesh_vertices.push_back(proj(p));
  for (const auto& c : rep.curves) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(c.points.size());
    for (const auto& p : c.points) pts.push_back(proj(p.x));
    fig.curves.push_back(std::move(pts));
  }
  for (const auto& t : rep.tangencies) fig.tangencies.push_back(proj(t.x));
  fig.equator = equator_samples(proj);
  return fig;
}

std::string to_ply(const Figure& fig, const std::string& comment) {
  std::size_t curve_points = 0, edges = 0;
  for (const auto& c : fig.curves) {
    curve_points += c.size();
    edges += c.size();
  }
  const std::size_t nv = fig.mesh_vertices.size() + curve_points + fig.equator.size();
  const std::size_t nf = static_cast<std::size_t>(fig.n_u) * fig.n_v;
  std::string s = "ply\nformat ascii 1.0\n";
  s += "comment " + comment + "\n";
  s += "element vertex " + std::to_string(nv) + "\n";
  s += "property double x\nproperty double y\nproperty double z\nproperty uchar part\n";
  s += "element face " + std::to_string(nf) + "\nproperty list uchar int vertex_indices\n";
  s += "element edge " + std::to_string(edges) + "\nproperty int vertex1\nproperty int vertex2\n";
  s += "end_header\n";
  const auto vertex = [&](const Eigen::Vector3d& p, int part) {
    s += num(p[0], "%.17g") + " " + num(p[1], "%.17g") + " " + num(p[2], "%.17g") + " " +
         std::to_string(part) + "\n";
  };
  for (const auto& p : fig.mesh_vertices) vertex(p, 0);
  for (const auto& c : fig.curves)
    for (const auto& p : c) vertex(p, 1);
  for (const auto& p : fig.equator) vertex(p, 2);
  const auto idx = [&](int i, int j) {
    return ((i % fig.n_u) * fig.n_v + (j % fig.n_v));
  };
  for (int i = 0; i < fig.n_u; ++i) {
    for (int j = 0; j < fig.n_v; ++j) {
      s += "4 " + std::to_string(idx(i, j)) + " " + std::to_string(idx(i + 1, j)) + " " +
           std::to_string(idx(i + 1, j + 1)) + " " + std::to_string(idx(i, j + 1)) + "\n";
    }
  }
  std::size_t base = fig.mesh_vertices.size();
  for (const auto& c : fig.curves) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      s += std::to_string(base + k) + " " + std::to_string(base + (k + 1) % c.size()) + "\n";
    }
    base += c.size();
  }
  return s;
}

std::string to_svg(const Figure& fig, const std::string& title) {
  double x0 = 1e300, x1 = -1e300, z0 = 1e300, z1 = -1e300;
  const auto grow = [&](const Eigen::Vector3d& p) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    z0 = std::min(z0, p[2]);
    z1 = std::max(z1, p[2]);
  };
  for (const auto& c : fig.curves)
    for (const auto& p : c) grow(p);
  if (x0 > x1) x0 = z0 = -1, x1 = z1 = 1;
  const double span = std::max({x1 - x0, z1 - z0, 1e-9});
  const double scale = 760.0 / span;
  // Canvas y grows downward; flip z so the picture keeps its orientation.
  const auto px = [&](const Eigen::Vector3d& p) { return num(20.0 + (p[0] - x0) * scale); };
  const auto py = [&](const Eigen::Vector3d& p) { return num(20.0 + (z1 - p[2]) * scale); };

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 "
       "800\">\n";
  s += "<title>" + title + "</title>\n";
  s += "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
  for (std::size_t i = 0; i < fig.curves.size(); ++i) {
    const auto& c = fig.curves[i];
    if (c.empty()) continue;
    s += "<path class=\"curve\" fill=\"none\" stroke-width=\"2\" stroke=\"";
    s += colors[i % 5];
    s += "\" d=\"M " + px(c[0]) + " " + py(c[0]);
    for (std::size_t k = 1; k < c.size(); ++k) s += " L " + px(c[k]) + " " + py(c[k]);
    s += " Z\"/>\n";
  }
  for (const auto& t : fig.tangencies) {
    s += "<circle class=\"tangency\" cx=\"" + px(t) + "\" cy=\"" + py(t) +
         "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace s3tori::cli
