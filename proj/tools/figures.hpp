#pragma once

// Stereographic pictures of S(v) and M from a projection pole q in S(v) \ M.
// S(v) goes to a plane, rotated here to y = 0 so the exports are y-up.

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "s3tori/intersection.hpp"

namespace s3tori::cli {

struct Projection {
  Vec4 pole = Vec4::Zero();  // projection pole q, a unit vector orthogonal to v
  Vec4 equator = Vec4::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // sends the S(v) normal to +y
  double min_distance = 0;  // chordal distance from q to the surface samples

  Eigen::Vector3d operator()(const Vec4& p) const;
};

inline constexpr double kMinPoleDistance = 1e-3;

// Point of S(v) farthest from the mesh among a Fibonacci sample of S(v).
Vec4 auto_projection_pole(const SurfaceMesh& mesh, const Equator& eq, int candidates = 2000);

// Throws SingularPointError if q lies within 1e-3 of the mesh and
// std::invalid_argument if q is not on S(v).
Projection make_projection(const SurfaceMesh& mesh, const Equator& eq, const Vec4& q);

// Samples of S(v) at angular distance >= 0.2 from q, projected.
std::vector<Eigen::Vector3d> equator_samples(const Projection& proj, int count = 512);

// max |y| over the points, the distance to the image plane of S(v).
double plane_residual(const std::vector<Eigen::Vector3d>& pts);

struct Figure {
  std::vector<Eigen::Vector3d> mesh_vertices;
  int n_u = 0;
  int n_v = 0;
  std::vector<std::vector<Eigen::Vector3d>> curves;
  std::vector<Eigen::Vector3d> tangencies;
  std::vector<Eigen::Vector3d> equator;
};

Figure build_figure(const SurfaceMesh& mesh, const IntersectionReport& rep, const Projection& proj);

// ASCII PLY with vertex parts 0 (surface), 1 (curves), 2 (S(v) samples),
// quad faces for the surface and polyline edges for the curves.
std::string to_ply(const Figure& fig, const std::string& comment);

// The plane of S(v) as canvas: one closed path per curve and a circle at each
// tangency.
std::string to_svg(const Figure& fig, const std::string& title);

}  // namespace s3tori::cli
