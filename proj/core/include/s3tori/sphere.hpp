#pragma once

// Primitives of the unit sphere S^3 in R^4.
//
// Congruence composition applies the right operand first:
// (a * b).apply(p) == a.apply(b.apply(p)).

#include <array>

#include "s3tori/vec4.hpp"

namespace s3tori {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHalfSqrt2 = 0.70710678118654752440;

// Inputs further than this from unit length are rejected as user error.
inline constexpr double kUnitTolerance = 1e-6;

class SpherePoint {
 public:
  // Renormalizes; throws NotUnitError if ||x| - 1| > kUnitTolerance.
  explicit SpherePoint(const Vec4& x);
  SpherePoint(double x1, double x2, double x3, double x4);

  // Normalizes any nonzero vector without the unit check.
  static SpherePoint normalize(const Vec4& x);

  const Vec4& x() const { return x_; }
  double operator[](int i) const { return x_[i]; }

 private:
  struct Trusted {};
  SpherePoint(const Vec4& x, Trusted) : x_(x) {}
  Vec4 x_;
};

// The great sphere S(v) = {p : <v, p> = 0}, with H+(v) where <v, p> > 0.
class Equator {
 public:
  explicit Equator(const SpherePoint& pole) : v_(pole) {}
  explicit Equator(const Vec4& v) : v_(v) {}
  const SpherePoint& pole() const { return v_; }
  Equator flipped() const { return Equator(SpherePoint(-v_.x())); }

 private:
  SpherePoint v_;
};

class Congruence {
 public:
  Congruence();
  // Throws NotOrthogonalError unless Q^T Q = I to 1e-10.
  explicit Congruence(const Mat4& q);

  static Congruence identity() { return Congruence(); }

  const Mat4& matrix() const { return q_; }
  double determinant() const { return det_; }
  bool orientation_preserving() const { return det_ > 0.0; }

  SpherePoint apply(const SpherePoint& p) const;
  Vec4 apply(const Vec4& x) const { return q_ * x; }
  Equator apply(const Equator& e) const;
  Congruence inverse() const;

  friend Congruence operator*(const Congruence& a, const Congruence& b);

 private:
  Mat4 q_;
  double det_;
};

// A round circle in S^3: the set at intrinsic distance r from center p1
// (equivalently pi - r from p2 = -p1) inside the great 2-sphere spanned by
// p1 and the unit 4-vectors a, b orthogonal to p1 and to each other.
class GeodesicCircle {
 public:
  // Throws std::domain_error unless 0 < r <= pi/2; throws NotUnitError on
  // non-orthonormal frames.
  GeodesicCircle(const SpherePoint& center, const Vec4& a, const Vec4& b, double radius);

  // Great circle through two orthogonal unit vectors.
  static GeodesicCircle great_circle(const Vec4& e1, const Vec4& e2);

  SpherePoint center() const { return center_; }
  SpherePoint antipodal_center() const;
  double radius() const { return r_; }
  bool is_geodesic() const;
  const Vec4& axis_a() const { return a_; }
  const Vec4& axis_b() const { return b_; }

  SpherePoint eval(double theta) const;

  // Orthonormal basis (g1, g2) of the 2-plane containing a great circle.
  std::array<Vec4, 2> plane() const;

 private:
  SpherePoint center_;
  Vec4 a_;
  Vec4 b_;
  double r_;
};

double signed_height(const Equator& eq, const SpherePoint& p);
double intrinsic_distance(const SpherePoint& p, const SpherePoint& q);

// |cot r|; throws std::domain_error unless 0 < r <= pi/2.
double circle_curvature(double r);

// Rotation fixing the plane of g pointwise and turning its orthogonal
// complement by `angle`. Throws std::domain_error if g is not a great circle.
Congruence rotation_about_geodesic(const GeodesicCircle& g, double angle);

SpherePoint antipodal(const SpherePoint& p);

// Right-handed orthonormal frame (b1, b2, b3) of the complement of `pole`,
// with det[b1, b2, b3, pole] = +1. For pole = e4 this is (e1, e2, e3).
std::array<Vec4, 3> complement_frame(const SpherePoint& pole);

// y_i = <b_i, p> / (1 - <pole, p>); throws SingularPointError when p is within
// 1e-9 of the pole.
Eigen::Vector3d stereographic_project(const SpherePoint& pole, const SpherePoint& p);

// Inverse of stereographic_project for the same pole.
SpherePoint stereographic_lift(const SpherePoint& pole, const Eigen::Vector3d& y);

}  // namespace s3tori
