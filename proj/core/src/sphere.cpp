#include "s3tori/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "s3tori/errors.hpp"

namespace s3tori {

SpherePoint::SpherePoint(const Vec4& x) {
  const double n = x.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    throw NotUnitError("point is not on the unit sphere: |x| = " + std::to_string(n));
  }
  x_ = x / n;
}

SpherePoint::SpherePoint(double x1, double x2, double x3, double x4)
    : SpherePoint(Vec4(x1, x2, x3, x4)) {}

SpherePoint SpherePoint::normalize(const Vec4& x) {
  const double n = x.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NotUnitError("cannot normalize a zero vector");
  return SpherePoint(x / n, Trusted{});
}

Congruence::Congruence() : q_(Mat4::Identity()), det_(1.0) {}

Congruence::Congruence(const Mat4& q) : q_(q) {
  const double err = (q.transpose() * q - Mat4::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) {
    throw NotOrthogonalError("matrix is not orthogonal: |Q^T Q - I| = " + std::to_string(err));
  }
  det_ = q.determinant() > 0.0 ? 1.0 : -1.0;
}

SpherePoint Congruence::apply(const SpherePoint& p) const {
  return SpherePoint::normalize(q_ * p.x());
}

Equator Congruence::apply(const Equator& e) const { return Equator(apply(e.pole())); }

Congruence Congruence::inverse() const { return Congruence(Mat4(q_.transpose())); }

Congruence operator*(const Congruence& a, const Congruence& b) {
  return Congruence(Mat4(a.q_ * b.q_));
}

GeodesicCircle::GeodesicCircle(const SpherePoint& center, const Vec4& a, const Vec4& b,
                               double radius)
    : center_(center), a_(a), b_(b), r_(radius) {
  if (!(radius > 0.0) || radius > kPi / 2 + 1e-15) {
    throw std::domain_error("circle radius must lie in (0, pi/2]");
  }
  const Vec4& c = center.x();
  const double err = std::max({std::abs(a.norm() - 1.0), std::abs(b.norm() - 1.0),
                               std::abs(a.dot(b)), std::abs(a.dot(c)), std::abs(b.dot(c))});
  if (err > kUnitTolerance) throw NotUnitError("circle frame is not orthonormal");
}

GeodesicCircle GeodesicCircle::great_circle(const Vec4& e1, const Vec4& e2) {
  // Any unit vector orthogonal to both serves as the center.
  Vec4 c = Vec4::Zero();
  for (int k = 0; k < 4; ++k) {
    const Vec4 cand = Vec4::Unit(k) - e1.dot(Vec4::Unit(k)) * e1 - e2.dot(Vec4::Unit(k)) * e2;
    if (cand.norm() > c.norm()) c = cand;
  }
  return GeodesicCircle(SpherePoint::normalize(c), e1, e2, kPi / 2);
}

SpherePoint GeodesicCircle::antipodal_center() const { return antipodal(center_); }

bool GeodesicCircle::is_geodesic() const { return std::abs(r_ - kPi / 2) <= 1e-12; }

SpherePoint GeodesicCircle::eval(double theta) const {
  const Vec4 x = std::cos(r_) * center_.x() +
                 std::sin(r_) * (std::cos(theta) * a_ + std::sin(theta) * b_);
  return SpherePoint::normalize(x);
}

std::array<Vec4, 2> GeodesicCircle::plane() const { return {a_, b_}; }

double signed_height(const Equator& eq, const SpherePoint& p) { return eq.pole().x().dot(p.x()); }

double intrinsic_distance(const SpherePoint& p, const SpherePoint& q) {
  return std::acos(std::clamp(p.x().dot(q.x()), -1.0, 1.0));
}

double circle_curvature(double r) {
  if (!(r > 0.0) || r > kPi / 2 + 1e-15) {
    throw std::domain_error("circle radius must lie in (0, pi/2]");
  }
  if (r >= kPi / 2) return 0.0;
  return std::abs(std::cos(r) / std::sin(r));
}

namespace {

// Completes the orthonormal pair (g1, g2) to a positively oriented basis of
// R^4 and returns the last two vectors.
std::array<Vec4, 2> oriented_complement(const Vec4& g1, const Vec4& g2) {
  Vec4 basis[4] = {g1, g2, Vec4::Zero(), Vec4::Zero()};
  for (int slot = 2; slot < 4; ++slot) {
    Vec4 best = Vec4::Zero();
    for (int k = 0; k < 4; ++k) {
      Vec4 w = Vec4::Unit(k);
      for (int j = 0; j < slot; ++j) w -= basis[j].dot(w) * basis[j];
      if (w.norm() > best.norm()) best = w;
    }
    basis[slot] = best.normalized();
  }
  Mat4 m;
  m << basis[0], basis[1], basis[2], basis[3];
  if (m.determinant() < 0.0) basis[3] = -basis[3];
  return {basis[2], basis[3]};
}

}  // namespace

Congruence rotation_about_geodesic(const GeodesicCircle& g, double angle) {
  if (!g.is_geodesic()) throw std::domain_error("rotation axis must be a great circle");
  const auto [p, c] = oriented_complement(g.axis_a(), g.axis_b());
  const Mat4 q = Mat4::Identity() +
                 (std::cos(angle) - 1.0) * (p * p.transpose() + c * c.transpose()) +
                 std::sin(angle) * (c * p.transpose() - p * c.transpose());
  return Congruence(q);
}

SpherePoint antipodal(const SpherePoint& p) { return SpherePoint::normalize(-p.x()); }

std::array<Vec4, 3> complement_frame(const SpherePoint& pole) {
  const Vec4& n = pole.x();
  int skip = 0;
  n.cwiseAbs().maxCoeff(&skip);
  std::array<Vec4, 3> b;
  int q = 0;
  for (int k = 0; k < 4; ++k) {
    if (k == skip) continue;
    Vec4 w = Vec4::Unit(k) - n.dot(Vec4::Unit(k)) * n;
    for (int j = 0; j < q; ++j) w -= b[j].dot(w) * b[j];
    b[q++] = w.normalized();
  }
  Mat4 m;
  m << b[0], b[1], b[2], n;
  if (m.determinant() < 0.0) b[2] = -b[2];
  return b;
}

Eigen::Vector3d stereographic_project(const SpherePoint& pole, const SpherePoint& p) {
  if ((p.x() - pole.x()).norm() < 1e-9) {
    throw SingularPointError("stereographic projection of the pole itself");
  }
  const auto b = complement_frame(pole);
  const double denom = 1.0 - pole.x().dot(p.x());
  return Eigen::Vector3d(b[0].dot(p.x()), b[1].dot(p.x()), b[2].dot(p.x())) / denom;
}

SpherePoint stereographic_lift(const SpherePoint& pole, const Eigen::Vector3d& y) {
  const auto b = complement_frame(pole);
  const double s = y.squaredNorm();
  const Vec4 x = (2.0 * (y[0] * b[0] + y[1] * b[1] + y[2] * b[2]) + (s - 1.0) * pole.x()) /
                 (s + 1.0);
  return SpherePoint::normalize(x);
}

}  // namespace s3tori
