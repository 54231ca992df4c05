#include "s3tori/sphere_map.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "s3tori/errors.hpp"

namespace s3tori {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Vec4 SphereMap::operator()(const Vec4& x) const {
  return values(apply(V4<double>(x[0], x[1], x[2], x[3])));
}

SpherePoint SphereMap::operator()(const SpherePoint& p) const {
  return SpherePoint::normalize((*this)(p.x()));
}

Mat4 SphereMap::extension_jacobian(const Vec4& x) const {
  V4<AJet1> y;
  for (int i = 0; i < 4; ++i) y[i] = AJet1::variable(i, x[i]);
  const V4<AJet1> g = detail::homogeneous_extension(*this, y);
  Mat4 j;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) j(r, c) = g[r].d(c);
  return j;
}

SphereMapPtr SphereMap::inverse() const {
  return std::make_shared<NumericInverse>(shared_from_this());
}

SphereMapPtr IdentityMap::inverse() const { return shared_from_this(); }

SphereMapPtr OrthogonalMap::inverse() const {
  return std::make_shared<OrthogonalMap>(q_.inverse());
}

std::string TwistMap::describe() const { return "twist:" + fmt(eps_); }

SphereMapPtr TwistMap::inverse() const { return std::make_shared<TwistMap>(-eps_); }

std::string RadialNormalBump::describe() const { return "radial-normal-bump:" + fmt(eps_); }

std::string ComposedMap::describe() const {
  return "compose(" + first_->describe() + "," + second_->describe() + ")";
}

SphereMapPtr ComposedMap::inverse() const {
  return std::make_shared<ComposedMap>(second_->inverse(), first_->inverse());
}

NumericInverse::NumericInverse(SphereMapPtr forward) : forward_(std::move(forward)) {
  // Round trip on a coarse grid of S^3 in Hopf coordinates.
  constexpr int n = 6;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 1; c < n; ++c) {
        const double t = 0.5 * kPi * c / n;
        const double p = kTwoPi * a / n, q = kTwoPi * b / n;
        const Vec4 x(std::cos(t) * std::cos(p), std::cos(t) * std::sin(p),
                     std::sin(t) * std::cos(q), std::sin(t) * std::sin(q));
        const Vec4 y = solve(x);
        const double err = ((*forward_)(y) - x).norm();
        if (!(err <= 1e-10)) {
          throw NotDiffeomorphismError("map is not invertible near " + fmt(x[0]) + "," +
                                       fmt(x[1]) + "," + fmt(x[2]) + "," + fmt(x[3]));
        }
      }
    }
  }
}

std::string NumericInverse::describe() const { return "inverse(" + forward_->describe() + ")"; }

Vec4 NumericInverse::solve(const Vec4& x) const {
  Vec4 y = x;
  for (int it = 0; it < 50; ++it) {
    V4<AJet1> yj;
    for (int i = 0; i < 4; ++i) yj[i] = AJet1::variable(i, y[i]);
    const V4<AJet1> g = detail::homogeneous_extension(*forward_, yj);
    Mat4 j;
    Vec4 r;
    for (int a = 0; a < 4; ++a) {
      r[a] = x[a] - g[a].value();
      for (int c = 0; c < 4; ++c) j(a, c) = g[a].d(c);
    }
    if (r.norm() < 1e-15) break;
    const Eigen::FullPivLU<Mat4> lu(j);
    if (!lu.isInvertible()) throw NotDiffeomorphismError("singular Jacobian in inverse");
    const Vec4 step = lu.solve(r);
    y += step;
    if (!std::isfinite(y.norm())) throw NotDiffeomorphismError("inverse diverged");
    if (step.norm() < 1e-16) break;
  }
  return y;
}

SphereMapPtr identity_map() { return std::make_shared<IdentityMap>(); }
SphereMapPtr orthogonal_map(const Congruence& q) { return std::make_shared<OrthogonalMap>(q); }
SphereMapPtr twist_map(double eps) { return std::make_shared<TwistMap>(eps); }
SphereMapPtr radial_normal_bump(double eps) { return std::make_shared<RadialNormalBump>(eps); }
SphereMapPtr compose(SphereMapPtr first, SphereMapPtr second) {
  return std::make_shared<ComposedMap>(std::move(first), std::move(second));
}

std::string PushforwardTorus::describe() const {
  return "pushforward:" + xi_->describe() + ":" + base_->describe();
}

SurfacePtr pushforward(SphereMapPtr xi, SurfacePtr base) {
  return std::make_shared<PushforwardTorus>(std::move(xi), std::move(base));
}

}  // namespace s3tori
