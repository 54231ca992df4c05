#pragma once

// Smooth maps xi : S^3 -> S^3, evaluable on doubles and on jets.
//
// Jets over (u, v) push surfaces forward; jets over the four ambient
// coordinates give the partial derivatives of the canonical extension
// |x| xi(x / |x|) on the annulus.

#include <memory>
#include <string>

#include "s3tori/sphere.hpp"
#include "s3tori/surface.hpp"
#include "s3tori/taylor.hpp"
#include "s3tori/vec4.hpp"

namespace s3tori {

using AJet1 = Taylor<4, 1>;
using AJet2 = Taylor<4, 2>;
using AJet3 = Taylor<4, 3>;

class SphereMap;
using SphereMapPtr = std::shared_ptr<const SphereMap>;

class SphereMap : public std::enable_shared_from_this<SphereMap> {
 public:
  virtual ~SphereMap() = default;
  virtual std::string describe() const = 0;

  // Inputs are points of S^3 (jets whose value lies on S^3).
  virtual V4<double> apply(const V4<double>& x) const = 0;
  virtual V4<Jet1> apply(const V4<Jet1>& x) const = 0;
  virtual V4<Jet2> apply(const V4<Jet2>& x) const = 0;
  virtual V4<Jet3> apply(const V4<Jet3>& x) const = 0;
  virtual V4<Jet4> apply(const V4<Jet4>& x) const = 0;
  virtual V4<AJet1> apply(const V4<AJet1>& x) const = 0;
  virtual V4<AJet2> apply(const V4<AJet2>& x) const = 0;
  virtual V4<AJet3> apply(const V4<AJet3>& x) const = 0;

  Vec4 operator()(const Vec4& x) const;
  SpherePoint operator()(const SpherePoint& p) const;

  // Maps with a closed-form inverse override this; the default solves
  // xi(y) = x by Newton's method and throws NotDiffeomorphismError when
  // that fails on a test grid.
  virtual SphereMapPtr inverse() const;

  // 4 x 4 Jacobian of the canonical extension at x.
  Mat4 extension_jacobian(const Vec4& x) const;
};

template <class Derived>
class SphereMapBase : public SphereMap {
 public:
  V4<double> apply(const V4<double>& x) const override { return self().map(x); }
  V4<Jet1> apply(const V4<Jet1>& x) const override { return self().map(x); }
  V4<Jet2> apply(const V4<Jet2>& x) const override { return self().map(x); }
  V4<Jet3> apply(const V4<Jet3>& x) const override { return self().map(x); }
  V4<Jet4> apply(const V4<Jet4>& x) const override { return self().map(x); }
  V4<AJet1> apply(const V4<AJet1>& x) const override { return self().map(x); }
  V4<AJet2> apply(const V4<AJet2>& x) const override { return self().map(x); }
  V4<AJet3> apply(const V4<AJet3>& x) const override { return self().map(x); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

class IdentityMap final : public SphereMapBase<IdentityMap> {
 public:
  std::string describe() const override { return "identity"; }
  SphereMapPtr inverse() const override;
  template <class T>
  V4<T> map(const V4<T>& x) const {
    return x;
  }
};

class OrthogonalMap final : public SphereMapBase<OrthogonalMap> {
 public:
  explicit OrthogonalMap(Congruence q) : q_(std::move(q)) {}
  std::string describe() const override { return "orthogonal"; }
  SphereMapPtr inverse() const override;
  const Congruence& congruence() const { return q_; }
  template <class T>
  V4<T> map(const V4<T>& x) const {
    return apply_matrix(q_.matrix(), x);
  }

 private:
  Congruence q_;
};

// Rotates the (x1, x2) plane by the angle eps * x3. Its inverse is the
// twist by -eps.
class TwistMap final : public SphereMapBase<TwistMap> {
 public:
  explicit TwistMap(double eps) : eps_(eps) {}
  std::string describe() const override;
  SphereMapPtr inverse() const override;
  double eps() const { return eps_; }
  template <class T>
  V4<T> map(const V4<T>& x) const {
    using std::cos;
    using std::sin;
    const T a = eps_ * x[2];
    const T c = cos(a), s = sin(a);
    return V4<T>(c * x[0] - s * x[1], s * x[0] + c * x[1], x[2], x[3]);
  }

 private:
  double eps_;
};

// p -> normalize(p + eps (1 + p1) w(p)) with w = (|z2|^2 z1, -|z1|^2 z2),
// z1 = (p1, p2), z2 = (p3, p4). On the Clifford torus w is normal, so the
// image is a normal graph of height about eps (1 + p1) / 2.
class RadialNormalBump final : public SphereMapBase<RadialNormalBump> {
 public:
  explicit RadialNormalBump(double eps) : eps_(eps) {}
  std::string describe() const override;
  double eps() const { return eps_; }
  template <class T>
  V4<T> map(const V4<T>& x) const {
    const T a = x[0] * x[0] + x[1] * x[1];
    const T b = x[2] * x[2] + x[3] * x[3];
    const T s = eps_ * (1.0 + x[0]);
    const V4<T> y(x[0] + s * b * x[0], x[1] + s * b * x[1], x[2] - s * a * x[2],
                  x[3] - s * a * x[3]);
    return normalized(y);
  }

 private:
  double eps_;
};

// first o second
class ComposedMap final : public SphereMapBase<ComposedMap> {
 public:
  ComposedMap(SphereMapPtr first, SphereMapPtr second)
      : first_(std::move(first)), second_(std::move(second)) {}
  std::string describe() const override;
  SphereMapPtr inverse() const override;
  template <class T>
  V4<T> map(const V4<T>& x) const {
    return first_->apply(second_->apply(x));
  }

 private:
  SphereMapPtr first_, second_;
};

// Numerical inverse of a sphere diffeomorphism. Points come from Newton's
// method on the homogeneous extension G(y) = |y| xi(y / |y|); jets from the
// fixed-point iteration y <- y + J^{-1} (x - G(y)), which gains one order
// per step.
class NumericInverse final : public SphereMapBase<NumericInverse> {
 public:
  // Throws NotDiffeomorphismError if Newton fails or the round trip misses
  // by more than 1e-10 on a test grid.
  explicit NumericInverse(SphereMapPtr forward);
  std::string describe() const override;
  SphereMapPtr inverse() const override { return forward_; }

  template <class T>
  V4<T> map(const V4<T>& x) const;

 private:
  Vec4 solve(const Vec4& x) const;
  SphereMapPtr forward_;
};

SphereMapPtr identity_map();
SphereMapPtr orthogonal_map(const Congruence& q);
SphereMapPtr twist_map(double eps);
SphereMapPtr radial_normal_bump(double eps);
SphereMapPtr compose(SphereMapPtr first, SphereMapPtr second);

// (u, v) -> xi(X(u, v)).
class PushforwardTorus final : public ImmersionBase<PushforwardTorus> {
 public:
  PushforwardTorus(SphereMapPtr xi, SurfacePtr base) : xi_(std::move(xi)), base_(std::move(base)) {}
  SurfaceKind kind() const override { return SurfaceKind::kPushforward; }
  std::string describe() const override;
  int max_jet_order() const override { return base_->max_jet_order(); }
  const SphereMapPtr& map_ptr() const { return xi_; }
  const SurfacePtr& base() const { return base_; }

  template <class T>
  V4<T> map(const T& u, const T& v) const {
    return xi_->apply(base_->eval_as(u, v));
  }

 private:
  SphereMapPtr xi_;
  SurfacePtr base_;
};

SurfacePtr pushforward(SphereMapPtr xi, SurfacePtr base);

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
V4<T> homogeneous_extension(const SphereMap& f, const V4<T>& y) {
  const T r = norm(y);
  const V4<T> p = (T(1.0) / r) * y;
  return r * f.apply(p);
}

}  // namespace detail

template <class T>
V4<T> NumericInverse::map(const V4<T>& x) const {
  const Vec4 x0 = values(x);
  const Vec4 y0 = solve(x0);
  if constexpr (std::is_same_v<T, double>) {
    return V4<double>(y0[0], y0[1], y0[2], y0[3]);
  } else {
    const Mat4 jinv = forward_->extension_jacobian(y0).inverse();
    V4<T> y = V4<T>::from(y0);
    for (int it = 0; it <= jet_order_v<T>; ++it) {
      const V4<T> g = detail::homogeneous_extension(*forward_, y);
      y += apply_matrix(jinv, x - g);
    }
    return y;
  }
}

}  // namespace s3tori
