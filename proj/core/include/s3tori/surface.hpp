#pragma once

// Doubly periodic torus immersions X : [0, 2pi)^2 -> S^3 with exact jets.
//
// Every immersion evaluates through a single templated formula, instantiated
// for doubles and for Taylor<2, K> jets (K <= 4), so derivatives are exact.
// The unit normal is N = cross3(X, X_u, X_v) / |.|; for the Clifford torus it
// points toward the side containing (1, 0, 0, 0). Principal curvatures are the
// eigenvalues of -g^{-1} II with II_ij = <X_ij, N>, which makes the inner
// Clifford direction k1 = +1 and homogeneous tubes H = (tan r - cot r) / 2.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "s3tori/sphere.hpp"
#include "s3tori/taylor.hpp"
#include "s3tori/vec4.hpp"

namespace s3tori {

using Jet1 = Taylor<2, 1>;
using Jet2 = Taylor<2, 2>;
using Jet3 = Taylor<2, 3>;
using Jet4 = Taylor<2, 4>;

inline constexpr int kMaxSurfaceJetOrder = 4;

enum class SurfaceKind { kClifford, kHomogeneous, kCyclide, kPerturbed, kTransformed, kPushforward };

struct CurvatureSample {
  double k1 = 0;  // k1 >= k2
  double k2 = 0;
  double H = 0;
  double S = 0;
  double K = 0;
};

class TorusImmersion {
 public:
  virtual ~TorusImmersion() = default;

  virtual SurfaceKind kind() const = 0;
  // Descriptor string accepted by parse_surface().
  virtual std::string describe() const = 0;
  // Highest jet order the immersion can produce.
  virtual int max_jet_order() const { return kMaxSurfaceJetOrder; }

  virtual Vec4 eval(double u, double v) const = 0;
  virtual V4<Jet1> jet1(double u, double v) const = 0;
  virtual V4<Jet2> jet2(double u, double v) const = 0;
  virtual V4<Jet3> jet3(double u, double v) const = 0;
  virtual V4<Jet4> jet4(double u, double v) const = 0;

  SpherePoint point(double u, double v) const { return SpherePoint::normalize(eval(u, v)); }

  template <int K>
  V4<Taylor<2, K>> jet(double u, double v) const {
    static_assert(K >= 1 && K <= kMaxSurfaceJetOrder);
    if constexpr (K == 1) return jet1(u, v);
    if constexpr (K == 2) return jet2(u, v);
    if constexpr (K == 3) return jet3(u, v);
    if constexpr (K == 4) return jet4(u, v);
  }

  // Evaluates at a double or at the canonical jet variables (u0 + du, v0 + dv).
  template <class T>
  V4<T> eval_as(const T& u, const T& v) const {
    if constexpr (std::is_same_v<T, double>) {
      const Vec4 x = eval(u, v);
      return V4<double>(x[0], x[1], x[2], x[3]);
    } else {
      return jet<jet_order_v<T>>(value_of(u), value_of(v));
    }
  }
};

using SurfacePtr = std::shared_ptr<const TorusImmersion>;

// CRTP adapter: Derived provides `template <class T> V4<T> map(const T&, const T&) const`.
template <class Derived>
class ImmersionBase : public TorusImmersion {
 public:
  Vec4 eval(double u, double v) const override { return values(self().map(u, v)); }
  V4<Jet1> jet1(double u, double v) const override { return at<1>(u, v); }
  V4<Jet2> jet2(double u, double v) const override { return at<2>(u, v); }
  V4<Jet3> jet3(double u, double v) const override { return at<3>(u, v); }
  V4<Jet4> jet4(double u, double v) const override { return at<4>(u, v); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
  template <int K>
  V4<Taylor<2, K>> at(double u, double v) const {
    using J = Taylor<2, K>;
    return self().map(J::variable(0, u), J::variable(1, v));
  }
};

class CliffordTorus final : public ImmersionBase<CliffordTorus> {
 public:
  SurfaceKind kind() const override { return SurfaceKind::kClifford; }
  std::string describe() const override { return "clifford"; }

  template <class T>
  V4<T> map(const T& u, const T& v) const {
    using std::cos;
    using std::sin;
    return V4<T>(kHalfSqrt2 * cos(u), kHalfSqrt2 * sin(u), kHalfSqrt2 * cos(v),
                 kHalfSqrt2 * sin(v));
  }
};

// (cos r e^{iu}, sin r e^{iv}); r = pi/4 is the Clifford torus.
class HomogeneousTorus final : public ImmersionBase<HomogeneousTorus> {
 public:
  // Throws std::domain_error unless 0 < r < pi/2.
  explicit HomogeneousTorus(double r);
  SurfaceKind kind() const override { return SurfaceKind::kHomogeneous; }
  std::string describe() const override;
  double radius() const { return r_; }

  template <class T>
  V4<T> map(const T& u, const T& v) const {
    using std::cos;
    using std::sin;
    return V4<T>(cr_ * cos(u), cr_ * sin(u), sr_ * cos(v), sr_ * sin(v));
  }

 private:
  double r_, cr_, sr_;
};

struct CyclideParams {
  double major = 1.5;   // R
  double minor = 1.0;   // r
  double offset = 0.0;  // shift of the torus along the symmetry axis
};

// Inverse stereographic image (from e4) of the torus of revolution
// ((R + r cos v) cos u, (R + r cos v) sin u, r sin v + c) in R^3.
class CyclideTorus final : public ImmersionBase<CyclideTorus> {
 public:
  // Throws std::domain_error unless R > r > 0.
  explicit CyclideTorus(const CyclideParams& p);
  SurfaceKind kind() const override { return SurfaceKind::kCyclide; }
  std::string describe() const override;
  const CyclideParams& params() const { return p_; }

  template <class T>
  V4<T> map(const T& u, const T& v) const {
    using std::cos;
    using std::sin;
    const T rho = p_.major + p_.minor * cos(v);
    const T y1 = rho * cos(u);
    const T y2 = rho * sin(u);
    const T y3 = p_.minor * sin(v) + p_.offset;
    const T s = y1 * y1 + y2 * y2 + y3 * y3;
    const T inv = T(1.0) / (s + 1.0);
    return V4<T>(2.0 * y1 * inv, 2.0 * y2 * inv, 2.0 * y3 * inv, (s - 1.0) * inv);
  }

 private:
  CyclideParams p_;
};

struct BumpTerm {
  int m = 0;
  int k = 0;
  double amplitude = 0;
  double phase = 0;
};

// h(u, v) = sum amplitude * cos(m u + k v + phase).
class TrigBump {
 public:
  TrigBump() = default;
  explicit TrigBump(std::vector<BumpTerm> terms) : terms_(std::move(terms)) {}

  const std::vector<BumpTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  // Upper bound for sup |h|.
  double amplitude_bound() const;

  template <class T>
  T operator()(const T& u, const T& v) const {
    using std::cos;
    T h(0.0);
    for (const auto& t : terms_) h += t.amplitude * cos(double(t.m) * u + double(t.k) * v + t.phase);
    return h;
  }

 private:
  std::vector<BumpTerm> terms_;
};

// Unit normal at double or jet precision. Needs the base jet one order higher.
template <class T>
V4<T> unit_normal(const TorusImmersion& m, const T& u, const T& v);

// X~ = cos(h) X + sin(h) N: the point at distance h along the normal geodesic.
class PerturbedTorus final : public ImmersionBase<PerturbedTorus> {
 public:
  PerturbedTorus(SurfacePtr base, TrigBump bump);
  SurfaceKind kind() const override { return SurfaceKind::kPerturbed; }
  std::string describe() const override;
  int max_jet_order() const override { return base_->max_jet_order() - 1; }
  const SurfacePtr& base() const { return base_; }
  const TrigBump& bump() const { return bump_; }

  template <class T>
  V4<T> map(const T& u, const T& v) const {
    using std::cos;
    using std::sin;
    const V4<T> x = base_->eval_as(u, v);
    const V4<T> n = unit_normal(*base_, u, v);
    const T h = bump_(u, v);
    return cos(h) * x + sin(h) * n;
  }

 private:
  SurfacePtr base_;
  TrigBump bump_;
};

// Q o M for a congruence Q.
class TransformedTorus final : public ImmersionBase<TransformedTorus> {
 public:
  TransformedTorus(Congruence q, SurfacePtr base) : q_(std::move(q)), base_(std::move(base)) {}
  SurfaceKind kind() const override { return SurfaceKind::kTransformed; }
  std::string describe() const override;
  int max_jet_order() const override { return base_->max_jet_order(); }
  const Congruence& congruence() const { return q_; }
  const SurfacePtr& base() const { return base_; }

  template <class T>
  V4<T> map(const T& u, const T& v) const {
    return apply_matrix(q_.matrix(), base_->eval_as(u, v));
  }

 private:
  Congruence q_;
  SurfacePtr base_;
};

SurfacePtr clifford_torus();
SurfacePtr homogeneous_torus(double r);
SurfacePtr cyclide_torus(const CyclideParams& p);
SurfacePtr transformed(const Congruence& q, SurfacePtr base);

// Throws PerturbationTooLargeError if the result fails the immersion check.
SurfacePtr perturb_normal(SurfacePtr base, const TrigBump& bump);

Vec4 clifford_eval(double u, double v);
// Throws std::domain_error unless 0 < r < pi/2.
Vec4 homogeneous_eval(double r, double u, double v);

// Throws DegenerateImmersionError at non-immersion points.
CurvatureSample curvatures(const TorusImmersion& m, double u, double v);

// First fundamental form (E, F, G) at (u, v).
std::array<double, 3> metric(const TorusImmersion& m, double u, double v);

// Minimum of det g over an n x n grid, relative to the grid maximum.
double immersion_margin(const TorusImmersion& m, int n);

// The 4n^2 points (sqrt2/2)(cos(pi j/n), sin(pi j/n), cos(pi k/n), sin(pi k/n)).
std::vector<SpherePoint> lattice_points(int n);

enum class CurvatureFamily { kPhi, kPsi };

// phi^k_n(theta) = (sqrt2/2)(cos(pi k/n), sin(pi k/n), cos theta, sin theta);
// psi swaps the two pairs. Throws std::out_of_range unless 0 <= k < 2n.
GeodesicCircle line_of_curvature(int n, int k, CurvatureFamily family);

struct SurfaceMesh {
  int n_u = 0;
  int n_v = 0;
  double du = 0;
  double dv = 0;
  // Row-major: vertex (i, j) at i * n_v + j, with u_i = i du, v_j = j dv.
  std::vector<Vec4> points;
  std::vector<std::array<double, 3>> metric;  // (E, F, G)
  // sqrt(det g) du dv; the periodic trapezoid rule, spectrally accurate.
  std::vector<double> area_weight;
  double total_area = 0;

  int vertex_count() const { return n_u * n_v; }
  int index(int i, int j) const {
    i %= n_u;
    j %= n_v;
    if (i < 0) i += n_u;
    if (j < 0) j += n_v;
    return i * n_v + j;
  }
};

// Throws std::invalid_argument unless n_u, n_v >= 8 and
// DegenerateImmersionError at non-immersion vertices.
SurfaceMesh sample_mesh(const TorusImmersion& m, int n_u, int n_v);

// ---------------------------------------------------------------------------

namespace detail {

// Derivative of a jet of order K + 1 in variable i, as a scalar of type T
// with jet order K.
template <class T, int K1>
T lowered_derivative(const Taylor<2, K1>& x, int i) {
  if constexpr (std::is_same_v<T, double>) {
    return x.d(i);
  } else {
    return x.derivative(i);
  }
}

template <class T, int K1>
T lowered_value(const Taylor<2, K1>& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x.value();
  } else {
    return x.template truncate<jet_order_v<T>>();
  }
}

}  // namespace detail

template <class T>
V4<T> unit_normal(const TorusImmersion& m, const T& u, const T& v) {
  constexpr int K = jet_order_v<T>;
  if constexpr (K + 1 > kMaxSurfaceJetOrder) {
    throw std::logic_error("jet order exceeds the supported maximum");
  } else {
    const V4<Taylor<2, K + 1>> big = m.jet<K + 1>(value_of(u), value_of(v));
    V4<T> x, xu, xv;
    for (int c = 0; c < 4; ++c) {
      x[c] = detail::lowered_value<T>(big[c]);
      xu[c] = detail::lowered_derivative<T>(big[c], 0);
      xv[c] = detail::lowered_derivative<T>(big[c], 1);
    }
    return normalized(cross3(x, xu, xv));
  }
}

}  // namespace s3tori
