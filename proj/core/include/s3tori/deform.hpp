#pragma once

// Maps of the annulus A2 = {1/2 < |x| < 2} and their sampled C^{2,alpha}
// norms, the tau functional, lattice mean-curvature residuals and the
// product of arcs that join regularly.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "s3tori/intersection.hpp"
#include "s3tori/sphere_map.hpp"

namespace s3tori {

inline constexpr double kAnnulusInner = 0.5;
inline constexpr double kAnnulusOuter = 2.0;

class AnnulusMap {
 public:
  virtual ~AnnulusMap() = default;
  virtual std::string describe() const = 0;
  virtual bool is_canonical_extension() const { return false; }

  virtual V4<double> apply(const V4<double>& x) const = 0;
  virtual V4<AJet1> apply(const V4<AJet1>& x) const = 0;
  virtual V4<AJet2> apply(const V4<AJet2>& x) const = 0;
  virtual V4<AJet3> apply(const V4<AJet3>& x) const = 0;

  Vec4 operator()(const Vec4& x) const;
  // Jet of F at x in the four ambient variables.
  template <int P>
  V4<Taylor<4, P>> jet(const Vec4& x) const {
    V4<Taylor<4, P>> y;
    for (int i = 0; i < 4; ++i) y[i] = Taylor<4, P>::variable(i, x[i]);
    return apply(y);
  }
};

using AnnulusMapPtr = std::shared_ptr<const AnnulusMap>;

template <class Derived>
class AnnulusMapBase : public AnnulusMap {
 public:
  V4<double> apply(const V4<double>& x) const override { return self().map(x); }
  V4<AJet1> apply(const V4<AJet1>& x) const override { return self().map(x); }
  V4<AJet2> apply(const V4<AJet2>& x) const override { return self().map(x); }
  V4<AJet3> apply(const V4<AJet3>& x) const override { return self().map(x); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// F(x) = |x| xi(x / |x|). Identity and orthogonal maps extend to the exact
// linear maps, so F - I vanishes identically for xi = identity.
class CanonicalExtension final : public AnnulusMapBase<CanonicalExtension> {
 public:
  explicit CanonicalExtension(SphereMapPtr xi);
  std::string describe() const override { return "extension(" + xi_->describe() + ")"; }
  bool is_canonical_extension() const override { return true; }
  const SphereMapPtr& sphere_map() const { return xi_; }
  template <class T>
  V4<T> map(const V4<T>& x) const {
    if (linear_) return apply_matrix(*linear_, x);
    return detail::homogeneous_extension(*xi_, x);
  }

 private:
  SphereMapPtr xi_;
  std::optional<Mat4> linear_;
};

// F(x) = (1 + eps cos(<k, x> + phase)) Q x.
class ModulatedLinear final : public AnnulusMapBase<ModulatedLinear> {
 public:
  ModulatedLinear(Congruence q, double eps, Vec4 k, double phase)
      : q_(std::move(q)), eps_(eps), k_(k), phase_(phase) {}
  std::string describe() const override;
  template <class T>
  V4<T> map(const V4<T>& x) const {
    using std::cos;
    const T arg = k_[0] * x[0] + k_[1] * x[1] + k_[2] * x[2] + k_[3] * x[3] + phase_;
    const T s = 1.0 + eps_ * cos(arg);
    return s * apply_matrix(q_.matrix(), x);
  }

 private:
  Congruence q_;
  double eps_;
  Vec4 k_;
  double phase_;
};

// F - G
class DifferenceMap final : public AnnulusMapBase<DifferenceMap> {
 public:
  DifferenceMap(AnnulusMapPtr f, AnnulusMapPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  std::string describe() const override {
    return "(" + f_->describe() + ")-(" + g_->describe() + ")";
  }
  template <class T>
  V4<T> map(const V4<T>& x) const {
    return f_->apply(x) - g_->apply(x);
  }

 private:
  AnnulusMapPtr f_, g_;
};

// F o G
class ComposedAnnulusMap final : public AnnulusMapBase<ComposedAnnulusMap> {
 public:
  ComposedAnnulusMap(AnnulusMapPtr f, AnnulusMapPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  std::string describe() const override {
    return "(" + f_->describe() + ")o(" + g_->describe() + ")";
  }
  template <class T>
  V4<T> map(const V4<T>& x) const {
    return f_->apply(g_->apply(x));
  }

 private:
  AnnulusMapPtr f_, g_;
};

AnnulusMapPtr canonical_extend(SphereMapPtr xi);
AnnulusMapPtr annulus_identity();
AnnulusMapPtr difference(AnnulusMapPtr f, AnnulusMapPtr g);
AnnulusMapPtr compose(AnnulusMapPtr f, AnnulusMapPtr g);

// Seeded points uniform in A2 by volume. The first n points of a larger
// request coincide with a request for n.
std::vector<Vec4> annulus_samples(int count, std::uint64_t seed);

struct SamplePair {
  Vec4 x;
  Vec4 y;
};

// Alternates global pairs (independent uniform points) with clustered pairs
// |x - y| = s for s cycling through 1e-1, 1e-2, ..., 1e-6. Prefix-stable.
std::vector<SamplePair> annulus_pairs(int count, std::uint64_t seed);

// max over pairs and (j, k) of |D^{jk}F(x) - D^{jk}F(y)| / |x - y|^alpha; a
// lower bound for the seminorm. Throws std::invalid_argument unless
// 0 < alpha <= 1 and pairs >= 1000, NonFiniteError on non-finite values.
double holder_seminorm(const AnnulusMap& f, double alpha, int pairs, std::uint64_t seed);

struct HolderReport {
  double alpha = 0;
  double sup_term = 0;       // sup |F|
  double grad_term = 0;      // max_j sup |D^j F|
  double hess_term = 0;      // max_jk sup |D^jk F|
  double seminorm_term = 0;  // max_jk [D^jk F]_alpha
  double total = 0;
  int samples = 0;
  int pairs = 0;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument unless samples >= 10^4 (and as holder_seminorm).
HolderReport c2alpha_norm(const AnnulusMap& f, double alpha, int samples, int pairs,
                          std::uint64_t seed);

struct TauOptions {
  int samples = 10000;
  int pairs = 1000;
  std::uint64_t seed = 42;
};

struct TauReport {
  double tau = 0;
  HolderReport forward;  // ||X - I||
  HolderReport inverse;  // ||X^{-1} - I||
};

// ||X - I|| + ||X^{-1} - I|| for X the canonical extension of xi. The inverse
// is xi->inverse(), numerical unless xi supplies one.
TauReport tau(SphereMapPtr xi, double alpha, const TauOptions& opt = {});

// max |H| of xi o clifford at the lattice points (pi j/n, pi k/n), 0 <= j, k < 2n.
// Throws DegenerateImmersionError if the pushforward degenerates there.
double minimality_residual_at_lattice(SphereMapPtr xi, int n);

// ---------------------------------------------------------------------------
// Arcs and their products

struct ArcSample {
  Vec4 x = Vec4::Zero();
  Vec4 tangent = Vec4::Zero();
  Vec4 curvature = Vec4::Zero();  // geodesic curvature vector in S^3
};

// Sampled arc of S^3 from its first to its last sample.
struct Arc {
  std::vector<ArcSample> samples;
  const ArcSample& front() const { return samples.front(); }
  const ArcSample& back() const { return samples.back(); }
};

// Samples `n` + 1 points of the circle c between angles t0 and t1.
Arc circle_arc(const GeodesicCircle& c, double t0, double t1, int n);

// Points first..last (cyclic, inclusive) of a traced level-set curve, with
// frames from curve_frame.
Arc level_set_arc(const TorusImmersion& m, const Equator& eq, const IntersectionCurve& c, int first,
                  int last);

// Quintic Hermite curve in R^4 projected to S^3, matching position, unit
// tangent and curvature vector at both ends.
Arc hermite_arc(const ArcSample& from, const ArcSample& to, int n);

struct ClosedCurve {
  std::vector<ArcSample> samples;  // closed: last connects to first
  std::vector<double> arclength;   // at each sample, from 0
  double length = 0;
  std::array<double, 2> tangent_jump{0, 0};    // at the two joins
  std::array<double, 2> curvature_jump{0, 0};
  double max_curvature = 0;
  double min_curvature = 0;
};

inline constexpr double kJoinGapTol = 1e-8;
inline constexpr double kJoinSmoothTol = 1e-6;

// mu followed by nu, with mu.back() = nu.front() and nu.back() = mu.front().
// Throws std::invalid_argument when an endpoint gap exceeds 1e-8 and
// NonSmoothJoinError when a tangent or curvature jump exceeds 1e-6.
ClosedCurve curve_product(const Arc& mu, const Arc& nu);

}  // namespace s3tori
