#include "s3tori/deform.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "s3tori/errors.hpp"

namespace s3tori {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt(const Vec4& x) {
  return "(" + fmt(x[0]) + ", " + fmt(x[1]) + ", " + fmt(x[2]) + ", " + fmt(x[3]) + ")";
}

// Stream for pair sampling, decorrelated from the point stream.
constexpr std::uint64_t kPairStream = 0x9E3779B97F4A7C15ULL;

Vec4 draw_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const Vec4 d(normal(rng), normal(rng), normal(rng), normal(rng));
    const double n = d.norm();
    if (n > 1e-12) return d / n;
  }
}

Vec4 draw_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Vec4 d = draw_direction(rng);
  const double lo = std::pow(kAnnulusInner, 4), hi = std::pow(kAnnulusOuter, 4);
  const double r = std::pow(lo + uni(rng) * (hi - lo), 0.25);
  return r * d;
}

bool inside(const Vec4& x) {
  const double r = x.norm();
  return r > kAnnulusInner && r < kAnnulusOuter;
}

// Second partials D^{jk}F as ten 4-vectors (j <= k).
using Hessians = std::array<Vec4, 10>;

Hessians hessians(const AnnulusMap& f, const Vec4& x) {
  const auto j = f.jet<2>(x);
  Hessians h;
  int q = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b, ++q) {
      for (int c = 0; c < 4; ++c) h[q][c] = j[c].d2(a, b);
    }
  }
  for (const auto& v : h) {
    if (!v.allFinite()) throw NonFiniteError("non-finite second derivative at x = " + fmt(x));
  }
  return h;
}

}  // namespace

Vec4 AnnulusMap::operator()(const Vec4& x) const {
  return values(apply(V4<double>(x[0], x[1], x[2], x[3])));
}

CanonicalExtension::CanonicalExtension(SphereMapPtr xi) : xi_(std::move(xi)) {
  if (dynamic_cast<const IdentityMap*>(xi_.get())) {
    linear_ = Mat4::Identity();
  } else if (const auto* q = dynamic_cast<const OrthogonalMap*>(xi_.get())) {
    linear_ = q->congruence().matrix();
  }
}

std::string ModulatedLinear::describe() const {
  return "modulated-linear:" + fmt(eps_) + ":" + fmt(k_) + ":" + fmt(phase_);
}

AnnulusMapPtr canonical_extend(SphereMapPtr xi) {
  return std::make_shared<CanonicalExtension>(std::move(xi));
}

AnnulusMapPtr annulus_identity() { return canonical_extend(identity_map()); }

AnnulusMapPtr difference(AnnulusMapPtr f, AnnulusMapPtr g) {
  return std::make_shared<DifferenceMap>(std::move(f), std::move(g));
}

AnnulusMapPtr compose(AnnulusMapPtr f, AnnulusMapPtr g) {
  return std::make_shared<ComposedAnnulusMap>(std::move(f), std::move(g));
}

std::vector<Vec4> annulus_samples(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec4> out;
  out.reserve(std::max(count, 0));
  for (int k = 0; k < count; ++k) out.push_back(draw_point(rng));
  return out;
}

std::vector<SamplePair> annulus_pairs(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ kPairStream);
  std::vector<SamplePair> out;
  out.reserve(std::max(count, 0));
  for (int k = 0; k < count; ++k) {
    if (k % 2 == 0) {
      const Vec4 x = draw_point(rng);
      out.push_back({x, draw_point(rng)});
      continue;
    }
    const double s = std::pow(10.0, -(1 + (k / 2) % 6));
    const Vec4 x = draw_point(rng);
    const Vec4 d = draw_direction(rng);
    Vec4 y = x + s * d;
    if (!inside(y)) y = x - s * d;
    if (!inside(y)) y = x + s * (x.norm() < 1.0 ? 1.0 : -1.0) * x.normalized();
    out.push_back({x, y});
  }
  return out;
}

double holder_seminorm(const AnnulusMap& f, double alpha, int pairs, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (pairs < 1000) throw std::invalid_argument("holder_seminorm needs at least 1000 pairs");
  double best = 0.0;
  for (const auto& p : annulus_pairs(pairs, seed)) {
    const Hessians hx = hessians(f, p.x);
    const Hessians hy = hessians(f, p.y);
    const double dist = std::pow((p.x - p.y).norm(), alpha);
    for (int q = 0; q < 10; ++q) best = std::max(best, (hx[q] - hy[q]).norm() / dist);
  }
  return best;
}

HolderReport c2alpha_norm(const AnnulusMap& f, double alpha, int samples, int pairs,
                          std::uint64_t seed) {
  if (samples < 10000) throw std::invalid_argument("c2alpha_norm needs at least 10^4 samples");
  HolderReport rep;
  rep.alpha = alpha;
  rep.samples = samples;
  rep.pairs = pairs;
  rep.seed = seed;
  rep.seminorm_term = holder_seminorm(f, alpha, pairs, seed);
  for (const Vec4& x : annulus_samples(samples, seed)) {
    const auto j = f.jet<2>(x);
    Vec4 val;
    std::array<Vec4, 4> grad;
    for (int c = 0; c < 4; ++c) {
      val[c] = j[c].value();
      for (int a = 0; a < 4; ++a) grad[a][c] = j[c].d(a);
    }
    if (!val.allFinite()) throw NonFiniteError("non-finite value at x = " + fmt(x));
    rep.sup_term = std::max(rep.sup_term, val.norm());
    for (const auto& g : grad) {
      if (!g.allFinite()) throw NonFiniteError("non-finite derivative at x = " + fmt(x));
      rep.grad_term = std::max(rep.grad_term, g.norm());
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        Vec4 h;
        for (int c = 0; c < 4; ++c) h[c] = j[c].d2(a, b);
        if (!h.allFinite()) throw NonFiniteError("non-finite second derivative at x = " + fmt(x));
        rep.hess_term = std::max(rep.hess_term, h.norm());
      }
    }
  }
  rep.total = rep.sup_term + rep.grad_term + rep.hess_term + rep.seminorm_term;
  return rep;
}

TauReport tau(SphereMapPtr xi, double alpha, const TauOptions& opt) {
  const AnnulusMapPtr id = annulus_identity();
  const SphereMapPtr inv = xi->inverse();
  TauReport rep;
  rep.forward = c2alpha_norm(*difference(canonical_extend(xi), id), alpha, opt.samples,
                             opt.pairs, opt.seed);
  rep.inverse = c2alpha_norm(*difference(canonical_extend(inv), id), alpha, opt.samples,
                             opt.pairs, opt.seed);
  rep.tau = rep.forward.total + rep.inverse.total;
  return rep;
}

double minimality_residual_at_lattice(SphereMapPtr xi, int n) {
  if (n < 1) throw std::invalid_argument("lattice order must be positive");
  const SurfacePtr m = pushforward(std::move(xi), clifford_torus());
  double worst = 0.0;
  for (int j = 0; j < 2 * n; ++j) {
    for (int k = 0; k < 2 * n; ++k) {
      worst = std::max(worst, std::abs(curvatures(*m, kPi * j / n, kPi * k / n).H));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

ArcSample frame(const Vec4& x, const Vec4& d1, const Vec4& d2) {
  ArcSample s;
  s.x = x;
  const double speed = d1.norm();
  if (!(speed > 0.0)) throw NumericalError("arc has zero speed");
  s.tangent = d1 / speed;
  Vec4 k = (d2 - d2.dot(s.tangent) * s.tangent) / (speed * speed);
  s.curvature = k - k.dot(x) * x;
  return s;
}

}  // namespace

Arc circle_arc(const GeodesicCircle& c, double t0, double t1, int n) {
  if (n < 1) throw std::invalid_argument("arc needs at least one segment");
  const double r = c.radius();
  const Vec4& a = c.axis_a();
  const Vec4& b = c.axis_b();
  Arc arc;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + (t1 - t0) * i / n;
    const Vec4 ring = std::cos(t) * a + std::sin(t) * b;
    const Vec4 x = std::cos(r) * c.center().x() + std::sin(r) * ring;
    const Vec4 d1 = std::sin(r) * (-std::sin(t) * a + std::cos(t) * b) * (t1 > t0 ? 1.0 : -1.0);
    arc.samples.push_back(frame(x, d1, -std::sin(r) * ring));
  }
  return arc;
}

Arc level_set_arc(const TorusImmersion& m, const Equator& eq, const IntersectionCurve& c,
                  int first, int last) {
  const int np = static_cast<int>(c.points.size());
  if (np < 3 || first < 0 || last < 0 || first >= np || last >= np) {
    throw std::out_of_range("level-set arc indices out of range");
  }
  const int count = (last - first + np) % np + 1;
  Arc arc;
  for (int s = 0; s < count; ++s) {
    const int k = (first + s) % np;
    const CurvePoint& p = c.points[k];
    const Vec4& next = c.points[(k + 1) % np].x;
    const Vec4& prev = c.points[(k + np - 1) % np].x;
    const CurveFrame fr = curve_frame(m, eq, p.u, p.v);
    ArcSample a;
    a.x = fr.x;
    if (fr.grad_norm > 1e-5) {
      a.tangent = fr.tangent;
      a.curvature = fr.curvature_vector;
    } else {
      Vec4 t = next - prev;
      t -= t.dot(p.x) * p.x;
      a.tangent = t.normalized();
      const double kap = circle_fit_curvature(prev, p.x, next);
      Vec4 mid = 0.5 * (prev + next) - p.x;
      mid -= mid.dot(p.x) * p.x + mid.dot(a.tangent) * a.tangent;
      a.curvature = mid.norm() > 0 ? Vec4(kap * mid.normalized()) : Vec4(Vec4::Zero());
    }
    if (a.tangent.dot(next - prev) < 0) a.tangent = -a.tangent;
    arc.samples.push_back(a);
  }
  return arc;
}

Arc hermite_arc(const ArcSample& from, const ArcSample& to, int n) {
  if (n < 1) throw std::invalid_argument("arc needs at least one segment");
  const double s = std::acos(std::clamp(from.x.dot(to.x), -1.0, 1.0));
  const Vec4 p0 = from.x, v0 = s * from.tangent, a0 = s * s * from.curvature;
  const Vec4 p1 = to.x, v1 = s * to.tangent, a1 = s * s * to.curvature;
  using J = Taylor<1, 2>;
  Arc arc;
  for (int i = 0; i <= n; ++i) {
    const J t = J::variable(0, static_cast<double>(i) / n);
    const J t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const J h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const J h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const J h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const J h3 = 0.5 * t3 - t4 + 0.5 * t5;
    const J h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const J h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    V4<J> p;
    for (int c = 0; c < 4; ++c) {
      p[c] = h0 * p0[c] + h1 * v0[c] + h2 * a0[c] + h3 * a1[c] + h4 * v1[c] + h5 * p1[c];
    }
    const V4<J> g = normalized(p);
    Vec4 x, d1, d2;
    for (int c = 0; c < 4; ++c) {
      x[c] = g[c].value();
      d1[c] = g[c].d(0);
      d2[c] = g[c].d2(0, 0);
    }
    arc.samples.push_back(frame(x, d1, d2));
  }
  // Exact end data.
  arc.samples.front() = from;
  arc.samples.back() = to;
  return arc;
}

ClosedCurve curve_product(const Arc& mu, const Arc& nu) {
  if (mu.samples.size() < 2 || nu.samples.size() < 2) {
    throw std::invalid_argument("arcs need at least two samples");
  }
  const std::array<const ArcSample*, 2> ends{&mu.back(), &nu.back()};
  const std::array<const ArcSample*, 2> starts{&nu.front(), &mu.front()};
  ClosedCurve out;
  for (int j = 0; j < 2; ++j) {
    const double gap = (ends[j]->x - starts[j]->x).norm();
    if (gap > kJoinGapTol) {
      throw std::invalid_argument("arc endpoints do not match: gap " + fmt(gap));
    }
    out.tangent_jump[j] = (ends[j]->tangent - starts[j]->tangent).norm();
    out.curvature_jump[j] = (ends[j]->curvature - starts[j]->curvature).norm();
  }
  for (int j = 0; j < 2; ++j) {
    if (out.tangent_jump[j] > kJoinSmoothTol || out.curvature_jump[j] > kJoinSmoothTol) {
      throw NonSmoothJoinError("arcs do not join regularly: tangent jump " +
                               fmt(out.tangent_jump[j]) + ", curvature jump " +
                               fmt(out.curvature_jump[j]));
    }
  }
  out.samples = mu.samples;
  out.samples.insert(out.samples.end(), nu.samples.begin() + 1, nu.samples.end() - 1);
  const std::size_t n = out.samples.size();
  out.arclength.resize(n);
  out.min_curvature = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    out.arclength[i] = out.length;
    out.length += (out.samples[(i + 1) % n].x - out.samples[i].x).norm();
    const double k = out.samples[i].curvature.norm();
    out.max_curvature = std::max(out.max_curvature, k);
    out.min_curvature = std::min(out.min_curvature, k);
  }
  return out;
}

}  // namespace s3tori
