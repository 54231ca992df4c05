#include "s3tori/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "s3tori/errors.hpp"

namespace s3tori {

namespace {

constexpr double kRootTol = 1e-10;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double wrap_delta(double d) { return d - kTwoPi * std::round(d / kTwoPi); }

double frac(double x) { return x - std::floor(x); }

double param_distance(double u1, double v1, double u2, double v2) {
  return std::hypot(wrap_delta(u1 - u2), wrap_delta(v1 - v2));
}

struct HeightJet {
  double f, fu, fv, fuu, fuv, fvv;
  Vec4 x, xu, xv, xuu, xuv, xvv;
  double e, g_f, g;  // metric
};

HeightJet height_jet(const TorusImmersion& m, const Vec4& pole, double u, double v) {
  const auto j = m.jet2(u, v);
  HeightJet h;
  for (int c = 0; c < 4; ++c) {
    h.x[c] = j[c].value();
    h.xu[c] = j[c].d(0);
    h.xv[c] = j[c].d(1);
    h.xuu[c] = j[c].d2(0, 0);
    h.xuv[c] = j[c].d2(0, 1);
    h.xvv[c] = j[c].d2(1, 1);
  }
  h.f = pole.dot(h.x);
  h.fu = pole.dot(h.xu);
  h.fv = pole.dot(h.xv);
  h.fuu = pole.dot(h.xuu);
  h.fuv = pole.dot(h.xuv);
  h.fvv = pole.dot(h.xvv);
  h.e = h.xu.squaredNorm();
  h.g_f = h.xu.dot(h.xv);
  h.g = h.xv.squaredNorm();
  return h;
}

double metric_grad_norm(const HeightJet& h) {
  const double det = h.e * h.g - h.g_f * h.g_f;
  const double q = (h.g * h.fu * h.fu - 2 * h.g_f * h.fu * h.fv + h.e * h.fv * h.fv) / det;
  return std::sqrt(std::max(0.0, q));
}

// Root of phi on [a, b] given a sign change.
double bracket_root(const std::function<double(double)>& phi, double a, double b, double fa,
                    double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      phi, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  const double t1 = r.first, t2 = r.second;
  return std::abs(phi(t1)) <= std::abs(phi(t2)) ? t1 : t2;
}

struct Critical {
  bool ok = false;
  double u = 0, v = 0;
};

// Newton on grad f = 0 starting at (u, v).
Critical newton_critical(const TorusImmersion& m, const Vec4& pole, double u, double v,
                         double max_travel, int max_iter = 60) {
  const double u0 = u, v0 = v;
  for (int it = 0; it < max_iter; ++it) {
    const HeightJet h = height_jet(m, pole, u, v);
    const double det = h.fuu * h.fvv - h.fuv * h.fuv;
    const double scale = h.fuu * h.fuu + h.fvv * h.fvv + 2 * h.fuv * h.fuv;
    if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(det)) return {};
    const double du = -(h.fvv * h.fu - h.fuv * h.fv) / det;
    const double dv = -(-h.fuv * h.fu + h.fuu * h.fv) / det;
    u += du;
    v += dv;
    if (std::hypot(u - u0, v - v0) > max_travel) return {};
    if (std::hypot(du, dv) < 1e-14) return {true, u, v};
  }
  const HeightJet h = height_jet(m, pole, u, v);
  if (std::hypot(h.fu, h.fv) < 1e-11) return {true, u, v};
  return {};
}

TangencyPoint make_point(const TorusImmersion& m, const Vec4& pole, double u, double v) {
  const HeightJet h = height_jet(m, pole, u, v);
  TangencyPoint t;
  t.u = wrap_angle(u);
  t.v = wrap_angle(v);
  t.x = h.x;
  t.value = h.f;
  t.grad_norm = metric_grad_norm(h);
  t.hessian << h.fuu, h.fuv, h.fuv, h.fvv;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(t.hessian);
  for (int k = 0; k < 2; ++k) {
    if (es.eigenvalues()[k] > 0) ++t.positive;
    if (es.eigenvalues()[k] < 0) ++t.negative;
  }
  return t;
}

bool is_tangency(const TangencyPoint& t) {
  return std::abs(t.value) < kTangencyValueTol && t.grad_norm < kTangencyGradTol;
}

// Grid placement that keeps tracing well posed: a tangency sits inside a
// cell away from its edges, otherwise the saddle closest to the traced level
// sits on a node so both hyperbola branches cross the adjacent edges once.
struct GridPlan {
  double off_u = 0;
  double off_v = 0;
};

GridPlan plan_grid(const CriticalPointReport& cp, int n, double level) {
  const double h = kTwoPi / n;
  GridPlan plan;
  for (const auto& t : cp.critical) {
    if (std::abs(t.value - level) < kTangencyValueTol && t.grad_norm < kTangencyGradTol) {
      plan.off_u = frac(t.u / h - 0.37);
      plan.off_v = frac(t.v / h - 0.61);
      return plan;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : cp.critical) {
    if (!t.is_saddle()) continue;
    const double lam = t.hessian.cwiseAbs().maxCoeff();
    const double gap = std::abs(t.value - level);
    if (gap < lam * h * h && gap < best) {
      best = gap;
      plan.off_u = frac(t.u / h);
      plan.off_v = frac(t.v / h);
    }
  }
  return plan;
}

int sign_of(double f, double level) { return f > level ? 1 : 0; }

// Value deciding the connectivity of a four-crossing cell: f at the critical
// point inside the cell when Newton finds one, else at the cell center.
double saddle_value(const TorusImmersion& m, const Vec4& pole, const HeightGrid& g, int i, int j) {
  const double h = g.h();
  const double uc = g.u(i) + 0.5 * h, vc = g.v(j) + 0.5 * h;
  const Critical c = newton_critical(m, pole, uc, vc, h, 30);
  if (c.ok && std::abs(c.u - uc) <= 0.5 * h + 1e-12 && std::abs(c.v - vc) <= 0.5 * h + 1e-12) {
    return pole.dot(m.eval(c.u, c.v));
  }
  return pole.dot(m.eval(uc, vc));
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Components of {f > level} (which = +1) or {f <= level} (which = -1), or of
// both (which = 0), from a node labelling with the saddle-cell rule.
int count_regions(const TorusImmersion& m, const Vec4& pole, const HeightGrid& g, double level,
                  int which) {
  const int n = g.n;
  UnionFind uf(n * n);
  auto id = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int s = sign_of(g.at(i, j), level);
      if (sign_of(g.at(i + 1, j), level) == s) uf.unite(id(i, j), id(i + 1, j));
      if (sign_of(g.at(i, j + 1), level) == s) uf.unite(id(i, j), id(i, j + 1));
      const int sb = sign_of(g.at(i + 1, j), level);
      const int sc = sign_of(g.at(i + 1, j + 1), level);
      const int sd = sign_of(g.at(i, j + 1), level);
      if (s == sc && sb == sd && s != sb) {
        const double fs = saddle_value(m, pole, g, i, j);
        if (sign_of(fs, level) == s) {
          uf.unite(id(i, j), id(i + 1, j + 1));
        } else {
          uf.unite(id(i + 1, j), id(i, j + 1));
        }
      }
    }
  }
  std::vector<char> seen(n * n, 0);
  int count = 0;
  for (int k = 0; k < n * n; ++k) {
    const int s = sign_of(g.f[k], level);
    if (which == 1 && s != 1) continue;
    if (which == -1 && s != 0) continue;
    const int r = uf.find(k);
    if (!seen[r]) {
      seen[r] = 1;
      ++count;
    }
  }
  return count;
}

}  // namespace

// ---------------------------------------------------------------------------

HeightGrid height_grid(const TorusImmersion& m, const Equator& eq, int n, double offset_u,
                       double offset_v) {
  if (n < 32) throw std::invalid_argument("height grid resolution must be at least 32");
  HeightGrid g;
  g.n = n;
  g.offset_u = offset_u;
  g.offset_v = offset_v;
  g.f.resize(static_cast<std::size_t>(n) * n);
  const Vec4& pole = eq.pole().x();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.f[i * n + j] = pole.dot(m.eval(g.u(i), g.v(j)));
  }
  return g;
}

CurveFrame curve_frame(const TorusImmersion& m, const Equator& eq, double u, double v) {
  const HeightJet h = height_jet(m, eq.pole().x(), u, v);
  const double up = -h.fv, vp = h.fu;
  const double upp = -(h.fuv * up + h.fvv * vp);
  const double vpp = h.fuu * up + h.fuv * vp;
  const Vec4 d1 = h.xu * up + h.xv * vp;
  const Vec4 d2 = h.xuu * up * up + 2.0 * h.xuv * up * vp + h.xvv * vp * vp + h.xu * upp +
                  h.xv * vpp;
  CurveFrame fr;
  fr.x = h.x;
  fr.grad_norm = metric_grad_norm(h);
  const double s = d1.norm();
  if (!(s > 0.0)) return fr;
  fr.tangent = d1 / s;
  Vec4 k = (d2 - d2.dot(fr.tangent) * fr.tangent) / (s * s);
  k -= k.dot(h.x) * h.x;
  fr.curvature_vector = k;
  return fr;
}

double circle_fit_curvature(const Vec4& a, const Vec4& b, const Vec4& c) {
  const Vec4 p = b - a, q = c - a;
  const double la = (b - c).norm(), lb = q.norm(), lc = p.norm();
  const double w2 = p.squaredNorm() * q.squaredNorm() - std::pow(p.dot(q), 2);
  if (!(w2 > 0.0)) return 0.0;
  const double rho = la * lb * lc / (2.0 * std::sqrt(w2));
  return std::sqrt(std::max(0.0, 1.0 - rho * rho)) / rho;
}

// ---------------------------------------------------------------------------
// Tracing

namespace {

struct Tracer {
  const HeightGrid& g;
  const TorusImmersion& m;
  const Vec4 pole;
  const TraceOptions& opt;

  double f(double u, double v) const { return pole.dot(m.eval(u, v)); }

  void check_nodes() const {
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(g.at(i, j)) >= 1e-12) continue;
        const HeightJet h = height_jet(m, pole, g.u(i), g.v(j));
        if (metric_grad_norm(h) < kTangencyGradTol) {
          std::ostringstream os;
          os << "contour meets a critical grid node at (u, v) = (" << g.u(i) << ", " << g.v(j)
             << "); retry at double resolution";
          throw AmbiguousCellError(os.str());
        }
      }
    }
  }

  // Crossing on edge e: even ids run along u, odd ids along v.
  std::array<double, 2> crossing(int e) const {
    const int node = e / 2, n = g.n;
    const int i = node / n, j = node % n;
    const double u0 = g.u(i), v0 = g.v(j);
    const double du = (e % 2 == 0) ? g.h() : 0.0;
    const double dv = (e % 2 == 0) ? 0.0 : g.h();
    const double fa = g.at(i, j);
    const double fb = (e % 2 == 0) ? g.at(i + 1, j) : g.at(i, j + 1);
    auto phi = [&](double t) { return f(u0 + t * du, v0 + t * dv); };
    const double t = bracket_root(phi, 0.0, 1.0, fa, fb);
    return {u0 + t * du, v0 + t * dv};
  }

  std::vector<std::vector<std::array<double, 2>>> link() const {
    const int n = g.n;
    auto hid = [n](int i, int j) { return 2 * (((i % n + n) % n) * n + ((j % n + n) % n)); };
    auto vid = [n](int i, int j) { return 2 * (((i % n + n) % n) * n + ((j % n + n) % n)) + 1; };
    std::vector<std::array<int, 2>> links(2 * n * n, {-1, -1});
    auto add = [&](int a, int b) {
      for (int e : {a, b}) {
        const int other = (e == a) ? b : a;
        auto& l = links[e];
        if (l[0] < 0) {
          l[0] = other;
        } else if (l[1] < 0) {
          l[1] = other;
        } else {
          throw NumericalError("contour edge linked more than twice");
        }
      }
    };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int sa = sign_of(g.at(i, j), 0.0), sb = sign_of(g.at(i + 1, j), 0.0);
        const int sc = sign_of(g.at(i + 1, j + 1), 0.0), sd = sign_of(g.at(i, j + 1), 0.0);
        const int bottom = hid(i, j), right = vid(i + 1, j), top = hid(i, j + 1), left = vid(i, j);
        std::vector<int> cut;
        if (sa != sb) cut.push_back(bottom);
        if (sb != sc) cut.push_back(right);
        if (sd != sc) cut.push_back(top);
        if (sa != sd) cut.push_back(left);
        if (cut.size() == 2) {
          add(cut[0], cut[1]);
        } else if (cut.size() == 4) {
          const double fs = saddle_value(m, pole, g, i, j);
          if (sign_of(fs, 0.0) == sa) {
            add(bottom, right);
            add(top, left);
          } else {
            add(left, bottom);
            add(right, top);
          }
        }
      }
    }
    std::vector<std::vector<std::array<double, 2>>> loops;
    std::vector<char> used(links.size(), 0);
    for (int start = 0; start < static_cast<int>(links.size()); ++start) {
      if (used[start] || links[start][0] < 0) continue;
      if (links[start][1] < 0) throw NumericalError("open contour on a periodic grid");
      std::vector<std::array<double, 2>> loop;
      int prev = -1, cur = start;
      while (!used[cur]) {
        used[cur] = 1;
        auto p = crossing(cur);
        if (!loop.empty()) {
          p[0] = loop.back()[0] + wrap_delta(p[0] - loop.back()[0]);
          p[1] = loop.back()[1] + wrap_delta(p[1] - loop.back()[1]);
        }
        loop.push_back(p);
        const int next = (links[cur][0] != prev) ? links[cur][0] : links[cur][1];
        prev = cur;
        cur = next;
      }
      loops.push_back(std::move(loop));
    }
    return loops;
  }

  CurvePoint make(double u, double v, bool pinned) const {
    CurvePoint p;
    p.u = u;
    p.v = v;
    p.x = m.eval(u, v);
    p.pinned = pinned;
    return p;
  }

  // Point of the zero set on the perpendicular bisector of the parameter
  // chord a-b, nearest to the chord.
  std::optional<CurvePoint> bisect(const CurvePoint& a, const CurvePoint& b) const {
    const double um = 0.5 * (a.u + b.u), vm = 0.5 * (a.v + b.v);
    const double cu = b.u - a.u, cv = b.v - a.v;
    const double len = std::hypot(cu, cv);
    if (!(len > 0.0)) return std::nullopt;
    const double du = -cv / len, dv = cu / len;
    auto phi = [&](double t) { return f(um + t * du, vm + t * dv); };
    const double f0 = phi(0.0);
    if (std::abs(f0) < kRootTol) return make(um, vm, false);
    constexpr int kSteps = 256;
    const double step = len / kSteps;
    double prev_p = 0.0, prev_m = 0.0, fp = f0, fm = f0;
    for (int k = 1; k <= kSteps; ++k) {
      const double t = k * step;
      const double gp = phi(t), gm = phi(-t);
      if ((gp > 0) != (fp > 0)) {
        const double r = bracket_root(phi, prev_p, t, fp, gp);
        return make(um + r * du, vm + r * dv, false);
      }
      if ((gm > 0) != (fm > 0)) {
        const double r = bracket_root(phi, -t, prev_m, gm, fm);
        return make(um + r * du, vm + r * dv, false);
      }
      prev_p = t;
      prev_m = -t;
      fp = gp;
      fm = gm;
    }
    return std::nullopt;
  }

  static double turn(const CurvePoint& a, const CurvePoint& b, const CurvePoint& c) {
    const Vec4 p = b.x - a.x, q = c.x - b.x;
    const double np = p.norm(), nq = q.norm();
    if (!(np > 0 && nq > 0)) return 0.0;
    return std::acos(std::clamp(p.dot(q) / (np * nq), -1.0, 1.0));
  }

  // closing offset: the first point shifted by the curve's period.
  static CurvePoint shifted(CurvePoint p, double su, double sv) {
    p.u += su;
    p.v += sv;
    return p;
  }

  double point_curvature(const CurvePoint& p) const {
    const CurveFrame fr = curve_frame(m, Equator(SpherePoint::normalize(pole)), p.u, p.v);
    return fr.curvature_vector.norm();
  }

  void densify(std::vector<CurvePoint>& pts, double su, double sv) const {
    std::vector<char> final_seg(pts.size(), 0);
    for (auto& p : pts) p.curvature = p.pinned ? 0.0 : point_curvature(p);
    for (int pass = 0; pass < 64; ++pass) {
      const int np = static_cast<int>(pts.size());
      std::vector<CurvePoint> out;
      std::vector<char> out_final;
      out.reserve(2 * np);
      bool changed = false;
      auto at = [&](int k) {
        const int q = ((k % np) + np) % np;
        const int wraps = (k - q) / np;
        return shifted(pts[q], wraps * su, wraps * sv);
      };
      for (int k = 0; k < np; ++k) {
        const CurvePoint a = at(k), b = at(k + 1);
        out.push_back(pts[k]);
        out_final.push_back(1);
        if (final_seg[k]) continue;
        const double chord = (b.x - a.x).norm();
        if (chord <= opt.min_chord) continue;
        bool need = chord > opt.max_chord;
        if (!a.pinned && !b.pinned) {
          need = need || chord * std::max(a.curvature, b.curvature) > opt.max_turn;
          need = need || turn(at(k - 1), a, b) > opt.max_turn || turn(a, b, at(k + 2)) > opt.max_turn;
        }
        if (!need) continue;
        auto mid = bisect(a, b);
        if (!mid) continue;
        // The projected point must stay between its neighbors.
        if ((mid->x - a.x).norm() >= chord || (mid->x - b.x).norm() >= chord) continue;
        mid->curvature = point_curvature(*mid);
        out_final.back() = 0;
        out.push_back(*mid);
        out_final.push_back(0);
        changed = true;
      }
      if (static_cast<int>(out.size()) > opt.max_points) break;
      pts = std::move(out);
      final_seg = std::move(out_final);
      if (!changed) break;
    }
    // Curvature at pinned points from the neighboring samples.
    const int np = static_cast<int>(pts.size());
    for (int k = 0; k < np; ++k) {
      if (!pts[k].pinned) continue;
      const CurvePoint a = shifted(pts[(k + np - 1) % np], k == 0 ? -su : 0.0, k == 0 ? -sv : 0.0);
      const CurvePoint c = pts[(k + 1) % np];
      pts[k].curvature = circle_fit_curvature(a.x, pts[k].x, c.x);
    }
  }
};

struct Arc {
  std::vector<std::array<double, 2>> p;  // unwrapped, first and last are pins
  int pin_start = -1;
  int pin_end = -1;
};

struct Loop {
  std::vector<std::array<double, 2>> p;
  std::vector<int> pin;  // pin index per point or -1
};

// Inserts pins where a loop passes near a tangency.
void splice_pins(Loop& loop, const std::vector<std::array<double, 2>>& pins, double radius) {
  const int np = static_cast<int>(loop.p.size());
  loop.pin.assign(np, -1);
  for (int q = 0; q < static_cast<int>(pins.size()); ++q) {
    std::vector<char> near(np, 0);
    bool any = false;
    for (int k = 0; k < np; ++k) {
      near[k] = param_distance(loop.p[k][0], loop.p[k][1], pins[q][0], pins[q][1]) < radius;
      any = any || near[k];
    }
    if (!any) continue;
    // Runs of consecutive near points, cyclically.
    int start = 0;
    while (start < np && near[start]) ++start;
    if (start == np) start = 0;
    for (int s = 0; s < np; ++s) {
      const int k = (start + s) % np;
      if (!near[k] || (s > 0 && near[(k + np - 1) % np])) continue;
      int best = k;
      double best_d = std::numeric_limits<double>::infinity();
      for (int r = 0; r < np && near[(k + r) % np]; ++r) {
        const int idx = (k + r) % np;
        const double d = param_distance(loop.p[idx][0], loop.p[idx][1], pins[q][0], pins[q][1]);
        if (d < best_d) {
          best_d = d;
          best = idx;
        }
      }
      auto& pt = loop.p[best];
      pt[0] += wrap_delta(pins[q][0] - pt[0]);
      pt[1] += wrap_delta(pins[q][1] - pt[1]);
      loop.pin[best] = q;
    }
  }
}

// Joins arcs straight through each pin: of the four arms meeting there, the
// pairing with the most opposed directions is kept.
std::optional<std::vector<Loop>> straight_through(const std::vector<Loop>& loops, int pin_count,
                                                  const TorusImmersion& m,
                                                  const std::vector<std::array<double, 2>>& pins) {
  std::vector<Loop> out;
  std::vector<Arc> arcs;
  for (const auto& L : loops) {
    const int np = static_cast<int>(L.p.size());
    int first = -1;
    for (int k = 0; k < np; ++k)
      if (L.pin[k] >= 0) {
        first = k;
        break;
      }
    if (first < 0) {
      out.push_back(L);
      continue;
    }
    // Unwrapped traversal starting at the first pin, one full period.
    const double su = L.p[np - 1][0] + wrap_delta(L.p[0][0] - L.p[np - 1][0]) - L.p[0][0];
    const double sv = L.p[np - 1][1] + wrap_delta(L.p[0][1] - L.p[np - 1][1]) - L.p[0][1];
    Arc cur;
    for (int s = 0; s <= np; ++s) {
      const int k = (first + s) % np;
      const int wraps = (first + s) / np;
      std::array<double, 2> pt{L.p[k][0] + wraps * su, L.p[k][1] + wraps * sv};
      cur.p.push_back(pt);
      if (L.pin[k] >= 0) {
        if (s == 0) {
          cur.pin_start = L.pin[k];
        } else {
          cur.pin_end = L.pin[k];
          arcs.push_back(cur);
          cur = Arc{};
          cur.p.push_back(pt);
          cur.pin_start = L.pin[k];
        }
      }
    }
  }
  if (arcs.empty()) return out;

  struct Arm {
    int arc;
    bool at_start;
    Eigen::Vector2d dir;
  };
  std::vector<std::vector<Arm>> arms(pin_count);
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
    const auto& P = arcs[a].p;
    if (P.size() < 2) return std::nullopt;
    const Eigen::Vector2d ds(P[1][0] - P[0][0], P[1][1] - P[0][1]);
    const auto n2 = P.size();
    const Eigen::Vector2d de(P[n2 - 2][0] - P[n2 - 1][0], P[n2 - 2][1] - P[n2 - 1][1]);
    arms[arcs[a].pin_start].push_back({a, true, ds});
    arms[arcs[a].pin_end].push_back({a, false, de});
  }
  // partner[arc][end] = (arc, end)
  std::vector<std::array<std::pair<int, bool>, 2>> partner(arcs.size());
  for (int q = 0; q < pin_count; ++q) {
    if (arms[q].empty()) continue;
    if (arms[q].size() != 4) return std::nullopt;
    const auto g = metric(m, pins[q][0], pins[q][1]);
    Eigen::Matrix2d gm;
    gm << g[0], g[1], g[1], g[2];
    auto cosang = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
      return a.dot(gm * b) / std::sqrt(a.dot(gm * a) * b.dot(gm * b));
    };
    const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int pi = 0; pi < 3; ++pi) {
      const auto& pr = pairings[pi];
      const double s = cosang(arms[q][pr[0]].dir, arms[q][pr[1]].dir) +
                       cosang(arms[q][pr[2]].dir, arms[q][pr[3]].dir);
      if (s < best_score) {
        best_score = s;
        best = pi;
      }
    }
    const auto& pr = pairings[best];
    for (int h = 0; h < 2; ++h) {
      const Arm& x = arms[q][pr[2 * h]];
      const Arm& y = arms[q][pr[2 * h + 1]];
      partner[x.arc][x.at_start ? 0 : 1] = {y.arc, y.at_start};
      partner[y.arc][y.at_start ? 0 : 1] = {x.arc, x.at_start};
    }
  }
  std::vector<char> used(arcs.size(), 0);
  for (int a0 = 0; a0 < static_cast<int>(arcs.size()); ++a0) {
    if (used[a0]) continue;
    Loop L;
    int a = a0;
    bool forward = true;
    while (!used[a]) {
      used[a] = 1;
      std::vector<std::array<double, 2>> P = arcs[a].p;
      int ps = arcs[a].pin_start, pe = arcs[a].pin_end;
      if (!forward) {
        std::reverse(P.begin(), P.end());
        std::swap(ps, pe);
      }
      double su = 0, sv = 0;
      if (!L.p.empty()) {
        su = L.p.back()[0] - P[0][0];
        sv = L.p.back()[1] - P[0][1];
        su = kTwoPi * std::round(su / kTwoPi);
        sv = kTwoPi * std::round(sv / kTwoPi);
      }
      const std::size_t skip = L.p.empty() ? 0 : 1;
      for (std::size_t k = skip; k + 1 < P.size(); ++k) {
        L.p.push_back({P[k][0] + su, P[k][1] + sv});
        L.pin.push_back(k == 0 ? ps : -1);
      }
      // Arrive at pin pe; continue through the partner arm.
      const auto nxt = partner[a][forward ? 1 : 0];
      a = nxt.first;
      forward = nxt.second;
      L.p.push_back({P.back()[0] + su, P.back()[1] + sv});
      L.pin.push_back(pe);
      if (used[a]) break;
    }
    // The loop ends on the pin it started from; drop the duplicate.
    if (L.p.size() > 1) {
      L.p.pop_back();
      L.pin.pop_back();
    }
    out.push_back(std::move(L));
  }
  return out;
}

// A loop through the same pin twice is a figure eight; the two touching
// curves are its halves between the visits.
std::vector<Loop> split_double_visits(std::vector<Loop> loops) {
  std::vector<Loop> out;
  while (!loops.empty()) {
    Loop L = std::move(loops.back());
    loops.pop_back();
    const int np = static_cast<int>(L.p.size());
    int a = -1, b = -1;
    for (int i = 0; i < np && b < 0; ++i) {
      if (L.pin[i] < 0) continue;
      for (int k = i + 1; k < np; ++k) {
        if (L.pin[k] == L.pin[i]) {
          a = i;
          b = k;
          break;
        }
      }
    }
    if (b < 0) {
      out.push_back(std::move(L));
      continue;
    }
    Loop first, second;
    for (int k = a; k < b; ++k) {
      first.p.push_back(L.p[k]);
      first.pin.push_back(L.pin[k]);
    }
    const double su = L.p[np - 1][0] + wrap_delta(L.p[0][0] - L.p[np - 1][0]) - L.p[0][0];
    const double sv = L.p[np - 1][1] + wrap_delta(L.p[0][1] - L.p[np - 1][1]) - L.p[0][1];
    for (int k = b; k < np; ++k) {
      second.p.push_back(L.p[k]);
      second.pin.push_back(L.pin[k]);
    }
    for (int k = 0; k < a; ++k) {
      second.p.push_back({L.p[k][0] + su, L.p[k][1] + sv});
      second.pin.push_back(L.pin[k]);
    }
    loops.push_back(std::move(first));
    loops.push_back(std::move(second));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::array<double, 2> period_of(const std::vector<CurvePoint>& pts) {
  const auto& a = pts.back();
  const auto& b = pts.front();
  const double su = a.u + wrap_delta(b.u - a.u) - b.u;
  const double sv = a.v + wrap_delta(b.v - a.v) - b.v;
  return {su, sv};
}

}  // namespace

std::vector<IntersectionCurve> trace_zero_set(const HeightGrid& grid, const TorusImmersion& m,
                                              const Equator& eq, const TraceOptions& opt) {
  Tracer tr{grid, m, eq.pole().x(), opt};
  tr.check_nodes();
  const auto raw = tr.link();

  std::vector<Loop> loops;
  for (const auto& r : raw) {
    Loop L;
    L.p = r;
    splice_pins(L, opt.pins, 1.5 * grid.h());
    loops.push_back(std::move(L));
  }
  bool has_pin = false;
  for (const auto& L : loops)
    for (int q : L.pin) has_pin = has_pin || q >= 0;
  if (has_pin) {
    // Fix the orientation of each branch pair before densification: routing
    // uses the coarse polyline directions at the pins.
    auto joined = straight_through(loops, static_cast<int>(opt.pins.size()), m, opt.pins);
    if (joined) loops = std::move(*joined);
    loops = split_double_visits(std::move(loops));
  }

  std::vector<IntersectionCurve> curves;
  for (auto& L : loops) {
    std::vector<CurvePoint> pts;
    pts.reserve(L.p.size());
    for (std::size_t k = 0; k < L.p.size(); ++k) {
      pts.push_back(tr.make(L.p[k][0], L.p[k][1], L.pin[k] >= 0));
    }
    if (pts.size() < 3) continue;
    const auto per = period_of(pts);
    tr.densify(pts, per[0], per[1]);

    IntersectionCurve c;
    c.points = std::move(pts);
    for (std::size_t k = 0; k < L.p.size(); ++k) {
      if (L.pin[k] >= 0 &&
          std::find(c.tangencies.begin(), c.tangencies.end(), L.pin[k]) == c.tangencies.end()) {
        c.tangencies.push_back(L.pin[k]);
      }
    }
    std::sort(c.tangencies.begin(), c.tangencies.end());
    const int np = static_cast<int>(c.points.size());
    c.max_curvature = 0.0;
    c.min_curvature = std::numeric_limits<double>::infinity();
    for (int k = 0; k < np; ++k) {
      c.length += (c.points[(k + 1) % np].x - c.points[k].x).norm();
      c.max_curvature = std::max(c.max_curvature, c.points[k].curvature);
      c.min_curvature = std::min(c.min_curvature, c.points[k].curvature);
    }
    c.winding = winding_class(c);
    curves.push_back(std::move(c));
  }
  return curves;
}

std::array<int, 2> winding_class(const IntersectionCurve& c) {
  if (c.points.size() < 2) throw NumericalError("winding of a degenerate curve");
  const auto per = period_of(c.points);
  std::array<int, 2> w{};
  for (int k = 0; k < 2; ++k) {
    const double t = per[k] / kTwoPi;
    const double r = std::round(t);
    if (std::abs(t - r) >= 0.1) {
      throw NumericalError("winding residual too large; increase the tracing resolution");
    }
    w[k] = static_cast<int>(r);
  }
  return w;
}

// ---------------------------------------------------------------------------

CriticalPointReport find_critical_points(const TorusImmersion& m, const Equator& eq, int n) {
  const Vec4& pole = eq.pole().x();
  const double h = kTwoPi / n;
  std::vector<double> g2(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto x = m.jet1(i * h, j * h);
      double fu = 0, fv = 0;
      for (int c = 0; c < 4; ++c) {
        fu += pole[c] * x[c].d(0);
        fv += pole[c] * x[c].d(1);
      }
      g2[i * n + j] = fu * fu + fv * fv;
    }
  }
  auto at = [&](int i, int j) { return g2[((i % n + n) % n) * n + ((j % n + n) % n)]; };
  CriticalPointReport rep;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double o = at(i + di, j + dj);
          // ties go to the lexicographically first node
          if (o < c || (o == c && (di < 0 || (di == 0 && dj < 0)))) {
            is_min = false;
            break;
          }
        }
      }
      if (!is_min) continue;
      const Critical cr = newton_critical(m, pole, i * h, j * h, 4.0 * h);
      if (!cr.ok) {
        ++rep.divergences;
        continue;
      }
      const TangencyPoint t = make_point(m, pole, cr.u, cr.v);
      bool dup = false;
      for (const auto& o : rep.critical) dup = dup || param_distance(o.u, o.v, t.u, t.v) < 1e-6;
      if (!dup) rep.critical.push_back(t);
    }
  }
  for (const auto& t : rep.critical)
    if (is_tangency(t)) rep.tangencies.push_back(t);
  return rep;
}

std::vector<TangencyPoint> find_tangencies(const TorusImmersion& m, const Equator& eq) {
  return find_critical_points(m, eq).tangencies;
}

double crossing_angle(const TorusImmersion& m, const TangencyPoint& t) {
  const auto g = metric(m, t.u, t.v);
  const double a = t.hessian(0, 0), b = t.hessian(0, 1), c = t.hessian(1, 1);
  // Null directions of a x^2 + 2 b x y + c y^2.
  std::array<Eigen::Vector2d, 2> d;
  const double disc = b * b - a * c;
  if (disc < 0) throw NumericalError("tangency is not a saddle");
  const double s = std::sqrt(disc);
  if (std::abs(a) >= std::abs(c)) {
    d[0] = Eigen::Vector2d(-b + s, a);
    d[1] = Eigen::Vector2d(-b - s, a);
  } else {
    d[0] = Eigen::Vector2d(c, -b + s);
    d[1] = Eigen::Vector2d(c, -b - s);
  }
  Eigen::Matrix2d gm;
  gm << g[0], g[1], g[1], g[2];
  const double cosang =
      d[0].dot(gm * d[1]) / std::sqrt(d[0].dot(gm * d[0]) * d[1].dot(gm * d[1]));
  return std::acos(std::min(1.0, std::abs(cosang)));
}

std::string to_string(IntersectionType t) {
  switch (t) {
    case IntersectionType::kType1: return "1";
    case IntersectionType::kType2: return "2";
    case IntersectionType::kType3: return "3";
    case IntersectionType::kType4: return "4";
    default: return "unclassified";
  }
}

void require_negative_curvature(const TorusImmersion& m, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = kTwoPi * i / n, v = kTwoPi * j / n;
      const CurvatureSample s = curvatures(m, u, v);
      if (!(s.S < 0.0)) {
        std::ostringstream os;
        os << "Gauss-Kronecker curvature S = " << s.S << " >= 0 at (u, v) = (" << u << ", " << v
           << "); the classification needs S < 0 everywhere";
        throw PreconditionError(os.str());
      }
    }
  }
}

namespace {

IntersectionType decide(const std::vector<IntersectionCurve>& curves, int tangencies) {
  if (tangencies == 0) {
    if (curves.size() == 1 && curves[0].winding == std::array<int, 2>{0, 0}) {
      return IntersectionType::kType1;
    }
    if (curves.size() == 2) {
      const auto a = curves[0].winding, b = curves[1].winding;
      const bool nonzero = a != std::array<int, 2>{0, 0};
      const bool same = a == b || (a[0] == -b[0] && a[1] == -b[1]);
      if (nonzero && same) return IntersectionType::kType2;
    }
    return IntersectionType::kUnclassified;
  }
  if (curves.size() != 2) return IntersectionType::kUnclassified;
  for (const auto& c : curves) {
    if (static_cast<int>(c.tangencies.size()) != tangencies) return IntersectionType::kUnclassified;
  }
  if (tangencies == 1) return IntersectionType::kType3;
  if (tangencies == 2) return IntersectionType::kType4;
  return IntersectionType::kUnclassified;
}

int count_with(const TorusImmersion& m, const Equator& eq, int n, const CriticalPointReport& cp) {
  const Vec4& pole = eq.pole().x();
  if (cp.tangencies.empty()) {
    const GridPlan plan = plan_grid(cp, n, 0.0);
    const HeightGrid g = height_grid(m, eq, n, plan.off_u, plan.off_v);
    return count_regions(m, pole, g, 0.0, 0);
  }
  // Across a tangency the open sets {f > 0} and {f < 0} match {f > eps} and
  // {f < -eps} for eps above the tangency tolerance.
  constexpr double eps = 1e-6;
  const GridPlan pp = plan_grid(cp, n, eps);
  const HeightGrid gp = height_grid(m, eq, n, pp.off_u, pp.off_v);
  const GridPlan pm = plan_grid(cp, n, -eps);
  const HeightGrid gm = height_grid(m, eq, n, pm.off_u, pm.off_v);
  return count_regions(m, pole, gp, eps, 1) + count_regions(m, pole, gm, -eps, -1);
}

}  // namespace

Classifier::Classifier(SurfacePtr m, ClassifyOptions opt) : m_(std::move(m)), opt_(std::move(opt)) {
  require_negative_curvature(*m_);
}

IntersectionReport Classifier::classify(const Equator& eq) const {
  const TorusImmersion& m = *m_;
  IntersectionReport rep;
  rep.equator = eq.pole().x();
  const CriticalPointReport cp = find_critical_points(m, eq);
  rep.tangencies = cp.tangencies;
  rep.newton_divergences = cp.divergences;
  TraceOptions topt = opt_.trace;
  topt.pins.clear();
  for (const auto& t : cp.tangencies) topt.pins.push_back({t.u, t.v});

  for (int attempt = 0;; ++attempt) {
    const int n = opt_.resolution << attempt;
    GridPlan plan = plan_grid(cp, n, 0.0);
    if (attempt > 0) {
      plan.off_u = frac(plan.off_u + 0.5);
      plan.off_v = frac(plan.off_v + 0.5);
    }
    try {
      const HeightGrid g = height_grid(m, eq, n, plan.off_u, plan.off_v);
      rep.curves = trace_zero_set(g, m, eq, topt);
      rep.resolution = n;
      break;
    } catch (const AmbiguousCellError&) {
      if (attempt >= opt_.max_retries) throw;
    }
  }
  for (const auto& t : rep.tangencies) {
    rep.crossing_angles.push_back(t.is_saddle() ? crossing_angle(m, t) : 0.0);
  }
  rep.type = decide(rep.curves, static_cast<int>(rep.tangencies.size()));
  rep.component_count = count_with(m, eq, opt_.resolution, cp);
  return rep;
}

IntersectionReport classify(SurfacePtr m, const Equator& eq, const ClassifyOptions& opt) {
  return Classifier(std::move(m), opt).classify(eq);
}

int component_count(const TorusImmersion& m, const Equator& eq, int n) {
  const CriticalPointReport cp = find_critical_points(m, eq);
  if (!cp.tangencies.empty()) {
    std::ostringstream os;
    os << "equator is tangent to the surface at (u, v) = (" << cp.tangencies[0].u << ", "
       << cp.tangencies[0].v << ")";
    throw TangentEquatorError(os.str());
  }
  return count_with(m, eq, n, cp);
}

int component_count_allow_tangent(const TorusImmersion& m, const Equator& eq, int n) {
  return count_with(m, eq, n, find_critical_points(m, eq));
}

std::vector<Vec4> scan_poles(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec4> out;
  out.reserve(samples);
  while (static_cast<int>(out.size()) < samples) {
    Vec4 x(normal(rng), normal(rng), normal(rng), normal(rng));
    const double r = x.norm();
    if (r < 1e-12) continue;
    out.push_back(x / r);
  }
  return out;
}

ScanReport scan_two_piece(SurfacePtr m, int samples, std::uint64_t seed, const ScanOptions& opt) {
  if (samples < 1) throw std::invalid_argument("scan needs at least one sample");
  ScanReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.resolution = opt.resolution;
  std::optional<Classifier> classifier;
  if (opt.classify_types) {
    ClassifyOptions co;
    co.resolution = opt.resolution;
    classifier.emplace(m, co);
  }
  const auto poles = scan_poles(samples, seed);
  for (int k = 0; k < samples; ++k) {
    const Equator eq(SpherePoint::normalize(poles[k]));
    try {
      int count = 0;
      if (classifier) {
        const IntersectionReport r = classifier->classify(eq);
        ++rep.type_histogram[to_string(r.type)];
        count = r.component_count;
      } else {
        count = component_count_allow_tangent(*m, eq, opt.resolution);
      }
      ++rep.count_histogram[count];
      if (count != 2) rep.failures.push_back({k, poles[k], count, ""});
    } catch (const NumericalError& e) {
      rep.failures.push_back({k, poles[k], 0, e.what()});
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

Type2Search find_type2_equator(SurfacePtr m, const ClassifyOptions& opt) {
  const Classifier classifier(m, opt);
  const double u0 = 0.0, v0 = 0.0;
  const auto j = m->jet2(u0, v0);
  Vec4 xu, xv;
  for (int c = 0; c < 4; ++c) {
    xu[c] = j[c].d(0);
    xv[c] = j[c].d(1);
  }
  const auto nrm = unit_normal(*m, u0, v0);
  const Vec4 normal(nrm[0], nrm[1], nrm[2], nrm[3]);

  // Principal directions: eigenvectors of -g^{-1} II.
  const HeightJet h = height_jet(*m, normal, u0, v0);
  Eigen::Matrix2d gm, ii;
  gm << h.e, h.g_f, h.g_f, h.g;
  ii << h.fuu, h.fuv, h.fuv, h.fvv;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(ii, gm);
  std::array<Vec4, 2> dirs;
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2d a = es.eigenvectors().col(k);
    dirs[k] = (a[0] * xu + a[1] * xv).normalized();
  }

  Type2Search best;
  IntersectionType seen = IntersectionType::kUnclassified;
  auto try_pole = [&](const Vec4& p, double angle, int steps) -> bool {
    IntersectionType t = IntersectionType::kUnclassified;
    try {
      t = classifier.classify(Equator(SpherePoint::normalize(p))).type;
    } catch (const NumericalError&) {
      return false;
    }
    if (t != IntersectionType::kUnclassified) seen = t;
    if (t == IntersectionType::kType2) {
      best = {SpherePoint::normalize(p).x(), angle, steps, t};
      return true;
    }
    return false;
  };
  int steps = 1;
  if (try_pole(normal, 0.0, steps)) return best;
  // Rotating S(N) about the geodesic through p along t turns N toward w.
  for (int k = 0; k < 2; ++k) {
    const Vec4& w = dirs[1 - k];
    for (double angle = kPi / 64; angle >= 1e-6 && steps < 60; angle *= 0.5) {
      for (double sgn : {1.0, -1.0}) {
        ++steps;
        const Vec4 p = std::cos(angle) * normal + sgn * std::sin(angle) * w;
        if (try_pole(p, sgn * angle, steps)) return best;
        if (steps >= 60) break;
      }
    }
  }
  std::ostringstream os;
  os << "no type-2 equator found after " << steps << " classifications (last type "
     << to_string(seen) << ")";
  throw NotFoundError(os.str());
}

// ---------------------------------------------------------------------------

namespace {

bool segments_cross(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  auto cross = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() * b.y() - a.y() * b.x();
  };
  const Eigen::Vector2d r = p2 - p1, s = q2 - q1;
  const double den = cross(r, s);
  if (std::abs(den) < 1e-300) return false;
  const double t = cross(q1 - p1, s) / den;
  const double w = cross(q1 - p1, r) / den;
  return t > 1e-12 && t < 1 - 1e-12 && w > 1e-12 && w < 1 - 1e-12;
}

void check_embedded(const IntersectionCurve& c) {
  const int np = static_cast<int>(c.points.size());
  const auto per = period_of(c.points);
  struct Seg {
    Eigen::Vector2d a, b;
  };
  std::vector<Seg> segs(np);
  double max_len = 0;
  for (int k = 0; k < np; ++k) {
    const auto& p = c.points[k];
    const auto& q = c.points[(k + 1) % np];
    Eigen::Vector2d a(wrap_angle(p.u), wrap_angle(p.v));
    Eigen::Vector2d d(q.u - p.u + (k + 1 == np ? per[0] : 0.0),
                      q.v - p.v + (k + 1 == np ? per[1] : 0.0));
    segs[k] = {a, a + d};
    max_len = std::max(max_len, d.norm());
  }
  const double cell = std::max(max_len, kTwoPi / 1024);
  const int nc = std::max(1, static_cast<int>(kTwoPi / cell));
  const double cs = kTwoPi / nc;
  std::unordered_map<long long, std::vector<int>> bins;
  auto key = [nc](int i, int j) {
    return static_cast<long long>(((i % nc) + nc) % nc) * nc + (((j % nc) + nc) % nc);
  };
  for (int k = 0; k < np; ++k) {
    const auto& s = segs[k];
    const int i0 = static_cast<int>(std::floor(std::min(s.a.x(), s.b.x()) / cs));
    const int i1 = static_cast<int>(std::floor(std::max(s.a.x(), s.b.x()) / cs));
    const int j0 = static_cast<int>(std::floor(std::min(s.a.y(), s.b.y()) / cs));
    const int j1 = static_cast<int>(std::floor(std::max(s.a.y(), s.b.y()) / cs));
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) bins[key(i, j)].push_back(k);
  }
  for (const auto& [kk, list] : bins) {
    for (std::size_t x = 0; x < list.size(); ++x) {
      for (std::size_t y = x + 1; y < list.size(); ++y) {
        const int a = list[x], b = list[y];
        if (std::abs(a - b) <= 1 || std::abs(a - b) == np - 1) continue;
        // compare with periodic copies of b
        for (int su = -1; su <= 1; ++su) {
          for (int sv = -1; sv <= 1; ++sv) {
            const Eigen::Vector2d sh(su * kTwoPi, sv * kTwoPi);
            if (segments_cross(segs[a].a, segs[a].b, segs[b].a + sh, segs[b].b + sh)) {
              throw SelfIntersectionError("traced curve is not embedded");
            }
          }
        }
      }
    }
  }
}

}  // namespace

CurvatureProfile curvature_profile(const TorusImmersion& m, const Equator& eq,
                                   const IntersectionCurve& c, int samples) {
  const int np = static_cast<int>(c.points.size());
  if (np < 64) throw std::invalid_argument("curvature profile needs at least 64 points");
  if (samples < 8) throw std::invalid_argument("curvature profile needs at least 8 samples");
  check_embedded(c);
  const auto per = period_of(c.points);
  std::vector<double> cum(np + 1, 0.0);
  for (int k = 0; k < np; ++k) cum[k + 1] = cum[k] + (c.points[(k + 1) % np].x - c.points[k].x).norm();
  CurvatureProfile prof;
  prof.length = cum[np];
  const Vec4& pole = eq.pole().x();
  std::vector<Vec4> xs(samples);
  int seg = 0;
  for (int s = 0; s < samples; ++s) {
    const double target = prof.length * s / samples;
    while (seg + 1 < np && cum[seg + 1] < target) ++seg;
    const auto& a = c.points[seg];
    CurvePoint b = c.points[(seg + 1) % np];
    if (seg + 1 == np) {
      b.u += per[0];
      b.v += per[1];
    }
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0 ? (target - cum[seg]) / len : 0.0;
    double u = a.u + t * (b.u - a.u), v = a.v + t * (b.v - a.v);
    // Back onto f = 0 along the gradient.
    bool projected = true;
    for (int it = 0; it < 8; ++it) {
      const HeightJet h = height_jet(m, pole, u, v);
      const double g2 = h.fu * h.fu + h.fv * h.fv;
      if (std::abs(h.f) < 1e-13) break;
      if (g2 < 1e-16) {
        projected = false;
        break;
      }
      u -= h.f * h.fu / g2;
      v -= h.f * h.fv / g2;
    }
    xs[s] = projected ? m.eval(u, v) : Vec4(((1 - t) * a.x + t * b.x).normalized());
  }
  std::vector<double> kap(samples);
  for (int s = 0; s < samples; ++s) {
    kap[s] = circle_fit_curvature(xs[(s + samples - 1) % samples], xs[s], xs[(s + 1) % samples]);
  }
  prof.curvature = kap;
  prof.max_curvature = *std::max_element(kap.begin(), kap.end());
  prof.min_curvature = *std::min_element(kap.begin(), kap.end());
  return prof;
}

bool curves_congruent(const CurvatureProfile& a, const CurvatureProfile& b, double tol) {
  if (a.curvature.size() != b.curvature.size()) {
    throw std::invalid_argument("profiles have different sample counts");
  }
  if (std::abs(a.length - b.length) > tol) return false;
  const int n = static_cast<int>(a.curvature.size());
  auto sample_b = [&](double x) {
    const double w = x - n * std::floor(x / n);
    const int i = static_cast<int>(std::floor(w)) % n;
    const double t = w - std::floor(w);
    return (1 - t) * b.curvature[i] + t * b.curvature[(i + 1) % n];
  };
  for (int reflect = 0; reflect < 2; ++reflect) {
    for (int shift = 0; shift < n; ++shift) {
      for (int sub = -5; sub <= 5; ++sub) {
        const double off = shift + 0.1 * sub;
        double worst = 0;
        for (int k = 0; k < n && worst <= tol; ++k) {
          const double x = reflect ? off - k : off + k;
          worst = std::max(worst, std::abs(a.curvature[k] - sample_b(x)));
        }
        if (worst <= tol) return true;
      }
    }
  }
  return false;
}

}  // namespace s3tori
