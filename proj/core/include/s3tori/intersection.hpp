#pragma once

// Slices S(v) ∩ M traced on the parameter torus.
//
// The height f(u, v) = <v, X(u, v)> is sampled on a periodic grid, its zero
// set is linked by marching squares, refined onto f = 0 and densified until
// the polyline follows the curvature. Critical points of f come from Newton's
// method on grad f = 0; those on the zero set are tangencies. At a tangency
// the four arms of the "x" are joined straight through, so every reported
// curve is regular.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "s3tori/sphere.hpp"
#include "s3tori/surface.hpp"

namespace s3tori {

struct HeightGrid {
  int n = 0;
  // Node (i, j) sits at u = (i + offset_u) h, v = (j + offset_v) h, h = 2pi/n.
  double offset_u = 0;
  double offset_v = 0;
  std::vector<double> f;  // row-major, i * n + j

  double h() const { return kTwoPi / n; }
  double u(int i) const { return (i + offset_u) * h(); }
  double v(int j) const { return (j + offset_v) * h(); }
  double at(int i, int j) const {
    i %= n;
    j %= n;
    if (i < 0) i += n;
    if (j < 0) j += n;
    return f[i * n + j];
  }
};

// Throws std::invalid_argument unless n >= 32.
HeightGrid height_grid(const TorusImmersion& m, const Equator& eq, int n, double offset_u = 0.0,
                       double offset_v = 0.0);

struct CurvePoint {
  double u = 0;  // unwrapped along the curve
  double v = 0;
  Vec4 x = Vec4::Zero();
  double curvature = 0;  // geodesic curvature in S(v)
  bool pinned = false;   // a tangency point
};

struct IntersectionCurve {
  std::vector<CurvePoint> points;  // closed: the last point connects to the first
  std::array<int, 2> winding{0, 0};
  double length = 0;
  double max_curvature = 0;
  double min_curvature = 0;
  std::vector<int> tangencies;  // indices into the report's tangency list
};

struct TraceOptions {
  double max_chord = 0.05;     // ambient chord length
  double max_turn = 0.035;     // radians between consecutive chords
  double min_chord = 1e-9;
  int max_points = 400000;
  // Exact tangency locations (u, v); curves passing nearby are routed
  // through them.
  std::vector<std::array<double, 2>> pins;
};

// Throws AmbiguousCellError when the contour passes within 1e-12 of a node
// with vanishing gradient.
std::vector<IntersectionCurve> trace_zero_set(const HeightGrid& grid, const TorusImmersion& m,
                                              const Equator& eq, const TraceOptions& opt = {});

struct TangencyPoint {
  double u = 0;
  double v = 0;
  Vec4 x = Vec4::Zero();
  double value = 0;      // f at the point
  double grad_norm = 0;  // |grad f| in the induced metric
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  int positive = 0;  // Hessian signature
  int negative = 0;
  bool is_saddle() const { return positive == 1 && negative == 1; }
};

struct CriticalPointReport {
  std::vector<TangencyPoint> critical;    // all refined critical points of f
  std::vector<TangencyPoint> tangencies;  // those on the zero set
  int divergences = 0;                    // Newton runs dropped
};

inline constexpr double kTangencyValueTol = 1e-8;
inline constexpr double kTangencyGradTol = 1e-6;

// Newton on grad f = 0 from local minima of |grad f| on an n x n grid.
CriticalPointReport find_critical_points(const TorusImmersion& m, const Equator& eq, int n = 64);

std::vector<TangencyPoint> find_tangencies(const TorusImmersion& m, const Equator& eq);

// Rounded unwrapped displacement / 2pi; throws NumericalError if either
// rounding residual reaches 0.1.
std::array<int, 2> winding_class(const IntersectionCurve& c);

// Angle in [0, pi/2] between the two branches of the zero set at a saddle.
double crossing_angle(const TorusImmersion& m, const TangencyPoint& t);

enum class IntersectionType { kType1 = 1, kType2 = 2, kType3 = 3, kType4 = 4, kUnclassified = 0 };

std::string to_string(IntersectionType t);

struct IntersectionReport {
  Vec4 equator = Vec4::Zero();
  IntersectionType type = IntersectionType::kUnclassified;
  std::vector<IntersectionCurve> curves;
  std::vector<TangencyPoint> tangencies;
  std::vector<double> crossing_angles;
  int component_count = 0;
  int resolution = 0;
  int newton_divergences = 0;
};

struct ClassifyOptions {
  int resolution = 64;
  int max_retries = 2;  // resolution doublings after an ambiguous cell
  TraceOptions trace;
};

// Checks S < 0 on an n x n grid; throws PreconditionError otherwise.
void require_negative_curvature(const TorusImmersion& m, int n = 64);

// Reusable classifier: the curvature precondition is checked once.
class Classifier {
 public:
  explicit Classifier(SurfacePtr m, ClassifyOptions opt = {});
  IntersectionReport classify(const Equator& eq) const;
  const TorusImmersion& surface() const { return *m_; }
  const ClassifyOptions& options() const { return opt_; }

 private:
  SurfacePtr m_;
  ClassifyOptions opt_;
};

IntersectionReport classify(SurfacePtr m, const Equator& eq, const ClassifyOptions& opt = {});

// Connected components of M \ S(v) from a sign labelling of an n x n grid.
// Throws TangentEquatorError if S(v) is tangent to M.
int component_count(const TorusImmersion& m, const Equator& eq, int n = 64);

// As component_count, but counts the components of M \ S(v) across
// tangencies instead of throwing.
int component_count_allow_tangent(const TorusImmersion& m, const Equator& eq, int n = 64);

struct ScanFailure {
  int index = 0;
  Vec4 pole = Vec4::Zero();
  int count = 0;       // 0 when an error occurred
  std::string error;   // empty unless an error occurred
};

struct ScanReport {
  int samples = 0;
  std::uint64_t seed = 0;
  int resolution = 0;
  bool pass = false;
  std::map<int, int> count_histogram;
  std::map<std::string, int> type_histogram;  // empty unless types were requested
  std::vector<ScanFailure> failures;
};

struct ScanOptions {
  int resolution = 64;
  bool classify_types = false;  // needs the S < 0 precondition
};

// Poles uniform on S^3 from a seeded mt19937_64. Pass iff every count is 2.
ScanReport scan_two_piece(SurfacePtr m, int samples, std::uint64_t seed,
                          const ScanOptions& opt = {});

// Pole drawn for scan sample `index`; reproduces scan_two_piece's sequence.
std::vector<Vec4> scan_poles(int samples, std::uint64_t seed);

struct Type2Search {
  Vec4 pole = Vec4::Zero();
  double angle = 0;  // rotation from the tangent equator
  int steps = 0;
  IntersectionType best = IntersectionType::kUnclassified;
};

// Tangent equator at a surface point, then rotations about a principal
// geodesic through it with angles halving from pi/64 to 1e-6.
// Throws NotFoundError if no type-2 equator is found.
Type2Search find_type2_equator(SurfacePtr m, const ClassifyOptions& opt = {});

struct CurvatureProfile {
  double length = 0;
  std::vector<double> curvature;  // equal arclength samples
  double max_curvature = 0;
  double min_curvature = 0;
};

// Resamples to `samples` points of equal arclength and fits a circle through
// each consecutive triple. Throws SelfIntersectionError for non-embedded
// polylines and std::invalid_argument for fewer than 64 points.
CurvatureProfile curvature_profile(const TorusImmersion& m, const Equator& eq,
                                   const IntersectionCurve& c, int samples = 256);

// Throws std::invalid_argument if the sample counts differ.
bool curves_congruent(const CurvatureProfile& a, const CurvatureProfile& b, double tol);

// Geodesic curvature at a point of the zero set, from surface jets.
struct CurveFrame {
  Vec4 x = Vec4::Zero();
  Vec4 tangent = Vec4::Zero();
  Vec4 curvature_vector = Vec4::Zero();  // in S^3, tangent to S(v)
  double grad_norm = 0;                  // |grad f| in the induced metric
};
CurveFrame curve_frame(const TorusImmersion& m, const Equator& eq, double u, double v);

// Curvature of the circle through three points of S^3.
double circle_fit_curvature(const Vec4& a, const Vec4& b, const Vec4& c);

}  // namespace s3tori
