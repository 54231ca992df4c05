#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "generators.hpp"
#include "s3tori/descriptor.hpp"
#include "s3tori/errors.hpp"
#include "s3tori/surface.hpp"

using namespace s3tori;

namespace {

Vec4 vec(const V4<double>& a) { return Vec4(a[0], a[1], a[2], a[3]); }

// Central differences of X along u and v.
std::array<Vec4, 2> fd_tangents(const TorusImmersion& m, double u, double v, double h = 1e-5) {
  return {(m.eval(u + h, v) - m.eval(u - h, v)) / (2 * h),
          (m.eval(u, v + h) - m.eval(u, v - h)) / (2 * h)};
}

}  // namespace

TEST_CASE("clifford torus: flat, minimal, k1 = 1, k2 = -1") {
  const SurfacePtr m = clifford_torus();
  gen::Gen g(1);
  for (int i = 0; i < 200; ++i) {
    const double u = g.angle(), v = g.angle();
    const CurvatureSample s = curvatures(*m, u, v);
    CHECK(std::abs(s.H) < 1e-12);
    CHECK(std::abs(s.K) < 1e-12);
    CHECK(s.k1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.k2 == doctest::Approx(-1.0).epsilon(1e-12));
    const auto e = metric(*m, u, v);
    CHECK(e[0] == doctest::Approx(0.5));
    CHECK(std::abs(e[1]) < 1e-15);
    CHECK(e[2] == doctest::Approx(0.5));
  }
  CHECK(m->eval(0, 0).isApprox(Vec4(kHalfSqrt2, 0, kHalfSqrt2, 0)));
}

TEST_CASE("normal points toward e1 on the clifford torus") {
  const SurfacePtr m = clifford_torus();
  const Vec4 n = vec(unit_normal<double>(*m, 0.0, 0.0));
  CHECK(n.isApprox(Vec4(kHalfSqrt2, 0, -kHalfSqrt2, 0)));
}

TEST_CASE("homogeneous tubes: H = (tan r - cot r)/2, S = -1, K = 0") {
  for (double r : {0.2, kPi / 6, kPi / 4, 1.2}) {
    const SurfacePtr m = homogeneous_torus(r);
    CAPTURE(r);
    for (double u : {0.0, 1.0, 4.0}) {
      const CurvatureSample s = curvatures(*m, u, 2.0 * u + 0.3);
      CHECK(s.H == doctest::Approx((std::tan(r) - 1.0 / std::tan(r)) / 2).epsilon(1e-12));
      CHECK(s.S == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(std::abs(s.K) < 1e-12);
    }
  }
  CHECK_THROWS_AS(homogeneous_torus(0.0), std::domain_error);
  CHECK_THROWS_AS(homogeneous_torus(kPi / 2), std::domain_error);
}

TEST_CASE("cyclide is the inverse stereographic image of a torus of revolution") {
  const CyclideParams p{2.0, 0.7, 0.4};
  const SurfacePtr m = cyclide_torus(p);
  gen::Gen g(2);
  for (int i = 0; i < 100; ++i) {
    const Vec4 x = m->eval(g.angle(), g.angle());
    CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const double s = 1.0 - x[3];
    const double y1 = x[0] / s, y2 = x[1] / s, y3 = x[2] / s;
    const double rho = std::hypot(y1, y2);
    CHECK((rho - p.major) * (rho - p.major) + (y3 - p.offset) * (y3 - p.offset) ==
          doctest::Approx(p.minor * p.minor).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cyclide_torus({1.0, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("default cyclide has S < 0, the elliptic preset does not") {
  const SurfacePtr d = parse_surface("cyclide:default");
  const SurfacePtr e = parse_surface("cyclide:elliptic");
  double dmax = -1e9, emax = -1e9;
  for (int i = 0; i < 48; ++i) {
    for (int j = 0; j < 48; ++j) {
      const double u = kTwoPi * i / 48, v = kTwoPi * j / 48;
      dmax = std::max(dmax, curvatures(*d, u, v).S);
      emax = std::max(emax, curvatures(*e, u, v).S);
    }
  }
  CHECK(dmax < -0.5);
  CHECK(emax > 1.0);
}

TEST_CASE("jets agree with finite differences") {
  const SurfacePtr m = perturb_normal(cyclide_torus({1.5, 1.0, 0.3}), TrigBump({{2, 1, 0.01, 0.3}}));
  gen::Gen g(4);
  for (int i = 0; i < 20; ++i) {
    const double u = g.angle(), v = g.angle();
    const auto j = m->jet2(u, v);
    const auto fd = fd_tangents(*m, u, v);
    for (int c = 0; c < 4; ++c) {
      CHECK(j[c].value() == doctest::Approx(m->eval(u, v)[c]).epsilon(1e-14));
      CHECK(std::abs(j[c].d(0) - fd[0][c]) < 1e-8);
      CHECK(std::abs(j[c].d(1) - fd[1][c]) < 1e-8);
    }
  }
}

TEST_CASE("unit normal is tangent to S3 and normal to the surface") {
  const SurfacePtr m = parse_surface("perturbed:cyclide:default:bump=1,2,0.02,0");
  gen::Gen g(6);
  for (int i = 0; i < 50; ++i) {
    const double u = g.angle(), v = g.angle();
    const Vec4 n = vec(unit_normal<double>(*m, u, v));
    const auto t = fd_tangents(*m, u, v);
    CHECK(n.norm() == doctest::Approx(1.0));
    CHECK(std::abs(n.dot(m->eval(u, v))) < 1e-12);
    CHECK(std::abs(n.dot(t[0])) < 1e-8);
    CHECK(std::abs(n.dot(t[1])) < 1e-8);
  }
}

TEST_CASE("clifford mesh area is 2 pi^2") {
  const SurfaceMesh mesh = sample_mesh(*clifford_torus(), 32, 16);
  CHECK(mesh.vertex_count() == 512);
  CHECK(mesh.total_area == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
  CHECK(mesh.index(-1, 16) == 31 * 16);
  CHECK_THROWS_AS(sample_mesh(*clifford_torus(), 4, 32), std::invalid_argument);
}

TEST_CASE("homogeneous mesh area is 4 pi^2 cos r sin r") {
  const double r = 0.4;
  const SurfaceMesh mesh = sample_mesh(*homogeneous_torus(r), 24, 24);
  CHECK(mesh.total_area == doctest::Approx(4 * kPi * kPi * std::cos(r) * std::sin(r)).epsilon(1e-12));
}

TEST_CASE("lattice points and lines of curvature lie on the clifford torus") {
  for (int n : {1, 2, 4}) {
    const auto pts = lattice_points(n);
    CHECK(pts.size() == static_cast<std::size_t>(4 * n * n));
    for (const auto& p : pts) {
      CHECK(std::hypot(p[0], p[1]) == doctest::Approx(kHalfSqrt2));
      CHECK(std::hypot(p[2], p[3]) == doctest::Approx(kHalfSqrt2));
    }
    for (int k = 0; k < 2 * n; ++k) {
      for (auto fam : {CurvatureFamily::kPhi, CurvatureFamily::kPsi}) {
        const GeodesicCircle c = line_of_curvature(n, k, fam);
        CHECK(circle_curvature(c.radius()) == doctest::Approx(1.0));
        for (double t : {0.0, 1.0, 2.5}) {
          const Vec4 x = c.eval(t).x();
          CHECK(std::hypot(x[0], x[1]) == doctest::Approx(kHalfSqrt2));
          CHECK(std::hypot(x[2], x[3]) == doctest::Approx(kHalfSqrt2));
        }
      }
    }
    CHECK_THROWS_AS(line_of_curvature(n, 2 * n, CurvatureFamily::kPhi), std::out_of_range);
  }
  const Vec4 x = line_of_curvature(2, 1, CurvatureFamily::kPhi).eval(0.3).x();
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(kHalfSqrt2));
}

TEST_CASE("large bumps are rejected") {
  CHECK_NOTHROW(perturb_normal(clifford_torus(), TrigBump({{1, 0, 0.01, 0}})));
  // A constant shift by pi/4 lands on the focal set of the clifford torus.
  CHECK_THROWS_AS(perturb_normal(clifford_torus(), TrigBump({{0, 0, kPi / 4, 0}})),
                  PerturbationTooLargeError);
  CHECK_THROWS_AS(perturb_normal(clifford_torus(), TrigBump({{1, 0, 1.6, 0}})),
                  PerturbationTooLargeError);
}

TEST_CASE("immersion margin") {
  CHECK(immersion_margin(*clifford_torus(), 16) == doctest::Approx(1.0));
  CHECK(immersion_margin(*cyclide_torus({1.5, 1.0, 0.0}), 16) > 0.0);
}

TEST_CASE("descriptors round trip through describe()") {
  for (const char* d : {"clifford", "homogeneous:0.5", "cyclide:1.5,1,0.3",
                        "perturbed:clifford:bump=2,1,0.001,0",
                        "perturbed:cyclide:2,0.5,0:bump=1,0,0.01,0.5;0,3,-0.002,1"}) {
    const SurfacePtr m = parse_surface(d);
    CHECK(m->describe() == d);
    CHECK(parse_surface(m->describe())->describe() == d);
  }
  CHECK(parse_surface("cyclide:default")->describe() == "cyclide:1.5,1,0.3");
}

TEST_CASE("descriptor errors") {
  for (const char* d : {"", "torus", "homogeneous:", "homogeneous:abc", "homogeneous:2",
                        "cyclide:1,2", "cyclide:1,2,0", "cyclide:nope", "perturbed:clifford",
                        "perturbed:clifford:bump=1,2,3", "perturbed:clifford:bump=1.5,2,0.1,0",
                        "missing.json"}) {
    CAPTURE(d);
    CHECK_THROWS_AS(parse_surface(d), ParseError);
  }
}

TEST_CASE("descriptor and bump files") {
  const std::string dir = S3TORI_BINARY_DIR;
  {
    std::ofstream(dir + "/bump.json") << R"({"bump": [[2, 1, 0.001, 0]]})";
    std::ofstream(dir + "/surface.json")
        << R"({"kind": "perturbed", "base": {"kind": "cyclide", "name": "default"},
              "bump": [[1, 1, 0.01, 0.25]]})";
    std::ofstream(dir + "/bad.json") << R"({"kind": "cyclide", "R": "x"})";
  }
  CHECK(parse_surface("perturbed:clifford:" + dir + "/bump.json")->describe() ==
        "perturbed:clifford:bump=2,1,0.001,0");
  CHECK(parse_surface(dir + "/surface.json")->describe() ==
        "perturbed:cyclide:1.5,1,0.3:bump=1,1,0.01,0.25");
  CHECK_THROWS_AS(parse_surface(dir + "/bad.json"), ParseError);
  CHECK(surface_from_json(nlohmann::json{{"kind", "homogeneous"}, {"r", 0.5}})->describe() ==
        "homogeneous:0.5");
  CHECK_THROWS_AS(surface_from_json(nlohmann::json{{"kind", "homogeneous"}, {"r", 3.0}}), ParseError);
}
