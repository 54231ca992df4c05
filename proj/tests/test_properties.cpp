#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "s3tori/deform.hpp"
#include "s3tori/errors.hpp"
#include "s3tori/intersection.hpp"
#include "s3tori/spectral.hpp"

using namespace s3tori;

TEST_CASE("curvatures are invariant under congruences") {
  gen::Gen g(101);
  const SurfacePtr bases[] = {clifford_torus(), homogeneous_torus(0.5),
                              cyclide_torus({1.5, 1.0, 0.3})};
  for (int trial = 0; trial < 30; ++trial) {
    const SurfacePtr& m = bases[trial % 3];
    const Congruence q(g.orthogonal());
    const SurfacePtr t = transformed(q, m);
    const double u = g.angle(), v = g.angle();
    const CurvatureSample a = curvatures(*m, u, v);
    const CurvatureSample b = curvatures(*t, u, v);
    CAPTURE(trial);
    CHECK(b.K == doctest::Approx(a.K).epsilon(1e-10));
    // Reflections reverse the normal.
    const double sign = q.orientation_preserving() ? 1.0 : -1.0;
    CHECK(b.H == doctest::Approx(sign * a.H).epsilon(1e-10).scale(1.0));
    CHECK(b.S == doctest::Approx(a.S).epsilon(1e-10).scale(1.0));
    CHECK((t->eval(u, v) - q.apply(m->eval(u, v))).norm() < 1e-14);
  }
}

TEST_CASE("stereographic projection round trips") {
  gen::Gen g(102);
  for (int trial = 0; trial < 200; ++trial) {
    const SpherePoint pole(g.unit4());
    const SpherePoint p(g.unit4());
    if ((p.x() - pole.x()).norm() < 1e-3) continue;
    const SpherePoint back = stereographic_lift(pole, stereographic_project(pole, p));
    CHECK((back.x() - p.x()).norm() < 1e-9);
  }
}

TEST_CASE("signed height flips with the equator") {
  gen::Gen g(103);
  for (int trial = 0; trial < 200; ++trial) {
    const Equator eq(g.unit4());
    const SpherePoint p(g.unit4());
    CHECK(signed_height(eq.flipped(), p) ==
          doctest::Approx(-signed_height(eq, p)).epsilon(1e-14).scale(1.0));
    CHECK(std::abs(signed_height(eq, p)) <= kPi / 2 + 1e-15);
  }
}

TEST_CASE("rayleigh quotients bound the first eigenvalue") {
  gen::Gen g(104);
  const SurfaceMesh mesh = sample_mesh(*cyclide_torus({1.5, 1.0, 0.3}), 32, 32);
  const Operators ops = assemble_operators(mesh);
  const double lambda1 = first_eigenpairs(ops, 32, 32, 2).eigenvalues[1];
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::VectorXd f(mesh.vertex_count());
    const int m = g.integer(0, 3), k = g.integer(0, 3);
    const double ph = g.angle();
    for (int i = 0; i < 32; ++i) {
      for (int j = 0; j < 32; ++j) {
        f[mesh.index(i, j)] = std::cos(m * i * mesh.du + k * j * mesh.dv + ph) + 0.1 * g.normal();
      }
    }
    CHECK(rayleigh_quotient(ops, f) >= lambda1 * (1 - 1e-10));
  }
}

TEST_CASE("multiplicity groups partition the spectrum") {
  gen::Gen g(105);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ev{0.0};
    const int n = g.integer(1, 20);
    for (int i = 0; i < n; ++i) ev.push_back(ev.back() + (g.uniform(0, 1) < 0.5 ? 0.0 : g.uniform(0, 2)));
    const auto groups = multiplicity_groups(ev);
    int next = 0;
    for (const auto& grp : groups) {
      CHECK(grp.first == next);
      CHECK(grp.size >= 1);
      next += grp.size;
    }
    CHECK(next == static_cast<int>(ev.size()));
  }
}

TEST_CASE("tau is nonnegative") {
  gen::Gen g(106);
  for (int trial = 0; trial < 4; ++trial) {
    const SphereMapPtr xi = compose(orthogonal_map(Congruence(g.rotation())),
                                    twist_map(g.uniform(-0.2, 0.2)));
    const TauReport r = tau(xi, g.uniform(0.1, 1.0), {10000, 1000, g.engine()()});
    CHECK(r.tau >= 0);
    CHECK(r.forward.total >= r.forward.sup_term);
  }
}

TEST_CASE("generic equators cut the Clifford torus in two curves") {
  gen::Gen g(107);
  const SurfacePtr m = clifford_torus();
  for (int trial = 0; trial < 30; ++trial) {
    CHECK(component_count(*m, Equator(g.unit4())) == 2);
  }
}

TEST_CASE("component counts are equivariant") {
  gen::Gen g(108);
  const SurfacePtr m = cyclide_torus({1.5, 1.0, 0.3});
  for (int trial = 0; trial < 20; ++trial) {
    const Congruence q(g.orthogonal());
    const Equator eq(g.unit4());
    CHECK(component_count(*transformed(q, m), q.apply(eq)) == component_count(*m, eq));
  }
}

TEST_CASE("small normal bumps keep the Clifford torus nearly minimal") {
  gen::Gen g(109);
  for (int trial = 0; trial < 20; ++trial) {
    const double amp = 1e-4;
    const SurfacePtr m = perturb_normal(clifford_torus(), g.bump(amp));
    const double u = g.angle(), v = g.angle();
    // H is about (Delta h + 4 h) / 2 with |m|, |k| <= 3.
    CHECK(std::abs(curvatures(*m, u, v).H) <= 20 * amp);
    CHECK((m->eval(u, v) - clifford_eval(u, v)).norm() <= 1.01 * amp);
  }
}

TEST_CASE("three-point curvature of small circles") {
  gen::Gen g(110);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat4 q = g.orthogonal();
    const double r = g.uniform(0.2, kPi / 2);
    const SpherePoint c(Vec4(q.col(0)));
    const GeodesicCircle circle(c, q.col(1), q.col(2), r);
    const double t = g.angle(), h = 1e-3;
    const double k = circle_fit_curvature(circle.eval(t - h).x(), circle.eval(t).x(),
                                          circle.eval(t + h).x());
    CHECK(k == doctest::Approx(circle_curvature(r)).epsilon(1e-5).scale(1.0));
  }
}
