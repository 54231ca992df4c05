#pragma once

// Seeded generators for the property tests. Each property draws its cases
// from a fixed seed so failures reproduce; the failing case is printed by
// the CAPTURE in the test.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>

#include "s3tori/sphere.hpp"
#include "s3tori/surface.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double angle() { return uniform(0.0, s3tori::kTwoPi); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  s3tori::Vec4 gaussian4() { return s3tori::Vec4(normal(), normal(), normal(), normal()); }
  s3tori::Vec4 unit4() { return gaussian4().normalized(); }

  // Haar-distributed orthogonal matrix; det = -1 with probability 1/2.
  s3tori::Mat4 orthogonal() {
    s3tori::Mat4 a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = normal();
    Eigen::HouseholderQR<s3tori::Mat4> qr(a);
    s3tori::Mat4 q = qr.householderQ();
    const s3tori::Mat4 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < 4; ++j)
      if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
  }

  s3tori::Mat4 rotation() {
    s3tori::Mat4 q = orthogonal();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
  }

  // A small trigonometric bump with 1..3 terms and |h| <= amp.
  s3tori::TrigBump bump(double amp) {
    const int n = integer(1, 3);
    std::vector<s3tori::BumpTerm> terms;
    for (int i = 0; i < n; ++i) {
      terms.push_back({integer(-3, 3), integer(-3, 3), amp / n * uniform(0.2, 1.0), angle()});
    }
    return s3tori::TrigBump(std::move(terms));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
