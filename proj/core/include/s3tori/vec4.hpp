#pragma once

// Small fixed-size 4-vector usable with double or jet scalars.

#include <array>
#include <cmath>

#include <Eigen/Core>

#include "s3tori/taylor.hpp"

namespace s3tori {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

template <class T>
struct V4 {
  std::array<T, 4> c{};

  V4() = default;
  V4(T a, T b, T d, T e) : c{a, b, d, e} {}
  // Lift a double vector into any scalar type.
  static V4 from(const Vec4& x) { return V4(T(x[0]), T(x[1]), T(x[2]), T(x[3])); }

  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }

  V4& operator+=(const V4& o) {
    for (int i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  V4& operator-=(const V4& o) {
    for (int i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  friend V4 operator+(V4 a, const V4& b) { return a += b; }
  friend V4 operator-(V4 a, const V4& b) { return a -= b; }
  friend V4 operator-(V4 a) {
    for (auto& x : a.c) x = -x;
    return a;
  }
  friend V4 operator*(const T& s, V4 a) {
    for (auto& x : a.c) x = s * x;
    return a;
  }
  friend V4 operator*(V4 a, const T& s) { return s * a; }
};

template <class T>
T dot(const V4<T>& a, const V4<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

template <class T>
T norm(const V4<T>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

template <class T>
V4<T> normalized(const V4<T>& a) {
  const T inv_n = T(1.0) / norm(a);
  return inv_n * a;
}

template <class T>
T det3(const T& a00, const T& a01, const T& a02, const T& a10, const T& a11, const T& a12,
       const T& a20, const T& a21, const T& a22) {
  return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
         a02 * (a10 * a21 - a11 * a20);
}

// Generalized cross product: <cross3(a, b, c), w> = det[a, b, c, w].
template <class T>
V4<T> cross3(const V4<T>& a, const V4<T>& b, const V4<T>& c) {
  V4<T> n;
  for (int i = 0; i < 4; ++i) {
    int r[3];
    int q = 0;
    for (int k = 0; k < 4; ++k)
      if (k != i) r[q++] = k;
    const T m = det3(a[r[0]], b[r[0]], c[r[0]], a[r[1]], b[r[1]], c[r[1]], a[r[2]], b[r[2]],
                     c[r[2]]);
    n[i] = (i % 2 == 0) ? -m : m;
  }
  return n;
}

template <class T>
Vec4 values(const V4<T>& a) {
  return Vec4(value_of(a[0]), value_of(a[1]), value_of(a[2]), value_of(a[3]));
}

template <class T>
V4<T> apply_matrix(const Mat4& q, const V4<T>& x) {
  V4<T> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = q(i, 0) * x[0];
    for (int j = 1; j < 4; ++j) out[i] += q(i, j) * x[j];
  }
  return out;
}

}  // namespace s3tori
