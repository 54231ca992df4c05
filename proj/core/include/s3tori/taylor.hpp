#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// Taylor<V, P> stores the coefficients of a polynomial in V variables of total
// degree <= P, expanded around some base point. Arithmetic and elementary
// functions act on the truncated series, so evaluating a smooth formula on
// jets yields its exact partial derivatives up to order P.

#include <array>
#include <cmath>
#include <cstdint>
#include <type_traits>

namespace s3tori {

namespace detail {

constexpr int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

// Monomials ordered by total degree; inside a degree, by descending exponent
// of the first variable, then the second, and so on. Degree-one monomials thus
// sit at indices 1..V in variable order.
template <int V, int P>
struct MonomialBasis {
  static constexpr int kSize = binomial(V + P, P);
  using Exponent = std::array<int, V>;

  std::array<Exponent, kSize> exponent{};
  std::array<int, kSize> degree{};

  constexpr MonomialBasis() {
    int idx = 0;
    for (int d = 0; d <= P; ++d) {
      int total = 1;
      for (int i = 0; i < V; ++i) total *= (d + 1);
      for (int code = total - 1; code >= 0; --code) {
        Exponent e{};
        int rem = code;
        int sum = 0;
        for (int i = V - 1; i >= 0; --i) {
          e[i] = rem % (d + 1);
          rem /= (d + 1);
          sum += e[i];
        }
        if (sum == d) {
          exponent[idx] = e;
          degree[idx] = d;
          ++idx;
        }
      }
    }
  }

  constexpr int index_of(const Exponent& e) const {
    for (int i = 0; i < kSize; ++i) {
      if (exponent[i] == e) return i;
    }
    return -1;
  }
};

template <int V, int P>
inline constexpr MonomialBasis<V, P> kBasis{};

template <int V, int P>
constexpr int product_count() {
  int n = 0;
  for (int i = 0; i < kBasis<V, P>.kSize; ++i)
    for (int j = 0; j < kBasis<V, P>.kSize; ++j)
      if (kBasis<V, P>.degree[i] + kBasis<V, P>.degree[j] <= P) ++n;
  return n;
}

struct ProductEntry {
  int a, b, out;
};

template <int V, int P>
struct ProductTable {
  std::array<ProductEntry, product_count<V, P>()> entry{};
  constexpr ProductTable() {
    int n = 0;
    const auto& basis = kBasis<V, P>;
    for (int i = 0; i < basis.kSize; ++i) {
      for (int j = 0; j < basis.kSize; ++j) {
        if (basis.degree[i] + basis.degree[j] > P) continue;
        typename MonomialBasis<V, P>::Exponent e{};
        for (int k = 0; k < V; ++k) e[k] = basis.exponent[i][k] + basis.exponent[j][k];
        entry[n++] = ProductEntry{i, j, basis.index_of(e)};
      }
    }
  }
};

template <int V, int P>
inline constexpr ProductTable<V, P> kProducts{};

// For each monomial of Taylor<V, P-1> and each variable i, the index in
// Taylor<V, P> of the monomial with exponent raised by one in variable i.
template <int V, int P>
struct RaiseTable {
  std::array<std::array<int, V>, binomial(V + P - 1, P - 1)> index{};
  constexpr RaiseTable() {
    const auto& lo = kBasis<V, P - 1>;
    for (int m = 0; m < lo.kSize; ++m) {
      for (int i = 0; i < V; ++i) {
        auto e = lo.exponent[m];
        e[i] += 1;
        index[m][i] = kBasis<V, P>.index_of(e);
      }
    }
  }
};

template <int V, int P>
inline constexpr RaiseTable<V, P> kRaise{};

}  // namespace detail

template <int V, int P>
class Taylor {
 public:
  static constexpr int kVars = V;
  static constexpr int kOrder = P;
  static constexpr int kSize = detail::binomial(V + P, P);

  constexpr Taylor() = default;
  // Implicit so constants mix freely with jets in generic formulas.
  constexpr Taylor(double c) { c_[0] = c; }  // NOLINT

  static Taylor variable(int i, double x0) {
    Taylor t(x0);
    if constexpr (P >= 1) t.c_[1 + i] = 1.0;
    return t;
  }

  double value() const { return c_[0]; }
  double& operator[](int idx) { return c_[idx]; }
  double operator[](int idx) const { return c_[idx]; }

  // First partial derivative in variable i.
  double d(int i) const {
    static_assert(P >= 1);
    return c_[1 + i];
  }

  // Second partial derivative in variables i, j.
  double d2(int i, int j) const {
    static_assert(P >= 2);
    std::array<int, V> e{};
    e[i] += 1;
    e[j] += 1;
    const double c = c_[detail::kBasis<V, P>.index_of(e)];
    return i == j ? 2.0 * c : c;
  }

  // Partial derivative of arbitrary multi-index, i.e. coefficient times
  // the product of factorials.
  double partial(const std::array<int, V>& e) const {
    int deg = 0;
    double fact = 1.0;
    for (int k = 0; k < V; ++k) {
      deg += e[k];
      for (int q = 2; q <= e[k]; ++q) fact *= q;
    }
    if (deg > P) return 0.0;
    return fact * c_[detail::kBasis<V, P>.index_of(e)];
  }

  // Partial derivative in variable i, as a jet of one order less.
  Taylor<V, P - 1> derivative(int i) const {
    static_assert(P >= 1);
    Taylor<V, P - 1> out;
    const auto& raise = detail::kRaise<V, P>;
    for (int m = 0; m < Taylor<V, P - 1>::kSize; ++m) {
      const int src = raise.index[m][i];
      out[m] = c_[src] * (detail::kBasis<V, P>.exponent[src][i]);
    }
    return out;
  }

  template <int Q>
  Taylor<V, Q> truncate() const {
    static_assert(Q <= P);
    Taylor<V, Q> out;
    for (int m = 0; m < Taylor<V, Q>::kSize; ++m) out[m] = c_[m];
    return out;
  }

  Taylor& operator+=(const Taylor& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
  }
  Taylor& operator*=(const Taylor& o) { return *this = *this * o; }
  Taylor& operator/=(const Taylor& o) { return *this = *this / o; }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator-(Taylor a) {
    for (auto& c : a.c_) c = -c;
    return a;
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor out;
    for (const auto& e : detail::kProducts<V, P>.entry) out.c_[e.out] += a.c_[e.a] * b.c_[e.b];
    return out;
  }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator/(Taylor a, double s) { return a *= (1.0 / s); }
  friend Taylor operator/(const Taylor& a, const Taylor& b) { return a * inv(b); }
  friend Taylor operator/(double s, const Taylor& b) { return s * inv(b); }

  // sum_n d[n] (a - a0)^n, with d[n] the n-th Taylor coefficient of a
  // scalar function at a0.
  friend Taylor compose(const Taylor& a, const std::array<double, P + 1>& d) {
    Taylor h = a;
    h.c_[0] = 0.0;
    Taylor out(d[P]);
    for (int n = P - 1; n >= 0; --n) {
      out = out * h;
      out.c_[0] += d[n];
    }
    return out;
  }

  friend Taylor inv(const Taylor& a) {
    const double x = a.c_[0];
    std::array<double, P + 1> d{};
    double p = 1.0 / x;
    for (int n = 0; n <= P; ++n) {
      d[n] = (n % 2 == 0 ? 1.0 : -1.0) * p;
      p /= x;
    }
    return compose(a, d);
  }
  friend Taylor sin(const Taylor& a) {
    const double s = std::sin(a.c_[0]), c = std::cos(a.c_[0]);
    std::array<double, P + 1> d{};
    double f = 1.0;
    for (int n = 0; n <= P; ++n) {
      if (n > 0) f /= n;
      const double cyc[4] = {s, c, -s, -c};
      d[n] = cyc[n % 4] * f;
    }
    return compose(a, d);
  }
  friend Taylor cos(const Taylor& a) {
    const double s = std::sin(a.c_[0]), c = std::cos(a.c_[0]);
    std::array<double, P + 1> d{};
    double f = 1.0;
    for (int n = 0; n <= P; ++n) {
      if (n > 0) f /= n;
      const double cyc[4] = {c, -s, -c, s};
      d[n] = cyc[n % 4] * f;
    }
    return compose(a, d);
  }
  friend Taylor exp(const Taylor& a) {
    const double e = std::exp(a.c_[0]);
    std::array<double, P + 1> d{};
    double f = 1.0;
    for (int n = 0; n <= P; ++n) {
      if (n > 0) f /= n;
      d[n] = e * f;
    }
    return compose(a, d);
  }
  friend Taylor log(const Taylor& a) {
    const double x = a.c_[0];
    std::array<double, P + 1> d{};
    d[0] = std::log(x);
    double p = 1.0;
    for (int n = 1; n <= P; ++n) {
      p /= x;
      d[n] = (n % 2 == 1 ? 1.0 : -1.0) * p / n;
    }
    return compose(a, d);
  }
  friend Taylor pow(const Taylor& a, double e) {
    const double x = a.c_[0];
    std::array<double, P + 1> d{};
    double coef = 1.0;
    for (int n = 0; n <= P; ++n) {
      d[n] = coef * std::pow(x, e - n);
      coef *= (e - n) / (n + 1);
    }
    return compose(a, d);
  }
  friend Taylor sqrt(const Taylor& a) { return pow(a, 0.5); }

 private:
  std::array<double, kSize> c_{};
};

// Scalar traits so generic formulas work on double and on jets.
template <class T>
struct JetTraits {
  static constexpr int kOrder = 0;
  static constexpr int kVars = 0;
};
template <int V, int P>
struct JetTraits<Taylor<V, P>> {
  static constexpr int kOrder = P;
  static constexpr int kVars = V;
};

template <class T>
inline constexpr int jet_order_v = JetTraits<T>::kOrder;

inline double value_of(double x) { return x; }
template <int V, int P>
double value_of(const Taylor<V, P>& t) {
  return t.value();
}

template <class T>
inline constexpr bool is_jet_v = !std::is_same_v<T, double>;

}  // namespace s3tori
