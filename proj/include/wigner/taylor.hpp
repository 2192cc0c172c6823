#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wigner {

// Truncated Taylor series arithmetic (univariate forward-mode AD).
// coef(k) stores f^(k)(x0)/k!, so derivatives of arbitrary compositions of
// +,-,*,/,exp,sin,cos come out exact to roundoff.  Orders stay small
// (<= ~16), everything is O(order^2).
template <class S>
class Taylor {
 public:
  explicit Taylor(int order) : c_(static_cast<std::size_t>(order) + 1, S(0)) {}

  static Taylor constant(S v, int order) {
    Taylor t(order);
    t.c_[0] = v;
    return t;
  }
  static Taylor variable(S x0, int order) {
    Taylor t(order);
    t.c_[0] = x0;
    if (order >= 1) t.c_[1] = S(1);
    return t;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  S coef(int k) const { return c_[static_cast<std::size_t>(k)]; }
  S& coef(int k) { return c_[static_cast<std::size_t>(k)]; }
  S value() const { return c_[0]; }

  S derivative(int k) const {
    double f = 1.0;
    for (int j = 2; j <= k; ++j) f *= j;
    return c_[static_cast<std::size_t>(k)] * S(f);
  }

  friend Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r(a.order());
    for (int k = 0; k <= a.order(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a, const Taylor& b) {
    Taylor r(a.order());
    for (int k = 0; k <= a.order(); ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(a.order());
    for (int k = 0; k <= a.order(); ++k) {
      S s(0);
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Taylor operator*(S s, const Taylor& a) {
    Taylor r(a.order());
    for (int k = 0; k <= a.order(); ++k) r.c_[k] = s * a.c_[k];
    return r;
  }
  friend Taylor operator+(const Taylor& a, S s) {
    Taylor r = a;
    r.c_[0] += s;
    return r;
  }
  friend Taylor operator-(S s, const Taylor& a) {
    Taylor r(a.order());
    for (int k = 0; k <= a.order(); ++k) r.c_[k] = -a.c_[k];
    r.c_[0] += s;
    return r;
  }
  friend Taylor operator-(const Taylor& a) { return S(0) - a; }

  // 1/a, requires a(0) != 0.
  Taylor reciprocal() const {
    if (c_[0] == S(0)) throw std::domain_error("Taylor: reciprocal of zero");
    Taylor r(order());
    r.c_[0] = S(1) / c_[0];
    for (int k = 1; k <= order(); ++k) {
      S s(0);
      for (int j = 1; j <= k; ++j) s += c_[j] * r.c_[k - j];
      r.c_[k] = -s / c_[0];
    }
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    return a * b.reciprocal();
  }

  friend Taylor exp(const Taylor& a) {
    Taylor r(a.order());
    r.c_[0] = std::exp(a.c_[0]);
    for (int k = 1; k <= a.order(); ++k) {
      S s(0);
      for (int j = 1; j <= k; ++j) s += S(double(j)) * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / S(double(k));
    }
    return r;
  }

  // sin and cos propagate jointly.
  static void sin_cos(const Taylor& a, Taylor& s, Taylor& c) {
    s = Taylor(a.order());
    c = Taylor(a.order());
    s.c_[0] = std::sin(a.c_[0]);
    c.c_[0] = std::cos(a.c_[0]);
    for (int k = 1; k <= a.order(); ++k) {
      S ss(0), cc(0);
      for (int j = 1; j <= k; ++j) {
        ss += S(double(j)) * a.c_[j] * c.c_[k - j];
        cc += S(double(j)) * a.c_[j] * s.c_[k - j];
      }
      s.c_[k] = ss / S(double(k));
      c.c_[k] = -cc / S(double(k));
    }
  }

  Taylor pow_int(int n) const {
    Taylor r = constant(S(1), order());
    Taylor base = *this;
    int e = n;
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

 private:
  std::vector<S> c_;
};

using TaylorD = Taylor<double>;
using TaylorC = Taylor<std::complex<double>>;

}  // namespace wigner
