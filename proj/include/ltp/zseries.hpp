#pragma once

#include <stdexcept>
#include <vector>

#include "ltp/rational.hpp"

namespace ltp {

inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational one_like(const Rational&) { return Rational(1); }
inline bool is_zero(const Rational& x) { return x == 0; }

/// Dense truncated power series: coefficients c_0..c_{cap-1}, exact mod Z^cap.
/// Arithmetic never extends the cap; mixed caps truncate to the minimum.
template <class C>
class ZSeries {
 public:
  explicit ZSeries(std::vector<C> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("ZSeries: cap must be >= 1");
  }

  static ZSeries zero(size_t cap, const C& like) {
    return ZSeries(std::vector<C>(cap, zero_like(like)));
  }
  /// The series Z (cap >= 2).
  static ZSeries identity(size_t cap, const C& like) {
    ZSeries out = zero(cap, like);
    out.c_[1] = one_like(like);
    return out;
  }

  size_t cap() const { return c_.size(); }
  const C& operator[](size_t i) const { return c_[i]; }
  C& at(size_t i) { return c_[i]; }
  const std::vector<C>& coeffs() const { return c_; }

  ZSeries truncated(size_t cap) const {
    if (cap == 0) throw std::invalid_argument("ZSeries: cap must be >= 1");
    if (cap >= c_.size()) return *this;
    return ZSeries(std::vector<C>(c_.begin(), c_.begin() + static_cast<long>(cap)));
  }

  ZSeries operator+(const ZSeries& o) const {
    size_t n = std::min(cap(), o.cap());
    std::vector<C> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(c_[i] + o.c_[i]);
    return ZSeries(std::move(out));
  }
  ZSeries operator-(const ZSeries& o) const {
    size_t n = std::min(cap(), o.cap());
    std::vector<C> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(c_[i] - o.c_[i]);
    return ZSeries(std::move(out));
  }
  ZSeries operator*(const ZSeries& o) const {
    size_t n = std::min(cap(), o.cap());
    ZSeries out = zero(n, c_[0]);
    for (size_t i = 0; i < n; ++i) {
      if (is_zero(c_[i])) continue;
      for (size_t j = 0; i + j < n; ++j) {
        if (is_zero(o.c_[j])) continue;
        out.c_[i + j] = out.c_[i + j] + c_[i] * o.c_[j];
      }
    }
    return out;
  }
  template <class S>
  ZSeries scaled(const S& s) const {
    std::vector<C> out;
    out.reserve(cap());
    for (const C& x : c_) out.push_back(x * s);
    return ZSeries(std::move(out));
  }

  bool operator==(const ZSeries& o) const { return c_ == o.c_; }

 private:
  std::vector<C> c_;
};

/// f(g) for g with zero constant term; exact mod Z^{min(caps)}.
template <class C>
ZSeries<C> series_compose(const ZSeries<C>& f, const ZSeries<C>& g) {
  if (!is_zero(g[0])) throw std::invalid_argument("series_compose: g(0) != 0");
  size_t n = std::min(f.cap(), g.cap());
  ZSeries<C> gt = g.truncated(n);
  ZSeries<C> acc = ZSeries<C>::zero(n, f[0]);
  for (size_t i = n; i-- > 0;) {
    acc = acc * gt;
    acc.at(0) = acc[0] + f[i];
  }
  return acc;
}

/// f^e by repeated squaring, truncated to f's cap.
template <class C>
ZSeries<C> series_pow(const ZSeries<C>& f, unsigned long e) {
  ZSeries<C> acc = ZSeries<C>::zero(f.cap(), f[0]);
  acc.at(0) = one_like(f[0]);
  ZSeries<C> base = f;
  while (e > 0) {
    if (e & 1UL) acc = acc * base;
    e >>= 1UL;
    if (e > 0) base = base * base;
  }
  return acc;
}

/// Termwise formal derivative; needs C * Rational. Result keeps the cap
/// (top coefficient of the derivative is beyond what the input determines,
/// so the last entry is only meaningful up to cap-1).
inline ZSeries<Rational> series_derivative(const ZSeries<Rational>& f) {
  std::vector<Rational> out(f.cap(), Rational(0));
  for (size_t i = 1; i < f.cap(); ++i)
    out[i - 1] = f[i] * Rational(static_cast<unsigned long>(i));
  return ZSeries<Rational>(std::move(out));
}

/// Multiplicative inverse of a series with invertible constant term
/// (Rational coefficients), by Newton doubling b <- b(2 - fb).
ZSeries<Rational> series_inverse(const ZSeries<Rational>& f);

/// Compositional inverse g of f (f(0) = 0, f'(0) = 1): f(g) = Z mod Z^cap.
ZSeries<Rational> series_reversion(const ZSeries<Rational>& f);

}  // namespace ltp
