#pragma once

#include <map>
#include <string>

#include "ltp/rational.hpp"

namespace ltp {

/// Sparse polynomial in the formal variable Y over Rational.
/// No zero coefficients are stored; the zero polynomial has an empty map.
class YPoly {
 public:
  YPoly() = default;
  explicit YPoly(const Rational& c) {
    if (c != 0) coeffs_[0] = c;
  }
  static YPoly monomial(unsigned long j, const Rational& c) {
    YPoly out;
    if (c != 0) out.coeffs_[j] = c;
    return out;
  }

  const std::map<unsigned long, Rational>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  unsigned long degree() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
  Rational coeff(unsigned long j) const {
    auto it = coeffs_.find(j);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  void add_term(unsigned long j, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(j, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }

  YPoly operator+(const YPoly& o) const {
    YPoly out = *this;
    for (const auto& [j, c] : o.coeffs_) out.add_term(j, c);
    return out;
  }
  YPoly operator-(const YPoly& o) const {
    YPoly out = *this;
    for (const auto& [j, c] : o.coeffs_) out.add_term(j, -c);
    return out;
  }
  YPoly operator-() const {
    YPoly out;
    for (const auto& [j, c] : coeffs_) out.coeffs_[j] = -c;
    return out;
  }
  YPoly operator*(const YPoly& o) const {
    YPoly out;
    for (const auto& [j1, c1] : coeffs_)
      for (const auto& [j2, c2] : o.coeffs_) out.add_term(j1 + j2, c1 * c2);
    return out;
  }
  YPoly operator*(const Rational& c) const {
    YPoly out;
    if (c == 0) return out;
    for (const auto& [j, v] : coeffs_) out.coeffs_[j] = v * c;
    return out;
  }
  bool operator==(const YPoly& o) const { return coeffs_ == o.coeffs_; }
  bool operator!=(const YPoly& o) const { return coeffs_ != o.coeffs_; }

  /// d/dY.
  YPoly derivative() const {
    YPoly out;
    for (const auto& [j, c] : coeffs_)
      if (j > 0) out.coeffs_[j - 1] = c * Rational(static_cast<unsigned long>(j));
    return out;
  }

  /// Multiply by Y^j.
  YPoly shift_up(unsigned long j) const {
    YPoly out;
    for (const auto& [e, c] : coeffs_) out.coeffs_[e + j] = c;
    return out;
  }

  /// Descending-exponent rendering, e.g. "Y^8/40320 + Y^5/48 + Y^2/8".
  std::string str() const;

 private:
  std::map<unsigned long, Rational> coeffs_;
};

inline YPoly zero_like(const YPoly&) { return YPoly(); }
inline YPoly one_like(const YPoly&) { return YPoly(Rational(1)); }
inline bool is_zero(const YPoly& x) { return x.is_zero(); }

}  // namespace ltp
