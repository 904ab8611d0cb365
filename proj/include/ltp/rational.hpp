#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace ltp {

using Int = mpz_class;
using Rational = mpq_class;

/// Reduced fraction num/den with den > 0 (canonical zero is 0/1).
inline Rational make_rational(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(long num, long den) {
  return make_rational(Int(num), Int(den));
}

/// Serialization used everywhere: "num" for integers, "num/den" otherwise.
inline std::string rat_str(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline Rational rat_parse(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
  r.canonicalize();
  return r;
}

/// Exponent of p in a nonzero integer.
inline long val_p_int(const Int& n, long p) {
  if (n == 0) throw std::invalid_argument("val_p_int: zero");
  Int rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), Int(p).get_mpz_t()));
}

/// Valuation of a rational or a truncated-ring element: exact, +infinity, or
/// only known to be >= a cutoff (so truncated readings never pose as exact).
class ValueV {
 public:
  enum class Kind { finite, infinite, bounded_below };

  static ValueV finite(Rational v) { return ValueV(Kind::finite, std::move(v)); }
  static ValueV infinite() { return ValueV(Kind::infinite, Rational(0)); }
  static ValueV bounded_below(Rational cutoff) {
    return ValueV(Kind::bounded_below, std::move(cutoff));
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_infinite() const { return kind_ == Kind::infinite; }
  bool is_bounded_below() const { return kind_ == Kind::bounded_below; }

  /// Exact value; only meaningful for finite readings.
  const Rational& value() const {
    if (kind_ != Kind::finite) throw std::logic_error("ValueV::value: not finite");
    return v_;
  }
  /// Cutoff the reading was measured against; only for bounded_below.
  const Rational& cutoff() const {
    if (kind_ != Kind::bounded_below) throw std::logic_error("ValueV::cutoff: not bounded");
    return v_;
  }

  /// True when the reading certifies val >= t.
  bool known_ge(const Rational& t) const {
    switch (kind_) {
      case Kind::infinite: return true;
      case Kind::finite: return v_ >= t;
      case Kind::bounded_below: return v_ >= t;
    }
    return false;
  }
  /// True when the reading certifies val > t.
  bool known_gt(const Rational& t) const {
    switch (kind_) {
      case Kind::infinite: return true;
      case Kind::finite: return v_ > t;
      case Kind::bounded_below: return v_ > t;
    }
    return false;
  }
  bool equals_exact(const Rational& t) const { return kind_ == Kind::finite && v_ == t; }

  bool operator==(const ValueV& o) const { return kind_ == o.kind_ && v_ == o.v_; }

  std::string str() const {
    switch (kind_) {
      case Kind::infinite: return "inf";
      case Kind::finite: return rat_str(v_);
      case Kind::bounded_below: return ">=" + rat_str(v_);
    }
    return "?";
  }

 private:
  ValueV(Kind k, Rational v) : kind_(k), v_(std::move(v)) {}
  Kind kind_;
  Rational v_;  // value (finite) or cutoff (bounded_below)
};

/// p-adic valuation of an exact rational.
inline ValueV val_p_rat(const Rational& x, long p) {
  if (x == 0) return ValueV::infinite();
  long v = val_p_int(Int(x.get_num()), p) - val_p_int(Int(x.get_den()), p);
  return ValueV::finite(Rational(v));
}

}  // namespace ltp
