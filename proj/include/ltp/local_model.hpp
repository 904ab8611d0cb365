#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ltp/padic_core.hpp"
#include "ltp/rational.hpp"
#include "ltp/ypoly.hpp"

namespace ltp {

class LocalNum;

/// Finite-precision model of the p^n-torsion field of the polynomial
/// coordinate over the unramified quadratic base: W[t]/(Psi_n) with
/// W = (Z/p^Awork)[x]/(u(x)), Psi_n(t) = psi_1(psi^(n-1)(t)) for
/// psi(t) = t^q + pt, psi_1(t) = t^{q-1} + p. Psi_n is Eisenstein, so t
/// realizes the full ramification e = (q-1) q^{n-1} and every element is
/// a W-combination of t^0..t^{e-1}; valuations are read off coordinates.
/// The p^n-th roots of unity lie in this field (not in a separate layer)
/// and are constructed on demand by root_of_unity().
class Tower {
 public:
  /// A = certified output precision; Awork = payload modulus exponent,
  /// sized by the caller to absorb the p-power denominators its series
  /// truncation K brings in (see working_precision()).
  static std::shared_ptr<const Tower> build(const Params& prm, long f, long n, long A,
                                            long Awork, long coord_budget = 500000);

  /// A + val_p(K!) + 8: headroom for evaluating degree-K tails whose
  /// coefficient denominators divide K! times bounded q-power carries.
  static long working_precision(long A, long K, long p);

  const Params& prm() const { return prm_; }
  long f() const { return f_; }
  long n() const { return n_; }
  long A() const { return A_; }
  long Awork() const { return Awork_; }
  long e() const { return e_; }
  long dim() const { return e_ * f_; }
  const Int& modulus() const { return pA_; }
  long phi_degree() const { return static_cast<long>(phi_.size()) - 1; }

  const std::vector<Int>& psi() const { return psi_; }      // monic, size e+1
  const std::vector<Int>& phi() const { return phi_; }      // monic, size phi+1
  const std::vector<Int>& upoly() const { return upoly_; }  // monic, size f+1

  LocalNum zero() const;
  LocalNum one() const;
  LocalNum t_gen() const;
  LocalNum x_gen() const;
  LocalNum from_int(const Int& v) const;
  LocalNum from_rational(const Rational& v) const;

  /// Multiplicative lift of the residue a + b*xbar (not both zero mod p):
  /// the unique root of unity congruent to it, via x -> x^q iteration.
  LocalNum teichmuller(long a, long b) const;
  /// All q-1 lifts of F_q^*, residues ordered by (a, b) lexicographically.
  std::vector<LocalNum> teichmuller_units() const;

  /// t^k for 0 <= k <= e (cached).
  const LocalNum& t_power(long k) const;
  /// V(t)^{-1} where t^e = -p V(t), V(0) = 1 (cached).
  const LocalNum& inv_v() const;

  /// Primitive p^level-th root of unity (level <= n), built by chaining
  /// p-th roots with greedy t-digit seeding; deterministic.
  LocalNum root_of_unity(long level) const;

 private:
  Tower() = default;
  Params prm_;
  long f_ = 0, n_ = 0, A_ = 0, Awork_ = 0, e_ = 0;
  Int pA_;
  std::vector<Int> upoly_, psi_, phi_, vpoly_;
  // lazy caches, set up at the end of build()
  std::vector<LocalNum> tpow_;
  std::unique_ptr<LocalNum> inv_v_;
  mutable std::vector<LocalNum> zeta_chain_;  // memoized roots of unity
};

/// Element of the tower ring: value = p^{-shift} * payload, payload a
/// W-coordinate vector on t^0..t^{e-1} known modulo p^prec (prec <= Awork).
class LocalNum {
 public:
  LocalNum() = default;

  const Tower& tower() const { return *tw_; }
  bool valid() const { return tw_ != nullptr; }
  long shift() const { return shift_; }
  long prec() const { return prec_; }
  /// Absolute p-adic precision of the value: prec - shift.
  long window() const { return prec_ - shift_; }
  const std::vector<Int>& coords() const { return c_; }

  bool payload_is_zero() const;
  bool operator==(const LocalNum& o) const;
  bool operator!=(const LocalNum& o) const { return !(*this == o); }

  LocalNum operator+(const LocalNum& o) const;
  LocalNum operator-(const LocalNum& o) const;
  LocalNum operator-() const;
  LocalNum operator*(const LocalNum& o) const;
  LocalNum operator*(const Int& s) const;
  LocalNum operator*(const Rational& s) const;

  /// Multiply payload by t once (cheap row shift + reduction).
  LocalNum mul_t() const;

  /// Divide value by p^m when the payload allows it exactly; lowers both
  /// shift and prec by m. Throws if the stored payload is not divisible.
  LocalNum strip(long m) const;
  /// strip() by as much as the payload and a nonnegative target shift allow.
  LocalNum normalized() const;

  /// Reinterpret the stored payload as exact (prec := Awork). Used when a
  /// found root is re-certified from scratch at full working precision.
  LocalNum assume_exact() const;

  friend class Tower;
  friend LocalNum make_local(const Tower&, long, long, std::vector<Int>);

 private:
  const Tower* tw_ = nullptr;
  long shift_ = 0;
  long prec_ = 0;
  std::vector<Int> c_;
};

LocalNum make_local(const Tower& tw, long shift, long prec, std::vector<Int> coords);

inline LocalNum zero_like(const LocalNum& x) { return x.tower().zero(); }
inline LocalNum one_like(const LocalNum& x) { return x.tower().one(); }
inline bool is_zero(const LocalNum& x) { return x.payload_is_zero() && x.valid(); }

/// Valuation of the value: exact when it falls inside the honest window
/// (prec - shift), else bounded_below(window). Coordinates on the
/// Eisenstein basis have pairwise distinct valuations mod 1, so
/// val = min over coords of (val_p(coord) + tdeg/e) - shift, no solver.
ValueV ring_val(const LocalNum& a);
/// Same, with the window clamped to `cap` (absolute precision).
ValueV ring_val_window(const LocalNum& a, const Rational& cap);

/// Inverse of a unit (valuation 0), by residue inversion plus lifting.
LocalNum unit_inverse(const LocalNum& u);
/// a / b for b with an exact valuation reading.
LocalNum divide(const LocalNum& a, const LocalNum& b);
/// 1 / b.
LocalNum reciprocal(const LocalNum& b);

/// Image under t_{src} -> t_dst^q + p t_dst (one torsion level up),
/// x -> x. Towers must share p, f, Awork and dst.n() = src.n() + 1.
LocalNum embed_up(const LocalNum& a, const Tower& dst);

/// x^0..x^kmax.
std::vector<LocalNum> power_table(const LocalNum& x, long kmax);

/// t^m for arbitrary m >= 0 (Tower::t_power memoizes only 0..e).
LocalNum t_power_any(const Tower& tw, long m);

/// P(x), Horner over the sparse exponents.
LocalNum ypoly_eval(const YPoly& P, const LocalNum& x);
/// P(x) using a precomputed power table of x (table size > deg P).
LocalNum ypoly_eval_pow(const YPoly& P, const std::vector<LocalNum>& xpow);

/// Greedy refinement of z by one t-digit per round: at each position d,
/// tries digits c in {0} + Teichmuller units and keeps the first that
/// maximizes val(F(z + c t^d)). Stops early once val(F) reaches stop_val.
LocalNum digit_refine(const std::function<LocalNum(const LocalNum&)>& F, LocalNum z,
                      long start_digit, long rounds, const Rational& stop_val);

struct NewtonResult {
  LocalNum root;
  bool converged = false;
  Rational fval{0};  // last certified val(F), meaningful if finite
  long iters = 0;
};

/// Newton iteration z <- z - F(z)/F'(z) demanding strict val(F) increase
/// per step; stops once val(F) >= target (or the window certifies it).
NewtonResult newton_root(const std::function<LocalNum(const LocalNum&)>& F,
                         const std::function<LocalNum(const LocalNum&)>& dF, LocalNum z,
                         const Rational& target, long max_iter);

}  // namespace ltp
