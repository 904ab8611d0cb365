#pragma once

#include <string>
#include <vector>

#include "ltp/padic_core.hpp"
#include "ltp/ypoly.hpp"
#include "ltp/zseries.hpp"

namespace ltp {

/// The two coordinates in play: `special` has log(Z) = sum_k Z^{q^k}/p^k;
/// `polynomial` has [p](Z) = Z^q + pZ exactly.
enum class LTModel { special, polynomial };

/// Outcome of one exact identity check.
struct CheckResult {
  std::string id;
  bool pass = true;
  long long instances = 0;
  std::string detail;  // first violation, or empty
};

/// Term-valuation profile of P(Y) at an element of valuation p/(q-1):
/// entry j holds val_p(c_j) + j*p/(q-1). The minimum lower-bounds
/// val_p(P(Omega)); it is attained exactly when the minimum is unique.
struct GaussProfile {
  std::vector<std::pair<unsigned long, Rational>> entries;  // sorted by Y-exponent
  Rational min_value;
  long tie_count = 0;
};

/// sum_k Z^{q^k}/p^k, truncated.
ZSeries<Rational> log_special(const Params& prm, size_t cap);

/// Compositional inverse of log_special.
ZSeries<Rational> exp_special(const Params& prm, size_t cap);

/// The unique series with linear term Z solving L(Z^q + pZ) = p L(Z).
ZSeries<Rational> log_polynomial(const Params& prm, size_t cap);

/// [p]-multiplication: exp(p log(Z)) for `special`, literally Z^q + pZ
/// for `polynomial`. Needs cap >= q+1 to see the Z^q term.
ZSeries<Rational> mul_p(LTModel model, const Params& prm, size_t cap);

/// Checks [p]_special = Z^q + pZ + p^2 s(Z) with s p-integral of order >= 2;
/// returns s alongside the verdict.
struct Lemma35Result {
  CheckResult check;
  ZSeries<Rational> s;
};
Lemma35Result check_mulp_shape(const Params& prm, size_t cap);

/// P_m(Y) as the exact sum over representations m = m_0 + q m_1 + ... + q^d m_d
/// of Y^{sum m_i} / (prod m_i! * p^{sum i*m_i}).
YPoly pk_combinatorial(const Int& m, const Params& prm);

/// P_0..P_mmax as coefficients of exp(Y log(Z)).
/// special: product over k of the truncated factors exp(Y Z^{q^k}/p^k);
/// polynomial: exponential of Y log_polynomial via the derivative recurrence.
/// Independent of pk_combinatorial, which it cross-checks.
std::vector<YPoly> pk_series(unsigned long mmax, const Params& prm, LTModel model);

/// Term valuations of P against weight p/(q-1) per power of Y.
GaussProfile gauss_profile(const YPoly& P, const Params& prm);

/// k P_k(Y) = Y * sum_r p^r P_{k-q^r}(Y) for 1 <= k <= kmax, exactly.
CheckResult identity_divbyu1(unsigned long kmax, const Params& prm);

/// compose(G, [p](Z)) = (1+G)^p - 1 mod Z^zcap with G = sum P_k(Y) Z^k,
/// both sides exact over YPoly (special coordinate).
CheckResult identity_functional_eq(const Params& prm, size_t zcap);

}  // namespace ltp
