#pragma once

#include <string>
#include <vector>

#include "ltp/monna.hpp"
#include "ltp/omega_solver.hpp"

namespace ltp {

/// One verified claim, aggregated over its sweep. `measured` carries the
/// deciding reading: the first witnessed violation on fail, the first
/// undecidable instance on inconclusive, otherwise the tightest margin seen.
struct VerdictRecord {
  std::string check_id;
  std::string claim;
  Verdict status = Verdict::inconclusive;
  long long instances = 0;
  std::string measured;
  std::string expected;
};

/// Row of the main valuation table: the measured val(P_k(omega_hat)) against
/// the predicted weight w(k), with the term-profile minimum for context. The
/// profile minimum is only a lower bound; it sits strictly below the measured
/// value whenever it is attained by several tying terms (k = 4 at p = 2:
/// profile -1/3 with a tie, measured 1/6 = w(4)).
struct ValuationRow {
  long k = 0;
  Rational w{0};
  ValueV measured = ValueV::infinite();
  Rational profile_min{0};
  long profile_ties = 0;
  Verdict status = Verdict::inconclusive;
};

struct ValuationTable {
  std::vector<ValuationRow> rows;
  long pass = 0;
  long fail = 0;
  long inconclusive = 0;
  bool all_pass() const { return fail == 0 && inconclusive == 0; }
};

/// Measured valuation table for k = 1..kmax, read off the solve result.
/// Throws std::invalid_argument when kmax exceeds the solved table.
ValuationTable valuation_table(const OmegaResult& res, long kmax);

/// Correction scalars zeta_{i,m} of the digit-product congruence:
/// zeta_{0,m} = 0 and zeta_{i,m} = ((k-q+1)/k)(zeta_{i-1,m} + 1) with
/// k = mp + i; all entries have p-free denominators since p never divides
/// mp + i for 1 <= i <= p-1.
struct ZetaTable {
  long p = 2;
  long mmax = 0;
  std::vector<std::vector<Rational>> rows;  // rows[m-1][i], 1 <= m <= mmax

  const Rational& at(long m, long i) const;
};

ZetaTable zeta_table(const Params& prm, long mmax);

/// Congruence suite for the coefficient table u_k = P_k(omega_hat),
/// k <= kmax. All claims are measurements at the constructed point; each
/// sweep aggregates into one record per check id:
///   frobenius-congruence      val(u_k^p - u_{k/p}) > 1 per series exponent
///                             (the u term absent when p does not divide k)
///   nondiv-val-bound          p not dividing k  =>  val(u_k) > 1/p
///   power-congruence          val(u_{pm}^p - u_m) > 1
///   val-scaling               val(u_m) <= 1  =>  val(u_{pm}) = val(u_m)/p,
///                             val(u_m) >  1  =>  val(u_{pm}) > 1/p
///   mulp-coefficient-congruence  val(A_i(omega_hat) - u_i) >= 2 where A_i is
///                             the exact Z^{q i} coefficient of G([p]Z)
///   derivative-congruence     val(u_1 u_{k-1} - k u_k) >= 1
///   product-decomposition     k u_k = u_1 sum_r p^r u_{k-q^r} exactly
std::vector<VerdictRecord> check_coefficient_congruences(const OmegaResult& res, long kmax);

/// Digit-product congruence with explicit correction term, for p <= m <= mmax
/// and 0 <= i <= p-1, k = mp + i:
///   digit-product-congruence  val(u_k - binom(k,i)^{-1} u_{mp} u_i
///                                 - p zeta_{i,m} u_{p(m-p)+i+1}) >= 2
std::vector<VerdictRecord> check_digit_product(const OmegaResult& res, long mmax);

/// Decomposition of the p-th power series (1+G)^p by permutation orbits,
/// for coefficient blocks Z^{q idx}, idx = 1..nmax. C_idx denotes the orbit
/// sum over exponent tuples (k_1..k_p) >= 0 with sum q idx of
/// |orbit| * u_{k_1} ... u_{k_p}; k0 is the diagonal tuple (p idx,..,p idx).
///   orbit-size-valuation   val_p(|orbit|) = 1 for every tuple off k0 (exact)
///   orbit-sum-cross-check  orbit sum = [Z^{q idx}] (1+G)^p as polynomials
///   orbit-sum-congruence   val(u_idx - C_idx) >= 2
///   orbit-term-bound       val(|orbit| u_k) > w(idx) for tuples off k0
///   tuple-valuation-bound  val(u_k) > w(idx) - 1 for tuples off k0
///   mixed-tuple-bound      val(u_k) > w(idx) - 1 when some entry is not a
///                          multiple of q (sharper range, same threshold)
///   tail-term-bound        val(p u_{q idx}) > w(idx)
std::vector<VerdictRecord> check_orbit_decomposition(const OmegaResult& res, long nmax);

/// Sweep limits for the exact (ring-free) suite.
struct ExactLimits {
  long pk_mmax = 200;        // dual-path comparison P_0..P_mmax
  WPropsLimits wprops;       // weight-map property sweeps
  long recurrence_kmax = 200;  // divisibility identity
  size_t functional_zcap = 20;  // functional equation precision in Z, 0 skips
  size_t mulp_cap = 50;         // [p]-series shape precision in Z, 0 skips
  long zeta_mmax = 500;      // last-column vanishing sweep
  long binom_mmax = 200;     // binomial unit sweep
  long jobs = 1;
};

/// Exact-arithmetic suite: dual-path coefficient polynomials, weight-map
/// properties, the divisibility recurrence, the functional equation, the
/// [p]-series shape, zeta-vanishing (val_p(zeta_{p-1,m}) >= 1) and
/// binom-unit (binom(mp+i, i) = 1 mod p). No ring model involved.
std::vector<VerdictRecord> run_exact_suite(const Params& prm, const ExactLimits& lim);

}  // namespace ltp
