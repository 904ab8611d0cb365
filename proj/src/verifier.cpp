#include "ltp/verifier.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "ltp/lubin_tate.hpp"

namespace ltp {
namespace {

std::string reading_str(const std::string& witness, const ValueV& v) {
  return witness + " reads " + v.str();
}

/// Collects one sweep of readings into a VerdictRecord: first witnessed
/// violation wins, then first undecidable reading, otherwise the smallest
/// certified margin over the threshold.
class Sweep {
 public:
  Sweep(std::string check_id, std::string claim, std::string expected)
      : id_(std::move(check_id)), claim_(std::move(claim)), expected_(std::move(expected)) {}

  /// Threshold reading: val > thr (strict) or val >= thr.
  void require(const std::string& witness, const ValueV& v, const Rational& thr, bool strict) {
    ++instances_;
    if (strict ? v.known_gt(thr) : v.known_ge(thr)) {
      note_margin(witness, v, thr);
      return;
    }
    if (v.is_finite())
      fail(reading_str(witness, v));
    else
      undecided(reading_str(witness, v));
  }

  /// Exact-valuation reading: val == target.
  void require_equal(const std::string& witness, const ValueV& v, const Rational& target) {
    ++instances_;
    if (v.equals_exact(target)) {
      note_margin(witness, v, target);
      return;
    }
    if (v.is_finite() || v.known_gt(target))
      fail(reading_str(witness, v));
    else
      undecided(reading_str(witness, v));
  }

  /// Decided boolean fact (exact arithmetic, no precision involved).
  void require_fact(const std::string& witness, bool ok) {
    ++instances_;
    if (!ok) fail(witness);
  }

  /// Residual that must vanish at working precision; any finite reading is a
  /// witnessed nonzero (coordinates past the honest window never testify).
  void require_zero(const std::string& witness, const ValueV& v) {
    ++instances_;
    if (v.is_finite()) {
      fail(reading_str(witness, v));
      return;
    }
    note_margin(witness, v, Rational(0));
  }

  /// Instance whose hypothesis the model cannot resolve.
  void undecidable(const std::string& witness) {
    ++instances_;
    undecided(witness);
  }

  VerdictRecord finish() const {
    VerdictRecord r;
    r.check_id = id_;
    r.claim = claim_;
    r.expected = expected_;
    r.instances = instances_;
    if (fails_ > 0) {
      r.status = Verdict::fail;
      r.measured = suffixed(first_fail_, fails_);
    } else if (undecided_ > 0) {
      r.status = Verdict::inconclusive;
      r.measured = suffixed(first_undecided_, undecided_);
    } else {
      r.status = Verdict::pass;
      if (instances_ == 0)
        r.measured = "vacuous (empty sweep)";
      else
        r.measured = tight_.empty() ? "all readings exact" : "tightest " + tight_;
    }
    return r;
  }

 private:
  void fail(const std::string& s) {
    if (fails_ == 0) first_fail_ = s;
    ++fails_;
  }
  void undecided(const std::string& s) {
    if (undecided_ == 0) first_undecided_ = s;
    ++undecided_;
  }
  void note_margin(const std::string& witness, const ValueV& v, const Rational& base) {
    if (v.is_infinite()) return;
    Rational m = (v.is_finite() ? v.value() : v.cutoff()) - base;
    if (tight_.empty() || m < tight_margin_) {
      tight_margin_ = m;
      tight_ = reading_str(witness, v);
    }
  }
  static std::string suffixed(const std::string& s, long long n) {
    if (n <= 1) return s;
    return s + " (+" + std::to_string(n - 1) + " more)";
  }

  std::string id_, claim_, expected_;
  long long instances_ = 0, fails_ = 0, undecided_ = 0;
  std::string first_fail_, first_undecided_, tight_;
  Rational tight_margin_{0};
};

std::vector<LocalNum> utable(const OmegaResult& res, long kmax) {
  std::vector<LocalNum> u = evaluate_family(res.family, res.omega, kmax);
  for (LocalNum& x : u) x = x.normalized();
  return u;
}

ValueV rv(const LocalNum& x) { return ring_val(x.normalized()); }

LocalNum ring_pow(const LocalNum& x, long e) {
  LocalNum acc = x;
  for (long i = 1; i < e; ++i) acc = acc * x;
  return acc;
}

std::string tuple_str(long idx, const IndexVector& v) {
  std::ostringstream os;
  os << "idx=" << idx << " tuple=(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
  os << ")";
  return os.str();
}

VerdictRecord from_check(const CheckResult& c, std::string claim, std::string expected) {
  VerdictRecord r;
  r.check_id = c.id;
  r.claim = std::move(claim);
  r.status = c.pass ? Verdict::pass : Verdict::fail;
  r.instances = c.instances;
  r.measured = c.detail.empty() ? "no violations" : c.detail;
  r.expected = std::move(expected);
  return r;
}

}  // namespace

ValuationTable valuation_table(const OmegaResult& res, long kmax) {
  if (kmax < 1 || static_cast<size_t>(kmax) > res.cells.size())
    throw std::invalid_argument("valuation_table: kmax exceeds the solved table");
  const Params prm = Params::make(res.cfg.p);
  ValuationTable t;
  t.rows.reserve(static_cast<size_t>(kmax));
  for (long k = 1; k <= kmax; ++k) {
    const CellReading& c = res.cells[static_cast<size_t>(k - 1)];
    GaussProfile g = gauss_profile(res.family[static_cast<size_t>(k)], prm);
    ValuationRow row;
    row.k = k;
    row.w = weight(Int(k), prm);
    row.measured = c.reading;
    row.profile_min = g.min_value;
    row.profile_ties = g.tie_count;
    row.status = c.weight_match;
    switch (row.status) {
      case Verdict::pass: ++t.pass; break;
      case Verdict::fail: ++t.fail; break;
      case Verdict::inconclusive: ++t.inconclusive; break;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

const Rational& ZetaTable::at(long m, long i) const {
  if (m < 1 || m > mmax || i < 0 || i >= p)
    throw std::invalid_argument("ZetaTable::at: index out of range");
  return rows[static_cast<size_t>(m - 1)][static_cast<size_t>(i)];
}

ZetaTable zeta_table(const Params& prm, long mmax) {
  if (mmax < 1) throw std::invalid_argument("zeta_table: mmax must be >= 1");
  ZetaTable t;
  t.p = prm.p;
  t.mmax = mmax;
  t.rows.reserve(static_cast<size_t>(mmax));
  for (long m = 1; m <= mmax; ++m) {
    std::vector<Rational> row(static_cast<size_t>(prm.p), Rational(0));
    for (long i = 1; i < prm.p; ++i) {
      long k = m * prm.p + i;
      Rational step = make_rational(k - prm.q + 1, k);
      Rational prev = row[static_cast<size_t>(i - 1)] + 1;
      row[static_cast<size_t>(i)] = step * prev;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<VerdictRecord> check_coefficient_congruences(const OmegaResult& res, long kmax) {
  const Params prm = Params::make(res.cfg.p);
  const long p = prm.p, q = prm.q;
  std::vector<LocalNum> u = utable(res, kmax);
  const Rational one_over_p = make_rational(1, p);

  Sweep fro("frobenius-congruence",
            "per series exponent, the p-th power of u_k cancels u_{k/p} strictly past val 1",
            "val > 1");
  Sweep nondiv("nondiv-val-bound", "val(u_k) > 1/p when p does not divide k",
               "val > " + rat_str(one_over_p));
  Sweep pw("power-congruence", "val(u_{pm}^p - u_m) > 1", "val > 1");
  Sweep sc("val-scaling",
           "val(u_{pm}) = val(u_m)/p when val(u_m) <= 1, and > 1/p when val(u_m) > 1",
           "case split on val(u_m)");
  Sweep der("derivative-congruence", "val(u_1 u_{k-1} - k u_k) >= 1", "val >= 1");
  Sweep dec("product-decomposition", "k u_k = u_1 sum_r p^r u_{k-q^r} exactly in the ring",
            "zero residual at working precision");

  for (long k = 1; k <= kmax; ++k) {
    const std::string wk = "k=" + std::to_string(k);
    LocalNum fk = ring_pow(u[static_cast<size_t>(k)], p);
    if (k % p == 0) fk = fk - u[static_cast<size_t>(k / p)];
    fro.require(wk, rv(fk), Rational(1), true);
    if (k % p != 0) nondiv.require(wk, rv(u[static_cast<size_t>(k)]), one_over_p, true);
  }

  for (long m = 1; m * p <= kmax; ++m) {
    const std::string wm = "m=" + std::to_string(m);
    LocalNum d = ring_pow(u[static_cast<size_t>(m * p)], p) - u[static_cast<size_t>(m)];
    pw.require(wm, rv(d), Rational(1), true);

    ValueV vm = rv(u[static_cast<size_t>(m)]);
    ValueV vpm = rv(u[static_cast<size_t>(m * p)]);
    if (vm.is_finite() && vm.value() <= 1) {
      Rational target = vm.value() / Rational(p);
      sc.require_equal(wm, vpm, target);
    } else if (vm.known_gt(Rational(1))) {
      sc.require(wm, vpm, one_over_p, true);
    } else {
      sc.undecidable(wm + ": val(u_m) unresolved against 1, " + vm.str());
    }
  }

  for (long k = 1; k <= kmax; ++k) {
    const std::string wk = "k=" + std::to_string(k);
    LocalNum d = u[1] * u[static_cast<size_t>(k - 1)] - u[static_cast<size_t>(k)] * Int(k);
    der.require(wk, rv(d), Rational(1), false);

    LocalNum rhs = res.tower->zero();
    Int pr = 1;
    for (long qr = 1; qr <= k; qr *= q) {
      rhs = rhs + u[static_cast<size_t>(k - qr)] * pr;
      pr *= p;
    }
    LocalNum resid = (u[static_cast<size_t>(k)] * Int(k) - u[1] * rhs).normalized();
    dec.require_zero(wk, ring_val(resid));
  }

  std::vector<VerdictRecord> out;
  out.push_back(fro.finish());
  out.push_back(nondiv.finish());
  out.push_back(pw.finish());
  out.push_back(sc.finish());
  out.push_back(der.finish());
  out.push_back(dec.finish());

  // exact Z^{q i} coefficient of G([p]Z), then one ring evaluation per i
  Sweep mc("mulp-coefficient-congruence",
           "the Z^{q i} coefficient of G([p]Z), evaluated at omega, matches u_i to val 2",
           "val >= 2");
  long imax = kmax / q;
  if (imax >= 1) {
    size_t zc = static_cast<size_t>(q * imax) + 1;
    ZSeries<YPoly> G = ZSeries<YPoly>::zero(zc, YPoly());
    long maxdeg = 0;
    for (long k = 1; k <= q * imax; ++k) {
      G.at(static_cast<size_t>(k)) = res.family[static_cast<size_t>(k)];
      maxdeg = std::max(maxdeg, static_cast<long>(res.family[static_cast<size_t>(k)].degree()));
    }
    ZSeries<Rational> mp = mul_p(LTModel::special, prm, zc);
    ZSeries<YPoly> mpy = ZSeries<YPoly>::zero(zc, YPoly());
    for (size_t i = 0; i < zc; ++i)
      if (mp[i] != 0) mpy.at(i) = YPoly(mp[i]);
    ZSeries<YPoly> comp = series_compose(G, mpy);
    std::vector<LocalNum> ytab = power_table(res.omega, maxdeg);
    for (long i = 1; i <= imax; ++i) {
      LocalNum a = ypoly_eval_pow(comp[static_cast<size_t>(q * i)], ytab);
      LocalNum d = a - u[static_cast<size_t>(i)];
      mc.require("i=" + std::to_string(i), rv(d), Rational(2), false);
    }
  }
  out.push_back(mc.finish());
  return out;
}

std::vector<VerdictRecord> check_digit_product(const OmegaResult& res, long mmax) {
  const Params prm = Params::make(res.cfg.p);
  const long p = prm.p;
  Sweep sw("digit-product-congruence",
           "val(u_{mp+i} - binom(mp+i,i)^{-1} u_{mp} u_i - p zeta_{i,m} u_{p(m-p)+i+1}) >= 2",
           "val >= 2");
  if (mmax >= p) {
    std::vector<LocalNum> u = utable(res, p * mmax + p - 1);
    ZetaTable zt = zeta_table(prm, mmax);
    for (long m = p; m <= mmax; ++m) {
      for (long i = 0; i < p; ++i) {
        long k = m * p + i;
        Rational invb = make_rational(Int(1), binom_exact(static_cast<unsigned long>(k),
                                                          static_cast<unsigned long>(i)));
        Rational zcoef = zt.at(m, i) * Rational(p);
        long tail = p * (m - p) + i + 1;
        LocalNum rhs =
            u[static_cast<size_t>(m * p)] * u[static_cast<size_t>(i)] * invb +
            u[static_cast<size_t>(tail)] * zcoef;
        LocalNum d = u[static_cast<size_t>(k)] - rhs;
        sw.require("m=" + std::to_string(m) + " i=" + std::to_string(i), rv(d), Rational(2),
                   false);
      }
    }
  }
  return {sw.finish()};
}

std::vector<VerdictRecord> check_orbit_decomposition(const OmegaResult& res, long nmax) {
  const Params prm = Params::make(res.cfg.p);
  const long p = prm.p, q = prm.q;
  std::vector<LocalNum> u = utable(res, q * nmax);

  size_t zc = static_cast<size_t>(q * nmax) + 1;
  ZSeries<YPoly> onepg = ZSeries<YPoly>::zero(zc, YPoly());
  onepg.at(0) = YPoly(Rational(1));
  for (long k = 1; k <= q * nmax; ++k)
    onepg.at(static_cast<size_t>(k)) = res.family[static_cast<size_t>(k)];
  ZSeries<YPoly> pth = series_pow(onepg, static_cast<unsigned long>(p));

  Sweep s_size("orbit-size-valuation", "val_p of every off-diagonal orbit size is exactly 1",
               "= 1");
  Sweep s_cross("orbit-sum-cross-check",
                "orbit sum of coefficient products equals the Z^{q idx} coefficient of (1+G)^p",
                "identical polynomials");
  Sweep s_cong("orbit-sum-congruence", "val(u_idx - C_idx) >= 2", "val >= 2");
  Sweep s_term("orbit-term-bound", "val(|orbit| u_tuple) > w(idx) off the diagonal tuple",
               "val > w(idx)");
  Sweep s_tuple("tuple-valuation-bound", "val(u_tuple) > w(idx) - 1 off the diagonal tuple",
                "val > w(idx) - 1");
  Sweep s_mixed("mixed-tuple-bound",
                "val(u_tuple) > w(idx) - 1 when some entry is not a multiple of q",
                "val > w(idx) - 1");
  Sweep s_tail("tail-term-bound", "val(p u_{q idx}) > w(idx)", "val > w(idx)");

  for (long idx = 1; idx <= nmax; ++idx) {
    const std::string wi = "idx=" + std::to_string(idx);
    Rational w = weight(Int(idx), prm);
    Rational wm1 = w - 1;
    LocalNum csum = res.tower->zero();
    YPoly cpoly;
    for (const IndexVector& rep : enumerate_reps(Int(q * idx), p)) {
      Int osz = orbit_size(rep);
      LocalNum prod = res.tower->one();
      YPoly ppoly(Rational(1));
      bool diag = true, mixed = false;
      for (const Int& e : rep) {
        long el = e.get_si();
        prod = prod * u[static_cast<size_t>(el)];
        ppoly = ppoly * res.family[static_cast<size_t>(el)];
        if (el != p * idx) diag = false;
        if (el % q != 0) mixed = true;
      }
      csum = csum + prod * osz;
      cpoly = cpoly + ppoly * Rational(osz);
      if (!diag) {
        const std::string wt = tuple_str(idx, rep);
        s_size.require_fact(wt + " orbit " + osz.get_str(), val_p_int(osz, p) == 1);
        LocalNum scaled = prod * osz;
        s_term.require(wt, rv(scaled), w, true);
        ValueV vp = rv(prod);
        s_tuple.require(wt, vp, wm1, true);
        if (mixed) s_mixed.require(wt, vp, wm1, true);
      }
    }
    s_cross.require_fact(wi, cpoly == pth[static_cast<size_t>(q * idx)]);
    LocalNum d = u[static_cast<size_t>(idx)] - csum;
    s_cong.require(wi, rv(d), Rational(2), false);
    LocalNum tail = u[static_cast<size_t>(q * idx)] * Int(p);
    s_tail.require(wi, rv(tail), w, true);
  }

  std::vector<VerdictRecord> out;
  out.push_back(s_size.finish());
  out.push_back(s_cross.finish());
  out.push_back(s_cong.finish());
  out.push_back(s_term.finish());
  out.push_back(s_tuple.finish());
  out.push_back(s_mixed.finish());
  out.push_back(s_tail.finish());
  return out;
}

std::vector<VerdictRecord> run_exact_suite(const Params& prm, const ExactLimits& lim) {
  std::vector<VerdictRecord> out;

  {
    std::vector<YPoly> fam =
        pk_series(static_cast<unsigned long>(lim.pk_mmax), prm, LTModel::special);
    Sweep sw("pk-dual-path",
             "combinatorial and series constructions of the coefficient polynomials agree",
             "identical polynomials");
    for (long m = 0; m <= lim.pk_mmax; ++m)
      sw.require_fact("m=" + std::to_string(m),
                      fam[static_cast<size_t>(m)] == pk_combinatorial(Int(m), prm));
    out.push_back(sw.finish());
  }

  for (const PropertyItem& it : check_w_props(prm, lim.wprops, lim.jobs).items) {
    VerdictRecord r;
    r.check_id = it.id;
    r.claim = it.range;
    r.status = it.pass() ? Verdict::pass : Verdict::fail;
    r.instances = it.instances;
    r.measured = it.pass() ? "no violations"
                           : (it.witnesses.empty() ? "violations" : it.witnesses.front());
    r.expected = "no violations";
    out.push_back(r);
  }

  out.push_back(from_check(identity_divbyu1(static_cast<unsigned long>(lim.recurrence_kmax), prm),
                           "k P_k(Y) = Y sum_r p^r P_{k-q^r}(Y) exactly", "zero residual"));
  if (lim.functional_zcap > 0)
    out.push_back(from_check(identity_functional_eq(prm, lim.functional_zcap),
                             "G([p]Z) = (1+G)^p - 1 coefficientwise", "zero residual"));
  if (lim.mulp_cap > 0)
    out.push_back(from_check(check_mulp_shape(prm, lim.mulp_cap).check,
                             "[p](Z) = Z^q + pZ + p^2 s(Z) with s p-integral of order >= 2",
                             "shape holds"));

  {
    ZetaTable zt = zeta_table(prm, lim.zeta_mmax);
    Sweep sw("zeta-vanishing", "the last correction scalar zeta_{p-1,m} vanishes mod p",
             "val >= 1");
    for (long m = 1; m <= lim.zeta_mmax; ++m)
      sw.require("m=" + std::to_string(m), val_p_rat(zt.at(m, prm.p - 1), prm.p), Rational(1),
                 false);
    out.push_back(sw.finish());
  }

  {
    Sweep sw("binom-unit", "binom(mp+i, i) = 1 mod p for digits i < p", "= 1");
    for (long m = 0; m <= lim.binom_mmax; ++m)
      for (long i = 0; i < prm.p; ++i)
        sw.require_fact("m=" + std::to_string(m) + " i=" + std::to_string(i),
                        binom_mod_p(Int(m * prm.p + i), Int(i), prm.p) == 1);
    out.push_back(sw.finish());
  }

  return out;
}

}  // namespace ltp
