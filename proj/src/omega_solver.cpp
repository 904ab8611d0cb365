#include "ltp/omega_solver.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "ltp/monna.hpp"

namespace ltp {

namespace {

constexpr long kBigVal = 1000000000L;

LocalNum ln_pow(const LocalNum& x, long k) {
  LocalNum acc = one_like(x), base = x.normalized();
  while (k > 0) {
    if (k & 1) acc = (acc * base).normalized();
    k >>= 1;
    if (k > 0) base = (base * base).normalized();
  }
  return acc;
}

// capped score: readings at or beyond `cap` count as cap, so saturated
// markers never rank candidates by noise past their trust range
Rational capped_score(const ValueV& v, const Rational& cap) {
  if (v.is_infinite()) return cap;
  const Rational& raw = v.is_finite() ? v.value() : v.cutoff();
  return std::min(raw, cap);
}

// divided j-th derivative: sum_t binom(t, j) a_t Y^(t-j), exact over Q
YPoly hasse_derivative(const YPoly& P, unsigned long j) {
  YPoly out;
  for (const auto& [t, c] : P.coeffs())
    if (t >= j) out.add_term(t - j, c * Rational(binom_exact(t, j)));
  return out;
}

long ipow(long b, long n) {
  long r = 1;
  while (n-- > 0) r *= b;
  return r;
}

}  // namespace

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

SolveConfig SolveConfig::defaults_for(long p) {
  SolveConfig cfg;
  cfg.p = p;
  if (p == 2) {
    cfg.n = 3, cfg.A = 3, cfg.K = 160;
  } else if (p == 3) {
    cfg.n = 2, cfg.A = 2, cfg.K = 162;
  } else {
    cfg.n = 1, cfg.A = 2, cfg.K = 2 * (p * p - 1) + 2;
  }
  return cfg;
}

SolverEquation::SolverEquation(std::shared_ptr<const Tower> tw, long K,
                               const std::vector<YPoly>& pk, LocalNum target)
    : tw_(std::move(tw)), K_(K), target_(std::move(target)) {
  if (static_cast<long>(pk.size()) <= K_) throw std::invalid_argument("pk table too short");
  pk_.assign(pk.begin(), pk.begin() + K_ + 1);
  dpk_.reserve(pk_.size());
  for (const YPoly& P : pk_) {
    dpk_.push_back(P.derivative());
    max_deg_ = std::max(max_deg_, static_cast<long>(P.degree()));
  }
}

LocalNum SolverEquation::eval(const LocalNum& y) const {
  std::vector<LocalNum> ytab = power_table(y, max_deg_);
  LocalNum acc = ypoly_eval_pow(pk_[static_cast<size_t>(K_)], ytab);
  for (long k = K_ - 1; k >= 1; --k) {
    acc = acc.mul_t();
    if (!pk_[static_cast<size_t>(k)].coeffs().empty())
      acc = acc + ypoly_eval_pow(pk_[static_cast<size_t>(k)], ytab);
  }
  return acc.mul_t() - target_;
}

LocalNum SolverEquation::deval(const LocalNum& y) const {
  std::vector<LocalNum> ytab = power_table(y, std::max(max_deg_ - 1, 0L));
  LocalNum acc = tw_->zero();
  for (long k = K_; k >= 1; --k) {
    if (k < K_) acc = acc.mul_t();
    if (!dpk_[static_cast<size_t>(k)].coeffs().empty())
      acc = acc + ypoly_eval_pow(dpk_[static_cast<size_t>(k)], ytab);
  }
  return acc.mul_t();
}

std::vector<LocalNum> evaluate_family(const std::vector<YPoly>& pk, const LocalNum& omega,
                                      long kmax) {
  if (static_cast<long>(pk.size()) <= kmax) throw std::invalid_argument("family too short");
  long max_deg = 0;
  for (long k = 0; k <= kmax; ++k)
    max_deg = std::max(max_deg, static_cast<long>(pk[static_cast<size_t>(k)].degree()));
  std::vector<LocalNum> ytab = power_table(omega, max_deg);
  std::vector<LocalNum> out;
  out.reserve(static_cast<size_t>(kmax + 1));
  for (long k = 0; k <= kmax; ++k)
    out.push_back(ypoly_eval_pow(pk[static_cast<size_t>(k)], ytab));
  return out;
}

namespace {

// one marker of the transverse ladder: R = P_{q^m}, readings trust-capped
// at the marker's own valuation w(q^m)
struct Rung {
  long m = 0;
  Rational cap{0};
  Rational profile_min{0};           // min_t val(a_t) + t*p/(q-1), tail-bound anchor
  std::vector<YPoly> dj;             // divided derivatives, j = 0..deg
  std::vector<LocalNum> djz;         // D_j at the current point, j <= jdone
  std::vector<Rational> vdj;         // certified lower bounds on val(D_j(z))
  long jdone = -1;
  Rational base{0};                  // capped reading at the current point
  bool stale = true;
};

struct WalkContext {
  const Tower* tw = nullptr;
  Params prm;
  long e = 0;
  Rational pq1{0};                          // p/(q-1) = val of every line point
  std::vector<LocalNum> units;              // Teichmuller lifts of the unit residues
  std::vector<std::vector<LocalNum>> upow;  // upow[u][r] = units[u]^r, r < q-1
};

// smallest J past which profile_min + j*(x - p/(q-1)) clears cap + 1;
// sound for the rest of the marker's phase since x only grows
long crude_tail_j(const Rung& r, const Rational& x, const Rational& pq1) {
  long deg = static_cast<long>(r.dj.size()) - 1;
  Rational slope = x - pq1;
  if (slope <= 0) return deg;
  Rational need = r.cap + 1 - r.profile_min;
  long J = 1;
  while (J < deg && Rational(J + 1) * slope <= need) ++J;
  return J;
}

void refresh_rung(Rung& r, const LocalNum& z, const Rational& x, const WalkContext& wc) {
  long J = crude_tail_j(r, x, wc.pq1);
  long max_t = 0;
  for (long j = 0; j <= J; ++j)
    max_t = std::max(max_t, static_cast<long>(r.dj[static_cast<size_t>(j)].degree()));
  std::vector<LocalNum> ztab = power_table(z, max_t);
  r.djz.assign(static_cast<size_t>(J) + 1, wc.tw->zero());
  r.vdj.assign(static_cast<size_t>(J) + 1, Rational(kBigVal));
  for (long j = 0; j <= J; ++j) {
    LocalNum v = ypoly_eval_pow(r.dj[static_cast<size_t>(j)], ztab).normalized();
    r.djz[static_cast<size_t>(j)] = v;
    ValueV vv = ring_val(v);
    if (!vv.is_infinite())
      r.vdj[static_cast<size_t>(j)] = vv.is_finite() ? vv.value() : vv.cutoff();
  }
  r.jdone = J;
  r.base = capped_score(ring_val(r.djz[0]), r.cap);
  r.stale = false;
}

// capped readings of R at z + u*t^d for every unit digit u, via the exact
// finite identity R(z+h) = sum_j D_j(z) h^j; terms certified past cap + 1
// are dropped (they cannot move a capped reading), and u^(q-1) = 1 folds
// the sum into q-1 shared groups
std::vector<Rational> candidate_scores(const Rung& r, const LocalNum& td, long d,
                                       const WalkContext& wc, long& mults) {
  Rational x = make_rational(d, wc.e);
  long cycle = wc.prm.q - 1;
  std::vector<LocalNum> group(static_cast<size_t>(cycle));
  std::vector<bool> used(static_cast<size_t>(cycle), false);
  LocalNum tj = td;
  for (long j = 1; j <= r.jdone; ++j) {
    if (j > 1) {
      tj = (tj * td).normalized();
      ++mults;
    }
    if (r.vdj[static_cast<size_t>(j)] + Rational(j) * x <= r.cap + 1) {
      size_t slot = static_cast<size_t>(j % cycle);
      LocalNum term = (r.djz[static_cast<size_t>(j)] * tj).normalized();
      ++mults;
      group[slot] = used[slot] ? group[slot] + term : term;
      used[slot] = true;
    }
  }
  std::vector<Rational> out;
  out.reserve(wc.units.size());
  for (size_t u = 0; u < wc.units.size(); ++u) {
    LocalNum v = r.djz[0];
    for (size_t slot = 0; slot < group.size(); ++slot) {
      if (!used[slot]) continue;
      LocalNum g = (wc.upow[u][slot] * group[slot]).normalized();
      ++mults;
      v = v + g;
    }
    out.push_back(capped_score(ring_val(v.normalized()), r.cap));
  }
  return out;
}

struct WalkOutcome {
  LocalNum z;
  WalkTrace trace;
};

// greedy transverse walk: a digit commits when it strictly improves the
// capped reading of the first unsaturated marker.  Saturated markers are
// immune to any digit at the current position (responses land at or past
// their caps), so only that one marker is consulted per position.
WalkOutcome run_walk(const WalkContext& wc, const std::vector<YPoly>& pk, const SolveConfig& cfg,
                     const std::vector<DigitCommit>* replay) {
  const Tower& tw = *wc.tw;
  long e = wc.e, n = cfg.n;
  long d0 = cfg.p * ipow(wc.prm.q, n - 1);  // e * p/(q-1)

  std::vector<Rung> rungs(static_cast<size_t>(n));
  for (long m = 1; m <= n; ++m) {
    Rung& r = rungs[static_cast<size_t>(m - 1)];
    r.m = m;
    long qm = ipow(wc.prm.q, m);
    const YPoly& P = pk[static_cast<size_t>(qm)];
    r.cap = weight(Int(qm), wc.prm);
    r.profile_min = gauss_profile(P, wc.prm).min_value;
    r.dj.reserve(P.degree() + 1);
    for (unsigned long j = 0; j <= P.degree(); ++j) r.dj.push_back(hasse_derivative(P, j));
  }

  WalkOutcome out;
  out.trace.seed_position = d0;
  out.trace.seed_unit = cfg.seed_unit;
  out.z = (wc.units[static_cast<size_t>(cfg.seed_unit)] * t_power_any(tw, d0))
              .normalized()
              .assume_exact();
  out.trace.depth = Rational(n) + rungs.back().cap;
  out.trace.depth_clean = true;

  size_t replay_at = 0;
  for (long d = d0 + 1;; ++d) {
    Rational x = make_rational(d, e);
    long mstar = 0;
    for (long m = 1; m <= n; ++m)
      if (x < Rational(m) + rungs[static_cast<size_t>(m - 1)].cap) {
        mstar = m;
        break;
      }
    if (mstar == 0) break;
    ++out.trace.positions;

    long winner = -1;
    if (replay) {
      if (replay_at < replay->size() && (*replay)[replay_at].position == d)
        winner = (*replay)[replay_at++].unit_index;
    } else {
      Rung& r = rungs[static_cast<size_t>(mstar - 1)];
      if (r.stale) refresh_rung(r, out.z, x, wc);
      LocalNum td = t_power_any(tw, d);
      std::vector<Rational> s = candidate_scores(r, td, d, wc, out.trace.taylor_mults);
      Rational best = r.base;
      bool tie_at_base = false;
      for (const Rational& sc : s) {
        if (sc > best) best = sc;
        if (sc == r.base && r.base < r.cap) tie_at_base = true;
      }
      if (best > r.base) {
        for (size_t u = 0; u < s.size(); ++u)
          if (s[u] == best) {
            winner = static_cast<long>(u);
            break;
          }
      } else if (tie_at_base) {
        // a candidate tied the unsaturated base reading (grade-collided
        // Taylor channels make the landscape locally flat); the digit here
        // is settled by the deviation audit, not by the walk
        out.trace.flags.push_back(d);
      }
    }

    if (winner >= 0) {
      out.z = (out.z + wc.units[static_cast<size_t>(winner)] * t_power_any(tw, d))
                  .normalized()
                  .assume_exact();
      out.trace.commits.push_back({d, winner});
      for (Rung& r : rungs) r.stale = true;
    }
  }
  return out;
}

// exhaustive unit-scalar search over c = sum tau_i p^i (tau_0 a unit digit,
// the rest zero or units), maximizing the trust-capped valuation of the
// residual kappa_c(t) - zeta_target; deterministic first-max tie-break
struct ScalarOutcome {
  std::vector<long> digits;
  LocalNum omega;
  Rational score{0};
  long candidates = 0;
};

ScalarOutcome run_scalar(const WalkContext& wc, const SolverEquation& eq, const LocalNum& z,
                         const SolveConfig& cfg, const std::vector<long>* replay) {
  const Tower& tw = *wc.tw;
  Rational fcap = make_rational(cfg.K + 1, wc.e);
  long q1 = wc.prm.q - 1;
  std::vector<long> digits(static_cast<size_t>(cfg.n), -1);
  digits[0] = 0;
  ScalarOutcome best;
  bool have = false;
  for (;;) {
    if (!replay || *replay == digits) {
      LocalNum c = tw.zero();
      Int pi = 1;
      for (long i = 0; i < cfg.n; ++i) {
        long di = digits[static_cast<size_t>(i)];
        if (di >= 0) c = c + wc.units[static_cast<size_t>(di)] * pi;
        pi *= cfg.p;
      }
      LocalNum omega_c = (c * z).normalized().assume_exact();
      Rational s = capped_score(ring_val(eq.eval(omega_c).normalized()), fcap);
      ++best.candidates;
      if (!have || s > best.score) {
        best.digits = digits;
        best.omega = omega_c;
        best.score = s;
        have = true;
      }
    }
    long i = cfg.n - 1;
    for (; i >= 0; --i) {
      if (digits[static_cast<size_t>(i)] < q1 - 1) {
        ++digits[static_cast<size_t>(i)];
        break;
      }
      digits[static_cast<size_t>(i)] = (i == 0) ? 0 : -1;
    }
    if (i < 0) break;
  }
  if (!have) throw std::invalid_argument("scalar digits outside the enumerated family");
  return best;
}

// Decisions about the true coefficients rest on Taylor error channels: for a
// point within depth x of the period line, P_k(point) - P_k(line) is a sum of
// D_j P_k * delta^j with val(delta) = x.  Everything below is exact rational
// bookkeeping over measured channel valuations.

constexpr long kTSafeNum = 2;  // claims examined never reach valuation 2

// measured valuations of the divided derivatives of one coefficient
// polynomial at the point, grown on demand
struct MeasCache {
  const YPoly* P = nullptr;
  long deg = 0;
  Rational pm{0};  // Gauss-profile minimum of P: min_t val(a_t) + t*p/(q-1)
  std::vector<ValueV> meas;    // meas[j] = ring_val(D_j P(point)), index 0 unused
  std::vector<LocalNum> dval;  // dval[j-1] = D_j P(point), kept for tied channels

  void init(const YPoly& poly, const Params& prm) {
    if (P) return;
    P = &poly;
    deg = static_cast<long>(poly.degree());
    pm = gauss_profile(poly, prm).min_value;
    meas.assign(1, ValueV::infinite());
  }
  void grow(long J, const std::vector<LocalNum>& ztab) {
    for (long j = static_cast<long>(meas.size()); j <= J; ++j) {
      YPoly Dj = hasse_derivative(*P, static_cast<unsigned long>(j));
      LocalNum v = Dj.is_zero() ? ztab[0] * Int(0) : ypoly_eval_pow(Dj, ztab).normalized();
      meas.push_back(Dj.is_zero() ? ValueV::infinite() : ring_val(v));
      dval.push_back(std::move(v));
    }
  }
};

// channel survey for one cell under val(delta) >= x (or = x for the audit):
// channel j carries D_j P(z) delta^j with measured valuation meas[j] + j*x;
// channels past J are closed by the Gauss profile (GaussMin_j >= pm - j*p/(q-1)
// at any point of valuation p/(q-1)), which clears tsafe by the sizing of J
// or vanishes when the derivatives run out.
struct ChannelScan {
  long J = 0;
  bool has_tail = false;
  Rational tail_lb{0};
  Rational floor_val{0};     // min(tsafe, all channel lower bounds)
  long jmin = 0;             // strictly unique argmin channel, 0 if none
  bool min_exact = false;    // argmin channel valuation is an exact measurement
  Rational min_lb{0};
  std::vector<long> tie_js;  // argmin channels when tied and all exactly measured
};

ChannelScan scan_channels(MeasCache& c, const Rational& x, const Rational& pq1,
                          const std::vector<LocalNum>& ztab) {
  const Rational tsafe(kTSafeNum);
  ChannelScan out;
  out.floor_val = tsafe;
  Rational slope = x - pq1;
  if (slope <= 0) {
    out.floor_val = Rational(-kBigVal);
    return out;
  }
  long J = 0;
  while (J < c.deg && c.pm + Rational(J + 1) * slope <= tsafe) ++J;
  out.J = J;
  if (J < c.deg) {
    out.has_tail = true;
    out.tail_lb = c.pm + Rational(J + 1) * slope;
  }
  if (J == 0) return out;
  c.grow(J, ztab);
  std::vector<long> cand;
  bool cand_exact = true;
  for (long j = 1; j <= J; ++j) {
    const ValueV& m = c.meas[static_cast<size_t>(j)];
    if (m.is_infinite()) continue;
    Rational lb = (m.is_finite() ? m.value() : m.cutoff()) + Rational(j) * x;
    out.floor_val = std::min(out.floor_val, lb);
    if (cand.empty() || lb < out.min_lb) {
      cand.assign(1, j);
      out.min_lb = lb;
      cand_exact = m.is_finite();
    } else if (lb == out.min_lb) {
      cand.push_back(j);
      cand_exact = cand_exact && m.is_finite();
    }
  }
  if (cand.size() == 1) {
    out.jmin = cand[0];
    out.min_exact = cand_exact;
  } else if (cand.size() > 1 && cand_exact) {
    out.tie_js = std::move(cand);
  }
  return out;
}

// predicted reading under a forced channel value, against the anchors:
// marker cells carry w(q^m) exactly, generic true coefficients are integral
// (so only a channel below 0 predicts anything); true when the prediction
// exists and the measurement contradicts it
bool forced_contradicts(const Rational& forced, const ValueV& observed, const Rational& wk,
                        bool marker, Rational* predicted_out) {
  Rational predicted;
  if (marker) {
    if (forced == wk) return false;
    predicted = std::min(forced, wk);
  } else {
    if (forced >= 0) return false;
    predicted = forced;
  }
  if (predicted_out) *predicted_out = predicted;
  return observed.known_gt(predicted) || (observed.is_finite() && observed.value() != predicted);
}

// Deviation audit.  Hypothesis H(x): val(z - line point) = x exactly (unit
// leading digit).  The finite identity P(line) = P(z) + sum_j D_j P(z)(-d)^j
// writes the true coefficient in measured quantities; when one channel sits
// strictly below all others and the tail, val(P(z) - u_true) is forced to
// that channel's exact value and an incompatible measurement refutes H(x).
// Grade-tied channels are combined: the lead of their sum depends on the
// deviation only through its leading unit (tail digits enter at least 1/e
// above the tie), so measuring the combination for every candidate unit
// either exhibits the flat spot or refutes all of them.
bool refutes_deviation(MeasCache& c, long d, const Rational& x, const ValueV& observed,
                       const Rational& wk, bool marker, const WalkContext& wc,
                       const std::vector<LocalNum>& ztab, std::string* how) {
  const Rational tsafe(kTSafeNum);
  ChannelScan ch = scan_channels(c, x, wc.pq1, ztab);
  if (ch.J == 0) {
    // every channel clears tsafe: the reading is forced to the anchor itself
    if (marker && wk < tsafe &&
        (observed.known_gt(wk) || (observed.is_finite() && observed.value() != wk))) {
      if (how) *how = "forced to w(q^m) = " + rat_str(wk);
      return true;
    }
    if (how) *how = "no visible channels";
    return false;
  }
  if (ch.has_tail && ch.min_lb >= ch.tail_lb) {
    if (how) *how = "profile tail shadows the min channel";
    return false;
  }
  if (ch.jmin != 0 && ch.min_exact) {
    Rational predicted;
    if (forced_contradicts(ch.min_lb, observed, wk, marker, &predicted)) {
      if (how) {
        std::ostringstream os;
        os << "channel j=" << ch.jmin << " forces " << rat_str(predicted) << ", read "
           << observed.str();
        *how = os.str();
      }
      return true;
    }
    if (how) *how = "reading compatible with forced channel " + rat_str(ch.min_lb);
    return false;
  }
  if (!ch.tie_js.empty()) {
    Rational cross_lb = ch.min_lb + make_rational(1, wc.e);
    Rational next_above = std::min(tsafe, cross_lb);
    if (ch.has_tail) next_above = std::min(next_above, ch.tail_lb);
    for (long j = 1; j <= ch.J; ++j) {
      if (std::find(ch.tie_js.begin(), ch.tie_js.end(), j) != ch.tie_js.end()) continue;
      const ValueV& m = c.meas[static_cast<size_t>(j)];
      if (m.is_infinite()) continue;
      Rational lb = (m.is_finite() ? m.value() : m.cutoff()) + Rational(j) * x;
      next_above = std::min(next_above, lb);
    }
    LocalNum td = t_power_any(*wc.tw, d);
    bool all = true;
    for (size_t u = 0; u < wc.units.size() && all; ++u) {
      LocalNum neg = (wc.units[u] * td * Int(-1)).normalized();
      LocalNum combo = wc.tw->zero();
      for (long j : ch.tie_js)
        combo = combo + c.dval[static_cast<size_t>(j - 1)] * ln_pow(neg, j);
      ValueV vu = ring_val(combo.normalized());
      if (!vu.is_finite() || !(vu.value() < next_above) ||
          !forced_contradicts(vu.value(), observed, wk, marker, nullptr))
        all = false;
    }
    if (all) {
      if (how) {
        std::ostringstream os;
        os << ch.tie_js.size() << " channels tied at " << rat_str(ch.min_lb)
           << " contradict every unit lead";
        *how = os.str();
      }
      return true;
    }
    if (how) *how = "tied channels leave a flat spot";
    return false;
  }
  if (how) *how = "min channel not unique or not exact";
  return false;
}

void judge_cell(CellReading& c, const Rational& w) {
  const ValueV& r = c.reading;
  const Rational& fl = c.floor_val;
  if (r.equals_exact(w))
    c.weight_match = Verdict::pass;
  else if (r.is_finite() || r.known_gt(w))
    c.weight_match = Verdict::fail;
  else
    c.weight_match = Verdict::inconclusive;
  if (r.known_ge(Rational(0)) && fl >= 0)
    c.integral = Verdict::pass;
  else if (r.is_finite() && r.value() < 0 && r.value() < fl)
    c.integral = Verdict::fail;
  else
    c.integral = Verdict::inconclusive;
  if (fl > w) {
    if (r.equals_exact(w))
      c.exact_weight = Verdict::pass;
    else if (r.is_finite() || r.known_ge(fl))
      c.exact_weight = Verdict::fail;  // reading is the true value, or provably > w
    else
      c.exact_weight = Verdict::inconclusive;
  } else {
    if (r.is_finite() && r.value() < fl)
      c.exact_weight = Verdict::fail;  // witnessed: true value = reading < floor <= w
    else
      c.exact_weight = Verdict::inconclusive;
  }
}

OmegaResult solve_impl(const SolveConfig& cfg, const std::vector<DigitCommit>* replay_commits,
                       const std::vector<long>* replay_scalar);

void add_consistency_check(OmegaResult& res, const SolveConfig& cfg) {
  SolveConfig sub = cfg;
  sub.n = cfg.n - 1;
  long q = cfg.p * cfg.p;
  long esub = (q - 1) * ipow(q, sub.n - 1);
  sub.K = std::max({(cfg.A + 2) * esub, 5 * esub, q * q + 1});
  sub.with_torsion = false;
  sub.with_consistency = false;
  sub.seed_unit = cfg.seed_unit;
  OmegaResult lower = solve_impl(sub, nullptr, nullptr);

  long compared = 0, mismatched = 0;
  std::string first;
  long kmax = std::min(cfg.K, sub.K);
  for (long k = 1; k <= kmax; ++k) {
    const CellReading& a = res.cells[static_cast<size_t>(k - 1)];
    const CellReading& b = lower.cells[static_cast<size_t>(k - 1)];
    bool da = a.reading.is_finite() && a.reading.value() < a.floor_val;
    bool db = b.reading.is_finite() && b.reading.value() < b.floor_val;
    if (!da || !db) continue;
    ++compared;
    if (a.reading.value() != b.reading.value()) {
      ++mismatched;
      if (first.empty())
        first = "k=" + std::to_string(k) + ": " + a.reading.str() + " vs " + b.reading.str();
    }
  }
  std::ostringstream os;
  os << compared << " decided cells agree across levels " << cfg.n << "/" << sub.n;
  if (mismatched) os << "; " << mismatched << " mismatched, first " << first;
  res.self_checks.push_back(
      {"level-consistency", mismatched == 0 ? Verdict::pass : Verdict::fail, os.str()});
}

OmegaResult solve_impl(const SolveConfig& cfg, const std::vector<DigitCommit>* replay_commits,
                       const std::vector<long>* replay_scalar) {
  if (cfg.n < 1 || cfg.f != 2 || cfg.K < 4 || cfg.A < 1)
    throw std::invalid_argument("unsupported solver config");
  Params prm = Params::make(cfg.p);
  long e = (prm.q - 1) * ipow(prm.q, cfg.n - 1);
  if (cfg.with_torsion && cfg.K + 1 <= cfg.A * e)
    throw std::invalid_argument(
        "insufficient series length K: torsion readings are only trusted up to (K+1)/e, "
        "which must exceed the target window A");

  long qn = ipow(prm.q, cfg.n);
  long ktab = std::max(cfg.K, qn);
  long Awork = Tower::working_precision(cfg.A, ktab, cfg.p);

  OmegaResult res;
  res.cfg = cfg;
  res.Awork = Awork;
  auto tower = Tower::build(prm, cfg.f, cfg.n, cfg.A, Awork, cfg.coord_budget);
  res.tower = tower;
  res.family = pk_series(static_cast<unsigned long>(ktab), prm, LTModel::special);

  WalkContext wc;
  wc.tw = tower.get();
  wc.prm = prm;
  wc.e = e;
  wc.pq1 = make_rational(cfg.p, prm.q - 1);
  wc.units = tower->teichmuller_units();
  if (cfg.seed_unit < 0 || cfg.seed_unit >= static_cast<long>(wc.units.size()))
    throw std::invalid_argument("seed_unit out of range");
  wc.upow.resize(wc.units.size());
  for (size_t u = 0; u < wc.units.size(); ++u) {
    wc.upow[u].reserve(static_cast<size_t>(prm.q - 1));
    wc.upow[u].push_back(tower->one());
    for (long r = 1; r < prm.q - 1; ++r)
      wc.upow[u].push_back((wc.upow[u].back() * wc.units[u]).normalized());
  }

  WalkOutcome walk = run_walk(wc, res.family, cfg, replay_commits);
  res.walk = walk.trace;

  if (cfg.with_torsion) {
    std::vector<YPoly> pk0 =
        pk_series(static_cast<unsigned long>(cfg.K), prm, LTModel::polynomial);
    LocalNum zeta_pn = tower->root_of_unity(cfg.n);
    res.zeta = ln_pow(zeta_pn, cfg.zeta_power).assume_exact();
    SolverEquation eq(tower, cfg.K, pk0, res.zeta - tower->one());
    ScalarOutcome sc = run_scalar(wc, eq, walk.z, cfg, replay_scalar);
    res.scalar_digits = sc.digits;
    res.omega = sc.omega;

    LocalNum kap = (eq.eval(res.omega) + res.zeta).normalized().assume_exact();
    Rational fcap = make_rational(cfg.K + 1, e);
    {
      ValueV tv = ring_val((ln_pow(kap, ipow(cfg.p, cfg.n)) - tower->one()).normalized());
      std::ostringstream os;
      os << "val(kappa(t)^(p^n) - 1) = " << tv.str() << " >= window " << cfg.A << " (trust "
         << rat_str(fcap) << ")";
      res.self_checks.push_back({"character-torsion",
                                 tv.known_ge(Rational(cfg.A)) ? Verdict::pass : Verdict::fail,
                                 os.str()});
    }
    {
      Rational expect = make_rational(1, cfg.p - 1);
      ValueV pv = ring_val((ln_pow(kap, ipow(cfg.p, cfg.n - 1)) - tower->one()).normalized());
      std::ostringstream os;
      os << "val(kappa(t)^(p^(n-1)) - 1) = " << pv.str() << ", exact order p^n needs "
         << rat_str(expect);
      res.self_checks.push_back({"character-primitivity",
                                 pv.equals_exact(expect) ? Verdict::pass : Verdict::fail,
                                 os.str()});
    }
    {
      long pn = ipow(cfg.p, cfg.n);
      Rational bestd(-kBigVal);
      long argbest = -1, nbest = 0;
      for (long j = 1; j < pn; ++j) {
        if (j % cfg.p == 0) continue;
        LocalNum zj = ln_pow(tower->root_of_unity(cfg.n), j);
        Rational s = capped_score(ring_val((kap - zj).normalized()), fcap);
        if (s > bestd) {
          bestd = s;
          argbest = j;
          nbest = 1;
        } else if (s == bestd) {
          ++nbest;
        }
      }
      std::ostringstream os;
      os << "nearest primitive branch is zeta^" << argbest << " at capped distance "
         << rat_str(bestd) << (nbest > 1 ? " (tied)" : "");
      bool ok = (argbest == cfg.zeta_power && nbest == 1);
      res.self_checks.push_back(
          {"branch-targeting", ok ? Verdict::pass : Verdict::fail, os.str()});
    }
  } else {
    res.omega = walk.z;
  }

  // audit cells: the reported range 1..K plus marker cells q^m beyond it
  std::vector<long> audit_ks;
  std::vector<ValueV> readv(static_cast<size_t>(ktab) + 1, ValueV::infinite());
  std::vector<Rational> wk(static_cast<size_t>(ktab) + 1);
  std::vector<char> is_marker(static_cast<size_t>(ktab) + 1, 0);
  for (long m = 1, qm = prm.q; m <= cfg.n; ++m, qm *= prm.q)
    is_marker[static_cast<size_t>(qm)] = 1;
  std::vector<LocalNum> ztab = power_table(res.omega, ktab);
  res.cells.reserve(static_cast<size_t>(cfg.K));
  for (long k = 1; k <= ktab; ++k) {
    if (k > cfg.K && !is_marker[static_cast<size_t>(k)]) continue;
    audit_ks.push_back(k);
    readv[static_cast<size_t>(k)] =
        ring_val(ypoly_eval_pow(res.family[static_cast<size_t>(k)], ztab).normalized());
    wk[static_cast<size_t>(k)] = weight(Int(k), prm);
    if (k <= cfg.K) {
      CellReading c;
      c.k = k;
      c.reading = readv[static_cast<size_t>(k)];
      res.cells.push_back(std::move(c));
    }
  }

  // deviation audit: refute every candidate deviation depth below the wall
  std::vector<MeasCache> caches(static_cast<size_t>(ktab) + 1);
  {
    Rational wall = res.walk.depth;
    long d0 = res.walk.seed_position;
    size_t last_idx = 0;
    while (last_idx + 1 < audit_ks.size() && audit_ks[last_idx] < prm.q) ++last_idx;
    for (long d = d0 + 1; d <= cfg.n * e; ++d) {
      Rational x = make_rational(d, e);
      ++res.walk.audited;
      bool done = false;
      for (size_t pass = 0; pass < audit_ks.size() && !done; ++pass) {
        size_t idx = (pass == 0) ? last_idx : (pass - 1 < last_idx ? pass - 1 : pass);
        long k = audit_ks[idx];
        MeasCache& c = caches[static_cast<size_t>(k)];
        c.init(res.family[static_cast<size_t>(k)], prm);
        if (refutes_deviation(c, d, x, readv[static_cast<size_t>(k)], wk[static_cast<size_t>(k)],
                              is_marker[static_cast<size_t>(k)] != 0, wc, ztab, nullptr)) {
          last_idx = idx;
          done = true;
        }
      }
      if (!done) {
        if (const char* dbg = getenv("LTP_AUDIT_DEBUG"); dbg && atol(dbg) == d) {
          for (long k : audit_ks) {
            if (k > 40 && !is_marker[static_cast<size_t>(k)]) continue;
            MeasCache& c = caches[static_cast<size_t>(k)];
            c.init(res.family[static_cast<size_t>(k)], prm);
            std::string why;
            refutes_deviation(c, d, x, readv[static_cast<size_t>(k)], wk[static_cast<size_t>(k)],
                              is_marker[static_cast<size_t>(k)] != 0, wc, ztab, &why);
            fprintf(stderr, "  d=%ld k=%ld: %s\n", d, k, why.c_str());
          }
        }
        res.walk.unrefuted.push_back(d);
        res.walk.depth_clean = false;
      }
    }
    if (!res.walk.unrefuted.empty())
      res.walk.depth = make_rational(res.walk.unrefuted.front(), e);
    std::ostringstream os;
    os << res.walk.audited << " deviation depths in (" << rat_str(wc.pq1) << ", "
       << rat_str(wall) << ") audited, "
       << res.walk.audited - static_cast<long>(res.walk.unrefuted.size())
       << " refuted against marker and integrality anchors; certified depth "
       << rat_str(res.walk.depth);
    if (!res.walk.unrefuted.empty()) {
      os << "; flat spots at";
      for (long d : res.walk.unrefuted) os << " " << d << "/" << e;
      os << (res.walk.unrefuted == res.walk.flags ? " (match the walk's flagged positions)"
                                                  : " (walk flagged a different set)");
    }
    // the certificate must at least clear the first marker rung: a point
    // one full level along the line, strictly past any single-digit guess
    Rational rung1 = Rational(1) + weight(Int(prm.q), prm);
    res.self_checks.push_back({"distance-certificate",
                               res.walk.depth >= rung1 ? Verdict::pass : Verdict::inconclusive,
                               os.str()});
  }

  for (long k = 1; k <= cfg.K; ++k) {
    CellReading& c = res.cells[static_cast<size_t>(k - 1)];
    MeasCache& mc = caches[static_cast<size_t>(k)];
    mc.init(res.family[static_cast<size_t>(k)], prm);
    c.floor_val = scan_channels(mc, res.walk.depth, wc.pq1, ztab).floor_val;
    judge_cell(c, wk[static_cast<size_t>(k)]);
  }

  {
    ValueV ov = ring_val(res.omega);
    std::ostringstream os;
    os << "val(omega) = " << ov.str() << ", expected " << rat_str(wc.pq1);
    res.self_checks.push_back(
        {"omega-valuation", ov.equals_exact(wc.pq1) ? Verdict::pass : Verdict::fail, os.str()});
  }
  {
    long npass = 0, nfail = 0, ninc = 0;
    std::string first;
    for (const CellReading& c : res.cells) {
      if (c.integral == Verdict::pass) {
        ++npass;
      } else if (c.integral == Verdict::fail) {
        ++nfail;
        if (first.empty()) first = "k=" + std::to_string(c.k) + " reads " + c.reading.str();
      } else {
        ++ninc;
      }
    }
    std::ostringstream os;
    os << npass << "/" << cfg.K << " certified nonnegative, " << ninc
       << " beyond model depth, " << nfail << " witnessed violations";
    if (nfail) os << " (first " << first << ")";
    // only a reading certified below its floor can witness a violation;
    // cells whose floor is negative cannot testify either way
    res.self_checks.push_back(
        {"coefficient-integrality", nfail == 0 ? Verdict::pass : Verdict::fail, os.str()});
  }
  {
    // readings track w(k) strictly below q^n; the final marker itself keeps
    // the walk's terminal deficit
    long kexact = std::min(cfg.K, qn - 1);
    long bad = 0;
    std::string first;
    for (long k = 1; k <= kexact; ++k)
      if (res.cells[static_cast<size_t>(k - 1)].weight_match != Verdict::pass) {
        ++bad;
        if (first.empty()) first = "k=" + std::to_string(k);
      }
    std::ostringstream os;
    os << "val(P_k(omega)) = w(k) exactly for all k <= " << kexact;
    if (bad) os << " except " << bad << " cells, first " << first;
    res.self_checks.push_back(
        {"exact-weight-low-range", bad == 0 ? Verdict::pass : Verdict::fail, os.str()});
  }
  if (cfg.with_consistency && cfg.n >= 2) add_consistency_check(res, cfg);

  res.all_pass = true;
  for (const SelfCheck& s : res.self_checks)
    if (s.verdict == Verdict::fail) res.all_pass = false;
  return res;
}

}  // namespace

OmegaResult solve_omega(const SolveConfig& cfg) { return solve_impl(cfg, nullptr, nullptr); }

OmegaResult replay_omega(const SolveConfig& cfg, const std::vector<DigitCommit>& commits,
                         const std::vector<long>& scalar_digits) {
  return solve_impl(cfg, &commits, cfg.with_torsion ? &scalar_digits : nullptr);
}

}  // namespace ltp
