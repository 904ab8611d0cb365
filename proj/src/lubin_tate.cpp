#include "ltp/lubin_tate.hpp"

#include <sstream>

namespace ltp {

namespace {

Rational p_power(long p, long e) {
  Int pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e < 0 ? -e : e));
  return e >= 0 ? Rational(pw) : make_rational(Int(1), pw);
}

Int factorial(unsigned long n) {
  Int out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

}  // namespace

ZSeries<Rational> log_special(const Params& prm, size_t cap) {
  if (cap < 2) throw std::invalid_argument("log_special: cap must be >= 2");
  std::vector<Rational> c(cap, Rational(0));
  Int deg(1);
  long k = 0;
  while (deg < static_cast<long>(cap)) {
    c[static_cast<size_t>(deg.get_ui())] = p_power(prm.p, -k);
    deg *= prm.q;
    ++k;
  }
  return ZSeries<Rational>(std::move(c));
}

ZSeries<Rational> exp_special(const Params& prm, size_t cap) {
  return series_reversion(log_special(prm, cap));
}

ZSeries<Rational> log_polynomial(const Params& prm, size_t cap) {
  if (cap < 2) throw std::invalid_argument("log_polynomial: cap must be >= 2");
  const long p = prm.p;
  const long q = prm.q;
  std::vector<Rational> c(cap, Rational(0));
  c[1] = 1;
  for (size_t N = 2; N < cap; ++N) {
    // c_N (p - p^N) = sum_{i>=1} c_{N-(q-1)i} * binom(N-(q-1)i, i) * p^{N-(q-1)i-i}
    Rational rhs(0);
    for (long i = 1;; ++i) {
      long low = static_cast<long>(N) - (q - 1) * i;
      if (low < 1) break;
      if (low < i) continue;  // binom(low, i) = 0 only when low < i
      if (c[static_cast<size_t>(low)] == 0) continue;
      Int b;
      mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(low), static_cast<unsigned long>(i));
      rhs += c[static_cast<size_t>(low)] * Rational(b) * p_power(p, low - i);
    }
    if (rhs != 0) {
      Rational denom = Rational(p) - p_power(p, static_cast<long>(N));
      c[N] = rhs / denom;
    }
  }
  return ZSeries<Rational>(std::move(c));
}

ZSeries<Rational> mul_p(LTModel model, const Params& prm, size_t cap) {
  if (cap < static_cast<size_t>(prm.q) + 1)
    throw std::invalid_argument("mul_p: cap must be >= q+1");
  if (model == LTModel::polynomial) {
    std::vector<Rational> c(cap, Rational(0));
    c[1] = prm.p;
    c[static_cast<size_t>(prm.q)] = 1;
    return ZSeries<Rational>(std::move(c));
  }
  ZSeries<Rational> lg = log_special(prm, cap).scaled(Rational(prm.p));
  return series_compose(exp_special(prm, cap), lg);
}

Lemma35Result check_mulp_shape(const Params& prm, size_t cap) {
  ZSeries<Rational> t = mul_p(LTModel::special, prm, cap);
  Rational psq = Rational(prm.p) * Rational(prm.p);
  std::vector<Rational> sc(cap, Rational(0));
  CheckResult res{"mulp-polynomial-shape", true, 0, ""};
  for (size_t i = 0; i < cap; ++i) {
    Rational d = t[i];
    if (i == 1) d -= prm.p;
    if (i == static_cast<size_t>(prm.q)) d -= 1;
    sc[i] = d / psq;
    ++res.instances;
    bool ok;
    if (i < 2)
      ok = sc[i] == 0;
    else
      ok = val_p_rat(sc[i], prm.p).known_ge(Rational(0));
    if (!ok && res.pass) {
      res.pass = false;
      std::ostringstream os;
      os << "coefficient of Z^" << i << " is " << rat_str(sc[i]);
      res.detail = os.str();
    }
  }
  return Lemma35Result{std::move(res), ZSeries<Rational>(std::move(sc))};
}

YPoly pk_combinatorial(const Int& m, const Params& prm) {
  if (m < 0) throw std::invalid_argument("pk_combinatorial: negative m");
  YPoly out;
  // digits (m_0, m_1, ..., m_d) with m = sum m_i q^i, m_i >= 0 unbounded
  std::vector<unsigned long> mi;
  std::vector<Int> qpow{Int(1)};
  while (qpow.back() * prm.q <= m) qpow.push_back(qpow.back() * prm.q);

  auto emit = [&](auto&& self, size_t level, const Int& rest) -> void {
    if (level == 0) {
      unsigned long ydeg = rest.get_ui();
      Int den = factorial(ydeg);
      long pexp = 0;
      for (size_t i = 0; i < mi.size(); ++i) {
        // mi holds m_d, m_{d-1}, ..., m_1 in push order
        long idx = static_cast<long>(qpow.size()) - 1 - static_cast<long>(i);
        den *= factorial(mi[i]);
        pexp += idx * static_cast<long>(mi[i]);
        ydeg += mi[i];
      }
      Rational coeff = make_rational(Int(1), den) * p_power(prm.p, -pexp);
      out.add_term(ydeg, coeff);
      return;
    }
    const Int& qp = qpow[level];
    for (Int v = 0; v * qp <= rest; ++v) {
      mi.push_back(v.get_ui());
      self(self, level - 1, rest - v * qp);
      mi.pop_back();
    }
  };
  emit(emit, qpow.size() - 1, m);
  return out;
}

std::vector<YPoly> pk_series(unsigned long mmax, const Params& prm, LTModel model) {
  if (mmax < 1) throw std::invalid_argument("pk_series: mmax must be >= 1");
  const size_t cap = static_cast<size_t>(mmax) + 1;

  if (model == LTModel::special) {
    ZSeries<YPoly> acc = ZSeries<YPoly>::zero(cap, YPoly());
    acc.at(0) = YPoly(Rational(1));
    Int qpow(1);
    long k = 0;
    while (qpow <= mmax) {
      // exp(Y Z^{q^k} / p^k) = sum_j Y^j Z^{j q^k} / (j! p^{kj})
      ZSeries<YPoly> factor = ZSeries<YPoly>::zero(cap, YPoly());
      for (Int j = 0, deg = 0; deg < cap; ++j, deg += qpow) {
        unsigned long ju = j.get_ui();
        Rational c = make_rational(Int(1), factorial(ju)) * p_power(prm.p, -k * static_cast<long>(ju));
        factor.at(deg.get_ui()) = YPoly::monomial(ju, c);
      }
      acc = acc * factor;
      qpow *= prm.q;
      ++k;
    }
    std::vector<YPoly> out(acc.coeffs());
    return out;
  }

  // polynomial model: E = exp(S) with S = Y log0(Z), via m E_m = sum j S_j E_{m-j}
  ZSeries<Rational> lg = log_polynomial(prm, cap);
  std::vector<YPoly> E(cap);
  E[0] = YPoly(Rational(1));
  for (size_t m = 1; m < cap; ++m) {
    YPoly acc;
    for (size_t j = 1; j <= m; ++j) {
      if (lg[j] == 0) continue;
      // j * S_j * E_{m-j} with S_j = lg[j] * Y
      acc = acc + E[m - j].shift_up(1) * (lg[j] * Rational(static_cast<unsigned long>(j)));
    }
    E[m] = acc * make_rational(Int(1), Int(static_cast<unsigned long>(m)));
  }
  return E;
}

GaussProfile gauss_profile(const YPoly& P, const Params& prm) {
  if (P.is_zero()) throw std::invalid_argument("gauss_profile: zero polynomial");
  GaussProfile out;
  Rational wY = make_rational(Int(prm.p), Int(prm.q - 1));
  bool first = true;
  for (const auto& [j, c] : P.coeffs()) {
    Rational term = val_p_rat(c, prm.p).value() + wY * Rational(static_cast<unsigned long>(j));
    out.entries.emplace_back(j, term);
    if (first || term < out.min_value) {
      out.min_value = term;
      first = false;
    }
  }
  for (const auto& [j, term] : out.entries)
    if (term == out.min_value) ++out.tie_count;
  return out;
}

CheckResult identity_divbyu1(unsigned long kmax, const Params& prm) {
  CheckResult res{"divisibility-identity", true, 0, ""};
  std::vector<YPoly> P = pk_series(kmax, prm, LTModel::special);
  for (unsigned long k = 1; k <= kmax; ++k) {
    YPoly lhs = P[k] * Rational(k);
    YPoly rhs;
    Int qpow(1);
    long r = 0;
    while (qpow <= k) {
      rhs = rhs + P[static_cast<size_t>(k - qpow.get_ui())] * p_power(prm.p, r);
      qpow *= prm.q;
      ++r;
    }
    rhs = rhs.shift_up(1);
    ++res.instances;
    if (lhs != rhs && res.pass) {
      res.pass = false;
      res.detail = "k = " + std::to_string(k);
    }
  }
  return res;
}

CheckResult identity_functional_eq(const Params& prm, size_t zcap) {
  CheckResult res{"mulp-functional-equation", true, 0, ""};
  std::vector<YPoly> P = pk_series(zcap - 1, prm, LTModel::special);
  ZSeries<YPoly> G = ZSeries<YPoly>::zero(zcap, YPoly());
  for (size_t m = 1; m < zcap; ++m) G.at(m) = P[m];

  ZSeries<Rational> mp = mul_p(LTModel::special, prm, zcap);
  ZSeries<YPoly> mpY = ZSeries<YPoly>::zero(zcap, YPoly());
  for (size_t i = 0; i < zcap; ++i) mpY.at(i) = YPoly(mp[i]);

  ZSeries<YPoly> lhs = series_compose(G, mpY);
  ZSeries<YPoly> onepG = G;
  onepG.at(0) = YPoly(Rational(1));
  ZSeries<YPoly> rhs = series_pow(onepG, static_cast<unsigned long>(prm.p));
  rhs.at(0) = rhs[0] - YPoly(Rational(1));

  for (size_t i = 0; i < zcap; ++i) {
    ++res.instances;
    if (!(lhs[i] == rhs[i]) && res.pass) {
      res.pass = false;
      res.detail = "Z-coefficient " + std::to_string(i);
    }
  }
  return res;
}

}  // namespace ltp
