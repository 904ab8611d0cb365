#include "ltp/local_model.hpp"

#include <climits>
#include <stdexcept>
#include <utility>

namespace ltp {

namespace {

Int int_pow(long b, long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(e));
  return r;
}

void reduce_mod(Int& v, const Int& m) { mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()); }

// dense integer polynomials, ascending coefficients
using IPoly = std::vector<Int>;

IPoly ipoly_mul(const IPoly& a, const IPoly& b, const Int& mod) {
  IPoly r(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  for (Int& c : r) reduce_mod(c, mod);
  return r;
}

IPoly ipoly_pow(IPoly base, unsigned long e, const Int& mod) {
  IPoly r{Int(1)};
  while (e > 0) {
    if (e & 1) r = ipoly_mul(r, base, mod);
    e >>= 1;
    if (e > 0) base = ipoly_mul(base, base, mod);
  }
  return r;
}

// division by a monic divisor, exact (throws on nonzero remainder)
IPoly ipoly_divexact_monic(IPoly a, const IPoly& b) {
  if (b.empty() || b.back() != 1) throw std::logic_error("divisor not monic");
  long db = static_cast<long>(b.size()) - 1;
  long dq = static_cast<long>(a.size()) - 1 - db;
  if (dq < 0) throw std::logic_error("degree underflow in exact division");
  IPoly q(dq + 1, Int(0));
  for (long k = dq; k >= 0; --k) {
    Int c = a[k + db];
    q[k] = c;
    if (c == 0) continue;
    for (long i = 0; i <= db; ++i) a[k + i] -= c * b[i];
  }
  for (const Int& c : a)
    if (c != 0) throw std::logic_error("inexact polynomial division");
  return q;
}

// residue-field blocks: f coefficients modulo (u(x), m)
void wblock_mul(long f, const Int* negu, const Int& m, const Int* a, const Int* b, Int* out) {
  if (f == 1) {
    out[0] = a[0] * b[0];
    reduce_mod(out[0], m);
    return;
  }
  Int t2 = a[1] * b[1];
  out[0] = a[0] * b[0] + negu[0] * t2;
  out[1] = a[0] * b[1] + a[1] * b[0] + negu[1] * t2;
  reduce_mod(out[0], m);
  reduce_mod(out[1], m);
}

Rational score_of(const ValueV& v) { return v.is_finite() ? v.value() : v.cutoff(); }

}  // namespace

long Tower::working_precision(long A, long K, long p) {
  Int vf = val_factorial(Int(K), p);
  return A + static_cast<long>(vf.get_si()) + 8;
}

std::shared_ptr<const Tower> Tower::build(const Params& prm, long f, long n, long A, long Awork,
                                          long coord_budget) {
  if (n < 1) throw std::invalid_argument("tower level must be >= 1");
  if (f != 1 && f != 2) throw std::invalid_argument("unramified degree must be 1 or 2");
  if (A < 1 || Awork < A + 2) throw std::invalid_argument("need Awork >= A + 2 >= 3");
  long p = prm.p, q = prm.q;

  auto tw = std::shared_ptr<Tower>(new Tower());
  tw->prm_ = prm;
  tw->f_ = f;
  tw->n_ = n;
  tw->A_ = A;
  tw->Awork_ = Awork;
  tw->pA_ = int_pow(p, Awork);

  long e = q - 1;
  for (long j = 1; j < n; ++j) {
    if (e > coord_budget / q) throw std::invalid_argument("coordinate budget exceeded");
    e *= q;
  }
  tw->e_ = e;
  if (e * f > coord_budget) throw std::invalid_argument("coordinate budget exceeded");

  // unramified part: x^2+x+1 (p=2), x^2+1 (p=3), x^2 - r for the smallest
  // quadratic nonresidue r otherwise
  if (f == 1) {
    tw->upoly_ = {Int(0), Int(1)};
  } else if (p == 2) {
    tw->upoly_ = {Int(1), Int(1), Int(1)};
  } else if (p == 3) {
    tw->upoly_ = {Int(1), Int(0), Int(1)};
  } else {
    long r = 0;
    for (long c = 2; c < p; ++c) {
      Int res;
      Int base(c), mod(p);
      mpz_powm_ui(res.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>((p - 1) / 2),
                  mod.get_mpz_t());
      if (res == p - 1) {
        r = c;
        break;
      }
    }
    if (r == 0) throw std::logic_error("no quadratic nonresidue found");
    Int c0 = tw->pA_ - r;
    tw->upoly_ = {c0, Int(0), Int(1)};
  }

  // Psi_n = psi_1(psi^(n-1)(t)), psi(t) = t^q + pt, psi_1(t) = t^{q-1} + p
  IPoly g{Int(0), Int(1)};
  for (long j = 1; j < n; ++j) {
    IPoly gq = ipoly_pow(g, static_cast<unsigned long>(q), tw->pA_);
    for (size_t i = 0; i < g.size(); ++i) {
      gq[i] += p * g[i];
      reduce_mod(gq[i], tw->pA_);
    }
    g = std::move(gq);
  }
  IPoly psi = ipoly_pow(g, static_cast<unsigned long>(q - 1), tw->pA_);
  psi[0] += p;
  reduce_mod(psi[0], tw->pA_);
  if (static_cast<long>(psi.size()) != e + 1 || psi.back() != 1)
    throw std::logic_error("ramified minimal polynomial has wrong shape");
  if (psi[0] != p) throw std::logic_error("ramified minimal polynomial not Eisenstein");
  tw->vpoly_.resize(e);
  for (long i = 0; i < e; ++i) {
    if (psi[i] % p != 0) throw std::logic_error("ramified minimal polynomial not Eisenstein");
    tw->vpoly_[i] = psi[i] / p;
  }
  if (tw->vpoly_[0] != 1) throw std::logic_error("unit cofactor must have constant term 1");
  tw->psi_ = std::move(psi);

  // p^n-th cyclotomic polynomial in y = z - 1, by exact integer division
  {
    Int pn = int_pow(p, n), pn1 = int_pow(p, n - 1);
    unsigned long un = pn.get_ui(), un1 = pn1.get_ui();
    IPoly num(un, Int(0)), den(un1, Int(0));
    for (unsigned long k = 1; k <= un; ++k)
      mpz_bin_uiui(num[k - 1].get_mpz_t(), un, k);  // ((1+y)^{p^n}-1)/y
    for (unsigned long k = 1; k <= un1; ++k) mpz_bin_uiui(den[k - 1].get_mpz_t(), un1, k);
    tw->phi_ = ipoly_divexact_monic(num, den);
    long phideg = static_cast<long>(tw->phi_.size()) - 1;
    if (phideg != (p - 1) * static_cast<long>(int_pow(p, n - 1).get_si()))
      throw std::logic_error("cyclotomic layer has wrong degree");
    if (tw->phi_[0] != p) throw std::logic_error("cyclotomic polynomial not Eisenstein");
  }

  // caches: t^0..t^e, then V(t)^{-1}
  tw->tpow_.reserve(e + 1);
  tw->tpow_.push_back(tw->zero());
  tw->tpow_[0].c_[0] = 1;
  for (long k = 1; k <= e; ++k) tw->tpow_.push_back(tw->tpow_.back().mul_t());

  LocalNum v = tw->zero();
  for (long i = 0; i < e; ++i) {
    v.c_[i * f] = tw->vpoly_[i];
    reduce_mod(v.c_[i * f], tw->pA_);
  }
  tw->inv_v_ = std::make_unique<LocalNum>(unit_inverse(v));
  return tw;
}

LocalNum Tower::zero() const {
  LocalNum r;
  r.tw_ = this;
  r.shift_ = 0;
  r.prec_ = Awork_;
  r.c_.assign(static_cast<size_t>(dim()), Int(0));
  return r;
}

LocalNum Tower::one() const { return from_int(Int(1)); }

LocalNum Tower::from_int(const Int& v) const {
  LocalNum r = zero();
  r.c_[0] = v;
  reduce_mod(r.c_[0], pA_);
  return r;
}

LocalNum Tower::from_rational(const Rational& v) const {
  Int num = v.get_num(), den = v.get_den();
  long d = 0;
  if (num == 0) return zero();
  Int denu = den;
  while (denu % prm_.p == 0) {
    denu /= prm_.p;
    ++d;
  }
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), denu.get_mpz_t(), pA_.get_mpz_t()) == 0)
    throw std::invalid_argument("denominator not invertible");
  LocalNum r = from_int(num * inv);
  r.shift_ = d;
  return r;
}

LocalNum Tower::t_gen() const { return t_power(1); }

LocalNum Tower::x_gen() const {
  if (f_ < 2) throw std::invalid_argument("no unramified generator for f = 1");
  LocalNum r = zero();
  r.c_[1] = 1;
  return r;
}

const LocalNum& Tower::t_power(long k) const {
  if (k < 0 || k > e_) throw std::out_of_range("t_power index");
  return tpow_[static_cast<size_t>(k)];
}

const LocalNum& Tower::inv_v() const { return *inv_v_; }

LocalNum Tower::teichmuller(long a, long b) const {
  if (f_ == 1 && b != 0) throw std::invalid_argument("residue outside prime field");
  std::vector<Int> negu(static_cast<size_t>(f_));
  for (long j = 0; j < f_; ++j) {
    negu[j] = -upoly_[j];
    reduce_mod(negu[j], pA_);
  }
  std::vector<Int> c(static_cast<size_t>(f_), Int(0)), nx(c), sq(c);
  c[0] = a;
  if (f_ > 1) c[1] = b;
  for (long it = 0; it < Awork_ + 8; ++it) {
    // one x -> x^q step by square-and-multiply over the exponent q
    std::vector<Int> acc(static_cast<size_t>(f_), Int(0));
    acc[0] = 1;
    sq = c;
    long ebits = prm_.q;
    while (ebits > 0) {
      if (ebits & 1) {
        wblock_mul(f_, negu.data(), pA_, acc.data(), sq.data(), nx.data());
        acc = nx;
      }
      ebits >>= 1;
      if (ebits > 0) {
        wblock_mul(f_, negu.data(), pA_, sq.data(), sq.data(), nx.data());
        sq = nx;
      }
    }
    if (acc == c) break;
    c = acc;
  }
  LocalNum r = zero();
  for (long j = 0; j < f_; ++j) r.c_[j] = c[j];
  return r;
}

std::vector<LocalNum> Tower::teichmuller_units() const {
  std::vector<LocalNum> out;
  long p = prm_.p;
  if (f_ == 1) {
    for (long a = 1; a < p; ++a) out.push_back(teichmuller(a, 0));
    return out;
  }
  for (long a = 0; a < p; ++a)
    for (long b = 0; b < p; ++b) {
      if (a == 0 && b == 0) continue;
      out.push_back(teichmuller(a, b));
    }
  return out;
}

LocalNum make_local(const Tower& tw, long shift, long prec, std::vector<Int> coords) {
  if (static_cast<long>(coords.size()) != tw.dim()) throw std::invalid_argument("coord size");
  LocalNum r;
  r.tw_ = &tw;
  r.shift_ = shift;
  r.prec_ = std::min(prec, tw.Awork());
  r.c_ = std::move(coords);
  for (Int& c : r.c_) reduce_mod(c, tw.modulus());
  return r;
}

bool LocalNum::payload_is_zero() const {
  for (const Int& c : c_)
    if (c != 0) return false;
  return true;
}

bool LocalNum::operator==(const LocalNum& o) const { return (*this - o).payload_is_zero(); }

LocalNum LocalNum::operator+(const LocalNum& o) const {
  if (tw_ == nullptr || tw_ != o.tw_) throw std::invalid_argument("tower mismatch");
  const LocalNum *lo = this, *hi = &o;
  if (lo->shift_ > hi->shift_) std::swap(lo, hi);
  long d = hi->shift_ - lo->shift_;  // lo gets scaled by p^d
  LocalNum r = *hi;
  r.prec_ = std::min(std::min(lo->prec_ + d, tw_->Awork()), hi->prec_);
  if (d == 0) {
    for (size_t i = 0; i < r.c_.size(); ++i) {
      r.c_[i] += lo->c_[i];
      reduce_mod(r.c_[i], tw_->modulus());
    }
  } else {
    Int pd = int_pow(tw_->prm().p, d);
    for (size_t i = 0; i < r.c_.size(); ++i) {
      r.c_[i] += lo->c_[i] * pd;
      reduce_mod(r.c_[i], tw_->modulus());
    }
  }
  return r;
}

LocalNum LocalNum::operator-() const {
  LocalNum r = *this;
  for (Int& c : r.c_) {
    c = -c;
    reduce_mod(c, tw_->modulus());
  }
  return r;
}

LocalNum LocalNum::operator-(const LocalNum& o) const { return *this + (-o); }

LocalNum LocalNum::operator*(const LocalNum& o) const {
  if (tw_ == nullptr || tw_ != o.tw_) throw std::invalid_argument("tower mismatch");
  long e = tw_->e(), f = tw_->f();
  const Int& mod = tw_->modulus();
  std::vector<Int> negu(static_cast<size_t>(f));
  for (long j = 0; j < f; ++j) {
    negu[j] = -tw_->upoly()[j];
    reduce_mod(negu[j], mod);
  }
  std::vector<Int> prod(static_cast<size_t>((2 * e - 1) * f), Int(0));
  for (long i1 = 0; i1 < e; ++i1) {
    const Int* a = &c_[static_cast<size_t>(i1 * f)];
    bool az = true;
    for (long j = 0; j < f; ++j) az = az && a[j] == 0;
    if (az) continue;
    for (long i2 = 0; i2 < e; ++i2) {
      const Int* b = &o.c_[static_cast<size_t>(i2 * f)];
      Int* out = &prod[static_cast<size_t>((i1 + i2) * f)];
      if (f == 1) {
        out[0] += a[0] * b[0];
      } else {
        Int t2 = a[1] * b[1];
        out[0] += a[0] * b[0] + negu[0] * t2;
        out[1] += a[0] * b[1] + a[1] * b[0] + negu[1] * t2;
      }
    }
  }
  const std::vector<Int>& psi = tw_->psi();
  for (long deg = 2 * e - 2; deg >= e; --deg) {
    Int* top = &prod[static_cast<size_t>(deg * f)];
    bool tz = true;
    for (long j = 0; j < f; ++j) tz = tz && top[j] == 0;
    if (tz) continue;
    for (long i = 0; i < e; ++i) {
      Int* dst = &prod[static_cast<size_t>((deg - e + i) * f)];
      for (long j = 0; j < f; ++j) dst[j] -= psi[i] * top[j];
    }
  }
  LocalNum r;
  r.tw_ = tw_;
  r.shift_ = shift_ + o.shift_;
  r.prec_ = std::min(prec_, o.prec_);
  r.c_.assign(static_cast<size_t>(e * f), Int(0));
  for (long i = 0; i < e * f; ++i) {
    r.c_[i] = prod[static_cast<size_t>(i)];
    reduce_mod(r.c_[i], mod);
  }
  return r;
}

LocalNum LocalNum::operator*(const Int& s) const {
  LocalNum r = *this;
  for (Int& c : r.c_) {
    c *= s;
    reduce_mod(c, tw_->modulus());
  }
  return r;
}

LocalNum LocalNum::operator*(const Rational& s) const {
  if (s == 0) return tw_->zero();
  Int num = s.get_num(), den = s.get_den();
  long d = 0;
  while (den % tw_->prm().p == 0) {
    den /= tw_->prm().p;
    ++d;
  }
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), tw_->modulus().get_mpz_t()) == 0)
    throw std::invalid_argument("denominator not invertible");
  LocalNum r = *this * Int(num * inv);
  r.shift_ += d;
  return r;
}

LocalNum LocalNum::mul_t() const {
  long e = tw_->e(), f = tw_->f();
  const Int& mod = tw_->modulus();
  LocalNum r;
  r.tw_ = tw_;
  r.shift_ = shift_;
  r.prec_ = prec_;
  r.c_.assign(static_cast<size_t>(e * f), Int(0));
  const Int* top = &c_[static_cast<size_t>((e - 1) * f)];
  const std::vector<Int>& psi = tw_->psi();
  for (long i = e - 1; i >= 1; --i)
    for (long j = 0; j < f; ++j) r.c_[static_cast<size_t>(i * f + j)] = c_[static_cast<size_t>((i - 1) * f + j)];
  bool tz = true;
  for (long j = 0; j < f; ++j) tz = tz && top[j] == 0;
  if (!tz)
    for (long i = 0; i < e; ++i)
      for (long j = 0; j < f; ++j) r.c_[static_cast<size_t>(i * f + j)] -= psi[i] * top[j];
  for (Int& c : r.c_) reduce_mod(c, mod);
  return r;
}

LocalNum LocalNum::strip(long m) const {
  if (m == 0) return *this;
  if (m < 0 || m > prec_) throw std::invalid_argument("strip beyond certified precision");
  Int pm = int_pow(tw_->prm().p, m);
  LocalNum r = *this;
  for (Int& c : r.c_) {
    if (!mpz_divisible_p(c.get_mpz_t(), pm.get_mpz_t()))
      throw std::invalid_argument("payload not divisible in strip");
    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pm.get_mpz_t());
  }
  r.shift_ -= m;
  r.prec_ -= m;
  return r;
}

LocalNum LocalNum::normalized() const {
  if (shift_ <= 0) return *this;
  long vmin = prec_;
  for (const Int& c : c_) {
    if (c == 0) continue;
    vmin = std::min(vmin, val_p_int(c, tw_->prm().p));
    if (vmin == 0) break;
  }
  long m = std::min(shift_, vmin);
  if (m <= 0) return *this;
  return strip(m);
}

LocalNum LocalNum::assume_exact() const {
  LocalNum r = *this;
  r.prec_ = tw_->Awork();
  return r;
}

ValueV ring_val(const LocalNum& a) {
  if (!a.valid()) throw std::invalid_argument("uninitialized element");
  long e = a.tower().e(), f = a.tower().f(), p = a.tower().prm().p;
  long prec = a.prec();
  bool found = false;
  long best_num = 0;  // min over coords of e*val_p(coord) + tdeg
  const std::vector<Int>& c = a.coords();
  for (long i = 0; i < e; ++i)
    for (long j = 0; j < f; ++j) {
      const Int& v = c[static_cast<size_t>(i * f + j)];
      if (v == 0) continue;
      long vp = val_p_int(v, p);
      if (vp >= prec) continue;
      long cand = vp * e + i;
      if (!found || cand < best_num) {
        found = true;
        best_num = cand;
      }
    }
  if (!found) return ValueV::bounded_below(Rational(prec - a.shift()));
  return ValueV::finite(make_rational(Int(best_num), Int(e)) - a.shift());
}

ValueV ring_val_window(const LocalNum& a, const Rational& cap) {
  ValueV v = ring_val(a);
  if (v.is_finite()) return v.value() < cap ? v : ValueV::bounded_below(cap);
  return ValueV::bounded_below(std::min(v.cutoff(), cap));
}

LocalNum unit_inverse(const LocalNum& u) {
  LocalNum un = u.normalized();
  if (un.shift() != 0) throw std::invalid_argument("not a unit");
  const Tower& tw = un.tower();
  long e = tw.e(), f = tw.f(), p = tw.prm().p;
  Int pmod(p);
  std::vector<Int> negu(static_cast<size_t>(f));
  for (long j = 0; j < f; ++j) {
    negu[j] = -tw.upoly()[j];
    reduce_mod(negu[j], pmod);
  }
  // residue inverse: series inversion in F_q[t]/(t^e)
  std::vector<Int> a(un.coords());
  for (Int& c : a) reduce_mod(c, pmod);
  // F_q inverse of the constant block by Fermat power
  std::vector<Int> c0(a.begin(), a.begin() + f);
  bool c0z = true;
  for (const Int& c : c0) c0z = c0z && c == 0;
  if (c0z) throw std::invalid_argument("not a unit");
  std::vector<Int> inv0(static_cast<size_t>(f), Int(0)), acc(inv0), nx(inv0);
  inv0[0] = 1;
  long ebits = tw.prm().q - 2;
  acc = c0;
  while (ebits > 0) {
    if (ebits & 1) {
      wblock_mul(f, negu.data(), pmod, inv0.data(), acc.data(), nx.data());
      inv0 = nx;
    }
    ebits >>= 1;
    if (ebits > 0) {
      wblock_mul(f, negu.data(), pmod, acc.data(), acc.data(), nx.data());
      acc = nx;
    }
  }
  std::vector<Int> b(static_cast<size_t>(e * f), Int(0)), conv(static_cast<size_t>(f));
  for (long j = 0; j < f; ++j) b[static_cast<size_t>(j)] = inv0[static_cast<size_t>(j)];
  for (long k = 1; k < e; ++k) {
    std::vector<Int> s(static_cast<size_t>(f), Int(0));
    for (long i = 1; i <= k; ++i) {
      wblock_mul(f, negu.data(), pmod, &a[static_cast<size_t>(i * f)],
                 &b[static_cast<size_t>((k - i) * f)], conv.data());
      for (long j = 0; j < f; ++j) s[static_cast<size_t>(j)] += conv[static_cast<size_t>(j)];
    }
    for (long j = 0; j < f; ++j) {
      s[static_cast<size_t>(j)] = -s[static_cast<size_t>(j)];
      reduce_mod(s[static_cast<size_t>(j)], pmod);
    }
    wblock_mul(f, negu.data(), pmod, inv0.data(), s.data(), &b[static_cast<size_t>(k * f)]);
  }
  LocalNum z = make_local(tw, 0, tw.Awork(), std::move(b));
  // lift: z <- z (2 - u z), doubling precision each step
  LocalNum two = tw.from_int(Int(2));
  long have = 1;
  while (have < tw.Awork()) {
    z = z * (two - un.assume_exact() * z);
    have *= 2;
  }
  LocalNum r = z;
  return make_local(tw, 0, un.prec(), r.coords());
}

LocalNum reciprocal(const LocalNum& b) {
  const Tower& tw = b.tower();
  ValueV v = ring_val(b);
  if (!v.is_finite()) throw std::invalid_argument("cannot invert: indistinguishable from zero");
  long s = b.shift();
  LocalNum P = make_local(tw, 0, b.prec(), b.coords());
  Rational mr = (v.value() + s) * tw.e();
  if (mr.get_den() != 1) throw std::logic_error("non-integral t-order");
  long m = static_cast<long>(mr.get_num().get_si());
  LocalNum r = tw.zero();
  if (m == 0) {
    r = unit_inverse(P);
  } else {
    long e = tw.e();
    long alpha = (m - 1) / e, beta = m - alpha * e;
    LocalNum vpow = tw.inv_v();
    {
      LocalNum base = tw.inv_v(), acc = tw.one();
      long k = alpha + 1;
      while (k > 0) {
        if (k & 1) acc = acc * base;
        k >>= 1;
        if (k > 0) base = base * base;
      }
      vpow = acc;
    }
    LocalNum w = P * tw.t_power(e - beta) * vpow;
    if ((alpha + 1) % 2 == 1) w = -w;
    LocalNum u = make_local(tw, w.shift() + alpha + 1, w.prec(), w.coords());
    LocalNum ui = unit_inverse(u);
    r = ui * tw.t_power(e - beta) * vpow;
    if ((alpha + 1) % 2 == 1) r = -r;
    r = make_local(tw, r.shift() + alpha + 1, r.prec(), r.coords());
  }
  return make_local(tw, r.shift() - s, r.prec(), r.coords());
}

LocalNum divide(const LocalNum& a, const LocalNum& b) { return a * reciprocal(b); }

LocalNum embed_up(const LocalNum& a, const Tower& dst) {
  const Tower& src = a.tower();
  if (src.prm().p != dst.prm().p || src.f() != dst.f() || src.Awork() != dst.Awork())
    throw std::invalid_argument("incompatible towers");
  if (dst.n() != src.n() + 1) throw std::invalid_argument("embedding must go one level up");
  long q = src.prm().q, p = src.prm().p, f = src.f();
  LocalNum img = dst.t_power(q) + dst.t_gen() * Int(p);  // psi(t_dst)
  std::vector<LocalNum> ppow = power_table(img, src.e() - 1);
  std::vector<LocalNum> xpw;
  xpw.push_back(dst.one());
  if (f > 1) xpw.push_back(dst.x_gen());
  LocalNum acc = dst.zero();
  for (long i = 0; i < src.e(); ++i)
    for (long j = 0; j < f; ++j) {
      const Int& c = a.coords()[static_cast<size_t>(i * f + j)];
      if (c == 0) continue;
      acc = acc + (ppow[static_cast<size_t>(i)] * xpw[static_cast<size_t>(j)]) * c;
    }
  return make_local(dst, a.shift(), a.prec(), acc.coords());
}

std::vector<LocalNum> power_table(const LocalNum& x, long kmax) {
  std::vector<LocalNum> out;
  out.reserve(static_cast<size_t>(kmax + 1));
  out.push_back(one_like(x));
  for (long k = 1; k <= kmax; ++k) out.push_back(out.back() * x);
  return out;
}

LocalNum t_power_any(const Tower& tw, long m) {
  if (m < 0) throw std::invalid_argument("negative t exponent");
  long e = tw.e();
  if (m <= e) return tw.t_power(m);
  LocalNum acc = tw.t_power(m % e), base = tw.t_power(e);
  for (long k = m / e; k > 0; k >>= 1) {
    if (k & 1) acc = acc * base;
    if (k > 1) base = base * base;
  }
  return acc;
}

namespace {

LocalNum ln_pow(const LocalNum& x, long k) {
  LocalNum acc = one_like(x), base = x;
  while (k > 0) {
    if (k & 1) acc = acc * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return acc;
}

}  // namespace

LocalNum ypoly_eval(const YPoly& P, const LocalNum& x) {
  const Tower& tw = x.tower();
  if (P.coeffs().empty()) return tw.zero();
  LocalNum acc = tw.zero();
  unsigned long prev = 0;
  bool first = true;
  for (auto it = P.coeffs().rbegin(); it != P.coeffs().rend(); ++it) {
    if (first) {
      acc = tw.from_rational(it->second);
      prev = it->first;
      first = false;
      continue;
    }
    acc = acc * ln_pow(x, static_cast<long>(prev - it->first)) + tw.from_rational(it->second);
    prev = it->first;
  }
  if (prev > 0) acc = acc * ln_pow(x, static_cast<long>(prev));
  return acc;
}

LocalNum ypoly_eval_pow(const YPoly& P, const std::vector<LocalNum>& xpow) {
  if (xpow.empty()) throw std::invalid_argument("empty power table");
  const Tower& tw = xpow[0].tower();
  LocalNum acc = tw.zero();
  for (const auto& [j, c] : P.coeffs()) {
    if (j >= xpow.size()) throw std::out_of_range("power table too short");
    acc = acc + xpow[j] * c;
  }
  return acc;
}

LocalNum digit_refine(const std::function<LocalNum(const LocalNum&)>& F, LocalNum z,
                      long start_digit, long rounds, const Rational& stop_val) {
  const Tower& tw = z.tower();
  std::vector<LocalNum> cands = tw.teichmuller_units();
  ValueV cur = ring_val(F(z));
  if (!cur.is_finite()) return z;
  Rational cur_score = score_of(cur);
  long e = tw.e();
  // t^start_digit
  long kk = start_digit / e, rr = start_digit % e;
  LocalNum td = ln_pow(tw.t_power(e), kk) * tw.t_power(rr);
  for (long r = 0; r < rounds && cur_score < stop_val; ++r) {
    bool improved = false;
    LocalNum best_z = z;
    Rational best = cur_score;
    for (const LocalNum& c : cands) {
      LocalNum zc = z + c * td;
      ValueV s = ring_val(F(zc));
      if (!s.is_finite()) return zc;
      if (s.value() > best) {
        best = s.value();
        best_z = zc;
        improved = true;
      }
    }
    if (improved) {
      z = best_z;
      cur_score = best;
    }
    td = td.mul_t();
  }
  return z;
}

NewtonResult newton_root(const std::function<LocalNum(const LocalNum&)>& F,
                         const std::function<LocalNum(const LocalNum&)>& dF, LocalNum z,
                         const Rational& target, long max_iter) {
  NewtonResult res;
  res.root = z;
  res.fval = Rational(0);
  LocalNum cur = z;
  bool have_prev = false;
  Rational prev(0);
  for (long it = 0; it < max_iter; ++it) {
    res.iters = it;
    LocalNum Fz = F(cur);
    ValueV v = ring_val(Fz);
    Rational sc = score_of(v);
    if (it == 0 || sc > res.fval) {
      res.fval = sc;
      res.root = cur;
    }
    if (!v.is_finite()) {
      res.converged = v.cutoff() >= target;
      return res;
    }
    if (v.value() >= target) {
      res.converged = true;
      return res;
    }
    if (have_prev && v.value() <= prev) return res;  // stalled, keep best seen
    have_prev = true;
    prev = v.value();
    LocalNum step = divide(Fz, dF(cur));
    // iterates are exact stored ring elements; certification is a separate
    // measurement by the caller, so the search runs at full payload precision
    cur = (cur - step).normalized().assume_exact();
  }
  return res;
}

LocalNum Tower::root_of_unity(long level) const {
  if (level < 0 || level > n_) throw std::out_of_range("root of unity level");
  if (level == 0) return one();
  if (zeta_chain_.empty()) zeta_chain_.push_back(one());
  while (static_cast<long>(zeta_chain_.size()) <= level) {
    long j = static_cast<long>(zeta_chain_.size());
    long p = prm_.p;
    LocalNum z = one();
    if (j == 1 && p == 2) {
      zeta_chain_.push_back(from_int(Int(-1)));
      continue;
    }
    std::function<LocalNum(const LocalNum&)> F, dF;
    Rational basin;
    long d0;
    if (j == 1) {
      // primitive p-th root: root of 1 + z + ... + z^{p-1}
      F = [this, p](const LocalNum& w) {
        LocalNum acc = one();
        for (long i = 1; i < p; ++i) acc = acc * w + one();
        return acc;
      };
      dF = [this, p](const LocalNum& w) {
        LocalNum acc = from_int(Int(p - 1));
        for (long i = p - 2; i >= 1; --i) acc = acc * w + from_int(Int(i));
        return acc;
      };
      basin = Rational(2) * (Rational(1) - Rational(1, p - 1)) + Rational(1, e_);
      d0 = e_ / (p - 1);
    } else {
      LocalNum prev = zeta_chain_[static_cast<size_t>(j - 1)];
      F = [prev, p](const LocalNum& w) { return ln_pow(w, p) - prev; };
      dF = [this, p](const LocalNum& w) { return ln_pow(w, p - 1) * Int(p); };
      basin = Rational(2) + Rational(1, e_);
      long denom = (p - 1);
      for (long i = 1; i < j; ++i) denom *= p;
      d0 = e_ / denom;
    }
    // seed: best first digit over Teichmuller units at the known valuation
    std::vector<LocalNum> units = teichmuller_units();
    LocalNum best = one() + units[0] * t_power(d0);
    Rational best_score = score_of(ring_val(F(best)));
    for (size_t i = 1; i < units.size(); ++i) {
      LocalNum cand = one() + units[i] * t_power(d0);
      Rational s = score_of(ring_val(F(cand)));
      if (s > best_score) {
        best_score = s;
        best = cand;
      }
    }
    z = digit_refine(F, best, d0 + 1, 4 * e_ + 16, basin);
    NewtonResult nr = newton_root(F, dF, z, Rational(Awork_), 80);
    if (!nr.converged) {
      z = digit_refine(F, nr.root, d0 + 1, 8 * e_, basin + 2);
      nr = newton_root(F, dF, z, Rational(Awork_), 80);
    }
    if (!nr.converged && nr.fval < Awork_ - 8)
      throw std::runtime_error("root of unity construction did not converge at level " +
                               std::to_string(j));
    zeta_chain_.push_back(nr.root.normalized().assume_exact());
  }
  return zeta_chain_[static_cast<size_t>(level)];
}

}  // namespace ltp
