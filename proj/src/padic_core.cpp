#include "ltp/padic_core.hpp"

#include <map>
#include <stdexcept>

namespace ltp {

Params Params::make(long p) {
  if (p < 2) throw std::invalid_argument("Params: p must be >= 2");
  Params prm;
  prm.p = p;
  prm.q = p * p;
  return prm;
}

std::vector<long> digits_p(const Int& n, long p) {
  if (n < 0) throw std::invalid_argument("digits_p: negative");
  if (n == 0) return {0};
  std::vector<long> out;
  Int rest = n;
  while (rest > 0) {
    Int r = rest % p;
    out.push_back(r.get_si());
    rest /= p;
  }
  return out;
}

Int sp_digit_sum(const Int& n, long p) {
  Int s = 0;
  for (long d : digits_p(n, p)) s += d;
  return s;
}

Int val_factorial(const Int& n, long p) {
  return (n - sp_digit_sum(n, p)) / (p - 1);
}

long binom_mod_p(const Int& n, const Int& k, long p) {
  if (k < 0 || k > n) return 0;
  std::vector<long> nd = digits_p(n, p);
  std::vector<long> kd = digits_p(k, p);
  kd.resize(nd.size(), 0);
  long acc = 1;
  for (size_t i = 0; i < nd.size(); ++i) {
    if (kd[i] > nd[i]) return 0;
    Int c = binom_exact(static_cast<unsigned long>(nd[i]), static_cast<unsigned long>(kd[i]));
    Int rem = c % p;
    acc = (acc * rem.get_si()) % p;
  }
  return acc;
}

Int binom_exact(unsigned long n, unsigned long k) {
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

Int orbit_size(const IndexVector& v) {
  std::map<Int, unsigned long> mult;
  for (const Int& x : v) ++mult[x];
  Int out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(v.size()));
  for (const auto& [value, count] : mult) {
    Int d;
    mpz_fac_ui(d.get_mpz_t(), count);
    out /= d;
  }
  return out;
}

namespace {

void reps_recurse(std::vector<IndexVector>& out, IndexVector& cur, const Int& remaining,
                  long slots, const Int& cap) {
  if (slots == 1) {
    if (remaining <= cap) {
      cur.push_back(remaining);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  // non-increasing: next entry at most cap, and at least ceil(remaining/slots)
  Int hi = remaining < cap ? remaining : cap;
  for (Int x = hi; x * slots >= remaining; --x) {
    cur.push_back(x);
    reps_recurse(out, cur, remaining - x, slots - 1, x);
    cur.pop_back();
  }
}

}  // namespace

std::vector<IndexVector> enumerate_reps(const Int& total, long parts) {
  if (total < 0) throw std::invalid_argument("enumerate_reps: negative total");
  if (parts < 1) throw std::invalid_argument("enumerate_reps: parts must be >= 1");
  std::vector<IndexVector> out;
  IndexVector cur;
  reps_recurse(out, cur, total, parts, total);
  return out;
}

}  // namespace ltp
