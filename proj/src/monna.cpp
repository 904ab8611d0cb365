#include "ltp/monna.hpp"

#include <algorithm>
#include <sstream>

namespace ltp {

Rational weight(const Int& k, const Params& prm) {
  if (k < 0) throw std::invalid_argument("weight: negative k");
  Rational acc(0);
  Int pw(1);
  for (long d : digits_p(k, prm.p)) {
    acc += Rational(d) / Rational(pw);
    pw *= prm.p;
  }
  return acc * make_rational(Int(prm.p), Int(prm.q - 1));
}

Rational monna_map(const Int& k, long p) {
  if (k < 0) throw std::invalid_argument("monna_map: negative k");
  Rational acc(0);
  Int pw(p);
  for (long d : digits_p(k, p)) {
    acc += Rational(d) / Rational(pw);
    pw *= p;
  }
  return acc;
}

namespace {

void record_failure(PropertyItem& item, const std::string& witness) {
  ++item.failures;
  if (item.witnesses.size() < 10) item.witnesses.push_back(witness);
}

std::string pair_str(long a, long b) {
  std::ostringstream os;
  os << "(" << a << "," << b << ")";
  return os.str();
}

PropertyItem make_item(const char* id, std::string range) {
  PropertyItem item;
  item.id = id;
  item.range = std::move(range);
  return item;
}

}  // namespace

PropertyReport check_w_props(const Params& prm, const WPropsLimits& lim, long /*jobs*/) {
  const long p = prm.p;
  const long q = prm.q;
  const Rational bound = Rational(1) + make_rational(Int(1), Int(q - 1));

  const long table_max = std::max({lim.kmax, 2 * lim.pairs_subadd, lim.pairs_gap});
  std::vector<Rational> w(static_cast<size_t>(table_max) + 1);
  for (long k = 0; k <= table_max; ++k) w[static_cast<size_t>(k)] = weight(Int(k), prm);

  PropertyReport rep;

  {
    PropertyItem item = make_item("w-upper-bound", "k <= " + std::to_string(lim.kmax));
    for (long k = 0; k <= lim.kmax; ++k) {
      ++item.instances;
      if (!(w[static_cast<size_t>(k)] < bound)) record_failure(item, std::to_string(k));
    }
    rep.items.push_back(std::move(item));
  }

  {
    PropertyItem item = make_item("w-ge-one-iff", "k <= " + std::to_string(lim.kmax));
    for (long k = 0; k <= lim.kmax; ++k) {
      ++item.instances;
      const Rational& wk = w[static_cast<size_t>(k)];
      bool ge1 = wk >= 1;
      bool residue = (k % q) == q - 1;
      bool ok = (ge1 == residue) && (wk != 1 || k == q - 1) && (k != q - 1 || wk == 1);
      if (!ok) record_failure(item, std::to_string(k));
    }
    rep.items.push_back(std::move(item));
  }

  {
    PropertyItem item = make_item("w-integer-gap-pairs", "k < l <= " + std::to_string(lim.pairs_gap));
    for (long l = 1; l <= lim.pairs_gap; ++l) {
      const Rational& wl = w[static_cast<size_t>(l)];
      for (long k = 0; k < l; ++k) {
        ++item.instances;
        Rational diff = wl - w[static_cast<size_t>(k)];
        bool integral = diff.get_den() == 1;
        bool shape = (k % q == 0) && (l == k + q - 1);
        if (integral != shape) record_failure(item, pair_str(k, l));
      }
    }
    rep.items.push_back(std::move(item));
  }

  {
    PropertyItem item = make_item("w-p-scaling", "pk <= " + std::to_string(lim.kmax));
    for (long k = 0; p * k <= lim.kmax; ++k) {
      ++item.instances;
      if (w[static_cast<size_t>(p * k)] * p != w[static_cast<size_t>(k)])
        record_failure(item, std::to_string(k));
    }
    rep.items.push_back(std::move(item));
  }

  {
    PropertyItem item = make_item("w-digit-splitting", "p^n k + i <= " + std::to_string(lim.kmax));
    for (long pn = p; pn <= lim.kmax; pn *= p) {
      for (long k = 1; pn * k <= lim.kmax; ++k) {
        for (long i = 0; i < pn && pn * k + i <= lim.kmax; ++i) {
          ++item.instances;
          if (w[static_cast<size_t>(pn * k + i)] !=
              w[static_cast<size_t>(pn * k)] + w[static_cast<size_t>(i)])
            record_failure(item, pair_str(pn * k, i));
        }
      }
      if (pn > lim.kmax / p) break;
    }
    rep.items.push_back(std::move(item));
  }

  {
    PropertyItem item = make_item("w-subadditive", "a, b <= " + std::to_string(lim.pairs_subadd));
    for (long a = 0; a <= lim.pairs_subadd; ++a) {
      for (long b = a; b <= lim.pairs_subadd; ++b) {
        ++item.instances;
        if (!(w[static_cast<size_t>(a + b)] <= w[static_cast<size_t>(a)] + w[static_cast<size_t>(b)]))
          record_failure(item, pair_str(a, b));
      }
    }
    rep.items.push_back(std::move(item));
  }

  return rep;
}

}  // namespace ltp
