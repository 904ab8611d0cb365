#pragma once

#include <string>
#include <vector>

#include "ltp/padic_core.hpp"
#include "ltp/rational.hpp"

namespace ltp {

/// w(k) = (p/(q-1)) * sum_i k_i p^{-i} over the base-p digits of k.
Rational weight(const Int& k, const Params& prm);

/// Digit-reversal map: sum_i k_i p^{-(i+1)}; w(k) = (p^2/(q-1)) * monna(k).
Rational monna_map(const Int& k, long p);

/// One checked property of the weight map.
struct PropertyItem {
  std::string id;
  std::string range;       // human-readable description of what was swept
  long long instances = 0;
  long long failures = 0;
  std::vector<std::string> witnesses;  // first few failing instances
  bool pass() const { return failures == 0; }
};

struct PropertyReport {
  std::vector<PropertyItem> items;
  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass()) return false;
    return true;
  }
};

struct WPropsLimits {
  long kmax = 10000;       // exhaustive sweeps for the single-k properties
  long pairs_gap = 2000;   // pair sweep bound for the integer-gap property
  long pairs_subadd = 1500;  // pair sweep bound for subadditivity
};

/// Checks the six structural properties of the weight map:
///   w-upper-bound        w(k) < 1 + 1/(q-1)
///   w-ge-one-iff         w(k) >= 1 iff k = -1 mod q; equality only at k = q-1
///   w-integer-gap-pairs  for k < l: w(l)-w(k) integral iff (k,l) = (qj, qj+q-1)
///   w-p-scaling          w(pk) = w(k)/p
///   w-digit-splitting    w(p^n k + i) = w(p^n k) + w(i) for 0 <= i < p^n
///   w-subadditive        w(a+b) <= w(a) + w(b)
PropertyReport check_w_props(const Params& prm, const WPropsLimits& lim, long jobs = 1);

}  // namespace ltp
