#pragma once

#include <cstdint>
#include <vector>

#include "ltp/rational.hpp"

namespace ltp {

/// Prime p and q = p^2, the residue field size of the quadratic unramified base.
struct Params {
  long p = 2;
  long q = 4;

  static Params make(long p);
};

/// Base-p digits of n >= 0, least significant first; digits_p(0) = {0}.
std::vector<long> digits_p(const Int& n, long p);

/// Sum of base-p digits.
Int sp_digit_sum(const Int& n, long p);

/// val_p(n!) = (n - s_p(n)) / (p - 1).
Int val_factorial(const Int& n, long p);

/// Binomial coefficient mod p via the digit product rule.
long binom_mod_p(const Int& n, const Int& k, long p);

/// Exact binomial coefficient.
Int binom_exact(unsigned long n, unsigned long k);

/// Exponent tuple (k_1,...,k_p) of nonnegative integers.
using IndexVector = std::vector<Int>;

/// Size of the orbit of v under coordinate permutations:
/// len! / prod over distinct values of (multiplicity!).
Int orbit_size(const IndexVector& v);

/// One representative per permutation orbit of `parts`-tuples with the given
/// sum: the non-increasing tuples, listed in decreasing lexicographic order.
std::vector<IndexVector> enumerate_reps(const Int& total, long parts);

}  // namespace ltp
