#include "ltp/ypoly.hpp"

#include <sstream>

namespace ltp {

namespace {

// One term, sign handled by the caller: c*Y^j as "Y^j", "num*Y^j/den", "c", ...
std::string term_str(unsigned long j, const Rational& c) {
  Int num = abs(Int(c.get_num()));
  Int den = c.get_den();
  std::ostringstream os;
  if (j == 0) {
    os << num.get_str();
    if (den != 1) os << "/" << den.get_str();
    return os.str();
  }
  if (num != 1) os << num.get_str() << "*";
  os << "Y";
  if (j != 1) os << "^" << j;
  if (den != 1) os << "/" << den.get_str();
  return os.str();
}

}  // namespace

std::string YPoly::str() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    const auto& [j, c] = *it;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << term_str(j, c);
  }
  return os.str();
}

}  // namespace ltp
