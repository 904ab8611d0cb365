#include "ltp/zseries.hpp"

namespace ltp {

namespace {

ZSeries<Rational> padded(const ZSeries<Rational>& f, size_t cap) {
  std::vector<Rational> v(f.coeffs());
  v.resize(cap, Rational(0));
  return ZSeries<Rational>(std::move(v));
}

}  // namespace

ZSeries<Rational> series_inverse(const ZSeries<Rational>& f) {
  if (f[0] == 0) throw std::invalid_argument("series_inverse: constant term is 0");
  std::vector<Rational> b(f.cap(), Rational(0));
  b[0] = Rational(1) / f[0];
  for (size_t n = 1; n < f.cap(); ++n) {
    Rational acc(0);
    for (size_t i = 1; i <= n; ++i) acc += f[i] * b[n - i];
    b[n] = -acc / f[0];
  }
  return ZSeries<Rational>(std::move(b));
}

ZSeries<Rational> series_reversion(const ZSeries<Rational>& f) {
  if (f[0] != 0) throw std::invalid_argument("series_reversion: f(0) != 0");
  if (f.cap() < 2 || f[1] == 0)
    throw std::invalid_argument("series_reversion: linear coefficient not invertible");
  const size_t target = f.cap();

  std::vector<Rational> g0(2, Rational(0));
  g0[1] = Rational(1) / f[1];
  ZSeries<Rational> g(std::move(g0));

  while (g.cap() < target) {
    size_t m = std::min(2 * g.cap(), target);
    g = padded(g, m);
    ZSeries<Rational> fm = f.truncated(m);
    ZSeries<Rational> err = series_compose(fm, g) - ZSeries<Rational>::identity(m, Rational(0));
    ZSeries<Rational> slope = series_compose(series_derivative(padded(f, m + 1)), g);
    g = g - err * series_inverse(slope);
  }
  return g;
}

}  // namespace ltp
