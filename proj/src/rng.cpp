#include "slate/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slate {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

namespace {

// log k! - [log sqrt(2 pi) + (k + 1/2) log(k + 1) - (k + 1)]
double stirling_tail(double k) {
  if (k <= 9.0) {
    return std::lgamma(k + 1.0) -
           (0.5 * std::log(2.0 * M_PI) + (k + 0.5) * std::log(k + 1.0) - (k + 1.0));
  }
  const double kp1sq = (k + 1.0) * (k + 1.0);
  return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1.0);
}

Count binomial_inversion(Rng& rng, Count n, double p) {
  const double q = 1.0 - p;
  const double ratio = p / q;
  double f = std::exp(static_cast<double>(n) * std::log1p(-p));
  double u = rng.uniform();
  Count k = 0;
  while (u > f && k < n) {
    u -= f;
    ++k;
    f *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
    // Underflowed tail: restart rather than return a biased value.
    if (f <= 0.0) {
      u = rng.uniform();
      k = 0;
      f = std::exp(static_cast<double>(n) * std::log1p(-p));
    }
  }
  return k;
}

// Hormann (1993) transformed rejection with squeeze; needs n*p >= 10, p <= 1/2.
Count binomial_btrs(Rng& rng, Count trials, double p) {
  const double n = static_cast<double>(trials);
  const double stddev = std::sqrt(n * p * (1.0 - p));
  const double b = 1.15 + 2.53 * stddev;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = n * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double r = p / (1.0 - p);
  const double alpha = (2.83 + 5.1 / b) * stddev;
  const double m = std::floor((n + 1.0) * p);
  while (true) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > n) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<Count>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    const double bound = (m + 0.5) * std::log((m + 1.0) / (r * (n - m + 1.0))) +
                         (n + 1.0) * std::log((n - m + 1.0) / (n - k + 1.0)) +
                         (k + 0.5) * std::log(r * (n - k + 1.0) / (k + 1.0)) +
                         stirling_tail(m) + stirling_tail(n - m) - stirling_tail(k) -
                         stirling_tail(n - k);
    if (v <= bound) return static_cast<Count>(k);
  }
}

}  // namespace

Count binomial(Rng& rng, Count trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial probability outside [0, 1]");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  if (p > 0.5) return trials - binomial(rng, trials, 1.0 - p);
  if (static_cast<double>(trials) * p < 10.0) return binomial_inversion(rng, trials, p);
  return binomial_btrs(rng, trials, p);
}

std::vector<Count> multinomial(Rng& rng, Count trials, std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("multinomial needs at least one outcome");
  std::vector<Count> out(probs.size(), 0);
  double mass = 1.0;
  Count remaining = trials;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    const double conditional = mass > 0.0 ? std::clamp(probs[i] / mass, 0.0, 1.0) : 1.0;
    out[i] = binomial(rng, remaining, conditional);
    remaining -= out[i];
    mass -= probs[i];
  }
  out.back() += remaining;
  return out;
}

}  // namespace slate
