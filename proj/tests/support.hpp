#pragma once

// Independent oracles and small generators shared by the unit tests. Nothing
// here calls into the library's cached sums or tree code; oracles work from
// the raw mass vectors.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/dynamics.hpp"
#include "sociallearn/error.hpp"

namespace sltest {

using sociallearn::BeliefPair;
using sociallearn::State;

// P(K <= x) by direct summation over grid points k <= x.
inline long double mass_cdf(const BeliefPair& pair, State s, double x) {
  const auto m = pair.mass(s);
  const int t = pair.truncation();
  long double acc = 0.0L;
  for (int k = -t; k <= t; ++k) {
    if (static_cast<double>(k) <= x) acc += m[static_cast<std::size_t>(k + t)];
  }
  return acc;
}

inline long double mass_survival(const BeliefPair& pair, State s, double x) {
  const auto m = pair.mass(s);
  const int t = pair.truncation();
  long double acc = 0.0L;
  for (int k = -t; k <= t; ++k) {
    if (static_cast<double>(k) > x) acc += m[static_cast<std::size_t>(k + t)];
  }
  return acc;
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Unnormalised H-masses on -T..T rebuilt from the profile
//   f1(-1) = a, f1(0) = b, f1(k) = psi / k^nu
// with f(k) = f1(k-1) - f1(k) for k >= 0, f(-k) = f(k) e^{-b_k} for k >= 1,
// b_1 = 0, b_k = min(slope k, cap). Mass beyond +T telescopes onto +T; mass
// beyond -T is summed term by term until the damping saturates.
struct RawProfile {
  std::vector<long double> raw;
  long double total = 0.0L;
};

inline RawProfile raw_profile(double psi, double nu, double a, double b, double slope, int t,
                              double cap = 600.0) {
  auto f1 = [&](long k) -> long double {
    if (k == -1) return a;
    if (k == 0) return b;
    return static_cast<long double>(psi) / std::pow(static_cast<long double>(k), nu);
  };
  auto damp = [&](long k) -> long double {
    if (k <= 1) return 0.0L;
    return std::min<long double>(slope * static_cast<long double>(k), cap);
  };
  RawProfile p;
  p.raw.assign(2 * static_cast<std::size_t>(t) + 1, 0.0L);
  for (long k = 0; k < t; ++k) p.raw[static_cast<std::size_t>(k + t)] = f1(k - 1) - f1(k);
  p.raw[2 * static_cast<std::size_t>(t)] = f1(t - 1);
  for (long k = 1; k < t; ++k) {
    p.raw[static_cast<std::size_t>(t - k)] = (f1(k - 1) - f1(k)) * std::exp(-damp(k));
  }
  long double tail = 0.0L;
  for (long k = t; damp(k) < cap; ++k) tail += (f1(k - 1) - f1(k)) * std::exp(-damp(k));
  p.raw[0] = tail;  // the saturated remainder is below e^-600 and dropped
  for (auto v : p.raw) p.total += v;
  return p;
}

// Exhaustive recursion over action prefixes using only mass sums. Keys are
// prefixes like "1212"; values are (l, P^H, P^L).
struct OracleNode {
  double l;
  double prob_H;
  double prob_L;
};

inline void enumerate_oracle(const BeliefPair& pair, int depth, std::map<std::string, OracleNode>& out,
                             const std::string& prefix = "", double l = 1.0, double ph = 1.0,
                             double pl = 1.0) {
  out[prefix] = {l, ph, pl};
  if (static_cast<int>(prefix.size()) == depth) return;
  const double x = std::log(l);
  const double r1h = static_cast<double>(mass_cdf(pair, State::H, x));
  const double r1l = static_cast<double>(mass_cdf(pair, State::L, x));
  const double r2h = static_cast<double>(mass_survival(pair, State::H, x));
  const double r2l = static_cast<double>(mass_survival(pair, State::L, x));
  if (r1h > 0.0) enumerate_oracle(pair, depth, out, prefix + "1", l * r1l / r1h, ph * r1h, pl * r1l);
  if (r2h > 0.0) enumerate_oracle(pair, depth, out, prefix + "2", l * r2l / r2h, ph * r2h, pl * r2l);
}

inline std::string expect_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const sociallearn::Error& e) {
    return e.code();
  }
  return "<no error>";
}

// Hand-rolled generators over a seeded engine.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  // A valid random pair on 2T+1 points with shared zero pattern.
  BeliefPair pair(int t_max = 6) {
    const int t = integer(1, t_max);
    const std::size_t n = 2 * static_cast<std::size_t>(t) + 1;
    for (;;) {
      std::vector<double> h(n), l(n);
      double sh = 0, sl = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool zero = coin(0.2);
        h[i] = zero ? 0.0 : uniform(0.01, 1.0);
        l[i] = zero ? 0.0 : uniform(0.01, 1.0);
        sh += h[i];
        sl += l[i];
      }
      if (sh == 0.0) continue;
      for (auto& v : h) v /= sh;
      for (auto& v : l) v /= sl;
      try {
        return BeliefPair::from_masses(h, l);
      } catch (const sociallearn::Error&) {
        // normalisation drift past 1e-12 or identical laws; redraw
      }
    }
  }

  std::vector<sociallearn::Action> actions(int n, double p_wrong) {
    std::vector<sociallearn::Action> a(static_cast<std::size_t>(n));
    for (auto& x : a) x = coin(p_wrong) ? sociallearn::Action::one : sociallearn::Action::two;
    return a;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sltest
