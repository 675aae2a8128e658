#include "sociallearn/belief_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "sociallearn/error.hpp"

namespace sociallearn {

namespace {

constexpr double kMaxDamping = 600.0;
constexpr double kConstructionMargin = 1e-6;

constexpr std::array<double, 12> kLadder = {1e-3, 0.05, 0.10, 0.15, 0.20,  0.25,
                                            0.30, 0.33, 0.35, 0.36, 0.365, 0.367};

double damping(double slope, long k) {
  if (k <= 1) return 0.0;
  return std::min(slope * static_cast<double>(k), kMaxDamping);
}

struct Profile {
  double a, b, psi, nu;
  double f1(long k) const {
    if (k == -1) return a;
    if (k == 0) return b;
    return psi / std::pow(static_cast<double>(k), nu);
  }
};

std::vector<double> build_mass_H(const Profile& f, double slope, int t) {
  const std::size_t n = 2 * static_cast<std::size_t>(t) + 1;
  std::vector<long double> raw(n, 0.0L);
  auto at = [&](long k) -> long double& { return raw[static_cast<std::size_t>(k + t)]; };

  for (long k = 0; k < t; ++k) at(k) = f.f1(k - 1) - f.f1(k);
  at(t) = f.f1(t - 1);

  for (long k = 1; k < t; ++k) at(-k) = (f.f1(k - 1) - f.f1(k)) * std::exp(-damping(slope, k));
  // Everything at or beyond -T lands on -T. Once damping saturates the
  // remaining tail telescopes to e^-cap * f1(k-1).
  long double tail = 0.0L;
  long k = t;
  for (; damping(slope, k) < kMaxDamping; ++k) {
    tail += (f.f1(k - 1) - f.f1(k)) * std::exp(-damping(slope, k));
  }
  tail += std::exp(-kMaxDamping) * f.f1(k - 1);
  at(-t) = tail;

  long double total = 0.0L;
  for (auto v : raw) total += v;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(raw[i] / total);
  return out;
}

bool bracket_met(const BeliefPair& pair, double b) {
  const int c0 = pair.cell(0.0);
  const double inv_l1 = pair.survival_cell(State::H, c0) / pair.survival_cell(State::L, c0);
  return inv_l1 > std::numbers::e && inv_l1 < std::exp(2.0 / (2.0 * b + 2.0) + 1.0);
}

}  // namespace

InformativeParams InformativeParams::make(double psi, double nu) {
  if (!(psi > 0.0 && psi < 1.0) || !(nu > 0.0 && nu < 1.0)) {
    fail_config("invalid-params", "psi and nu must lie in (0,1); got psi=" + std::to_string(psi) +
                                      " nu=" + std::to_string(nu));
  }
  return {psi, nu};
}

double InformativeParams::requirement(long k) const {
  return psi / std::pow(static_cast<double>(k + 1), nu);
}

BeliefPair BeliefPair::from_masses(std::vector<double> mass_H, std::vector<double> mass_L,
                                   bool allow_identical, std::optional<ConstructionMeta> meta) {
  if (mass_H.size() != mass_L.size() || mass_H.size() % 2 == 0 || mass_H.size() < 3) {
    fail_config("invalid-params", "mass vectors must share an odd length 2T+1 with T >= 1");
  }
  long double sum_h = 0.0L, sum_l = 0.0L;
  for (std::size_t i = 0; i < mass_H.size(); ++i) {
    const double h = mass_H[i], l = mass_L[i];
    if (!(h >= 0.0) || !(l >= 0.0) || !std::isfinite(h) || !std::isfinite(l)) {
      fail_config("invalid-params", "masses must be finite and non-negative");
    }
    if ((h > 0.0) != (l > 0.0)) {
      fail_config("invalid-params",
                  "laws are not mutually absolutely continuous at index " + std::to_string(i));
    }
    sum_h += h;
    sum_l += l;
  }
  if (std::fabs(static_cast<double>(sum_h) - 1.0) > kMassTolerance ||
      std::fabs(static_cast<double>(sum_l) - 1.0) > kMassTolerance) {
    fail_config("invalid-params", "masses must each sum to 1");
  }
  if (!allow_identical && mass_H == mass_L) {
    fail_config("invalid-params", "mass_H and mass_L are identical");
  }
  BeliefPair pair;
  pair.t_ = static_cast<int>(mass_H.size() / 2);
  pair.mass_h_ = std::move(mass_H);
  pair.mass_l_ = std::move(mass_L);
  pair.meta_ = std::move(meta);
  pair.build_sums();
  return pair;
}

void BeliefPair::build_sums() {
  const std::size_t cells = static_cast<std::size_t>(cell_count());
  auto sums = [&](const std::vector<double>& m, std::vector<double>& cdf_out,
                  std::vector<double>& sur_out) {
    cdf_out.assign(cells, 0.0);
    sur_out.assign(cells, 0.0);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < m.size(); ++i) {
      acc += m[i];
      cdf_out[i + 1] = static_cast<double>(acc);
    }
    acc = 0.0L;
    for (std::size_t i = m.size(); i-- > 0;) {
      acc += m[i];
      sur_out[i] = static_cast<double>(acc);
    }
  };
  sums(mass_h_, cdf_h_, sur_h_);
  sums(mass_l_, cdf_l_, sur_l_);
}

std::span<const double> BeliefPair::mass(State s) const noexcept {
  return s == State::H ? std::span<const double>(mass_h_) : std::span<const double>(mass_l_);
}

int BeliefPair::cell(double logit) const {
  if (std::isnan(logit)) fail_model("invalid-logit", "logit is NaN");
  const double lo = -static_cast<double>(t_);
  if (logit < lo) return 0;
  if (logit >= static_cast<double>(t_)) return 2 * t_ + 1;
  return static_cast<int>(std::floor(logit)) + t_ + 1;
}

namespace {

double belief_of(int k) { return 1.0 / (1.0 + std::exp(-static_cast<double>(k))); }

// Cell of a private belief p in (0,1). The logit can round across a grid
// point, so the boundary is settled against the belief of the point itself.
int belief_cell(const BeliefPair& pair, double p) {
  const int t = pair.truncation();
  int c = pair.cell(std::log(p) - std::log1p(-p));
  if (c <= 2 * t && belief_of(c - t) <= p) ++c;
  if (c >= 1 && belief_of(c - t - 1) > p) --c;
  return c;
}

}  // namespace

double cdf(const BeliefPair& pair, State s, double p) {
  if (!(p > 0.0)) return 0.0;
  if (p >= 1.0) return 1.0;
  return pair.cdf_cell(s, belief_cell(pair, p));
}

double survival(const BeliefPair& pair, State s, double p) {
  if (!(p > 0.0)) return 1.0;
  if (p >= 1.0) return 0.0;
  return pair.survival_cell(s, belief_cell(pair, p));
}

double delta(const BeliefPair& pair, double p) {
  return cdf(pair, State::L, p) - cdf(pair, State::H, p);
}

std::vector<double> benchmark_log_sequence(const BeliefPair& pair, int horizon) {
  if (horizon < 0) fail_config("invalid-params", "horizon must be non-negative");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  double log_l = 0.0;
  out.push_back(log_l);
  for (int k = 0; k < horizon; ++k) {
    const int c = pair.cell(log_l);
    const double rh = pair.survival_cell(State::H, c);
    if (rh == 0.0) {
      fail_model("degenerate-transition",
                 "rho(2 | l~_" + std::to_string(k) + ", H) = 0 on the benchmark path");
    }
    log_l += std::log(pair.survival_cell(State::L, c)) - std::log(rh);
    out.push_back(log_l);
  }
  return out;
}

std::vector<double> benchmark_sequence(const BeliefPair& pair, int horizon) {
  auto seq = benchmark_log_sequence(pair, horizon);
  for (auto& v : seq) v = std::exp(v);
  return seq;
}

InformativeReport is_informative(const BeliefPair& pair, const InformativeParams& params,
                                 int horizon) {
  if (horizon < 0) fail_config("invalid-params", "horizon must be non-negative");
  InformativeReport rep;
  rep.min_margin = INFINITY;
  double log_l = 0.0;
  for (int k = 0; k <= horizon; ++k) {
    const int c = pair.cell(log_l);
    const double d = pair.cdf_cell(State::L, c) - pair.cdf_cell(State::H, c);
    const double margin = d - params.requirement(k);
    rep.checked = k + 1;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin = k;
    }
    if (!(margin > 0.0)) {
      rep.first_failure = k;
      return rep;
    }
    // Delta > 0 implies rho(2 | l, H) > 0, so the update is defined.
    log_l += std::log(pair.survival_cell(State::L, c)) - std::log(pair.survival_cell(State::H, c));
  }
  rep.informative = true;
  return rep;
}

std::span<const double> default_delta_b_ladder() { return kLadder; }

BeliefPair construct_informative_pair(const InformativeParams& raw,
                                      const ConstructionOptions& options) {
  const InformativeParams params = InformativeParams::make(raw.psi, raw.nu);
  if (options.truncation < 100) fail_config("invalid-params", "truncation must be at least 100");
  if (!(options.damping_slope >= 1.0) || !std::isfinite(options.damping_slope)) {
    fail_config("invalid-params", "damping slope must be finite and >= 1");
  }
  if (!(options.delta_a > 0.0)) fail_config("invalid-params", "delta_a must be positive");

  const double ceiling = params.psi * std::numbers::e / (std::numbers::e - 1.0);
  std::vector<double> candidates;
  if (options.delta_b) {
    if (!(*options.delta_b >= 0.0 && *options.delta_b < 1.0)) {
      fail_config("invalid-params", "delta_b must lie in [0,1)");
    }
    candidates.push_back(*options.delta_b);
  } else {
    candidates.assign(kLadder.begin(), kLadder.end());
  }

  const int t = options.truncation;
  std::optional<BeliefPair> fallback;
  for (double db : candidates) {
    const double b = ceiling * (1.0 - db);
    if (!(b > params.psi) || b >= 1.0) continue;
    const Profile prof{b * (1.0 + options.delta_a), b, params.psi, params.nu};
    auto mass_h = build_mass_H(prof, options.damping_slope, t);
    std::vector<double> mass_l(mass_h.rbegin(), mass_h.rend());
    BeliefPair pair = BeliefPair::from_masses(std::move(mass_h), std::move(mass_l));

    const InformativeParams padded{params.psi * (1.0 + kConstructionMargin), params.nu};
    if (!is_informative(pair, padded, t).informative) continue;

    ConstructionMeta meta;
    meta.psi = params.psi;
    meta.nu = params.nu;
    meta.a = prof.a;
    meta.b = b;
    meta.delta_b = db;
    meta.damping_slope = options.damping_slope;
    meta.b_seq.reserve(static_cast<std::size_t>(t));
    for (long k = 1; k <= t; ++k) meta.b_seq.push_back(damping(options.damping_slope, k));
    meta.bracket_met = bracket_met(pair, b);
    pair.meta_ = std::move(meta);
    if (pair.meta_->bracket_met) return pair;
    if (!fallback) fallback = std::move(pair);
  }
  if (fallback) return std::move(*fallback);
  fail_model("construction-infeasible",
             "no damping shrink in the ladder passes the informativeness check up to T=" +
                 std::to_string(t));
}

}  // namespace sociallearn
