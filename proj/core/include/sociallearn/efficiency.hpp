#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/dynamics.hpp"

namespace sociallearn {

// Times are 1-based; nullopt means censored at the horizon.
struct StoppingStats {
  std::optional<long> tau;
  long n_wrong = 0;
  std::optional<long> t_learn;
  std::optional<long> t_first_mistake;
};

StoppingStats stopping_stats(std::span<const Action> actions);
StoppingStats stopping_stats(const PublicPath& path, long horizon);

struct TauBound {
  double value = 0;
  long split = 0;
};

inline constexpr long kSplitSearchCap = 10'000'000;

// 1 + sum_{t=2}^{N} t (1 - psi/t^nu)^{t-1} + sum_{t>N} 1/t^2, where N is the
// last t at which t (1 - psi/t^nu)^{t-1} > 1/t^2. A given split is verified.
TauBound expected_tau_bound(double psi, double nu, std::optional<long> split = std::nullopt);

struct ExactTau {
  double expectation = 0;
  double residual_mass = 0;  // P(tau > terms): a wrong herd or the truncated remainder
  long terms = 0;
};

// Sum over k of k P^H(tau = k) along the all-wrong path.
ExactTau exact_expected_tau(const BeliefPair& pair);

struct Estimate {
  double mean = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t samples = 0;
  double censored_fraction = 0;
};

struct EfficiencyReport {
  Estimate tau;
  Estimate n_wrong;
  Estimate t_learn;
  Estimate t_first_mistake;  // conditional on a mistake within the horizon
};

inline constexpr double kMaxTauCensoring = 1e-3;
inline constexpr double kMaxLearnCensoring = 1e-2;

// Monte Carlo under H. Throws horizon-insufficient past either censoring gate.
EfficiencyReport efficiency_estimate(const BeliefPair& pair, const MonteCarlo& mc);

// Componentwise max of the four means across a family sharing (psi, nu).
struct UniformConstant {
  double tau = 0;
  double n_wrong = 0;
  double t_learn = 0;
  double t_first_mistake = 0;
};
UniformConstant uniform_constant(std::span<const EfficiencyReport> family);

// `conditional` averages rho(1 | l_{t-1}, H) over paths, an unbiased estimate
// of P^H(a_t = 1) that stays positive deep in the tail. `indicator` counts
// sampled wrong actions.
enum class TailEstimator { conditional, indicator };

struct WrongActionCurve {
  std::vector<double> p;  // index t-1
  std::vector<double> ci_low;
  std::vector<double> ci_high;
};

WrongActionCurve wrong_action_curve(const BeliefPair& pair, const MonteCarlo& mc,
                                    TailEstimator estimator = TailEstimator::conditional);

struct TailOptions {
  long t_min = 10;
  TailEstimator estimator = TailEstimator::conditional;
  int groups = 20;
};

struct TailFit {
  double alpha_hat = 0;
  double K_hat = 0;
  double ci_low = 0;  // 95% jackknife interval over path groups
  double ci_high = 0;
  long t_lo = 0;
  long t_hi = 0;
  std::vector<double> residuals;
};

inline constexpr std::size_t kMinTailPaths = 10'000;

TailFit tail_fit(const BeliefPair& pair, const MonteCarlo& mc, const TailOptions& options = {});

struct SmoothMonotoneReport {
  std::vector<double> probes;
  std::vector<double> values;  // p (F(p) - F(p-h)) / h
  bool trends_to_zero = false;
};

// F = (F^H + F^L)/2, h = relative_width * p. Probes must lie in (0, 0.1] and
// strictly decrease.
SmoothMonotoneReport smooth_monotone_check(const BeliefPair& pair, std::span<const double> probes,
                                           double relative_width = 0.6321205588285577);

}  // namespace sociallearn
