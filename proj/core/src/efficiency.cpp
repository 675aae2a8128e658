#include "sociallearn/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "sociallearn/error.hpp"

namespace sociallearn {

namespace {

constexpr double kZ95 = 1.959963984540054;

// log of t (1 - psi/t^nu)^{t-1} t^2
double log_excess(double t, double psi, double nu) {
  return 3.0 * std::log(t) + (t - 1.0) * std::log1p(-psi / std::pow(t, nu));
}

// Upper envelope of log_excess via log(1-x) <= -x.
double log_envelope(double t, double psi, double nu) {
  return 3.0 * std::log(t) - psi * (t - 1.0) * std::pow(t, -nu);
}

Estimate summarize(const std::vector<double>& xs, std::size_t total) {
  Estimate e;
  e.samples = xs.size();
  e.censored_fraction =
      total == 0 ? 0.0 : static_cast<double>(total - xs.size()) / static_cast<double>(total);
  if (xs.empty()) return e;
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  const double mean = static_cast<double>(sum / xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(static_cast<double>(ss / (xs.size() - 1))) : 0.0;
  const double half = kZ95 * sd / std::sqrt(static_cast<double>(xs.size()));
  e.mean = mean;
  e.ci_low = mean - half;
  e.ci_high = mean + half;
  return e;
}

struct GroupSums {
  std::vector<long double> sum;
  std::vector<long double> sum_sq;
  std::size_t paths = 0;
};

// Per-group accumulation; groups are contiguous index blocks processed in
// order, so the result is independent of the worker count.
std::vector<GroupSums> accumulate_wrong(const BeliefPair& pair, const MonteCarlo& mc,
                                        TailEstimator estimator, int groups) {
  const auto g = static_cast<std::size_t>(groups);
  const auto h = static_cast<std::size_t>(mc.horizon);
  std::vector<GroupSums> out(g);
  const Walker walker(pair);
  parallel_for(g, mc.workers, [&](std::size_t gi) {
    GroupSums& acc = out[gi];
    acc.sum.assign(h, 0.0L);
    acc.sum_sq.assign(h, 0.0L);
    const std::size_t lo = gi * mc.paths / g;
    const std::size_t hi = (gi + 1) * mc.paths / g;
    acc.paths = hi - lo;
    for (std::size_t i = lo; i < hi; ++i) {
      PathRng rng(stream_seed(mc.seed, i));
      double log_l = 0.0;
      for (std::size_t t = 0; t < h; ++t) {
        double x;
        if (estimator == TailEstimator::conditional) {
          x = walker.rho1(State::H, walker.cell(log_l));
          walker.advance(log_l, State::H, rng.uniform());
        } else {
          x = walker.advance(log_l, State::H, rng.uniform()) == Action::one ? 1.0 : 0.0;
        }
        acc.sum[t] += x;
        acc.sum_sq[t] += static_cast<long double>(x) * x;
      }
    }
  });
  return out;
}

struct Line {
  double slope;
  double intercept;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

StoppingStats stopping_stats(std::span<const Action> actions) {
  StoppingStats s;
  long last_wrong = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const long t = static_cast<long>(i) + 1;
    if (actions[i] == Action::two) {
      if (!s.tau) s.tau = t;
    } else {
      ++s.n_wrong;
      last_wrong = t;
      if (!s.t_first_mistake) s.t_first_mistake = t;
    }
  }
  if (!actions.empty() && actions.back() == Action::two) s.t_learn = last_wrong + 1;
  return s;
}

StoppingStats stopping_stats(const PublicPath& path, long horizon) {
  if (horizon < 0 || static_cast<std::size_t>(horizon) > path.actions.size()) {
    fail_config("invalid-params", "path shorter than the horizon");
  }
  return stopping_stats(std::span<const Action>(path.actions).first(static_cast<std::size_t>(horizon)));
}

TauBound expected_tau_bound(double psi, double nu, std::optional<long> split) {
  if (!(psi > 0.0 && psi < 1.0) || !(nu >= 0.0 && nu < 1.0)) {
    fail_config("invalid-params", "need psi in (0,1) and nu in [0,1)");
  }
  // Past t_star the envelope decreases, so its first non-positive value there
  // certifies domination for every later t.
  const double t_star = std::pow(3.0 / (psi * (1.0 - nu)), 1.0 / (1.0 - nu));
  long last_bad = 1;
  long certified = -1;
  for (long t = 2; t <= kSplitSearchCap; ++t) {
    const double td = static_cast<double>(t);
    if (log_excess(td, psi, nu) > 0.0) last_bad = t;
    if (td > t_star && log_envelope(td, psi, nu) <= 0.0) {
      certified = t;
      break;
    }
  }
  if (certified < 0) {
    fail_model("split-not-found", "domination t(1-psi/t^nu)^(t-1) <= 1/t^2 not certified below " +
                                      std::to_string(kSplitSearchCap));
  }
  long n = last_bad;
  if (split) {
    if (*split < last_bad) {
      fail_model("split-not-found", "given split " + std::to_string(*split) +
                                        " is followed by t = " + std::to_string(last_bad) +
                                        " where domination fails");
    }
    n = *split;
  }
  long double head = 1.0L;  // t = 1 term, P(tau = 1) <= 1
  long double partial = 1.0L;
  for (long t = 2; t <= n; ++t) {
    const double td = static_cast<double>(t);
    head += td * std::pow(1.0 - psi / std::pow(td, nu), td - 1.0);
    partial += 1.0L / (static_cast<long double>(td) * td);
  }
  const long double tail = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 6.0L - partial;
  return {static_cast<double>(head + tail), n};
}

ExactTau exact_expected_tau(const BeliefPair& pair) {
  ExactTau out;
  long double survive = 1.0L;  // P(tau > k - 1)
  long double expect = 0.0L;
  double log_l = 0.0;
  for (long k = 1;; ++k) {
    const OneStepLaw law = one_step_law_log(pair, log_l);
    expect += static_cast<long double>(k) * survive * law.rho2_H;
    out.terms = k;
    if (law.rho1_H == 0.0) {
      survive = 0.0L;
      break;
    }
    survive *= law.rho1_H;
    if (survive < 1e-300L) break;
    if (law.uninformative() && law.rho1_H == 1.0) break;  // wrong herd, tau = inf
    log_l = next_log_l(law, log_l, Action::one);
  }
  out.expectation = static_cast<double>(expect);
  out.residual_mass = static_cast<double>(survive);
  return out;
}

EfficiencyReport efficiency_estimate(const BeliefPair& pair, const MonteCarlo& mc) {
  if (mc.paths < 2 || mc.horizon < 1) fail_config("invalid-params", "need paths >= 2, horizon >= 1");
  struct Rec {
    std::int32_t tau, n_wrong, t_learn, t_first;  // 0 when censored
  };
  const Walker walker(pair);
  auto recs = map_paths<Rec>(mc, [&](std::size_t, PathRng& rng) {
    Rec r{0, 0, 0, 0};
    double log_l = 0.0;
    std::int32_t last_wrong = 0;
    Action a = Action::two;
    for (std::int32_t t = 1; t <= mc.horizon; ++t) {
      a = walker.advance(log_l, State::H, rng.uniform());
      if (a == Action::two) {
        if (r.tau == 0) r.tau = t;
      } else {
        ++r.n_wrong;
        last_wrong = t;
        if (r.t_first == 0) r.t_first = t;
      }
    }
    if (a == Action::two) r.t_learn = last_wrong + 1;
    return r;
  });

  std::vector<double> tau, nw, tl, t1;
  for (const auto& r : recs) {
    if (r.tau) tau.push_back(r.tau);
    nw.push_back(r.n_wrong);
    if (r.t_learn) tl.push_back(r.t_learn);
    if (r.t_first) t1.push_back(r.t_first);
  }
  EfficiencyReport rep;
  rep.tau = summarize(tau, mc.paths);
  rep.n_wrong = summarize(nw, mc.paths);
  rep.t_learn = summarize(tl, mc.paths);
  rep.t_first_mistake = summarize(t1, mc.paths);
  if (rep.tau.censored_fraction > kMaxTauCensoring) {
    fail_model("horizon-insufficient", "tau censored on a fraction " +
                                           std::to_string(rep.tau.censored_fraction) +
                                           " of paths; raise the horizon");
  }
  if (rep.t_learn.censored_fraction >= kMaxLearnCensoring) {
    fail_model("horizon-insufficient", "T_H censored on a fraction " +
                                           std::to_string(rep.t_learn.censored_fraction) +
                                           " of paths; raise the horizon");
  }
  return rep;
}

UniformConstant uniform_constant(std::span<const EfficiencyReport> family) {
  UniformConstant u;
  for (const auto& r : family) {
    u.tau = std::max(u.tau, r.tau.mean);
    u.n_wrong = std::max(u.n_wrong, r.n_wrong.mean);
    u.t_learn = std::max(u.t_learn, r.t_learn.mean);
    u.t_first_mistake = std::max(u.t_first_mistake, r.t_first_mistake.mean);
  }
  return u;
}

WrongActionCurve wrong_action_curve(const BeliefPair& pair, const MonteCarlo& mc,
                                    TailEstimator estimator) {
  if (mc.paths < 1 || mc.horizon < 1) fail_config("invalid-params", "need paths, horizon >= 1");
  const auto groups = accumulate_wrong(pair, mc, estimator, 1);
  const auto& g = groups.front();
  const double n = static_cast<double>(mc.paths);
  WrongActionCurve c;
  for (std::size_t t = 0; t < g.sum.size(); ++t) {
    const double p = static_cast<double>(g.sum[t] / n);
    double lo, hi;
    if (estimator == TailEstimator::indicator) {
      // Wilson score interval
      const double z2 = kZ95 * kZ95;
      const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
      const double half = kZ95 / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
      lo = centre - half;
      hi = centre + half;
    } else {
      const double var = static_cast<double>(g.sum_sq[t] / n) - p * p;
      const double half = kZ95 * std::sqrt(std::max(var, 0.0) / n);
      lo = p - half;
      hi = p + half;
    }
    c.p.push_back(p);
    c.ci_low.push_back(std::clamp(lo, 0.0, 1.0));
    c.ci_high.push_back(std::clamp(hi, 0.0, 1.0));
  }
  return c;
}

TailFit tail_fit(const BeliefPair& pair, const MonteCarlo& mc, const TailOptions& options) {
  if (mc.paths < kMinTailPaths) {
    fail_config("invalid-params", "tail fit needs at least 10^4 paths");
  }
  if (options.t_min < 1 || options.groups < 2 || mc.horizon < options.t_min) {
    fail_config("invalid-params", "need 1 <= t_min <= horizon and at least two groups");
  }
  const auto groups = accumulate_wrong(pair, mc, options.estimator, options.groups);
  const auto h = static_cast<std::size_t>(mc.horizon);
  std::vector<long double> total(h, 0.0L);
  for (const auto& g : groups)
    for (std::size_t t = 0; t < h; ++t) total[t] += g.sum[t];

  // Fit range: from t_min until the first t where the pooled estimate or any
  // leave-one-group-out estimate is zero.
  const auto first = static_cast<std::size_t>(options.t_min - 1);
  std::size_t end = first;
  for (; end < h; ++end) {
    bool positive = total[end] > 0.0L;
    for (const auto& g : groups) positive = positive && total[end] - g.sum[end] > 0.0L;
    if (!positive) break;
  }
  if (end - first < 10) {
    fail_model("insufficient-tail-mass",
               "estimated P(a_t != 2) reaches 0 before 10 points past t_min are available");
  }

  auto fit = [&](const GroupSums* drop) {
    const double n = static_cast<double>(mc.paths - (drop ? drop->paths : 0));
    std::vector<double> x, y;
    for (std::size_t t = first; t < end; ++t) {
      const long double s = total[t] - (drop ? drop->sum[t] : 0.0L);
      x.push_back(std::log(static_cast<double>(t + 1)));
      y.push_back(std::log(static_cast<double>(s / n)));
    }
    return std::make_pair(least_squares(x, y), std::make_pair(x, y));
  };

  TailFit out;
  const auto [line, xy] = fit(nullptr);
  out.alpha_hat = -line.slope;
  out.K_hat = std::exp(line.intercept);
  out.t_lo = static_cast<long>(first) + 1;
  out.t_hi = static_cast<long>(end);
  for (std::size_t i = 0; i < xy.first.size(); ++i) {
    out.residuals.push_back(xy.second[i] - (line.intercept + line.slope * xy.first[i]));
  }

  const auto g = static_cast<double>(groups.size());
  std::vector<double> loo;
  for (const auto& grp : groups) loo.push_back(-fit(&grp).first.slope);
  const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / g;
  double ss = 0.0;
  for (double a : loo) ss += (a - mean) * (a - mean);
  const double se = std::sqrt((g - 1.0) / g * ss);
  const boost::math::students_t dist(g - 1.0);
  const double q = boost::math::quantile(dist, 0.975);
  out.ci_low = out.alpha_hat - q * se;
  out.ci_high = out.alpha_hat + q * se;
  return out;
}

SmoothMonotoneReport smooth_monotone_check(const BeliefPair& pair, std::span<const double> probes,
                                           double relative_width) {
  if (probes.empty()) fail_config("invalid-probes", "no probe points");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!(probes[i] > 0.0 && probes[i] <= 0.1)) {
      fail_config("invalid-probes", "probe points must lie in (0, 0.1]");
    }
    if (i > 0 && !(probes[i] < probes[i - 1])) {
      fail_config("invalid-probes", "probe points must strictly decrease");
    }
  }
  if (!(relative_width > 0.0 && relative_width <= 1.0)) {
    fail_config("invalid-probes", "relative width must lie in (0, 1]");
  }
  auto mix = [&](double p) { return 0.5 * (cdf(pair, State::H, p) + cdf(pair, State::L, p)); };
  SmoothMonotoneReport rep;
  for (double p : probes) {
    const double h = relative_width * p;
    rep.probes.push_back(p);
    rep.values.push_back(p * (mix(p) - mix(p - h)) / h);
  }
  rep.trends_to_zero = std::is_sorted(rep.values.rbegin(), rep.values.rend()) &&
                       (rep.values.back() < rep.values.front() || rep.values.back() == 0.0);
  return rep;
}

}  // namespace sociallearn
