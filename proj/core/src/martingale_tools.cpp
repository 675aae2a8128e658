#include "sociallearn/martingale_tools.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sociallearn/error.hpp"

namespace sociallearn {

namespace {

struct QuantileResult {
  long value;
  long ci_low;
  long ci_high;
  double coverage;
};

// Order-statistic estimate of the q-quantile with a normal-approximation
// binomial interval on the rank.
QuantileResult quantile_with_ci(std::vector<long> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  auto at_rank = [&](double r) {
    const auto idx = static_cast<std::size_t>(std::clamp(r, 1.0, n)) - 1;
    return xs[idx];
  };
  const double sd = std::sqrt(n * q * (1.0 - q));
  QuantileResult out{};
  out.value = at_rank(std::ceil(q * n));
  out.ci_low = at_rank(std::floor(q * n - 1.96 * sd));
  out.ci_high = at_rank(std::ceil(q * n + 1.96 * sd));
  const auto covered = std::upper_bound(xs.begin(), xs.end(), out.value) - xs.begin();
  out.coverage = static_cast<double>(covered) / n;
  return out;
}

}  // namespace

ActivitySpec ActivitySpec::make(double psi, double nu, int action_count) {
  if (!(psi > 0.0 && psi < 1.0) || !(nu >= 0.0 && nu < 1.0) || action_count < 2) {
    fail_config("invalid-domain", "activity spec needs psi in (0,1), nu in [0,1), #A >= 2");
  }
  return {psi, nu, action_count};
}

double ActivitySpec::rate(long k) const {
  return psi / std::pow(static_cast<double>(k + 1), nu);
}

ActivityReport weak_activity_check(const EnumeratedTree& tree, const ActivitySpec& spec,
                                   double jump_multiplier) {
  ActivityReport rep;
  rep.check = "weak-activity";
  rep.min_slack = INFINITY;
  rep.per_node_worst.assign(static_cast<std::size_t>(tree.depth), NodeSlack{0, 0, INFINITY});
  for (std::size_t i = 0; i < tree.law.size(); ++i) {
    if (tree.prob_H[i] == 0.0) continue;
    const double l = tree.l(i);
    if (!(l > 0.0) || !std::isfinite(l)) continue;
    const int k = EnumeratedTree::depth_of(i);
    const double r = spec.rate(k);
    const OneStepLaw& law = tree.law[i];
    double p = 0.0;
    for (Action a : {Action::one, Action::two}) {
      const double h = law.rho(a, State::H);
      if (h == 0.0) continue;
      if (std::fabs(law.rho(a, State::L) / h - 1.0) > jump_multiplier * r) p += h;
    }
    const double slack = p - r;
    ++rep.nodes_checked;
    auto& worst = rep.per_node_worst[static_cast<std::size_t>(k)];
    if (slack < worst.slack) worst = {i, k, slack};
    rep.min_slack = std::min(rep.min_slack, slack);
  }
  std::erase_if(rep.per_node_worst, [](const NodeSlack& s) { return std::isinf(s.slack); });
  rep.pass = rep.nodes_checked > 0 && rep.min_slack > 0.0;
  return rep;
}

long jump_count(std::span<const double> values, const ActivitySpec& spec, long K) {
  if (K < 0 || static_cast<std::size_t>(K) > values.size()) {
    fail_config("invalid-params", "path shorter than K");
  }
  long count = 0;
  for (long k = 1; k < K; ++k) {
    const double prev = values[static_cast<std::size_t>(k - 1)];
    if (!(prev > 0.0)) continue;
    const double jump = std::fabs(values[static_cast<std::size_t>(k)] / prev - 1.0);
    if (jump >= spec.psi / std::pow(static_cast<double>(k), spec.nu)) ++count;
  }
  return count;
}

long upcrossings(std::span<const double> values, double a, double b, long K) {
  if (!(a > 0.0) || !(a < b)) fail_config("invalid-interval", "need 0 < a < b");
  const std::size_t n = std::min(values.size(), static_cast<std::size_t>(std::max(K, 0L)));
  long count = 0;
  bool below = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] <= a) {
      below = true;
    } else if (below && values[i] >= b) {
      ++count;
      below = false;
    }
  }
  return count;
}

double maximal_inequality_bound(double l0, double c) {
  if (!(c > 0.0) || !(l0 > 0.0)) fail_config("invalid-domain", "need l0 > 0 and c > 0");
  return std::min(1.0, l0 / c);
}

double dubins_bound(double a, double b, long N, double l0) {
  if (!(a > 0.0) || !(a < b)) fail_config("invalid-interval", "need 0 < a < b");
  if (N < 0 || !(l0 > 0.0)) fail_config("invalid-domain", "need N >= 0 and l0 > 0");
  return std::pow(a / b, static_cast<double>(N)) * std::min(1.0, l0 / a);
}

BoundConstants lemma5_constants(double epsilon, double psi, double l0, double L_lower,
                                JRule j_rule) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(psi > 0.0 && psi < 1.0) || !(l0 > 0.0) ||
      !(L_lower > 0.0 && L_lower < l0)) {
    fail_config("invalid-domain",
                "need epsilon, psi in (0,1), l0 > 0 and 0 < L_lower < l0");
  }
  BoundConstants c;
  c.epsilon = epsilon;
  c.psi = psi;
  c.l0 = l0;
  c.L_lower = L_lower;
  c.j_rule = j_rule;
  c.c_lower = epsilon / 4.0 * L_lower;
  c.c_upper = 4.0 / epsilon * l0;

  const double i_real = std::ceil(2.0 * c.c_upper / (c.c_lower * psi)) + 2.0;
  if (!(i_real < 1e15)) fail_config("invalid-domain", "I overflows");
  c.I = static_cast<std::int64_t>(i_real);

  const double target = std::log(epsilon / 4.0 / static_cast<double>(c.I) * c.c_lower / l0);
  const double per_step =
      std::log1p(-(c.c_upper - c.c_lower) / (static_cast<double>(c.I) * c.c_upper));
  double n_real = std::max(1.0, std::ceil(target / per_step));
  while (n_real * per_step > target) n_real += 1.0;
  if (!(n_real < 1e15)) fail_config("invalid-domain", "N overflows");
  c.N = static_cast<std::int64_t>(n_real);

  std::int64_t prod = 0;
  std::int64_t j = 0;
  if (j_rule == JRule::standard) {
    // 2I(N+1) + I + 1
    if (__builtin_mul_overflow(2 * c.I, c.N + 1, &prod) ||
        __builtin_add_overflow(prod, c.I + 1, &j)) {
      fail_config("invalid-domain", "J overflows");
    }
  } else {
    // smallest integer above 2N(I+1) + 2
    if (__builtin_mul_overflow(2 * c.N, c.I + 1, &prod) ||
        __builtin_add_overflow(prod, 3, &j)) {
      fail_config("invalid-domain", "J overflows");
    }
  }
  c.J = j;
  return c;
}

bool constants_consistent(const BoundConstants& c) {
  if (!(c.c_lower < c.c_upper)) return false;
  const double i_min = 2.0 * c.c_upper / (c.c_lower * c.psi) + 2.0;
  if (static_cast<double>(c.I) < i_min) return false;
  const double target = std::log(c.epsilon / 4.0 / static_cast<double>(c.I) * c.c_lower / c.l0);
  const double per_step =
      std::log1p(-(c.c_upper - c.c_lower) / (static_cast<double>(c.I) * c.c_upper));
  if (static_cast<double>(c.N) * per_step > target) return false;
  if (c.j_rule == JRule::standard) return c.J == 2 * c.I * (c.N + 1) + c.I + 1;
  return c.J > 2 * c.N * (c.I + 1) + 2;
}

UniformKReport uniform_K_estimate(std::span<const BeliefPair* const> pairs,
                                  const InformativeParams& params, double epsilon, double L_lower,
                                  const MonteCarlo& mc) {
  if (pairs.empty()) fail_config("invalid-params", "no pairs given");
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(L_lower > 0.0)) {
    fail_config("invalid-domain", "need epsilon in (0,1) and L_lower > 0");
  }
  if (mc.horizon < 1 || mc.paths == 0) fail_config("invalid-params", "need horizon, paths >= 1");

  UniformKReport rep;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const BeliefPair& pair = *pairs[j];
    const int check_to = std::min(mc.horizon, pair.truncation());
    if (!is_informative(pair, params, check_to).informative) {
      fail_model("not-informative", "pair " + std::to_string(j) +
                                        " fails the informativeness check for the shared params");
    }
    MonteCarlo sub = mc;
    sub.seed = stream_seed(mc.seed, 0x51a7e000ULL + j);
    const Walker walker(pair);
    // Last time the path sits above L_lower; 0 if it never does after k = 0.
    auto last_above = map_paths<long>(sub, [&](std::size_t, PathRng& rng) {
      double log_l = 0.0;
      long last = 0;
      for (long k = 1; k <= sub.horizon; ++k) {
        walker.advance(log_l, State::H, rng.uniform());
        if (std::exp(log_l) > L_lower) last = k;
      }
      return last;
    });
    const auto q = quantile_with_ci(std::move(last_above), 1.0 - epsilon);
    if (q.value >= mc.horizon) {
      fail_model("horizon-too-short", "no K below the horizon reaches the requested coverage for pair " +
                                          std::to_string(j));
    }
    rep.per_pair.push_back({q.value, q.ci_low, q.ci_high, q.coverage, sub.paths});
    rep.max_K_hat = std::max(rep.max_K_hat, q.value);
  }
  return rep;
}

KEstimate lemma4_empirical_K(const BeliefPair& pair, const ActivitySpec& spec, long J,
                             double epsilon, const MonteCarlo& mc) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || J < 0) {
    fail_config("invalid-domain", "need epsilon in (0,1) and J >= 0");
  }
  const Walker walker(pair);
  const long never = static_cast<long>(mc.horizon) + 1;
  auto first_k = map_paths<long>(mc, [&](std::size_t, PathRng& rng) {
    double log_l = 0.0;
    long jumps = 0;
    if (J == 0) return 0L;
    for (long k = 1; k <= mc.horizon; ++k) {
      const double prev = log_l;
      walker.advance(log_l, State::H, rng.uniform());
      if (std::isinf(log_l) && log_l < 0) return k;
      const double jump = std::fabs(std::exp(log_l - prev) - 1.0);
      if (jump >= spec.psi / std::pow(static_cast<double>(k), spec.nu) && ++jumps >= J) {
        return k + 1;
      }
    }
    return never;
  });
  const auto q = quantile_with_ci(std::move(first_k), 1.0 - epsilon);
  if (q.value >= never) {
    fail_model("horizon-too-short", "jump count target not reached within the horizon");
  }
  return {q.value, q.ci_low, q.ci_high, q.coverage, mc.paths};
}

DichotomyResult dichotomy_audit(const PublicPath& path, const BeliefPair& pair, double psi,
                                double nu, double epsilon, long n) {
  const long len = static_cast<long>(path.l_values.size()) - 1;
  if (n < 0 || len <= n) fail_config("invalid-params", "path length must exceed n");
  DichotomyResult out;
  for (long k = 1; k <= n; ++k) {
    const double d = delta(pair, threshold(path.l_values[static_cast<std::size_t>(k)]));
    if (d >= psi / std::pow(static_cast<double>(k), nu)) ++out.scenario_1_count;
  }
  out.scenario_2_holds = true;
  for (long k = n + 1; k <= len; ++k) {
    if (!(path.l_values[static_cast<std::size_t>(k)] < epsilon * (1.0 + epsilon))) {
      out.scenario_2_holds = false;
      break;
    }
  }
  return out;
}

std::vector<BoundCheck> inequality_audit(const BeliefPair& pair, std::span<const double> cs,
                                         std::span<const DubinsConfig> dubins,
                                         const MonteCarlo& mc) {
  for (double c : cs) maximal_inequality_bound(1.0, c);
  for (const auto& d : dubins) dubins_bound(d.a, d.b, d.N, 1.0);

  struct Record {
    double max_l = 1.0;
    std::vector<long> ups;
  };
  const Walker walker(pair);
  auto records = map_paths<Record>(mc, [&](std::size_t, PathRng& rng) {
    Record r;
    r.ups.assign(dubins.size(), 0);
    std::vector<char> below(dubins.size(), 0);
    double log_l = 0.0;
    auto visit = [&](double l) {
      r.max_l = std::max(r.max_l, l);
      for (std::size_t j = 0; j < dubins.size(); ++j) {
        if (l <= dubins[j].a) {
          below[j] = 1;
        } else if (below[j] && l >= dubins[j].b) {
          ++r.ups[j];
          below[j] = 0;
        }
      }
    };
    visit(1.0);
    for (int k = 0; k < mc.horizon; ++k) {
      walker.advance(log_l, State::H, rng.uniform());
      visit(std::exp(log_l));
    }
    return r;
  });

  const double n = static_cast<double>(mc.paths);
  auto finish = [&](std::string name, double bound, std::size_t hits) {
    BoundCheck b;
    b.name = std::move(name);
    b.bound = bound;
    b.frequency = static_cast<double>(hits) / n;
    b.sigma = std::sqrt(bound * (1.0 - bound) / n);
    b.pass = b.frequency <= b.bound + 3.0 * b.sigma;
    return b;
  };
  std::vector<BoundCheck> out;
  for (double c : cs) {
    const auto hits = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [&](const Record& r) { return r.max_l >= c; }));
    out.push_back(finish("maximal c=" + std::to_string(c), maximal_inequality_bound(1.0, c), hits));
  }
  for (std::size_t j = 0; j < dubins.size(); ++j) {
    const auto& d = dubins[j];
    const auto hits = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [&](const Record& r) { return r.ups[j] >= d.N; }));
    out.push_back(finish("dubins a=" + std::to_string(d.a) + " b=" + std::to_string(d.b) +
                             " N=" + std::to_string(d.N),
                         dubins_bound(d.a, d.b, d.N, 1.0), hits));
  }
  return out;
}

}  // namespace sociallearn
