#include "sociallearn/dynamics.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "sociallearn/error.hpp"

namespace sociallearn {

double threshold(double l) {
  if (std::isinf(l)) return 1.0;
  return l / (1.0 + l);
}

OneStepLaw one_step_law_log(const BeliefPair& pair, double log_l) {
  const int c = pair.cell(log_l);
  return {pair.cdf_cell(State::H, c), pair.cdf_cell(State::L, c), pair.survival_cell(State::H, c),
          pair.survival_cell(State::L, c)};
}

OneStepLaw one_step_law(const BeliefPair& pair, double l) {
  if (!(l >= 0.0)) fail_config("invalid-params", "likelihood ratio must be non-negative");
  return one_step_law_log(pair, std::log(l));
}

double transition_prob(const BeliefPair& pair, double l, Action a, State s) {
  return one_step_law(pair, l).rho(a, s);
}

double next_log_l(const OneStepLaw& law, double log_l, Action a) {
  const double h = law.rho(a, State::H);
  const double lo = law.rho(a, State::L);
  if (h == 0.0) {
    fail_model("division-by-zero-transition",
               "rho(a|l,H) = 0 for sampled action " + std::to_string(static_cast<int>(a)));
  }
  if (h == lo) return log_l;
  return log_l + (std::log(lo) - std::log(h));
}

bool in_cascade(double l, double tolerance) { return l < tolerance; }

StepResult step(const BeliefPair& pair, State world, const PublicState& current, PathRng& rng) {
  const OneStepLaw law = one_step_law(pair, current.l);
  const Action a = rng.uniform() < law.rho(Action::one, world) ? Action::one : Action::two;
  const double next = std::exp(next_log_l(law, std::log(current.l), a));
  return {a, {next, current.k + 1}, law.rho(a, State::H), law.rho(a, State::L)};
}

Walker::Walker(const BeliefPair& pair) : pair_(&pair) {
  const auto cells = static_cast<std::size_t>(pair.cell_count());
  log_ratio1_.assign(cells, 0.0);
  log_ratio2_.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    const int ci = static_cast<int>(c);
    const double h1 = pair.cdf_cell(State::H, ci), l1 = pair.cdf_cell(State::L, ci);
    const double h2 = pair.survival_cell(State::H, ci), l2 = pair.survival_cell(State::L, ci);
    // Zero-probability actions are never sampled; mutual absolute continuity
    // makes the H and L zeros coincide.
    if (h1 > 0.0 && h1 != l1) log_ratio1_[c] = std::log(l1) - std::log(h1);
    if (h2 > 0.0 && h2 != l2) log_ratio2_[c] = std::log(l2) - std::log(h2);
  }
}

PublicPath simulate(const BeliefPair& pair, State world, int horizon, std::uint64_t seed) {
  if (horizon < 1) fail_config("invalid-params", "horizon must be at least 1");
  PublicPath path;
  path.state = world;
  path.seed = seed;
  path.actions.reserve(static_cast<std::size_t>(horizon));
  path.l_values.reserve(static_cast<std::size_t>(horizon) + 1);
  path.rho_H.reserve(static_cast<std::size_t>(horizon));
  path.rho_L.reserve(static_cast<std::size_t>(horizon));

  PathRng rng(seed);
  double log_l = 0.0;
  path.l_values.push_back(1.0);
  for (int k = 0; k < horizon; ++k) {
    const OneStepLaw law = one_step_law_log(pair, log_l);
    const Action a = rng.uniform() < law.rho(Action::one, world) ? Action::one : Action::two;
    log_l = next_log_l(law, log_l, a);
    path.actions.push_back(a);
    path.l_values.push_back(std::exp(log_l));
    path.rho_H.push_back(law.rho(a, State::H));
    path.rho_L.push_back(law.rho(a, State::L));
  }
  return path;
}

std::vector<PublicPath> simulate_batch(const BeliefPair& pair, State world, const MonteCarlo& mc) {
  std::vector<PublicPath> out(mc.paths);
  parallel_for(mc.paths, mc.workers, [&](std::size_t i) {
    out[i] = simulate(pair, world, mc.horizon, stream_seed(mc.seed, i));
  });
  return out;
}

TransitionKernel kernel_of(const BeliefPair& pair) {
  return {[&pair](double log_l, int) { return one_step_law_log(pair, log_l); }, true};
}

int EnumeratedTree::depth_of(std::size_t i) {
  return static_cast<int>(std::bit_width(i + 1)) - 1;
}

std::string EnumeratedTree::prefix(std::size_t i) {
  const int d = depth_of(i);
  std::string s(static_cast<std::size_t>(d), '?');
  std::size_t offset = i - first_at(d);
  for (int j = d - 1; j >= 0; --j) {
    s[static_cast<std::size_t>(j)] = (offset & 1) ? '2' : '1';
    offset >>= 1;
  }
  return s;
}

double EnumeratedTree::l(std::size_t i) const { return std::exp(log_l[i]); }

EnumeratedTree enumerate(const BeliefPair& pair, int depth) {
  return enumerate(kernel_of(pair), depth);
}

EnumeratedTree enumerate(const TransitionKernel& kernel, int depth) {
  if (depth > kMaxEnumerationDepth) {
    fail_config("depth-too-large", "enumeration depth " + std::to_string(depth) + " exceeds " +
                                       std::to_string(kMaxEnumerationDepth));
  }
  if (depth < 1) fail_config("invalid-params", "enumeration depth must be at least 1");

  EnumeratedTree tree;
  tree.depth = depth;
  tree.homogeneous = kernel.homogeneous;
  const std::size_t n = EnumeratedTree::first_at(depth + 1);
  const std::size_t internal = EnumeratedTree::first_at(depth);
  tree.log_l.assign(n, 0.0);
  tree.prob_H.assign(n, 0.0);
  tree.prob_L.assign(n, 0.0);
  tree.law.resize(internal);
  tree.prob_H[0] = 1.0;
  tree.prob_L[0] = 1.0;

  for (std::size_t i = 0; i < internal; ++i) {
    const OneStepLaw law = kernel.law(tree.log_l[i], EnumeratedTree::depth_of(i));
    tree.law[i] = law;
    for (Action a : {Action::one, Action::two}) {
      const std::size_t c = EnumeratedTree::child(i, a);
      const double h = law.rho(a, State::H);
      const double lo = law.rho(a, State::L);
      tree.prob_H[c] = tree.prob_H[i] * h;
      tree.prob_L[c] = tree.prob_L[i] * lo;
      if (h == lo) {
        tree.log_l[c] = tree.log_l[i];
      } else if (h == 0.0) {
        tree.log_l[c] = std::numeric_limits<double>::infinity();
      } else {
        tree.log_l[c] = tree.log_l[i] + (std::log(lo) - std::log(h));
      }
    }
  }
  return tree;
}

double level_mass(const EnumeratedTree& tree, int k, State s) {
  const auto& p = s == State::H ? tree.prob_H : tree.prob_L;
  long double acc = 0.0L;
  const std::size_t lo = EnumeratedTree::first_at(k);
  for (std::size_t i = lo; i < lo + EnumeratedTree::count_at(k); ++i) acc += p[i];
  return static_cast<double>(acc);
}

double expected_l(const EnumeratedTree& tree, int k, State s) {
  const auto& p = s == State::H ? tree.prob_H : tree.prob_L;
  long double acc = 0.0L;
  const std::size_t lo = EnumeratedTree::first_at(k);
  for (std::size_t i = lo; i < lo + EnumeratedTree::count_at(k); ++i) {
    if (p[i] > 0.0) acc += static_cast<long double>(p[i]) * tree.l(i);
  }
  return static_cast<double>(acc);
}

MartingaleReport martingale_check(const EnumeratedTree& tree) {
  MartingaleReport rep;
  rep.min_relative_excess = INFINITY;
  rep.max_relative_excess = -INFINITY;
  for (std::size_t i = 0; i < tree.law.size(); ++i) {
    if (tree.prob_H[i] == 0.0) continue;
    const double l = tree.l(i);
    double excess = 0.0;
    if (l > 0.0 && std::isfinite(l)) {
      long double e = 0.0L;
      for (Action a : {Action::one, Action::two}) {
        const double h = tree.law[i].rho(a, State::H);
        if (h > 0.0) e += static_cast<long double>(h) * tree.l(EnumeratedTree::child(i, a));
      }
      excess = static_cast<double>((e - l) / l);
    } else if (!std::isfinite(l)) {
      continue;
    }
    ++rep.nodes_checked;
    if (excess > rep.max_relative_excess) {
      rep.max_relative_excess = excess;
      rep.worst_node = i;
    }
    rep.min_relative_excess = std::min(rep.min_relative_excess, excess);
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::fabs(excess));
  }
  if (rep.nodes_checked == 0) rep.min_relative_excess = rep.max_relative_excess = 0.0;
  return rep;
}

}  // namespace sociallearn
