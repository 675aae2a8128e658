#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/parallel.hpp"
#include "sociallearn/rng.hpp"

namespace sociallearn {

// Action 2 is optimal in state H, action 1 in state L.
enum class Action : std::uint8_t { one = 1, two = 2 };

inline constexpr double kDefaultCascadeTolerance = 1e-9;

double threshold(double l);

struct OneStepLaw {
  double rho1_H = 0;
  double rho1_L = 0;
  double rho2_H = 0;
  double rho2_L = 0;

  double rho(Action a, State s) const {
    if (a == Action::one) return s == State::H ? rho1_H : rho1_L;
    return s == State::H ? rho2_H : rho2_L;
  }
  // Both actions leave l unchanged.
  bool uninformative() const { return rho1_H == rho1_L && rho2_H == rho2_L; }
};

OneStepLaw one_step_law(const BeliefPair& pair, double l);
OneStepLaw one_step_law_log(const BeliefPair& pair, double log_l);
double transition_prob(const BeliefPair& pair, double l, Action a, State s);

// log l' = log l + log rho(a|L) - log rho(a|H). Throws
// division-by-zero-transition if rho(a|H) = 0.
double next_log_l(const OneStepLaw& law, double log_l, Action a);

bool in_cascade(double l, double tolerance = kDefaultCascadeTolerance);

struct PublicState {
  double l = 1.0;
  long k = 0;
};

struct StepResult {
  Action action;
  PublicState next;
  double rho_H;
  double rho_L;
};

StepResult step(const BeliefPair& pair, State world, const PublicState& current, PathRng& rng);

struct PublicPath {
  std::vector<Action> actions;
  std::vector<double> l_values;  // l_0..l_n
  std::vector<double> rho_H;     // rho(a_k | l_{k-1}, H)
  std::vector<double> rho_L;
  State state = State::H;
  std::uint64_t seed = 0;
};

PublicPath simulate(const BeliefPair& pair, State world, int horizon, std::uint64_t seed);

// Table-driven sampler used by the Monte Carlo estimators. The public state is
// carried as log l so that deep paths never underflow.
class Walker {
 public:
  explicit Walker(const BeliefPair& pair);

  int cell(double log_l) const { return pair_->cell(log_l); }
  double rho1(State s, int c) const { return pair_->cdf_cell(s, c); }
  // Samples one action under `world` from uniform u and advances log_l.
  Action advance(double& log_l, State world, double u) const {
    const int c = pair_->cell(log_l);
    if (u < pair_->cdf_cell(world, c)) {
      log_l += log_ratio1_[static_cast<std::size_t>(c)];
      return Action::one;
    }
    log_l += log_ratio2_[static_cast<std::size_t>(c)];
    return Action::two;
  }

 private:
  const BeliefPair* pair_;
  std::vector<double> log_ratio1_, log_ratio2_;
};

struct MonteCarlo {
  std::size_t paths = 100000;
  int horizon = 1000;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: hardware concurrency
};

// Calls fn(i, rng) for every path index with the stream of path i and stores
// the results in index order.
template <class R, class Fn>
std::vector<R> map_paths(const MonteCarlo& mc, Fn&& fn) {
  std::vector<R> out(mc.paths);
  parallel_for(mc.paths, mc.workers, [&](std::size_t i) {
    PathRng rng(stream_seed(mc.seed, i));
    out[i] = fn(i, rng);
  });
  return out;
}

std::vector<PublicPath> simulate_batch(const BeliefPair& pair, State world, const MonteCarlo& mc);

// Any kernel that maps (log l, depth) to a one-step law. `homogeneous` means the
// law depends on log l only.
struct TransitionKernel {
  std::function<OneStepLaw(double log_l, int depth)> law;
  bool homogeneous = true;
};

TransitionKernel kernel_of(const BeliefPair& pair);

inline constexpr int kMaxEnumerationDepth = 24;

/// Exact enumeration of all action prefixes up to `depth`.
///
/// Nodes are stored in level order: the root is 0, the children of node i are
/// 2i+1 (action 1) and 2i+2 (action 2). `law` is stored for internal nodes.
struct EnumeratedTree {
  int depth = 0;
  bool homogeneous = true;
  std::vector<double> log_l;
  std::vector<double> prob_H;
  std::vector<double> prob_L;
  std::vector<OneStepLaw> law;

  static std::size_t first_at(int k) { return (std::size_t{1} << k) - 1; }
  static std::size_t count_at(int k) { return std::size_t{1} << k; }
  static int depth_of(std::size_t i);
  static std::size_t child(std::size_t i, Action a) { return 2 * i + static_cast<std::size_t>(a); }
  static std::size_t parent(std::size_t i) { return (i - 1) / 2; }
  static std::string prefix(std::size_t i);

  std::size_t size() const { return log_l.size(); }
  bool internal(std::size_t i) const { return i < law.size(); }
  double l(std::size_t i) const;
};

EnumeratedTree enumerate(const BeliefPair& pair, int depth);
EnumeratedTree enumerate(const TransitionKernel& kernel, int depth);

// Sum of P^s over the nodes at depth k, and E^s[l_k].
double level_mass(const EnumeratedTree& tree, int k, State s);
double expected_l(const EnumeratedTree& tree, int k, State s);

struct MartingaleReport {
  double max_relative_excess = 0;     // max over nodes of (E^H[l'|node] - l)/l
  double min_relative_excess = 0;
  double max_relative_deviation = 0;  // max |E^H[l'|node] - l|/l
  std::size_t nodes_checked = 0;
  std::size_t worst_node = 0;
  bool supermartingale(double tol = 1e-12) const { return max_relative_excess <= tol; }
  bool martingale(double tol = 1e-12) const { return max_relative_deviation <= tol; }
};

// Nodes with l = 0 have conditional expectation 0 and are counted as exact.
MartingaleReport martingale_check(const EnumeratedTree& tree);

}  // namespace sociallearn
