#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/dynamics.hpp"

namespace sociallearn {

struct ActivitySpec {
  double psi;
  double nu;
  int action_count = 2;

  // Throws invalid-domain outside psi in (0,1), nu in [0,1), #A >= 2.
  static ActivitySpec make(double psi, double nu, int action_count = 2);
  // psi / (k+1)^nu
  double rate(long k) const;
};

struct NodeSlack {
  std::size_t node = 0;
  int depth = 0;
  double slack = 0;
};

struct ActivityReport {
  std::string check;
  bool pass = false;
  double min_slack = 0;
  std::size_t nodes_checked = 0;
  std::vector<NodeSlack> per_node_worst;  // worst node per depth
};

// At each internal node of depth k with 0 < l < inf and P^H(node) > 0:
//   P^H(|l'/l - 1| > jump_multiplier * r_k | node) - r_k,  r_k = psi/(k+1)^nu.
// The pass flag requires every slack > 0. jump_multiplier = 1 is the plain
// weak-activity definition for the given activity.
ActivityReport weak_activity_check(const EnumeratedTree& tree, const ActivitySpec& spec,
                                   double jump_multiplier = 1.0);

// Number of k' in [1, K) with |L_k'/L_{k'-1} - 1| >= psi/k'^nu.
long jump_count(std::span<const double> values, const ActivitySpec& spec, long K);

// Completed passages from <= a to >= b among the first K entries.
long upcrossings(std::span<const double> values, double a, double b, long K);

double maximal_inequality_bound(double l0, double c);
double dubins_bound(double a, double b, long N, double l0);

enum class JRule { standard, footnote };

struct BoundConstants {
  double epsilon = 0;
  double psi = 0;
  double l0 = 0;
  double L_lower = 0;
  double c_lower = 0;
  double c_upper = 0;
  std::int64_t I = 0;
  std::int64_t N = 0;
  std::int64_t J = 0;
  JRule j_rule = JRule::standard;
  std::optional<std::int64_t> K_estimate;  // unset: empirical
};

BoundConstants lemma5_constants(double epsilon, double psi, double l0, double L_lower,
                                JRule j_rule = JRule::standard);

// Post-rounding checks of the defining inequalities for I, N and J.
bool constants_consistent(const BoundConstants& c);

struct KEstimate {
  long K_hat = 0;
  long ci_low = 0;
  long ci_high = 0;
  double coverage = 0;  // empirical coverage at K_hat
  std::size_t paths = 0;
};

struct UniformKReport {
  std::vector<KEstimate> per_pair;
  long max_K_hat = 0;
};

// Smallest K such that at least a 1-epsilon fraction of H-paths keep
// l_k <= L_lower for all K < k <= horizon. Every pair must be informative for
// `params` up to min(horizon, truncation).
UniformKReport uniform_K_estimate(std::span<const BeliefPair* const> pairs,
                                  const InformativeParams& params, double epsilon, double L_lower,
                                  const MonteCarlo& mc);

// Smallest K such that at least 1-epsilon of H-paths have J_K >= J or l_K = 0.
KEstimate lemma4_empirical_K(const BeliefPair& pair, const ActivitySpec& spec, long J,
                             double epsilon, const MonteCarlo& mc);

struct DichotomyResult {
  long scenario_1_count = 0;
  bool scenario_2_holds = false;
};

DichotomyResult dichotomy_audit(const PublicPath& path, const BeliefPair& pair, double psi,
                                double nu, double epsilon, long n);

struct BoundCheck {
  std::string name;
  double bound = 0;
  double frequency = 0;
  double sigma = 0;  // binomial standard deviation at the bound
  bool pass = false;  // frequency <= bound + 3 sigma
};

struct DubinsConfig {
  double a;
  double b;
  long N;
};

// Monte Carlo under H with l_0 = 1: frequency of max_k l_k >= c and of
// U(a,b) >= N over the first horizon+1 values.
std::vector<BoundCheck> inequality_audit(const BeliefPair& pair, std::span<const double> cs,
                                         std::span<const DubinsConfig> dubins,
                                         const MonteCarlo& mc);

}  // namespace sociallearn
