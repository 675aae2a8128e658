#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/dynamics.hpp"
#include "sociallearn/martingale_tools.hpp"

namespace sociallearn {

struct ExtractionRule {
  double psi;
  double nu;
  int action_count = 2;

  static ExtractionRule make(double psi, double nu, int action_count = 2);
  // psi / (t+1)^nu with t the global time index.
  double epsilon(long t) const;
};

enum class Trigger : std::uint8_t { none, start, condition1, condition2, infinite, censored };

std::string to_string(Trigger t);

inline constexpr long kTauInfinite = std::numeric_limits<long>::max();
inline constexpr long kTauCensored = -1;

// taus[0] = 0 with trigger `start`. The last entry may be kTauInfinite (value
// 0, trigger `infinite`) or kTauCensored (value NaN, trigger `censored`).
struct ExtractedProcess {
  std::vector<long> taus;
  std::vector<double> values;
  std::vector<Trigger> triggers;
};

// Per-node extraction state over an enumeration tree. Stopping times are
// history measurable, so every node knows the latest stopping node above it.
struct TreeExtraction {
  std::vector<std::uint32_t> last_stop;
  std::vector<std::uint16_t> count;  // extracted index of last_stop
  std::vector<Trigger> trigger;      // condition1/condition2 at stopping nodes, start at the root
  std::vector<std::uint8_t> absorbed;  // next stopping time certified infinite

  bool is_stop(std::size_t i) const {
    return trigger[i] == Trigger::start || trigger[i] == Trigger::condition1 ||
           trigger[i] == Trigger::condition2;
  }
};

TreeExtraction extract(const EnumeratedTree& tree, const ExtractionRule& rule);
ExtractedProcess path_process(const EnumeratedTree& tree, const TreeExtraction& ext,
                              std::size_t leaf);

// Extraction along a sampled path using the pair's kernel at the realised l.
ExtractedProcess extract_path(const PublicPath& path, const BeliefPair& pair,
                              const ExtractionRule& rule);

struct ExtractionReport {
  std::string check;
  bool pass = false;
  double min_slack = 0;
  std::size_t nodes_checked = 0;
  std::size_t nodes_unresolved = 0;    // some continuation runs past the tree depth
  double max_supermartingale_excess = 0;  // relative, over fully resolved nodes
  std::vector<NodeSlack> per_node_worst;
};

// At every stopping node with 0 < L~_k < inf and depth below the tree depth:
//   P^H(|L~_{k+1}/L~_k - 1| > theta_k | node) > theta_k,
//   theta_k = psi / (2 #A (k+1)^nu).
// Continuations that reach the tree depth without stopping count as no jump.
ExtractionReport verify_extracted_activity(const EnumeratedTree& tree, const TreeExtraction& ext,
                                           const ExtractionRule& rule);

// Mass of actions whose one-step ratio p1/p0 - 1 is <= -jump, under p0.
double down_jump_mass(std::span<const double> p0, std::span<const double> p1, double jump);

struct DistanceJumpReport {
  std::size_t nodes_checked = 0;
  std::size_t nodes_skipped = 0;
  std::size_t violations = 0;
  double min_slack = 0;
  bool pass() const { return violations == 0; }
};

// At every internal node of depth k-1 whose max-action distance exceeds
// psi/k^nu, checks P^H(l_k/l_{k-1} - 1 <= -psi/(k^nu #A)) >= psi/(k^nu #A).
DistanceJumpReport distance_jump_check(const EnumeratedTree& tree, double psi, double nu,
                                       int action_count = 2);

}  // namespace sociallearn
