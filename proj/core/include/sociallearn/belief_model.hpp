#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sociallearn {

enum class State : std::uint8_t { H, L };

// Target closeness sequence psi / (k+1)^nu.
struct InformativeParams {
  double psi;
  double nu;

  // Throws invalid-params unless both lie in (0,1).
  static InformativeParams make(double psi, double nu);
  double requirement(long k) const;
};

struct ConstructionOptions {
  int truncation = 1000;
  // b_k = min(damping_slope * k, 600) for k >= 2.
  double damping_slope = 1.0;
  // Fixed shrink of b below psi*e/(e-1). Unset: search the default ladder.
  std::optional<double> delta_b;
  double delta_a = 1e-3;
};

struct ConstructionMeta {
  double psi = 0;
  double nu = 0;
  double a = 0;
  double b = 0;
  double delta_b = 0;
  double damping_slope = 1;
  std::vector<double> b_seq;  // b_1..b_T
  bool bracket_met = false;
};

/// Pair of log-likelihood-ratio laws on the integer grid -T..T.
///
/// Index i of a mass vector holds the logit k = i - T. The constructor
/// precomputes prefix (cdf) and suffix (survival) sums in extended precision so
/// tail probabilities stay accurate far from the centre.
class BeliefPair {
 public:
  static constexpr double kMassTolerance = 1e-12;

  // Validates normalisation, mutual absolute continuity, the grid size, and
  // (unless allow_identical) that the two laws differ.
  static BeliefPair from_masses(std::vector<double> mass_H, std::vector<double> mass_L,
                                bool allow_identical = false,
                                std::optional<ConstructionMeta> meta = std::nullopt);

  int truncation() const noexcept { return t_; }
  std::span<const double> mass(State s) const noexcept;
  const std::optional<ConstructionMeta>& meta() const noexcept { return meta_; }
  bool identical() const noexcept { return mass_h_ == mass_l_; }

  // Cells partition the real line: cell 0 is x < -T, cell c >= 1 is
  // [c - T - 1, c - T), with the last cell [T, inf).
  int cell_count() const noexcept { return 2 * t_ + 2; }
  int cell(double logit) const;
  double cdf_cell(State s, int c) const noexcept { return s == State::H ? cdf_h_[c] : cdf_l_[c]; }
  double survival_cell(State s, int c) const noexcept {
    return s == State::H ? sur_h_[c] : sur_l_[c];
  }

  // P(K <= x) and P(K > x).
  double cdf_logit(State s, double x) const { return cdf_cell(s, cell(x)); }
  double survival_logit(State s, double x) const { return survival_cell(s, cell(x)); }

 private:
  BeliefPair() = default;
  void build_sums();

  int t_ = 0;
  std::vector<double> mass_h_, mass_l_;
  std::vector<double> cdf_h_, cdf_l_, sur_h_, sur_l_;
  std::optional<ConstructionMeta> meta_;

  friend BeliefPair construct_informative_pair(const InformativeParams&,
                                               const ConstructionOptions&);
};

// Right-continuous cdf of the private belief p = logistic(K).
double cdf(const BeliefPair& pair, State s, double p);
double survival(const BeliefPair& pair, State s, double p);

// F^L(p) - F^H(p).
double delta(const BeliefPair& pair, double p);

// Benchmark likelihood ratios l~_0..l~_horizon along the all-correct path.
std::vector<double> benchmark_sequence(const BeliefPair& pair, int horizon);
std::vector<double> benchmark_log_sequence(const BeliefPair& pair, int horizon);

struct InformativeReport {
  bool informative = false;
  std::optional<int> first_failure;
  double min_margin = 0;  // min over checked k of Delta_k - psi/(k+1)^nu
  int argmin = 0;
  int checked = 0;
};

// Checks Delta(pbar(l~_k)) > psi/(k+1)^nu for k = 0..horizon.
InformativeReport is_informative(const BeliefPair& pair, const InformativeParams& params,
                                 int horizon);

// Shrink ladder tried in order when ConstructionOptions::delta_b is unset.
std::span<const double> default_delta_b_ladder();

BeliefPair construct_informative_pair(const InformativeParams& params,
                                      const ConstructionOptions& options = {});

}  // namespace sociallearn
