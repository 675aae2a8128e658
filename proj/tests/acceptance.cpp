// Acceptance harness. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "sociallearn/efficiency.hpp"
#include "sociallearn/extraction.hpp"
#include "sociallearn/martingale_tools.hpp"

using namespace sociallearn;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << "C" << id << " " << name << ": " << detail << '\n';
  std::cout.flush();
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Grid {
  double psi, nu;
  BeliefPair pair;
};

std::vector<Grid>& grid() {
  static std::vector<Grid> g;
  return g;
}

void construction_validity() {
  bool ok = true;
  double worst_margin = INFINITY, worst_time = 0.0;
  std::string where;
  for (double psi : {0.1, 0.3, 0.5, 0.7}) {
    for (double nu : {0.1, 0.3, 0.5, 0.9}) {
      const auto t0 = Clock::now();
      auto pair = construct_informative_pair({psi, nu});
      const auto rep = is_informative(pair, {psi, nu}, 1000);
      const double dt = seconds_since(t0);
      worst_time = std::max(worst_time, dt);
      if (!rep.informative || !(rep.min_margin > 0.0) || rep.checked < 1001 || dt >= 10.0) ok = false;
      if (rep.min_margin < worst_margin) {
        worst_margin = rep.min_margin;
        where = "(" + fmt("%g", psi) + "," + fmt("%g", nu) + ")";
      }
      grid().push_back({psi, nu, std::move(pair)});
    }
  }
  report(1, "construction validity", ok,
         "16 pairs informative to k=1000, min margin " + fmt("%.3g", worst_margin) + " at " + where +
             ", slowest " + fmt("%.2f", worst_time) + " s");
}

void martingale_identity() {
  bool ok = true;
  double worst_mean = 0.0, worst_node = 0.0;
  for (const auto& g : grid()) {
    const auto tree = enumerate(g.pair, 12);
    for (int k = 0; k <= 12; ++k) {
      worst_mean = std::max(worst_mean, std::fabs(expected_l(tree, k, State::H) - 1.0));
    }
    const auto rep = martingale_check(tree);
    worst_node = std::max(worst_node, rep.max_relative_deviation);
    if (!rep.martingale(1e-12)) ok = false;
  }
  ok = ok && worst_mean <= 1e-9;
  report(2, "martingale identity", ok,
         "max |E^H[l_k]-1| " + fmt("%.2g", worst_mean) + " (tol 1e-9), max node deviation " +
             fmt("%.2g", worst_node) + " (tol 1e-12)");
}

void exact_weak_activity() {
  bool ok = true;
  double lo = INFINITY;
  for (const auto& g : grid()) {
    const auto rep = weak_activity_check(enumerate(g.pair, 10), ActivitySpec::make(g.psi / 2.0, g.nu));
    if (!rep.pass || !(rep.min_slack > 0.0)) ok = false;
    lo = std::min(lo, rep.min_slack);
  }
  report(3, "exact weak activity", ok, "depth 10, activity psi/2, min slack " + fmt("%.4g", lo));
}

void classical_inequalities() {
  const double cs[] = {2.0, 4.0, 8.0};
  const DubinsConfig dubins[] = {{0.5, 1.0, 1}, {0.5, 2.0, 2}, {0.25, 0.5, 3}};
  bool ok = true;
  double lo = INFINITY;
  int checks = 0;
  for (auto [psi, nu] : {std::pair{0.3, 0.5}, {0.5, 0.2}}) {
    const auto pair = construct_informative_pair({psi, nu});
    const auto rep = inequality_audit(pair, cs, dubins, {100000, 200, 20240611, 0});
    for (const auto& c : rep) {
      ++checks;
      if (!c.pass) ok = false;
      lo = std::min(lo, c.bound + 3.0 * c.sigma - c.frequency);
    }
  }
  report(4, "classical inequalities", ok,
         std::to_string(checks) + " checks at 1e5 paths, min (bound + 3 sd - freq) " + fmt("%.4g", lo));
}

void uniform_convergence() {
  std::vector<BeliefPair> family;
  for (double slope : {1.0, 1.5, 2.0}) {
    family.push_back(construct_informative_pair({0.3, 0.5}, {.damping_slope = slope}));
  }
  const BeliefPair* ptrs[] = {&family[0], &family[1], &family[2]};
  const InformativeParams params{0.3, 0.5};

  const auto t0 = Clock::now();
  const auto base = uniform_K_estimate(ptrs, params, 0.1, 0.5, {100000, 2000, 1, 0});
  const double runtime = seconds_since(t0);
  const auto reseeded = uniform_K_estimate(ptrs, params, 0.1, 0.5, {100000, 2000, 2, 0});
  const auto doubled = uniform_K_estimate(ptrs, params, 0.1, 0.5, {200000, 2000, 1, 0});

  bool finite = true;
  for (const auto& e : base.per_pair) finite = finite && e.K_hat >= 0 && e.K_hat < 2000;
  auto within = [&](long k) {
    return std::fabs(static_cast<double>(k - base.max_K_hat)) <= 0.1 * static_cast<double>(base.max_K_hat);
  };
  const bool ok = finite && within(reseeded.max_K_hat) && within(doubled.max_K_hat) && runtime < 300.0;
  std::string per;
  for (const auto& e : base.per_pair) per += std::to_string(e.K_hat) + " ";
  report(5, "uniform convergence", ok,
         "K_hat per pair " + per + "max " + std::to_string(base.max_K_hat) + ", reseeded " +
             std::to_string(reseeded.max_K_hat) + ", doubled " + std::to_string(doubled.max_K_hat) +
             ", " + fmt("%.1f", runtime) + " s");
}

void extraction_guarantee() {
  bool ok = true;
  double lo = INFINITY;
  std::size_t unresolved = 0;
  for (const auto& g : grid()) {
    const auto tree = enumerate(g.pair, 10);
    const auto rule = ExtractionRule::make(g.psi, g.nu);
    const auto rep = verify_extracted_activity(tree, extract(tree, rule), rule);
    if (!rep.pass) ok = false;
    lo = std::min(lo, rep.min_slack);
    unresolved += rep.nodes_unresolved;
  }
  report(6, "extraction guarantee", ok,
         "depth 10, activity psi/4, min slack " + fmt("%.4g", lo) + ", unresolved nodes " +
             std::to_string(unresolved));
}

void distance_jump() {
  std::size_t violations = 0, checked = 0;
  for (const auto& g : grid()) {
    const auto rep = distance_jump_check(enumerate(g.pair, 10), g.psi, g.nu);
    violations += rep.violations;
    checked += rep.nodes_checked;
  }
  report(7, "distance jump", violations == 0,
         std::to_string(violations) + " violations over " + std::to_string(checked) + " nodes");
}

void efficiency_bound() {
  const auto pair = construct_informative_pair({0.5, 0.2}, {.truncation = 2000});
  const auto bound = expected_tau_bound(0.5, 0.2);
  const auto exact = exact_expected_tau(pair);
  const auto mc = efficiency_estimate(pair, {100000, 5000, 8, 0});
  const bool ok = exact.expectation <= bound.value && mc.tau.ci_high < bound.value;
  report(8, "efficiency bound", ok,
         "exact E[tau] " + fmt("%.6f", exact.expectation) + ", MC " + fmt("%.5f", mc.tau.mean) + " [" +
             fmt("%.5f", mc.tau.ci_low) + ", " + fmt("%.5f", mc.tau.ci_high) + "], bound " +
             fmt("%.6f", bound.value) + " (split " + std::to_string(bound.split) + ")");
}

void tail_regime() {
  const auto pair = construct_informative_pair({0.7, 0.1});
  const auto fit = tail_fit(pair, {100000, 200, 9, 0});
  const BeliefPair flat = BeliefPair::from_masses({0.5, 0.0, 0.5}, {0.5, 0.0, 0.5}, true);
  const auto control = tail_fit(flat, {100000, 200, 9, 0});
  const bool ok = fit.alpha_hat > 2.0 && fit.ci_low > 2.0 && control.alpha_hat < 0.5;
  report(9, "tail exponent regime", ok,
         "alpha_hat " + fmt("%.3f", fit.alpha_hat) + " CI [" + fmt("%.3f", fit.ci_low) + ", " +
             fmt("%.3f", fit.ci_high) + "], control " + fmt("%.3g", control.alpha_hat));
}

std::string cli_checksum(std::vector<std::string> args) {
  args.insert(args.begin(), "sociallearn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) return "error: " + err.str();
  const std::string s = out.str();
  if (s.rfind("# ", 0) == 0) {
    const auto at = s.find("# checksum: ");
    return s.substr(at, s.find('\n', at) - at);
  }
  return nlohmann::json::parse(s).at("checksum").get<std::string>();
}

void determinism() {
  const std::vector<std::string> pair{"--psi", "0.3", "--nu", "0.5", "--truncation", "300"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), pair.begin(), pair.end());
    return a;
  };
  const std::vector<std::vector<std::string>> commands{
      with({"construct"}),
      with({"simulate", "--seed", "5", "--paths", "50", "--horizon", "40"}),
      with({"simulate", "--seed", "5", "--paths", "50", "--horizon", "40", "--format", "csv"}),
      with({"audit", "--seed", "5", "--depth", "8", "--paths", "5000", "--horizon", "100"}),
      with({"extract", "--seed", "5", "--depth", "8"}),
      with({"estimate-k", "--seed", "5", "--paths", "5000", "--horizon", "300", "--slopes", "1,2"}),
      with({"efficiency", "--seed", "5", "--paths", "10000", "--horizon", "2000", "--tail-horizon",
            "60"}),
      {"constants", "--epsilon", "0.1", "--psi", "0.3", "--L", "0.5"},
  };
  bool ok = true;
  std::string bad;
  for (const auto& cmd : commands) {
    std::vector<std::string> sums;
    for (const char* w : {"1", "2", "4", "1"}) {
      auto args = cmd;
      args.insert(args.begin(), {"--workers", w});
      sums.push_back(cli_checksum(args));
    }
    const bool same = sums[0].rfind("error", 0) != 0 &&
                      std::all_of(sums.begin(), sums.end(), [&](const auto& s) { return s == sums[0]; });
    if (!same) {
      ok = false;
      bad += " " + cmd[0];
    }
  }
  report(10, "determinism", ok,
         std::to_string(commands.size()) + " invocations x workers {1,2,4,1}" +
             (ok ? std::string(", checksums identical") : ", mismatch in" + bad));
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> criteria{
      {1, construction_validity}, {2, martingale_identity}, {3, exact_weak_activity},
      {4, classical_inequalities}, {5, uniform_convergence},  {6, extraction_guarantee},
      {7, distance_jump},          {8, efficiency_bound},     {9, tail_regime},
      {10, determinism}};
  for (const auto& [id, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, "criterion", false, std::string("threw ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures;
}
