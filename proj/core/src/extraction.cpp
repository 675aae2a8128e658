#include "sociallearn/extraction.hpp"

#include <algorithm>
#include <cmath>

#include "sociallearn/error.hpp"

namespace sociallearn {

namespace {

bool condition1(const OneStepLaw& law, double eps, int na) {
  const double p0[2] = {law.rho1_H, law.rho2_H};
  const double p1[2] = {law.rho1_L, law.rho2_L};
  // strict version of the down-jump event
  double mass = 0.0;
  for (int a = 0; a < 2; ++a) {
    if (p0[a] > 0.0 && p1[a] / p0[a] - 1.0 < -eps / na) mass += p0[a];
  }
  return mass > eps / na;
}

bool condition2(double log_l, double log_l_stop, double eps, int na) {
  if (std::isinf(log_l_stop) && log_l_stop < 0.0) return false;
  return std::exp(log_l - log_l_stop) - 1.0 > eps / (2.0 * na);
}

// No further movement is possible from a node whose law is uninformative,
// provided the kernel depends on l only.
bool absorbing(const OneStepLaw& law) {
  for (Action a : {Action::one, Action::two}) {
    const double h = law.rho(a, State::H);
    if (h > 0.0 && h != law.rho(a, State::L)) return false;
  }
  return true;
}

}  // namespace

ExtractionRule ExtractionRule::make(double psi, double nu, int action_count) {
  if (!(psi > 0.0 && psi < 1.0) || !(nu > 0.0 && nu < 1.0) || action_count < 2) {
    fail_config("invalid-params", "extraction rule needs psi, nu in (0,1) and #A >= 2");
  }
  return {psi, nu, action_count};
}

double ExtractionRule::epsilon(long t) const {
  return psi / std::pow(static_cast<double>(t + 1), nu);
}

std::string to_string(Trigger t) {
  switch (t) {
    case Trigger::none: return "none";
    case Trigger::start: return "start";
    case Trigger::condition1: return "condition-1";
    case Trigger::condition2: return "condition-2";
    case Trigger::infinite: return "rule-3";
    case Trigger::censored: return "censored";
  }
  return "none";
}

TreeExtraction extract(const EnumeratedTree& tree, const ExtractionRule& rule) {
  if (tree.law.size() != EnumeratedTree::first_at(tree.depth)) {
    fail_config("not-a-model-tree", "tree carries no one-step laws");
  }
  const std::size_t n = tree.size();
  TreeExtraction ext;
  ext.last_stop.assign(n, 0);
  ext.count.assign(n, 0);
  ext.trigger.assign(n, Trigger::none);
  ext.absorbed.assign(n, 0);
  ext.trigger[0] = Trigger::start;
  ext.absorbed[0] = tree.homogeneous && !tree.law.empty() && absorbing(tree.law[0]);

  for (std::size_t v = 0; v < tree.law.size(); ++v) {
    const long t = EnumeratedTree::depth_of(v) + 1;
    const double eps = rule.epsilon(t);
    const bool c1 = !ext.absorbed[v] && condition1(tree.law[v], eps, rule.action_count);
    const std::size_t s = ext.last_stop[v];
    for (Action a : {Action::one, Action::two}) {
      const std::size_t c = EnumeratedTree::child(v, a);
      ext.last_stop[c] = ext.last_stop[v];
      ext.count[c] = ext.count[v];
      if (ext.absorbed[v]) {
        ext.absorbed[c] = 1;
        continue;
      }
      if (c1 || condition2(tree.log_l[c], tree.log_l[s], eps, rule.action_count)) {
        ext.trigger[c] = c1 ? Trigger::condition1 : Trigger::condition2;
        ext.last_stop[c] = static_cast<std::uint32_t>(c);
        ext.count[c] = static_cast<std::uint16_t>(ext.count[v] + 1);
      }
      if (tree.homogeneous && tree.internal(c) && absorbing(tree.law[c]) &&
          !(tree.log_l[c] > tree.log_l[ext.last_stop[c]])) {
        ext.absorbed[c] = 1;
      }
    }
  }
  return ext;
}

ExtractedProcess path_process(const EnumeratedTree& tree, const TreeExtraction& ext,
                              std::size_t leaf) {
  std::vector<std::size_t> stops;
  for (std::size_t i = leaf;; i = EnumeratedTree::parent(i)) {
    if (ext.is_stop(i)) stops.push_back(i);
    if (i == 0) break;
  }
  std::reverse(stops.begin(), stops.end());
  ExtractedProcess p;
  for (std::size_t i : stops) {
    p.taus.push_back(EnumeratedTree::depth_of(i));
    p.values.push_back(tree.l(i));
    p.triggers.push_back(ext.trigger[i]);
  }
  if (ext.absorbed[leaf]) {
    p.taus.push_back(kTauInfinite);
    p.values.push_back(0.0);
    p.triggers.push_back(Trigger::infinite);
  } else {
    p.taus.push_back(kTauCensored);
    p.values.push_back(std::nan(""));
    p.triggers.push_back(Trigger::censored);
  }
  return p;
}

ExtractedProcess extract_path(const PublicPath& path, const BeliefPair& pair,
                              const ExtractionRule& rule) {
  ExtractedProcess p;
  p.taus.push_back(0);
  p.values.push_back(path.l_values.front());
  p.triggers.push_back(Trigger::start);
  const long n = static_cast<long>(path.actions.size());
  double log_stop = std::log(path.l_values.front());
  auto absorbed_at = [&](long t) {
    const double log_l = std::log(path.l_values[static_cast<std::size_t>(t)]);
    return absorbing(one_step_law_log(pair, log_l)) && !(log_l > log_stop);
  };
  if (absorbed_at(0)) {
    p.taus.push_back(kTauInfinite);
    p.values.push_back(0.0);
    p.triggers.push_back(Trigger::infinite);
    return p;
  }
  for (long t = 1; t <= n; ++t) {
    const double eps = rule.epsilon(t);
    const double log_prev = std::log(path.l_values[static_cast<std::size_t>(t - 1)]);
    const double log_now = std::log(path.l_values[static_cast<std::size_t>(t)]);
    const bool c1 = condition1(one_step_law_log(pair, log_prev), eps, rule.action_count);
    if (c1 || condition2(log_now, log_stop, eps, rule.action_count)) {
      p.taus.push_back(t);
      p.values.push_back(path.l_values[static_cast<std::size_t>(t)]);
      p.triggers.push_back(c1 ? Trigger::condition1 : Trigger::condition2);
      log_stop = log_now;
    }
    if (absorbed_at(t)) {
      p.taus.push_back(kTauInfinite);
      p.values.push_back(0.0);
      p.triggers.push_back(Trigger::infinite);
      return p;
    }
  }
  p.taus.push_back(kTauCensored);
  p.values.push_back(std::nan(""));
  p.triggers.push_back(Trigger::censored);
  return p;
}

ExtractionReport verify_extracted_activity(const EnumeratedTree& tree, const TreeExtraction& ext,
                                           const ExtractionRule& rule) {
  ExtractionReport rep;
  rep.check = "extracted-activity";
  rep.min_slack = INFINITY;
  rep.max_supermartingale_excess = -INFINITY;
  rep.per_node_worst.assign(static_cast<std::size_t>(tree.depth), NodeSlack{0, 0, INFINITY});

  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < tree.law.size(); ++v) {
    if (!ext.is_stop(v) || tree.prob_H[v] == 0.0) continue;
    const double lv = tree.l(v);
    if (!(lv > 0.0) || !std::isfinite(lv)) continue;

    const int k = ext.count[v];
    const double theta =
        rule.psi / (2.0 * rule.action_count * std::pow(static_cast<double>(k + 1), rule.nu));
    double jump_mass = 0.0, censored = 0.0;
    long double expect = 0.0L;
    auto outcome = [&](double mass, double value) {
      expect += static_cast<long double>(mass) * value;
      if (std::fabs(value / lv - 1.0) > theta) jump_mass += mass;
    };

    if (ext.absorbed[v]) {
      outcome(1.0, 0.0);
    } else {
      stack.assign({EnumeratedTree::child(v, Action::one), EnumeratedTree::child(v, Action::two)});
      while (!stack.empty()) {
        const std::size_t w = stack.back();
        stack.pop_back();
        const double mass = tree.prob_H[w] / tree.prob_H[v];
        if (mass == 0.0) continue;
        if (ext.is_stop(w)) {
          outcome(mass, tree.l(w));
        } else if (ext.absorbed[w]) {
          outcome(mass, 0.0);
        } else if (!tree.internal(w)) {
          censored += mass;
        } else {
          stack.push_back(EnumeratedTree::child(w, Action::one));
          stack.push_back(EnumeratedTree::child(w, Action::two));
        }
      }
    }

    const double slack = jump_mass - theta;
    ++rep.nodes_checked;
    if (censored > 0.0) {
      ++rep.nodes_unresolved;
    } else {
      rep.max_supermartingale_excess =
          std::max(rep.max_supermartingale_excess, static_cast<double>((expect - lv) / lv));
    }
    const int d = EnumeratedTree::depth_of(v);
    auto& worst = rep.per_node_worst[static_cast<std::size_t>(d)];
    if (slack < worst.slack) worst = {v, d, slack};
    rep.min_slack = std::min(rep.min_slack, slack);
  }
  std::erase_if(rep.per_node_worst, [](const NodeSlack& s) { return std::isinf(s.slack); });
  if (std::isinf(rep.max_supermartingale_excess)) rep.max_supermartingale_excess = 0.0;
  rep.pass = rep.nodes_checked > 0 && rep.min_slack > 0.0;
  return rep;
}

double down_jump_mass(std::span<const double> p0, std::span<const double> p1, double jump) {
  if (p0.size() != p1.size()) fail_config("invalid-params", "action laws differ in size");
  double mass = 0.0;
  for (std::size_t a = 0; a < p0.size(); ++a) {
    if (p0[a] > 0.0 && p1[a] / p0[a] - 1.0 <= -jump) mass += p0[a];
  }
  return mass;
}

DistanceJumpReport distance_jump_check(const EnumeratedTree& tree, double psi, double nu,
                                       int action_count) {
  DistanceJumpReport rep;
  rep.min_slack = INFINITY;
  for (std::size_t v = 0; v < tree.law.size(); ++v) {
    if (tree.prob_H[v] == 0.0) continue;
    const double lv = tree.l(v);
    if (!(lv > 0.0) || !std::isfinite(lv)) continue;
    const OneStepLaw& law = tree.law[v];
    const double k = EnumeratedTree::depth_of(v) + 1;
    const double thr = psi / std::pow(k, nu);
    const double dist =
        std::max(std::fabs(law.rho1_H - law.rho1_L), std::fabs(law.rho2_H - law.rho2_L));
    if (!(dist > thr)) {
      ++rep.nodes_skipped;
      continue;
    }
    const double p0[2] = {law.rho1_H, law.rho2_H};
    const double p1[2] = {law.rho1_L, law.rho2_L};
    const double need = thr / action_count;
    const double slack = down_jump_mass(p0, p1, need) - need;
    ++rep.nodes_checked;
    if (slack < 0.0) ++rep.violations;
    rep.min_slack = std::min(rep.min_slack, slack);
  }
  if (rep.nodes_checked == 0) rep.min_slack = 0.0;
  return rep;
}

}  // namespace sociallearn
