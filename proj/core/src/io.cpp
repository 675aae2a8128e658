#include "sociallearn/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sociallearn/error.hpp"

namespace sociallearn::io {

namespace {

void write(std::string& out, const json& j, int indent, int level) {
  auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, level + 1);
      }
      newline(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        write(out, v, indent, level + 1);
      }
      newline(level);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isnan(v)) {
        out += "null";
      } else if (std::isinf(v)) {
        out += v > 0 ? "\"inf\"" : "\"-inf\"";
      } else {
        out += format_double(v);
      }
      return;
    }
    default:
      out += j.dump();
  }
}

json doubles(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

json worst_nodes(const std::vector<NodeSlack>& nodes) {
  json a = json::array();
  for (const auto& n : nodes) {
    a.push_back({{"depth", n.depth}, {"prefix", EnumeratedTree::prefix(n.node)}, {"slack", n.slack}});
  }
  return a;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

double read_double(const json& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    fail_config("invalid-json", "unexpected string where a number was expected: " + s);
  }
  return j.get<double>();
}

const char* to_string(State s) { return s == State::H ? "H" : "L"; }

State state_from_string(const std::string& s) {
  if (s == "H") return State::H;
  if (s == "L") return State::L;
  fail_config("invalid-params", "state must be H or L");
}

json to_json(const BeliefPair& pair) {
  const int t = pair.truncation();
  json grid = json::array();
  for (int k = -t; k <= t; ++k) grid.push_back(k);
  json j = {{"truncation", t},
            {"grid", std::move(grid)},
            {"mass_H", doubles(pair.mass(State::H))},
            {"mass_L", doubles(pair.mass(State::L))}};
  if (const auto& m = pair.meta()) {
    j["psi"] = m->psi;
    j["nu"] = m->nu;
    j["a"] = m->a;
    j["b"] = m->b;
    j["b_seq"] = doubles(m->b_seq);
    j["delta_b"] = m->delta_b;
    j["damping_slope"] = m->damping_slope;
    j["bracket_met"] = m->bracket_met;
  } else {
    for (const char* k : {"psi", "nu", "a", "b", "b_seq", "delta_b", "damping_slope", "bracket_met"}) {
      j[k] = nullptr;
    }
  }
  return j;
}

BeliefPair pair_from_json(const json& j) {
  try {
    auto mass_h = j.at("mass_H").get<std::vector<double>>();
    auto mass_l = j.at("mass_L").get<std::vector<double>>();
    const auto grid = j.at("grid").get<std::vector<int>>();
    const int t = static_cast<int>(mass_h.size() / 2);
    if (grid.size() != mass_h.size() || grid.front() != -t || grid.back() != t) {
      fail_config("invalid-json", "grid does not match the mass vectors");
    }
    std::optional<ConstructionMeta> meta;
    if (j.contains("psi") && !j.at("psi").is_null()) {
      ConstructionMeta m;
      m.psi = j.at("psi").get<double>();
      m.nu = j.at("nu").get<double>();
      m.a = j.at("a").get<double>();
      m.b = j.at("b").get<double>();
      m.b_seq = j.at("b_seq").get<std::vector<double>>();
      m.delta_b = j.value("delta_b", 0.0);
      m.damping_slope = j.value("damping_slope", 1.0);
      m.bracket_met = j.value("bracket_met", false);
      meta = std::move(m);
    }
    return BeliefPair::from_masses(std::move(mass_h), std::move(mass_l), false, std::move(meta));
  } catch (const json::exception& e) {
    fail_config("invalid-json", std::string("malformed pair: ") + e.what());
  }
}

json to_json(const PublicPath& path) {
  json actions = json::array();
  for (Action a : path.actions) actions.push_back(static_cast<int>(a));
  return {{"state", to_string(path.state)},
          {"seed", path.seed},
          {"actions", std::move(actions)},
          {"l_values", doubles(path.l_values)},
          {"rho_H", doubles(path.rho_H)},
          {"rho_L", doubles(path.rho_L)}};
}

std::string paths_csv(std::span<const PublicPath> paths) {
  std::string out = "path_id,k,action,l,rho_H,rho_L\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& path = paths[p];
    const std::string id = std::to_string(p);
    out += id + ",0,," + format_double(path.l_values.front()) + ",,\n";
    for (std::size_t k = 0; k < path.actions.size(); ++k) {
      out += id;
      out += ',';
      out += std::to_string(k + 1);
      out += ',';
      out += std::to_string(static_cast<int>(path.actions[k]));
      out += ',';
      out += format_double(path.l_values[k + 1]);
      out += ',';
      out += format_double(path.rho_H[k]);
      out += ',';
      out += format_double(path.rho_L[k]);
      out += '\n';
    }
  }
  return out;
}

json to_json(const EnumeratedTree& tree) {
  json nodes = json::object();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    nodes[EnumeratedTree::prefix(i)] = {
        {"l", tree.l(i)}, {"p_H", tree.prob_H[i]}, {"p_L", tree.prob_L[i]}};
  }
  return {{"depth", tree.depth}, {"nodes", std::move(nodes)}};
}

json to_json(const MartingaleReport& rep) {
  return {{"check", "martingale"},
          {"pass", rep.martingale()},
          {"supermartingale", rep.supermartingale()},
          {"max_relative_excess", rep.max_relative_excess},
          {"min_relative_excess", rep.min_relative_excess},
          {"max_relative_deviation", rep.max_relative_deviation},
          {"nodes_checked", rep.nodes_checked},
          {"worst_node", EnumeratedTree::prefix(rep.worst_node)},
          {"confidence", "exact"}};
}

json to_json(const InformativeReport& rep) {
  json j = {{"informative", rep.informative},
            {"min_margin", rep.min_margin},
            {"argmin", rep.argmin},
            {"checked", rep.checked}};
  j["first_failure"] = rep.first_failure ? json(*rep.first_failure) : json(nullptr);
  return j;
}

json to_json(const ActivityReport& rep, const json& params) {
  return {{"check", rep.check},
          {"params", params},
          {"pass", rep.pass},
          {"min_slack", rep.min_slack},
          {"nodes_checked", rep.nodes_checked},
          {"per_node_worst", worst_nodes(rep.per_node_worst)},
          {"confidence", "exact"}};
}

json to_json(const ExtractionReport& rep, const json& params) {
  return {{"check", rep.check},
          {"params", params},
          {"pass", rep.pass},
          {"min_slack", rep.min_slack},
          {"nodes_checked", rep.nodes_checked},
          {"nodes_unresolved", rep.nodes_unresolved},
          {"max_supermartingale_excess", rep.max_supermartingale_excess},
          {"per_node_worst", worst_nodes(rep.per_node_worst)},
          {"confidence", "exact"}};
}

json to_json(const DistanceJumpReport& rep, const json& params) {
  return {{"check", "distance-jump"},
          {"params", params},
          {"pass", rep.pass()},
          {"min_slack", rep.min_slack},
          {"violations", rep.violations},
          {"nodes_checked", rep.nodes_checked},
          {"nodes_skipped", rep.nodes_skipped},
          {"per_node_worst", json::array()},
          {"confidence", "exact"}};
}

json to_json(const BoundCheck& c) {
  return {{"check", c.name},
          {"bound", c.bound},
          {"frequency", c.frequency},
          {"sigma", c.sigma},
          {"pass", c.pass},
          {"min_slack", c.bound + 3.0 * c.sigma - c.frequency},
          {"confidence", "3 binomial sd"}};
}

json to_json(const BoundConstants& c) {
  json j = {{"epsilon", c.epsilon}, {"psi", c.psi},         {"l0", c.l0},
            {"L_lower", c.L_lower}, {"c_lower", c.c_lower}, {"c_upper", c.c_upper},
            {"I", c.I},             {"N", c.N},             {"J", c.J},
            {"j_rule", c.j_rule == JRule::standard ? "standard" : "footnote"}};
  j["K_estimate"] = c.K_estimate ? json(*c.K_estimate) : json("empirical");
  return j;
}

json to_json(const UniformKReport& rep) {
  json per = json::array();
  for (std::size_t i = 0; i < rep.per_pair.size(); ++i) {
    const auto& e = rep.per_pair[i];
    per.push_back({{"pair_id", i},
                   {"K_hat", e.K_hat},
                   {"ci_low", e.ci_low},
                   {"ci_high", e.ci_high},
                   {"coverage", e.coverage},
                   {"paths", e.paths}});
  }
  return {{"per_pair", std::move(per)}, {"max_K_hat", rep.max_K_hat}};
}

std::string uniform_k_csv(const UniformKReport& rep) {
  std::string out = "pair_id,K_hat,ci_low,ci_high\n";
  for (std::size_t i = 0; i < rep.per_pair.size(); ++i) {
    const auto& e = rep.per_pair[i];
    out += std::to_string(i) + ',' + std::to_string(e.K_hat) + ',' + std::to_string(e.ci_low) +
           ',' + std::to_string(e.ci_high) + '\n';
  }
  return out;
}

json to_json(const ExtractedProcess& p) {
  json taus = json::array(), values = json::array(), triggers = json::array();
  for (std::size_t i = 0; i < p.taus.size(); ++i) {
    if (p.taus[i] == kTauInfinite) {
      taus.push_back("inf");
    } else if (p.taus[i] == kTauCensored) {
      taus.push_back("censored");
    } else {
      taus.push_back(p.taus[i]);
    }
    values.push_back(p.values[i]);
    triggers.push_back(to_string(p.triggers[i]));
  }
  return {{"taus", std::move(taus)}, {"values", std::move(values)}, {"triggers", std::move(triggers)}};
}

json to_json(const Estimate& e) {
  return {{"mean", e.mean},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"samples", e.samples},
          {"censored_fraction", e.censored_fraction}};
}

json to_json(const EfficiencyReport& rep) {
  return {{"tau", to_json(rep.tau)},
          {"n_wrong", to_json(rep.n_wrong)},
          {"t_learn", to_json(rep.t_learn)},
          {"t_first_mistake", to_json(rep.t_first_mistake)}};
}

json to_json(const TailFit& fit) {
  return {{"alpha_hat", fit.alpha_hat},
          {"K_hat", fit.K_hat},
          {"ci_low", fit.ci_low},
          {"ci_high", fit.ci_high},
          {"t_lo", fit.t_lo},
          {"t_hi", fit.t_hi},
          {"alpha_above_2", fit.ci_low > 2.0},
          {"residuals", doubles(fit.residuals)}};
}

json to_json(const SmoothMonotoneReport& rep) {
  return {{"probes", doubles(rep.probes)},
          {"values", doubles(rep.values)},
          {"trends_to_zero", rep.trends_to_zero}};
}

std::string wrong_action_csv(const WrongActionCurve& curve) {
  std::string out = "t,p_wrong,ci_low,ci_high\n";
  for (std::size_t i = 0; i < curve.p.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_double(curve.p[i]) + ',' +
           format_double(curve.ci_low[i]) + ',' + format_double(curve.ci_high[i]) + '\n';
  }
  return out;
}

}  // namespace sociallearn::io
