#include "cli.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/dynamics.hpp"
#include "sociallearn/efficiency.hpp"
#include "sociallearn/error.hpp"
#include "sociallearn/extraction.hpp"
#include "sociallearn/io.hpp"
#include "sociallearn/martingale_tools.hpp"
#include "sociallearn/parallel.hpp"
#include "sociallearn/rng.hpp"
#include "sociallearn/version.hpp"

namespace sociallearn::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Globals {
  std::string out_dir;
  int workers = 0;
};

struct PairArgs {
  std::vector<std::string> files;
  double psi = kUnset;
  double nu = kUnset;
  double delta_b = kUnset;
  int truncation = 1000;
  double slope = 1.0;
  std::vector<double> slopes{1.0};
};

struct Sampling {
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  int horizon = 0;
};

// What a subcommand produced. The primary payload is JSON unless
// primary_csv is set, in which case the CSV body is the payload.
struct Outcome {
  json config;
  std::optional<std::uint64_t> seed;
  json payload;
  std::optional<std::string> primary_csv;
  std::string out;
  std::vector<std::pair<std::string, std::string>> extra_csv;  // path, body
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_config("invalid-params", "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

BeliefPair load_pair(const std::string& path, json& source) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_config("invalid-json", path + ": " + e.what());
  }
  // Accept both a bare pair and a `construct` document.
  if (j.is_object() && j.contains("payload")) {
    j = j.at("payload");
    if (j.is_object() && j.contains("pair")) j = j.at("pair");
  }
  source = {{"source", "load"}, {"file", path}, {"sha256", sha256_hex(text)}};
  return io::pair_from_json(j);
}

BeliefPair build_pair(const PairArgs& a, double slope, json& source) {
  if (std::isnan(a.psi) || std::isnan(a.nu)) {
    fail_config("invalid-params", "--psi and --nu are required unless --pair is given");
  }
  ConstructionOptions o;
  o.truncation = a.truncation;
  o.damping_slope = slope;
  if (!std::isnan(a.delta_b)) o.delta_b = a.delta_b;
  source = {{"source", "construct"},    {"psi", a.psi},          {"nu", a.nu},
            {"truncation", a.truncation}, {"damping_slope", slope}, {"delta_b", a.delta_b}};
  return construct_informative_pair(InformativeParams::make(a.psi, a.nu), o);
}

BeliefPair single_pair(const PairArgs& a, json& source) {
  if (a.files.size() > 1) fail_config("invalid-params", "this command takes one --pair");
  if (a.files.size() == 1) return load_pair(a.files.front(), source);
  return build_pair(a, a.slope, source);
}

std::vector<BeliefPair> pair_family(const PairArgs& a, json& sources) {
  std::vector<BeliefPair> out;
  sources = json::array();
  json s;
  if (!a.files.empty()) {
    for (const auto& f : a.files) {
      out.push_back(load_pair(f, s));
      sources.push_back(s);
    }
    return out;
  }
  if (a.slopes.empty()) fail_config("invalid-params", "--slopes must not be empty");
  for (double slope : a.slopes) {
    out.push_back(build_pair(a, slope, s));
    sources.push_back(s);
  }
  return out;
}

// psi and nu for checks: flags first, then the pair's construction metadata.
std::pair<double, double> check_params(const PairArgs& a, const BeliefPair& pair) {
  double psi = a.psi, nu = a.nu;
  if (const auto& m = pair.meta()) {
    if (std::isnan(psi)) psi = m->psi;
    if (std::isnan(nu)) nu = m->nu;
  }
  if (std::isnan(psi) || std::isnan(nu)) {
    fail_config("invalid-params", "--psi and --nu are required for a pair without metadata");
  }
  return {psi, nu};
}

MonteCarlo monte_carlo(const Sampling& s, std::uint64_t seed, const Globals& g) {
  if (s.paths < 1 || s.horizon < 1) fail_config("invalid-params", "--paths and --horizon must be >= 1");
  return {s.paths, s.horizon, seed, g.workers};
}

json sampling_config(const Sampling& s) { return {{"paths", s.paths}, {"horizon", s.horizon}}; }

void add_pair_options(CLI::App* sub, PairArgs& p, bool family) {
  sub->add_option("--pair", p.files, family ? "pair JSON file (repeatable)" : "pair JSON file");
  sub->add_option("--psi", p.psi, "informativeness level psi in (0,1)");
  sub->add_option("--nu", p.nu, "decay rate nu in (0,1)");
  sub->add_option("--truncation", p.truncation, "grid truncation T")->capture_default_str();
  sub->add_option("--delta-b", p.delta_b, "fixed shrink of b; default searches the ladder");
  if (family) {
    sub->add_option("--slopes", p.slopes, "damping slopes, one constructed pair each")
        ->delimiter(',')
        ->capture_default_str();
  } else {
    sub->add_option("--damping-slope", p.slope, "damping slope")->capture_default_str();
  }
}

void add_sampling(CLI::App* sub, Sampling& s, bool seed_required) {
  auto* seed = sub->add_option("--seed", s.seed, "master seed");
  if (seed_required) seed->required();
  sub->add_option("--paths", s.paths, "Monte Carlo paths")->capture_default_str();
  sub->add_option("--horizon", s.horizon, "steps per path")->capture_default_str();
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  PairArgs pair;
  std::string out;
};

Outcome do_construct(const ConstructArgs& a, const Globals&) {
  if (!a.pair.files.empty()) fail_config("invalid-params", "construct does not take --pair");
  Outcome o;
  json source;
  const BeliefPair pair = build_pair(a.pair, a.pair.slope, source);
  const auto rep =
      is_informative(pair, InformativeParams::make(a.pair.psi, a.pair.nu), pair.truncation());
  o.config = {{"command", "construct"}, {"pair", source}};
  o.payload = {{"pair", io::to_json(pair)}, {"informative", io::to_json(rep)}};
  o.out = a.out;
  return o;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  PairArgs pair;
  Sampling s{0, 10, 100};
  std::string state = "H";
  std::string format = "json";
  std::string out;
};

Outcome do_simulate(const SimulateArgs& a, const Globals& g) {
  Outcome o;
  json source;
  const BeliefPair pair = single_pair(a.pair, source);
  const State state = io::state_from_string(a.state);
  const auto paths = simulate_batch(pair, state, monte_carlo(a.s, a.s.seed, g));
  o.config = {{"command", "simulate"},
              {"pair", source},
              {"state", a.state},
              {"format", a.format},
              {"sampling", sampling_config(a.s)}};
  o.seed = a.s.seed;
  if (a.format == "csv") {
    o.primary_csv = io::paths_csv(paths);
  } else {
    json arr = json::array();
    for (const auto& p : paths) arr.push_back(io::to_json(p));
    o.payload = {{"paths", std::move(arr)}};
  }
  o.out = a.out;
  return o;
}

// ---------------------------------------------------------------- audit

struct AuditArgs {
  PairArgs pair;
  Sampling s{0, 100000, 200};
  int depth = 10;
  double activity_scale = 0.5;
  double jump_multiplier = 1.0;
  std::vector<double> cs{2.0, 4.0, 8.0};
  std::vector<std::string> dubins{"0.5:1:1", "0.5:2:2", "0.25:0.5:3"};
  std::string out;
};

DubinsConfig parse_dubins(const std::string& text) {
  std::istringstream in(text);
  DubinsConfig c{};
  char s1 = 0, s2 = 0;
  in >> c.a >> s1 >> c.b >> s2 >> c.N;
  if (!in || s1 != ':' || s2 != ':' || !in.eof() || !(c.a > 0.0) || !(c.a < c.b) || c.N < 1) {
    fail_config("invalid-interval", "--dubins expects a:b:N with 0 < a < b and N >= 1, got " + text);
  }
  return c;
}

Outcome do_audit(const AuditArgs& a, const Globals& g) {
  Outcome o;
  json source;
  const BeliefPair pair = single_pair(a.pair, source);
  const auto [psi, nu] = check_params(a.pair, pair);
  std::vector<DubinsConfig> dubins;
  for (const auto& d : a.dubins) dubins.push_back(parse_dubins(d));
  for (double c : a.cs) {
    if (!(c > 0.0)) fail_config("invalid-params", "--c levels must be positive");
  }

  const EnumeratedTree tree = enumerate(pair, a.depth);
  const auto spec = ActivitySpec::make(a.activity_scale * psi, nu);
  const auto activity = weak_activity_check(tree, spec, a.jump_multiplier);
  const auto jumps = distance_jump_check(tree, psi, nu);
  const auto mart = martingale_check(tree);
  const auto checks = inequality_audit(pair, a.cs, dubins, monte_carlo(a.s, a.s.seed, g));

  json ineq = json::array();
  bool pass = activity.pass && jumps.pass() && mart.supermartingale();
  for (const auto& c : checks) {
    ineq.push_back(io::to_json(c));
    pass = pass && c.pass;
  }
  o.config = {{"command", "audit"},
              {"pair", source},
              {"psi", psi},
              {"nu", nu},
              {"depth", a.depth},
              {"activity_scale", a.activity_scale},
              {"jump_multiplier", a.jump_multiplier},
              {"c", a.cs},
              {"dubins", a.dubins},
              {"sampling", sampling_config(a.s)}};
  o.seed = a.s.seed;
  o.payload = {
      {"weak_activity",
       io::to_json(activity, {{"psi", spec.psi}, {"nu", nu}, {"jump_multiplier", a.jump_multiplier}})},
      {"distance_jump", io::to_json(jumps, {{"psi", psi}, {"nu", nu}, {"action_count", 2}})},
      {"martingale", io::to_json(mart)},
      {"inequalities", std::move(ineq)},
      {"pass", pass}};
  o.out = a.out;
  return o;
}

// ---------------------------------------------------------------- estimate-k

struct EstimateKArgs {
  PairArgs pair;
  Sampling s{0, 100000, 2000};
  double epsilon = 0.1;
  double L_lower = 0.5;
  std::string out;
  std::string csv;
};

Outcome do_estimate_k(const EstimateKArgs& a, const Globals& g) {
  Outcome o;
  json sources;
  const auto pairs = pair_family(a.pair, sources);
  const auto [psi, nu] = check_params(a.pair, pairs.front());
  std::vector<const BeliefPair*> ptrs;
  for (const auto& p : pairs) ptrs.push_back(&p);
  const auto rep = uniform_K_estimate(ptrs, InformativeParams::make(psi, nu), a.epsilon, a.L_lower,
                                      monte_carlo(a.s, a.s.seed, g));
  o.config = {{"command", "estimate-k"}, {"pairs", sources},         {"psi", psi},
              {"nu", nu},                {"epsilon", a.epsilon},     {"L_lower", a.L_lower},
              {"sampling", sampling_config(a.s)}};
  o.seed = a.s.seed;
  o.payload = io::to_json(rep);
  o.out = a.out;
  if (!a.csv.empty()) o.extra_csv.emplace_back(a.csv, io::uniform_k_csv(rep));
  return o;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  PairArgs pair;
  std::optional<std::uint64_t> seed;
  int depth = 10;
  int horizon = 200;
  int action_count = 2;
  std::string out;
};

Outcome do_extract(const ExtractArgs& a, const Globals&) {
  Outcome o;
  json source;
  const BeliefPair pair = single_pair(a.pair, source);
  const auto [psi, nu] = check_params(a.pair, pair);
  const auto rule = ExtractionRule::make(psi, nu, a.action_count);
  const EnumeratedTree tree = enumerate(pair, a.depth);
  const TreeExtraction ext = extract(tree, rule);
  const auto rep = verify_extracted_activity(tree, ext, rule);
  o.config = {{"command", "extract"}, {"pair", source},    {"psi", psi},
              {"nu", nu},             {"depth", a.depth},  {"action_count", a.action_count}};
  o.payload = {{"tree", io::to_json(rep, {{"psi", psi},
                                          {"nu", nu},
                                          {"action_count", a.action_count},
                                          {"theta_scale", 1.0 / (2.0 * a.action_count)}})}};
  if (a.seed) {
    if (a.horizon < 1) fail_config("invalid-params", "--horizon must be >= 1");
    const PublicPath path = simulate(pair, State::H, a.horizon, *a.seed);
    o.payload["sample"] = io::to_json(extract_path(path, pair, rule));
    o.config["horizon"] = a.horizon;
    o.seed = a.seed;
  }
  o.out = a.out;
  return o;
}

// ---------------------------------------------------------------- efficiency

struct EfficiencyArgs {
  PairArgs pair;
  Sampling s{0, 100000, 5000};
  int tail_horizon = 200;
  long t_min = 10;
  std::string estimator = "conditional";
  std::vector<double> probes{1e-2, 1e-3, 1e-4};
  long split = 0;
  std::string out;
  std::string csv;
};

TailEstimator parse_estimator(const std::string& s) {
  if (s == "conditional") return TailEstimator::conditional;
  if (s == "indicator") return TailEstimator::indicator;
  fail_config("invalid-params", "--estimator must be conditional or indicator");
}

Outcome do_efficiency(const EfficiencyArgs& a, const Globals& g) {
  Outcome o;
  json sources;
  const auto pairs = pair_family(a.pair, sources);
  const auto [psi, nu] = check_params(a.pair, pairs.front());
  const TailOptions topt{a.t_min, parse_estimator(a.estimator), 20};
  if (a.tail_horizon < 1) fail_config("invalid-params", "--tail-horizon must be >= 1");
  const TauBound bound =
      expected_tau_bound(psi, nu, a.split > 0 ? std::optional<long>(a.split) : std::nullopt);

  json per = json::array();
  std::vector<EfficiencyReport> reports;
  std::string curves = "pair_id,t,p_wrong,ci_low,ci_high\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    const auto rep = efficiency_estimate(pair, monte_carlo(a.s, stream_seed(a.s.seed, 2 * i), g));
    const MonteCarlo tail_mc{a.s.paths, a.tail_horizon, stream_seed(a.s.seed, 2 * i + 1), g.workers};
    const ExactTau exact = exact_expected_tau(pair);

    json tail;
    try {
      tail = io::to_json(tail_fit(pair, tail_mc, topt));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::model) throw;
      tail = {{"error", e.code()}, {"message", e.what()}};
    }
    if (!a.csv.empty()) {
      std::istringstream body(io::wrong_action_csv(wrong_action_curve(pair, tail_mc, topt.estimator)));
      std::string line;
      std::getline(body, line);  // header
      while (std::getline(body, line)) curves += std::to_string(i) + ',' + line + '\n';
    }
    per.push_back({{"pair_id", i},
                   {"estimate", io::to_json(rep)},
                   {"exact_tau",
                    {{"expectation", exact.expectation},
                     {"residual_mass", exact.residual_mass},
                     {"terms", exact.terms}}},
                   {"exact_below_bound", exact.expectation <= bound.value},
                   {"mc_below_bound", rep.tau.ci_high < bound.value},
                   {"tail_fit", std::move(tail)},
                   {"smooth_monotone", io::to_json(smooth_monotone_check(pair, a.probes))}});
    reports.push_back(rep);
  }
  const UniformConstant u = uniform_constant(reports);
  o.config = {{"command", "efficiency"},
              {"pairs", sources},
              {"psi", psi},
              {"nu", nu},
              {"tail_horizon", a.tail_horizon},
              {"t_min", a.t_min},
              {"estimator", a.estimator},
              {"probes", a.probes},
              {"split", a.split > 0 ? json(a.split) : json(nullptr)},
              {"sampling", sampling_config(a.s)}};
  o.seed = a.s.seed;
  o.payload = {{"bound", {{"value", bound.value}, {"split", bound.split}}},
               {"per_pair", std::move(per)},
               {"uniform_constant",
                {{"tau", u.tau},
                 {"n_wrong", u.n_wrong},
                 {"t_learn", u.t_learn},
                 {"t_first_mistake", u.t_first_mistake}}}};
  o.out = a.out;
  if (!a.csv.empty()) o.extra_csv.emplace_back(a.csv, std::move(curves));
  return o;
}

// ---------------------------------------------------------------- constants

struct ConstantsArgs {
  double epsilon = kUnset;
  double psi = kUnset;
  double l0 = 1.0;
  double L_lower = kUnset;
  std::string j_rule = "standard";
  std::string format = "json";
  std::string out;
};

Outcome do_constants(const ConstantsArgs& a, const Globals&) {
  if (a.j_rule != "standard" && a.j_rule != "footnote") {
    fail_config("invalid-params", "--j-rule must be standard or footnote");
  }
  const auto c = lemma5_constants(a.epsilon, a.psi, a.l0, a.L_lower,
                                  a.j_rule == "footnote" ? JRule::footnote : JRule::standard);
  Outcome o;
  o.config = {{"command", "constants"}, {"epsilon", a.epsilon}, {"psi", a.psi},
              {"l0", a.l0},             {"L_lower", a.L_lower}, {"j_rule", a.j_rule},
              {"format", a.format}};
  json table = io::to_json(c);
  if (a.format == "csv") {
    std::string body = "name,value\n";
    for (const auto& [k, v] : table.items()) {
      body += k + ',' + (v.is_string() ? v.get<std::string>() : io::dump(v)) + '\n';
    }
    body += std::string("consistent,") + (constants_consistent(c) ? "true" : "false") + '\n';
    o.primary_csv = std::move(body);
  } else {
    o.payload = {{"constants", std::move(table)}, {"consistent", constants_consistent(c)}};
  }
  o.out = a.out;
  return o;
}

// ---------------------------------------------------------------- output

struct Artifact {
  fs::path path;
  std::string content;
  std::string checksum;
};

json checksummed_core(const Outcome& o, const json& payload) {
  return {{"config", o.config},
          {"seed", o.seed ? json(*o.seed) : json(nullptr)},
          {"version", kVersion},
          {"payload", payload}};
}

std::string checksum_of(const json& core) { return "sha256:" + sha256_hex(io::dump(core)); }

std::string csv_document(const Outcome& o, const std::string& body, const Globals& g) {
  const std::string sum = checksum_of(checksummed_core(o, body));
  std::string out;
  out += "# sociallearn " + std::string(kVersion) + '\n';
  out += "# command: " + o.config.at("command").get<std::string>() + '\n';
  out += "# created: " + timestamp() + '\n';
  out += "# workers: " + std::to_string(resolve_workers(g.workers)) + '\n';
  out += "# seed: " + (o.seed ? std::to_string(*o.seed) : std::string("none")) + '\n';
  out += "# config: " + io::dump(o.config) + '\n';
  out += "# checksum: " + sum + '\n';
  return out + body;
}

std::string extract_checksum(const std::string& doc) {
  const std::string key = "# checksum: ";
  const auto at = doc.find(key);
  if (at == std::string::npos) return {};
  return doc.substr(at + key.size(), doc.find('\n', at) - at - key.size());
}

fs::path resolve_path(const std::string& p, const Globals& g) {
  fs::path path(p);
  if (!g.out_dir.empty() && path.is_relative()) path = fs::path(g.out_dir) / path;
  return path;
}

// All temporaries are written before any rename, so a failed write leaves
// no partial artifact behind.
void commit(const std::vector<Artifact>& files) {
  std::vector<fs::path> temps;
  try {
    for (const auto& f : files) {
      if (f.path.has_parent_path()) fs::create_directories(f.path.parent_path());
      fs::path tmp = f.path;
      tmp += ".tmp." + std::to_string(::getpid());
      std::ofstream outf(tmp, std::ios::binary | std::ios::trunc);
      temps.push_back(tmp);
      outf << f.content;
      outf.close();
      if (!outf) fail_config("invalid-params", "cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].path);
  } catch (const fs::filesystem_error& e) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    fail_config("invalid-params", e.what());
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

void emit(const Outcome& o, const Globals& g, std::ostream& out) {
  std::string primary;
  std::string primary_sum;
  if (o.primary_csv) {
    primary = csv_document(o, *o.primary_csv, g);
    primary_sum = extract_checksum(primary);
  } else {
    json doc = checksummed_core(o, o.payload);
    primary_sum = checksum_of(doc);
    doc["checksum"] = primary_sum;
    doc["metadata"] = {{"created", timestamp()},
                       {"workers", resolve_workers(g.workers)},
                       {"command", o.config.at("command")}};
    primary = io::dump(doc, 2) + '\n';
  }

  std::vector<Artifact> files;
  if (!o.out.empty()) files.push_back({resolve_path(o.out, g), primary, primary_sum});
  for (const auto& [path, body] : o.extra_csv) {
    std::string doc = csv_document(o, body, g);
    std::string sum = extract_checksum(doc);
    files.push_back({resolve_path(path, g), std::move(doc), std::move(sum)});
  }
  commit(files);

  if (o.out.empty()) out << primary;
  for (const auto& f : files) out << f.checksum << "  " << f.path.string() << '\n';
}

void write_error(std::ostream& err, const std::string& code, const char* kind,
                 const std::string& message) {
  err << io::dump({{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}) << '\n';
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail_model("checksum-failed", "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential social learning experiments", "sociallearn"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "INI config file; one [section] per subcommand");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--out-dir", g.out_dir, "directory for relative output paths")
      ->envname("SOCIALLEARN_OUT_DIR");
  app.add_option("--workers", g.workers, "worker threads, 0 for all cores")
      ->envname("SOCIALLEARN_WORKERS")
      ->check(CLI::NonNegativeNumber);

  ConstructArgs construct;
  auto* c = app.add_subcommand("construct", "build a (psi,nu)-informative pair");
  add_pair_options(c, construct.pair, false);
  c->add_option("--out", construct.out, "output file");

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "sample public action paths");
  add_pair_options(s, simulate.pair, false);
  add_sampling(s, simulate.s, true);
  s->add_option("--state", simulate.state, "true state H or L")->capture_default_str();
  s->add_option("--format", simulate.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  s->add_option("--out", simulate.out, "output file");

  AuditArgs audit;
  auto* au = app.add_subcommand("audit", "exact tree checks and Monte Carlo inequality audit");
  add_pair_options(au, audit.pair, false);
  add_sampling(au, audit.s, true);
  au->add_option("--depth", audit.depth, "enumeration depth")->capture_default_str();
  au->add_option("--activity-scale", audit.activity_scale, "activity as a multiple of psi")
      ->capture_default_str();
  au->add_option("--jump-multiplier", audit.jump_multiplier, "jump size as a multiple of the rate")
      ->capture_default_str();
  au->add_option("--c", audit.cs, "maximal inequality levels")->delimiter(',')->capture_default_str();
  au->add_option("--dubins", audit.dubins, "a:b:N upcrossing configurations")
      ->capture_default_str();
  au->add_option("--out", audit.out, "output file");

  EstimateKArgs ek;
  auto* k = app.add_subcommand("estimate-k", "uniform convergence time across a family");
  add_pair_options(k, ek.pair, true);
  add_sampling(k, ek.s, true);
  k->add_option("--epsilon", ek.epsilon, "allowed failure fraction")->capture_default_str();
  k->add_option("--L", ek.L_lower, "likelihood ratio level")->capture_default_str();
  k->add_option("--out", ek.out, "output file");
  k->add_option("--csv", ek.csv, "per-pair CSV file");

  ExtractArgs ex;
  auto* e = app.add_subcommand("extract", "faster-process extraction report");
  add_pair_options(e, ex.pair, false);
  e->add_option("--seed", ex.seed, "also extract one sampled H-path");
  e->add_option("--depth", ex.depth, "enumeration depth")->capture_default_str();
  e->add_option("--horizon", ex.horizon, "sampled path length")->capture_default_str();
  e->add_option("--action-count", ex.action_count, "#A")->capture_default_str();
  e->add_option("--out", ex.out, "output file");

  EfficiencyArgs ef;
  auto* f = app.add_subcommand("efficiency", "stopping-time estimates, bound, tail fit");
  add_pair_options(f, ef.pair, true);
  add_sampling(f, ef.s, true);
  f->add_option("--tail-horizon", ef.tail_horizon, "horizon of the tail-fit run")
      ->capture_default_str();
  f->add_option("--t-min", ef.t_min, "first t in the tail fit")->capture_default_str();
  f->add_option("--estimator", ef.estimator, "conditional or indicator")->capture_default_str();
  f->add_option("--probes", ef.probes, "smooth-monotone probes")->delimiter(',')->capture_default_str();
  f->add_option("--split", ef.split, "fixed split for the tau bound, 0 to search");
  f->add_option("--out", ef.out, "output file");
  f->add_option("--csv", ef.csv, "per-t wrong-action CSV file");

  ConstantsArgs cs;
  auto* co = app.add_subcommand("constants", "constants of the uniform convergence bound");
  co->add_option("--epsilon", cs.epsilon, "failure fraction")->required();
  co->add_option("--psi", cs.psi, "activity")->required();
  co->add_option("--l0", cs.l0, "initial likelihood ratio")->capture_default_str();
  co->add_option("--L", cs.L_lower, "likelihood ratio level")->required();
  co->add_option("--j-rule", cs.j_rule, "standard or footnote")->capture_default_str();
  co->add_option("--format", cs.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  co->add_option("--out", cs.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& pe) {
    write_error(err, "invalid-params", "config", pe.what());
    return kExitConfig;
  }

  try {
    Outcome o;
    if (c->parsed()) {
      o = do_construct(construct, g);
    } else if (s->parsed()) {
      o = do_simulate(simulate, g);
    } else if (au->parsed()) {
      o = do_audit(audit, g);
    } else if (k->parsed()) {
      o = do_estimate_k(ek, g);
    } else if (e->parsed()) {
      o = do_extract(ex, g);
    } else if (f->parsed()) {
      o = do_efficiency(ef, g);
    } else {
      o = do_constants(cs, g);
    }
    emit(o, g, out);
    return kExitOk;
  } catch (const Error& ex_err) {
    const bool config = ex_err.kind() == ErrorKind::config;
    write_error(err, ex_err.code(), config ? "config" : "model", ex_err.what());
    return config ? kExitConfig : kExitModel;
  } catch (const std::exception& ex_err) {
    write_error(err, "internal-error", "model", ex_err.what());
    return kExitModel;
  }
}

}  // namespace sociallearn::cli
