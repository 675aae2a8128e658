#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "sociallearn/belief_model.hpp"
#include "sociallearn/dynamics.hpp"
#include "sociallearn/efficiency.hpp"
#include "sociallearn/extraction.hpp"
#include "sociallearn/martingale_tools.hpp"

namespace sociallearn::io {

using nlohmann::json;

// 17 significant digits, '.' decimal point, no locale.
std::string format_double(double v);

// Serializes with format_double for every float. NaN becomes null and
// infinities become the strings "inf" / "-inf". Object keys are sorted.
std::string dump(const json& j, int indent = -1);

// Inverse of the non-finite encoding above.
double read_double(const json& j);

json to_json(const BeliefPair& pair);
BeliefPair pair_from_json(const json& j);

json to_json(const PublicPath& path);
std::string paths_csv(std::span<const PublicPath> paths);

json to_json(const EnumeratedTree& tree);
json to_json(const MartingaleReport& rep);
json to_json(const InformativeReport& rep);

json to_json(const ActivityReport& rep, const json& params);
json to_json(const ExtractionReport& rep, const json& params);
json to_json(const DistanceJumpReport& rep, const json& params);
json to_json(const BoundCheck& check);
json to_json(const BoundConstants& c);
json to_json(const UniformKReport& rep);
std::string uniform_k_csv(const UniformKReport& rep);

json to_json(const ExtractedProcess& p);

json to_json(const Estimate& e);
json to_json(const EfficiencyReport& rep);
json to_json(const TailFit& fit);
json to_json(const SmoothMonotoneReport& rep);
std::string wrong_action_csv(const WrongActionCurve& curve);

const char* to_string(State s);
State state_from_string(const std::string& s);

}  // namespace sociallearn::io
