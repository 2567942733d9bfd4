#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qmle/candec.hpp"
#include "qmle/sweep.hpp"

// JSON schemas for tuples, verdicts and reports, plus the CSV sweep table.

namespace qmle {

using json = nlohmann::json;

// {"p":int,"q":int,"m":int,"field":"real"|"complex",
//  "matrices":[[[row-major reals]]], "matrices_imag": optional}
// Each matrix is either a p-list of q-lists or a flat row-major list.
RepTuple rep_from_json(const json& j);
json rep_to_json(const RepTuple& Y);

RepTuple load_rep(const std::string& path);
void save_rep(const RepTuple& Y, const std::string& path);

json to_json(const MnmVerdict& v);
json to_json(const ThresholdReport& r);
json to_json(const CanDec& c);
json to_json(const StarCanDec& c);
json to_json(const OnePSCertificate& c);
json to_json(const SummandSplit& s);
json to_json(const StabilityVerdict& v);
json to_json(const MleResult& r);
json to_json(const UniquenessReport& r);
json to_json(const EmpiricalVerdict& v);
json to_json(const SweepReport& r);

std::string sweep_csv(const SweepReport& r);
std::string threshold_csv(const ThresholdReport& r);

}  // namespace qmle
