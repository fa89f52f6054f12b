#pragma once

// JSON is the canonical report format; CSV is a flattened projection of the
// same objects (nested keys joined with '.').

#include "chaos_swr/bounds.hpp"
#include "chaos_swr/montecarlo.hpp"
#include "chaos_swr/oracle.hpp"
#include "chaos_swr/two_sample.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace chaos {

using Json = nlohmann::ordered_json;

Json to_json(const BoundReport& r);
Json to_json(const MonteCarloEstimate& e);
Json to_json(const ComparisonRow& row);
Json to_json(const CalibrationReport& r);
Json to_json(const PermTestResult& r);
Json to_json(const BoundConstants& k);
Json to_json(const ValueLaw& law);
Json to_json(const SignLaw& law);
Json to_json(const IntLaw& law);

/// Reads {"kappa", "c", "C"} from either a bare object or a calibration
/// output that carries a "constants" member. Missing keys keep defaults.
BoundConstants constants_from_json(const Json& j, BoundConstants base = {});

/// Flattens an array of objects (or one object) to CSV with a header taken
/// from the union of keys in first-seen order. Nested arrays are written as
/// JSON text.
void write_csv(std::ostream& out, const Json& rows);

std::string sign_string(std::span<const Sign> s);

}  // namespace chaos
