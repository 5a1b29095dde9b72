#pragma once

// JSON forms of the report types. Every top-level document carries
// "schema": "hardy-lab/1". Infinite values are written as "inf" / "-inf".

#include <string>

#include <json.hpp>

#include "hardy/constructions.hpp"
#include "hardy/hardy_estimation.hpp"
#include "hardy/mean_kernel.hpp"
#include "hardy/weight_sequences.hpp"

namespace hardy {

inline constexpr const char* kSchema = "hardy-lab/1";

nlohmann::json json_number(double v);

nlohmann::json to_json(const HardyEstimate& e);
nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const AxiomReport& r);
nlohmann::json to_json(const RatioReport& r);
nlohmann::json to_json(const LscTable& t);

/// {"schema": ..., "kind": kind} merged with the fields of `body`.
nlohmann::json document(const std::string& kind, const nlohmann::json& body);

/// Shortest round-trip decimal for finite values, "inf"/"-inf"/"nan" otherwise.
std::string format_double(double v);

}  // namespace hardy
