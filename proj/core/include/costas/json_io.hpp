#pragma once

#include <string>

#include <json.hpp>

#include "costas/analysis.hpp"
#include "costas/config.hpp"
#include "costas/lti.hpp"
#include "costas/scenarios.hpp"
#include "costas/trace.hpp"

// JSON forms of the public types. Object keys equal the C++ field names.
// Filters use {"a": [[...]], "b": [...], "c": [...], "h": x}; complex roots
// are [re, im] pairs. Parsing rejects unknown keys.
namespace costas {

using Json = nlohmann::json;

void to_json(Json& j, const LtiFilter& f);
void from_json(const Json& j, LtiFilter& f);

void to_json(Json& j, const DataSignalSpec& s);
void from_json(const Json& j, DataSignalSpec& s);

void to_json(Json& j, const LoopConfig& c);
void from_json(const Json& j, LoopConfig& c);

void to_json(Json& j, const SimPlan& p);
void from_json(const Json& j, SimPlan& p);

void to_json(Json& j, const LockVerdict& v);
void to_json(Json& j, const EquilibriumReport& r);
void to_json(Json& j, const StabilityReport& r);
void to_json(Json& j, const BandCheckReport& r);
void to_json(Json& j, const VerdictTable& t);

LoopConfig load_config(const std::string& path);
void save_config(const LoopConfig& config, const std::string& path);

/// Sets a dotted path ("loop_filter.h", "x_lf_0.0", "m1_spec.kind") in a
/// config JSON document. The value text is parsed as JSON, falling back to a
/// plain string. Throws InvalidArgument for paths that do not exist.
void apply_override(Json& doc, const std::string& dotted_key, const std::string& value_text);

/// Parses "key=value" and applies it to the config.
LoopConfig with_override(const LoopConfig& config, const std::string& assignment);

/// Value at a dotted path, or nullptr when absent.
const Json* find_path(const Json& doc, const std::string& dotted_key);

}  // namespace costas
