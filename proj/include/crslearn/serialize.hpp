#ifndef CRSLEARN_SERIALIZE_HPP
#define CRSLEARN_SERIALIZE_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "crslearn/binarizer.hpp"
#include "crslearn/crs.hpp"
#include "crslearn/model.hpp"

namespace crslearn {

// Versioned JSON documents. Readers reject unknown formats/versions.

nlohmann::json discretizer_to_json(const Discretizer& disc);
Discretizer discretizer_from_json(const nlohmann::json& j);

nlohmann::json mllp_to_json(const MllpModel& model);
MllpModel mllp_from_json(const nlohmann::json& j);

nlohmann::json crs_to_json(const CrsModel& crs);
CrsModel crs_from_json(const nlohmann::json& j);

/// Nested AND/OR tree of one rendered node, for machine consumption.
nlohmann::json rule_tree_json(const CrsModel& crs, NodeRef node);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

/// Distinguishes "crslearn.model" payloads: "mllp" or "crs".
std::string model_kind(const nlohmann::json& j);

}  // namespace crslearn

#endif
