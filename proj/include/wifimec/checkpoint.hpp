#pragma once

#include "wifimec/dqn.hpp"
#include "wifimec/dtd3.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace wifimec {

inline constexpr std::string_view kCheckpointFormat = "wifimec-checkpoint";
inline constexpr int kCheckpointVersion = 1;

nlohmann::json to_json(const Net& net);
Net net_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Dtd3Hyperparams& hp);
Dtd3Hyperparams dtd3_hyperparams_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DqnHyperparams& hp);
DqnHyperparams dqn_hyperparams_from_json(const nlohmann::json& j);

/// Self-describing record: format tag, version, kind ("dtd3" or "dqn"),
/// dimensions, hyperparameters, every network and the RNG state.
nlohmann::json checkpoint_json(const Dtd3Agent& agent);
nlohmann::json checkpoint_json(const DqnAgent& agent);

/// Kind tag of a checkpoint after checking the format and version.
std::string checkpoint_kind(const nlohmann::json& j);

Dtd3Agent dtd3_from_checkpoint(const nlohmann::json& j);
DqnAgent dqn_from_checkpoint(const nlohmann::json& j);

/// Canonical text form; save -> load -> save is byte-identical.
std::string serialize_checkpoint(const nlohmann::json& j);
void write_checkpoint(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_checkpoint(const std::filesystem::path& path);

}  // namespace wifimec
