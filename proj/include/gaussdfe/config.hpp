#pragma once

// JSON scenario configuration.
//
// {
//   "kind": "isi" | "mimo" | "mac",
//   "taps": [c, ...], "block_length": N      (isi)
//   "H": [[c, ...], ...]                     (mimo)
//   "gains": [c, ...]                        (mac)
//   "powers": p | [p, ...]  or  "input_gram": [[c, ...], ...]
//   "noise_variance": s2    or  "noise_gram": [[c, ...], ...]
//   "groups": [["label", ...], ...],  "order": ["group", ...],
//   "seed": u64, "trials": n, "log_base": "bits" | "nats",
//   "outputs": {"dir": "path"}
// }
//
// A complex value c is either a number or an [re, im] pair. Groups default
// to one group per input; a group's name is its label, or its labels joined
// with '+'. When groups are given, input_gram rows follow the concatenation
// of the group labels.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gaussdfe/scenarios.hpp"

namespace gaussdfe {

/// Input error carrying the JSON path of the offending key ("$.order").
struct ConfigError : Error {
    ConfigError(std::string key_path, const std::string& message)
        : Error(key_path + ": " + message), key(std::move(key_path)) {}

    std::string key;
};

enum class LogBase { Bits, Nats };

struct RunConfig {
    ChannelScenario scenario;
    GroupList order;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    LogBase log_base = LogBase::Bits;
    std::optional<std::string> out_dir;
};

RunConfig parse_config(std::string_view text);
RunConfig parse_config_json(const nlohmann::json& doc);

/// Canonical form: explicit input_gram and noise_gram, explicit groups.
nlohmann::json to_canonical_json(const RunConfig& cfg);

/// Name given to a group of labels when the config lists only labels.
std::string group_name(const std::vector<std::string>& labels);

} // namespace gaussdfe
