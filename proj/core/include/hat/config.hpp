#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hat/synth.hpp"
#include "hat/tracker.hpp"

namespace hat {

/// Ordered (key, value) pairs; later entries override earlier ones.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_value_file(const std::filesystem::path& path);

/// Parses a `key=value` command-line override.
std::pair<std::string, std::string> parse_assignment(std::string_view text);

/// Applies one setting; throws Config for unknown keys or bad values.
void apply_setting(TrackerConfig& config, std::string_view key, std::string_view value);
void apply_setting(SynthConfig& config, std::string_view key, std::string_view value);

template <typename Config>
void apply_settings(Config& config, const KeyValues& settings) {
  for (const auto& [k, v] : settings) apply_setting(config, k, v);
}

/// Every field exactly once, in a fixed order, formatted so that
/// apply_setting reproduces the value.
KeyValues describe(const TrackerConfig& config);
KeyValues describe(const SynthConfig& config);

std::string format_key_values(const KeyValues& kv);

}  // namespace hat
