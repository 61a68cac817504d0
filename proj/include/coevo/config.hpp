#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "coevo/engine.hpp"

namespace coevo {

/// Bad configuration key or value. key() names the offending setting.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& why)
        : std::runtime_error("config '" + key + "': " + why), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Sets one key from its textual value. Accepts both snake_case and the
/// CLI's dashed spelling (queue_len / queue-len). Does not validate ranges
/// across keys; call EngineConfig::validate() afterwards.
void apply_setting(EngineConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines on top of cfg. Blank lines and lines starting
/// with '#' are ignored; unknown keys are rejected.
void apply_config_text(EngineConfig& cfg, std::string_view text);
void apply_config_file(EngineConfig& cfg, const std::filesystem::path& path);

/// Canonical `key = value` form; parsing it back yields the same config.
std::string format_config(const EngineConfig& cfg);

}  // namespace coevo
