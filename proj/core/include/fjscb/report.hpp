#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

namespace fjscb {

inline constexpr std::string_view kVersion = "0.1.0";

/// Pretty-printed JSON file; throws ConfigError on I/O failure.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// Reproducibility manifest echoing the fully resolved configuration.
[[nodiscard]] nlohmann::json manifest(std::string_view command, const nlohmann::json& resolved_config);

}  // namespace fjscb
