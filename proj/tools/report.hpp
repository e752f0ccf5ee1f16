#pragma once

#include "coreset/builder.hpp"
#include "coreset/core_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace cli {

using nlohmann::json;

enum class DataFormat { Csv, Binary, Json };

/// Exit code 1: bad input or parameters that passed CLI parsing.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LogLevel { Error, Warn, Info, Debug };

void set_log_level(LogLevel level);
void log(LogLevel level, const std::string& message);

/// FNV-1a over the compact JSON text of `config`.
std::string config_hash(const json& config);

/// {"schema", "command", "provenance": {git_describe, seed, config_hash}, "config"}
json make_report(const std::string& command, std::uint64_t seed, const json& config);

/// Writes a JSON document followed by a newline; "-" means stdout.
void write_json(const std::filesystem::path& path, const json& doc);

DataFormat resolve_format(const std::optional<std::string>& requested,
                          const std::optional<std::filesystem::path>& out);

/// Writes a dataset (to stdout when `out` is empty) and, for files, a
/// provenance sidecar `<out>.json`.
void write_dataset(const coreset::WeightedDataset& data, const std::optional<std::filesystem::path>& out,
                   DataFormat format, const json& report);

coreset::WeightedDataset load_dataset(const std::filesystem::path& path);

json dataset_summary(const coreset::WeightedDataset& data);
json provenance_json(const coreset::Provenance& p);

}  // namespace cli
