#include "report.hpp"

#include "coreset/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#ifndef CORESET_GIT_DESCRIBE
#define CORESET_GIT_DESCRIBE "unknown"
#endif

namespace cli {

namespace {
LogLevel g_level = LogLevel::Warn;

const char* level_name(LogLevel l) {
    switch (l) {
        case LogLevel::Error: return "error";
        case LogLevel::Warn: return "warn";
        case LogLevel::Info: return "info";
        case LogLevel::Debug: return "debug";
    }
    return "info";
}
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }

void log(LogLevel level, const std::string& message) {
    if (level <= g_level) {
        std::cerr << "[" << level_name(level) << "] " << message << '\n';
    }
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

json make_report(const std::string& command, std::uint64_t seed, const json& config) {
    json r;
    r["schema"] = "coreset-report/1";
    r["command"] = command;
    r["provenance"] = {{"git_describe", CORESET_GIT_DESCRIBE}, {"seed", seed}, {"config_hash", config_hash(config)}};
    r["config"] = config;
    return r;
}

void write_json(const std::filesystem::path& path, const json& doc) {
    if (path == "-") {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
}

DataFormat resolve_format(const std::optional<std::string>& requested,
                          const std::optional<std::filesystem::path>& out) {
    std::string f;
    if (requested) {
        f = *requested;
    } else if (out) {
        const auto ext = out->extension().string();
        f = ext == ".bin" ? "bin" : ext == ".json" ? "json" : "csv";
    } else {
        f = "csv";
    }
    if (f == "csv") {
        return DataFormat::Csv;
    }
    if (f == "bin") {
        return DataFormat::Binary;
    }
    return DataFormat::Json;
}

namespace {

json dataset_json(const coreset::WeightedDataset& data) {
    json points = json::array();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        points.push_back(std::vector<double>(p.begin(), p.end()));
    }
    return {{"dim", data.dim()},
            {"points", std::move(points)},
            {"weights", std::vector<double>(data.weights().begin(), data.weights().end())}};
}

}  // namespace

void write_dataset(const coreset::WeightedDataset& data, const std::optional<std::filesystem::path>& out,
                   DataFormat format, const json& report) {
    if (!out) {
        switch (format) {
            case DataFormat::Csv: coreset::write_csv(std::cout, data); break;
            case DataFormat::Json: std::cout << dataset_json(data).dump() << '\n'; break;
            case DataFormat::Binary: {
                const auto bytes = coreset::encode_binary(data);
                std::cout.write(reinterpret_cast<const char*>(bytes.data()),
                                static_cast<std::streamsize>(bytes.size()));
                break;
            }
        }
        return;
    }
    switch (format) {
        case DataFormat::Csv: coreset::write_csv(*out, data); break;
        case DataFormat::Binary: coreset::write_binary(*out, data); break;
        case DataFormat::Json: write_json(*out, dataset_json(data)); break;
    }
    auto sidecar = *out;
    sidecar += ".json";
    write_json(sidecar, report);
}

coreset::WeightedDataset load_dataset(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ValidationError("input file " + path.string() + " does not exist");
    }
    return coreset::read_dataset(path);
}

json dataset_summary(const coreset::WeightedDataset& data) {
    return {{"n", data.size()}, {"d", data.dim()}, {"total_weight", data.total_weight()}};
}

json provenance_json(const coreset::Provenance& p) {
    json j{{"m", p.m},
           {"seed", p.seed},
           {"source_n", p.source_n},
           {"distribution", std::string(coreset::to_string(p.distribution))},
           {"merged_duplicates", p.merged_duplicates}};
    j["epsilon_target"] = p.epsilon_target ? json(*p.epsilon_target) : json(nullptr);
    return j;
}

}  // namespace cli
