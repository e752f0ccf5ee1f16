#pragma once

#include "coreset/core_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coreset {

// CSK1 binary layout (little-endian):
//   "CSK1" | u64 n | u64 d | u8 has_weights | n*d f64 points (row-major) | n f64 weights
inline constexpr std::size_t binary_header_size = 4 + 8 + 8 + 1;

std::size_t binary_size(std::size_t n, std::size_t d, bool with_weights = true) noexcept;

std::vector<std::uint8_t> encode_binary(const WeightedDataset& data, bool with_weights = true);

/// Missing weights decode as 1/n.
WeightedDataset decode_binary(std::span<const std::uint8_t> bytes);

void write_binary(const std::filesystem::path& path, const WeightedDataset& data,
                  bool with_weights = true);
WeightedDataset read_binary(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// One row per point. A first line that does not parse as numbers is a
/// header; a header whose last column is `weight` marks a weight column.
/// Without weights every point gets 1/n.
WeightedDataset parse_csv(std::istream& in);
WeightedDataset read_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const WeightedDataset& data, bool with_weights = true);
void write_csv(const std::filesystem::path& path, const WeightedDataset& data,
               bool with_weights = true);

/// CSK1 if the file starts with the magic bytes, CSV otherwise.
WeightedDataset read_dataset(const std::filesystem::path& path);

/// Incremental CSV reader for streaming input.
class CsvRowReader {
public:
    explicit CsvRowReader(std::istream& in);

    /// Next row; the weight is empty when the input has no weight column.
    bool next(std::vector<double>& point, std::optional<double>& weight);

    std::size_t dim() const noexcept { return dim_; }
    bool has_weights() const noexcept { return has_weights_; }

private:
    std::istream& in_;
    std::size_t dim_ = 0;
    bool has_weights_ = false;
    std::optional<std::vector<double>> pending_;
    std::size_t line_no_ = 0;
};

}  // namespace coreset
