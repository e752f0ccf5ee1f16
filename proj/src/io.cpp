#include "coreset/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace coreset {

namespace {

constexpr char magic[4] = {'C', 'S', 'K', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(std::begin(raw), std::end(raw));
    }
    out.insert(out.end(), std::begin(raw), std::end(raw));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    if (pos + sizeof(T) > bytes.size()) {
        throw std::runtime_error("truncated CSK1 data");
    }
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(std::begin(raw), std::end(raw));
    }
    pos += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view field) {
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        return std::nullopt;
    }
    return v;
}

std::optional<std::vector<double>> parse_row(std::string_view line) {
    std::vector<double> values;
    for (auto field : split(line)) {
        auto v = parse_number(field);
        if (!v) {
            return std::nullopt;
        }
        values.push_back(*v);
    }
    return values;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::size_t binary_size(std::size_t n, std::size_t d, bool with_weights) noexcept {
    return binary_header_size + 8 * n * d + (with_weights ? 8 * n : 0);
}

std::vector<std::uint8_t> encode_binary(const WeightedDataset& data, bool with_weights) {
    std::vector<std::uint8_t> out;
    out.reserve(binary_size(data.size(), data.dim(), with_weights));
    out.insert(out.end(), std::begin(magic), std::end(magic));
    put_le<std::uint64_t>(out, data.size());
    put_le<std::uint64_t>(out, data.dim());
    out.push_back(with_weights ? 1 : 0);
    for (double v : data.points()) {
        put_le(out, v);
    }
    if (with_weights) {
        for (double w : data.weights()) {
            put_le(out, w);
        }
    }
    return out;
}

WeightedDataset decode_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < binary_header_size || !std::equal(std::begin(magic), std::end(magic), bytes.begin())) {
        throw std::runtime_error("not a CSK1 file");
    }
    std::size_t pos = 4;
    const auto n = get_le<std::uint64_t>(bytes, pos);
    const auto d = get_le<std::uint64_t>(bytes, pos);
    const std::uint8_t flag = bytes[pos++];
    if (flag > 1) {
        throw std::runtime_error("bad CSK1 weight flag");
    }
    if (bytes.size() != binary_size(n, d, flag == 1)) {
        throw std::runtime_error("CSK1 size does not match header");
    }
    std::vector<double> pts(n * d);
    for (double& v : pts) {
        v = get_le<double>(bytes, pos);
    }
    if (flag == 0) {
        return WeightedDataset::uniform(std::move(pts), d);
    }
    std::vector<double> ws(n);
    for (double& w : ws) {
        w = get_le<double>(bytes, pos);
    }
    return WeightedDataset(std::move(pts), std::move(ws), d);
}

void write_binary(const std::filesystem::path& path, const WeightedDataset& data, bool with_weights) {
    const auto bytes = encode_binary(data, with_weights);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

WeightedDataset read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_binary(bytes);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format number");
    }
    return std::string(buf, ptr);
}

CsvRowReader::CsvRowReader(std::istream& in) : in_(in) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty()) {
            continue;
        }
        if (auto row = parse_row(line)) {
            dim_ = row->size();
            pending_ = std::move(row);
        } else {
            const auto names = split(line);
            has_weights_ = lower(names.back()) == "weight";
            dim_ = names.size() - (has_weights_ ? 1 : 0);
        }
        break;
    }
    if (dim_ == 0) {
        throw std::runtime_error("CSV input has no columns");
    }
}

bool CsvRowReader::next(std::vector<double>& point, std::optional<double>& weight) {
    std::vector<double> row;
    if (pending_) {
        row = std::move(*pending_);
        pending_.reset();
    } else {
        std::string line;
        while (true) {
            if (!std::getline(in_, line)) {
                return false;
            }
            ++line_no_;
            if (!trim(line).empty()) {
                break;
            }
        }
        auto parsed = parse_row(line);
        if (!parsed) {
            throw std::runtime_error("CSV line " + std::to_string(line_no_) + ": non-numeric field");
        }
        row = std::move(*parsed);
    }
    const std::size_t expected = dim_ + (has_weights_ ? 1 : 0);
    if (row.size() != expected) {
        throw std::runtime_error("CSV line " + std::to_string(line_no_) + ": expected " +
                                 std::to_string(expected) + " fields, got " + std::to_string(row.size()));
    }
    if (has_weights_) {
        weight = row.back();
        row.pop_back();
    } else {
        weight.reset();
    }
    point = std::move(row);
    return true;
}

WeightedDataset parse_csv(std::istream& in) {
    CsvRowReader reader(in);
    std::vector<double> pts;
    std::vector<double> ws;
    std::vector<double> row;
    std::optional<double> w;
    while (reader.next(row, w)) {
        pts.insert(pts.end(), row.begin(), row.end());
        if (w) {
            ws.push_back(*w);
        }
    }
    if (pts.empty()) {
        throw std::runtime_error("CSV input has no data rows");
    }
    if (!reader.has_weights()) {
        return WeightedDataset::uniform(std::move(pts), reader.dim());
    }
    return WeightedDataset(std::move(pts), std::move(ws), reader.dim());
}

WeightedDataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_csv(in);
}

void write_csv(std::ostream& out, const WeightedDataset& data, bool with_weights) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
        out << (j ? "," : "") << 'x' << j;
    }
    if (with_weights) {
        out << ",weight";
    }
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        for (std::size_t j = 0; j < p.size(); ++j) {
            out << (j ? "," : "") << format_double(p[j]);
        }
        if (with_weights) {
            out << ',' << format_double(data.weight(i));
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const WeightedDataset& data, bool with_weights) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_csv(out, data, with_weights);
}

WeightedDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    char head[4] = {};
    in.read(head, 4);
    if (in.gcount() == 4 && std::equal(std::begin(magic), std::end(magic), head)) {
        return read_binary(path);
    }
    return read_csv(path);
}

}  // namespace coreset
