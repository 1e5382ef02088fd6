#include "oi/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace oi {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                           what);
}

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
    while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
    return s;
}

// Splits text into lines, keeping 1-based line numbers and dropping blank lines.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!trim(line).empty()) out.emplace_back(number, line);
    }
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    while (true) {
        const std::size_t comma = line.find(',');
        fields.push_back(trim(line.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        parse_error(line, column, "'" + std::string(field) + "' is not a decimal number");
    }
    if (!std::isfinite(v)) {
        parse_error(line, column, "non-finite value '" + std::string(field) + "'");
    }
    return v;
}

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::string format_g17(double v) {
    std::array<char, 40> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

void append_array(std::string& out, const std::vector<double>& values) {
    out.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(',');
        out += format_double(values[i]);
    }
    out.push_back(']');
}

template <typename T>
T summary_field(const json& j, const char* key) {
    if (!j.contains(key)) {
        throw Error(ErrorCode::ParseError, std::string("summary is missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("summary field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string_view to_string(MatrixFormat format) noexcept {
    return format == MatrixFormat::Csv ? "csv" : "f32le";
}

MatrixFormat parse_matrix_format(std::string_view text) {
    if (text == "csv") return MatrixFormat::Csv;
    if (text == "f32le") return MatrixFormat::F32le;
    throw Error(ErrorCode::RangeError, "unknown matrix format '" + std::string(text) + "' (expected csv or f32le)");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::IoError, "read failed on '" + path.string() + "'");
    }
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed on '" + path.string() + "'");
    }
}

FeatureMatrix parse_csv_matrix(std::string_view text, bool header) {
    auto lines = content_lines(text);
    if (header && !lines.empty()) lines.erase(lines.begin());
    if (lines.empty()) {
        throw Error(ErrorCode::EmptyInput, "CSV holds no data rows");
    }
    const std::size_t cols = split_fields(lines.front().second).size();
    std::vector<double> data;
    data.reserve(lines.size() * cols);
    for (const auto& [number, line] : lines) {
        const auto fields = split_fields(line);
        if (fields.size() != cols) {
            throw Error(ErrorCode::RaggedRows, "line " + std::to_string(number) + " has " +
                                                   std::to_string(fields.size()) + " fields, expected " +
                                                   std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) data.push_back(parse_number(fields[c], number, c + 1));
    }
    return FeatureMatrix(lines.size(), cols, std::move(data));
}

FeatureMatrix parse_f32le_matrix(std::string_view bytes) {
    if (bytes.size() < kMatrixHeaderBytes || std::memcmp(bytes.data(), kMatrixMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "missing OIDM header");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t rows = read_u32le(p + 4);
    const std::uint64_t cols = read_u32le(p + 8);
    if (cols == 0) {
        throw Error(ErrorCode::ParseError, "f32le header declares 0 columns");
    }
    const std::uint64_t expected = rows * cols * 4;
    if (bytes.size() - kMatrixHeaderBytes != expected) {
        throw Error(ErrorCode::ParseError, "f32le payload is " + std::to_string(bytes.size() - kMatrixHeaderBytes) +
                                               " bytes, header implies " + std::to_string(expected));
    }
    std::vector<double> data(rows * cols);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const float f = std::bit_cast<float>(read_u32le(p + kMatrixHeaderBytes + 4 * i));
        if (!std::isfinite(f)) {
            parse_error(i / cols + 1, i % cols + 1, "non-finite value in f32le payload");
        }
        data[i] = static_cast<double>(f);
    }
    return FeatureMatrix(rows, cols, std::move(data));
}

FeatureMatrix read_matrix(const std::filesystem::path& path, MatrixFormat format, bool header) {
    const std::string bytes = read_file(path);
    return format == MatrixFormat::Csv ? parse_csv_matrix(bytes, header) : parse_f32le_matrix(bytes);
}

std::string csv_matrix_text(const FeatureMatrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const VectorView row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            out += format_double(row[c]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string f32le_matrix_bytes(const FeatureMatrix& m) {
    if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) {
        throw Error(ErrorCode::RangeError, "matrix too large for the f32le header");
    }
    std::string out(kMatrixMagic, 4);
    append_u32le(out, static_cast<std::uint32_t>(m.rows()));
    append_u32le(out, static_cast<std::uint32_t>(m.cols()));
    append_u32le(out, 0);
    out.reserve(kMatrixHeaderBytes + m.data().size() * 4);
    for (double v : m.data()) append_u32le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    return out;
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m, MatrixFormat format) {
    write_file(path, format == MatrixFormat::Csv ? csv_matrix_text(m) : f32le_matrix_bytes(m));
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string scores_csv_text(const std::vector<ScoreReport>& reports, const std::optional<std::vector<Decision>>& labels) {
    if (labels && labels->size() != reports.size()) {
        throw Error(ErrorCode::DimensionMismatch, "label count differs from score count");
    }
    std::string out = labels ? "score,delta_mu_term,shell_term,best_shell,label\n"
                             : "score,delta_mu_term,shell_term,best_shell\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ScoreReport& r = reports[i];
        out += format_g17(r.score) + ',' + format_g17(r.delta_mu_term) + ',' + format_g17(r.shell_term) + ',' +
               std::to_string(r.best_shell);
        if (labels) out += (*labels)[i] == Decision::ID ? ",ID" : ",OOD";
        out.push_back('\n');
    }
    return out;
}

void write_scores(const std::filesystem::path& path, const std::vector<ScoreReport>& reports,
                  const std::optional<std::vector<Decision>>& labels) {
    write_file(path, scores_csv_text(reports, labels));
}

std::vector<ScoreReport> parse_scores_csv(std::string_view text) {
    const auto lines = content_lines(text);
    if (lines.empty() || split_fields(lines.front().second).front() != "score") {
        throw Error(ErrorCode::ParseError, "score table must start with a 'score,...' header");
    }
    std::vector<ScoreReport> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [number, line] = lines[i];
        const auto fields = split_fields(line);
        if (fields.size() < 4) {
            throw Error(ErrorCode::RaggedRows, "line " + std::to_string(number) + " has " +
                                                   std::to_string(fields.size()) + " fields, expected at least 4");
        }
        ScoreReport r;
        r.score = parse_number(fields[0], number, 1);
        r.delta_mu_term = parse_number(fields[1], number, 2);
        r.shell_term = parse_number(fields[2], number, 3);
        std::size_t shell = 0;
        const auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), shell);
        if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) {
            parse_error(number, 4, "'" + std::string(fields[3]) + "' is not a shell index");
        }
        r.best_shell = shell;
        r.r_b_effective = 0.0;
        out.push_back(r);
    }
    return out;
}

std::vector<ScoreReport> read_scores(const std::filesystem::path& path) { return parse_scores_csv(read_file(path)); }

std::vector<double> read_score_list(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const auto lines = content_lines(text);
    if (!lines.empty() && split_fields(lines.front().second).front() == "score") {
        std::vector<double> out;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto& [number, line] = lines[i];
            out.push_back(parse_number(split_fields(line).front(), number, 1));
        }
        return out;
    }
    return parse_csv_matrix(text, false).data();
}

std::string summary_json_text(const IdSummary& s) {
    std::string out = "{\"version\":" + std::to_string(kSummarySchemaVersion);
    out += ",\"norm_kind\":\"" + std::string(to_string(s.norm_kind())) + "\"";
    out += ",\"k\":" + std::to_string(s.k());
    out += ",\"r_B_id\":" + format_double(s.r_b_id());
    out += ",\"m\":" + std::to_string(s.m());
    out += ",\"mean\":";
    append_array(out, s.mean());
    out += ",\"shell_freq\":";
    append_array(out, s.shell_freq());
    out += ",\"shell_max_norm\":";
    append_array(out, s.shell_max_norm());
    if (s.center()) {
        out += ",\"center\":";
        append_array(out, *s.center());
    }
    out += "}\n";
    return out;
}

IdSummary parse_summary_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("summary is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "summary must be a JSON object");
    }
    const auto version = summary_field<long long>(j, "version");
    if (version != kSummarySchemaVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch, "summary version " + std::to_string(version) +
                                                          " is not supported (expected " +
                                                          std::to_string(kSummarySchemaVersion) + ")");
    }
    const NormKind kind = parse_norm_kind(summary_field<std::string>(j, "norm_kind"));
    std::optional<std::vector<double>> center;
    if (j.contains("center") && !j.at("center").is_null()) center = summary_field<std::vector<double>>(j, "center");
    return IdSummary(summary_field<std::vector<double>>(j, "mean"), summary_field<std::size_t>(j, "k"),
                     summary_field<std::vector<double>>(j, "shell_freq"),
                     summary_field<std::vector<double>>(j, "shell_max_norm"), summary_field<double>(j, "r_B_id"),
                     summary_field<std::size_t>(j, "m"), kind, std::move(center));
}

void save_summary(const std::filesystem::path& path, const IdSummary& s) { write_file(path, summary_json_text(s)); }

IdSummary load_summary(const std::filesystem::path& path) { return parse_summary_json(read_file(path)); }

std::string metrics_json_text(const MetricsReport& r) {
    return "{\"auroc\":" + format_double(r.auroc) + ",\"tpr95\":" + format_double(r.tpr95) +
           ",\"aupr\":" + format_double(r.aupr) + ",\"threshold_at_95\":" + format_double(r.threshold_at_95) +
           ",\"n_id\":" + std::to_string(r.n_id) + ",\"n_ood\":" + std::to_string(r.n_ood) + "}\n";
}

}  // namespace oi
