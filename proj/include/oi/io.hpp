#pragma once

#include "oi/core.hpp"
#include "oi/detector.hpp"
#include "oi/metrics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oi {

enum class MatrixFormat { Csv, F32le };

std::string_view to_string(MatrixFormat format) noexcept;
/// "csv" or "f32le"; RangeError otherwise.
MatrixFormat parse_matrix_format(std::string_view text);

/// f32le layout: "OIDM", u32 rows, u32 cols, u32 reserved (0), then rows * cols
/// little-endian floats in row-major order.
inline constexpr char kMatrixMagic[4] = {'O', 'I', 'D', 'M'};
inline constexpr std::size_t kMatrixHeaderBytes = 16;

/// Throws IoError, ParseError (with line and column), RaggedRows, BadMagic.
FeatureMatrix read_matrix(const std::filesystem::path& path, MatrixFormat format, bool header = false);
FeatureMatrix parse_csv_matrix(std::string_view text, bool header = false);
FeatureMatrix parse_f32le_matrix(std::string_view bytes);

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m, MatrixFormat format);
std::string csv_matrix_text(const FeatureMatrix& m);
std::string f32le_matrix_bytes(const FeatureMatrix& m);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Score table: header score,delta_mu_term,shell_term,best_shell (plus label
/// when decisions are given), doubles at 17 significant digits.
std::string scores_csv_text(const std::vector<ScoreReport>& reports,
                            const std::optional<std::vector<Decision>>& labels = std::nullopt);
void write_scores(const std::filesystem::path& path, const std::vector<ScoreReport>& reports,
                  const std::optional<std::vector<Decision>>& labels = std::nullopt);
/// Reads a score table back; r_b_effective is not stored and comes back as 0.
std::vector<ScoreReport> read_scores(const std::filesystem::path& path);
std::vector<ScoreReport> parse_scores_csv(std::string_view text);

/// Score list for evaluation: either a score table (first column used) or one
/// number per line.
std::vector<double> read_score_list(const std::filesystem::path& path);

inline constexpr int kSummarySchemaVersion = 1;

std::string summary_json_text(const IdSummary& s);
/// Throws ParseError, SchemaVersionMismatch, and the IdSummary invariant errors.
IdSummary parse_summary_json(std::string_view text);
void save_summary(const std::filesystem::path& path, const IdSummary& s);
IdSummary load_summary(const std::filesystem::path& path);

std::string metrics_json_text(const MetricsReport& report);

/// Whole-file helpers; IoError on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace oi
