#include "oi/core.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace oi {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidValue: return "InvalidValue";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::AllZeroNorms: return "AllZeroNorms";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyPool: return "EmptyPool";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::RangeError: return "RangeError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::RaggedRows: return "RaggedRows";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    }
    return "Unknown";
}

namespace {

void require_finite(std::span<const double> values, std::size_t cols) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error(ErrorCode::InvalidValue,
                        "non-finite value " + std::to_string(values[i]) + " at row " +
                            std::to_string(i / cols) + ", column " + std::to_string(i % cols));
        }
    }
}

}  // namespace

FeatureVector::FeatureVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw Error(ErrorCode::InvalidValue, "feature vector must have dimension >= 1");
    }
    require_finite(values_, values_.size());
}

FeatureVector::FeatureVector(std::initializer_list<double> values)
    : FeatureVector(std::vector<double>(values)) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (cols_ == 0) {
        throw Error(ErrorCode::InvalidValue, "feature matrix must have dimension >= 1");
    }
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "matrix payload has " + std::to_string(data_.size()) + " values, expected " +
                        std::to_string(rows_) + " x " + std::to_string(cols_));
    }
    require_finite(data_, cols_);
}

FeatureMatrix::FeatureMatrix(std::size_t cols) : FeatureMatrix(0, cols, {}) {}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot infer dimension from zero rows");
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(r) + " has " +
                                                          std::to_string(rows[r].size()) +
                                                          " values, expected " + std::to_string(cols));
        }
        data.insert(data.end(), rows[r].begin(), rows[r].end());
    }
    return FeatureMatrix(rows.size(), cols, std::move(data));
}

FeatureMatrix FeatureMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<std::vector<double>> copy;
    copy.reserve(rows.size());
    for (const auto& r : rows) {
        copy.emplace_back(r);
    }
    return from_rows(copy);
}

void FeatureMatrix::append(VectorView row) {
    if (row.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "appended row has " + std::to_string(row.size()) +
                                                      " values, expected " + std::to_string(cols_));
    }
    require_finite(row, cols_);
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
}

FeatureMatrix FeatureMatrix::slice(std::size_t first, std::size_t count) const {
    if (first > rows_ || count > rows_ - first) {
        throw Error(ErrorCode::RangeError, "row slice out of range");
    }
    const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * cols_);
    return FeatureMatrix(count, cols_,
                         std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * cols_)));
}

FeatureMatrix FeatureMatrix::stack(const FeatureMatrix& top, const FeatureMatrix& bottom) {
    if (top.cols() != bottom.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "cannot stack matrices of dimension " +
                                                      std::to_string(top.cols()) + " and " +
                                                      std::to_string(bottom.cols()));
    }
    std::vector<double> data = top.data_;
    data.insert(data.end(), bottom.data_.begin(), bottom.data_.end());
    return FeatureMatrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

std::string_view to_string(NormKind kind) noexcept {
    switch (kind) {
        case NormKind::L1: return "l1";
        case NormKind::L2: return "l2";
        case NormKind::Linf: return "linf";
    }
    return "l2";
}

NormKind parse_norm_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "l1") return NormKind::L1;
    if (lower == "l2") return NormKind::L2;
    if (lower == "linf" || lower == "l_inf" || lower == "inf") return NormKind::Linf;
    throw Error(ErrorCode::RangeError, "unknown norm '" + std::string(text) + "' (expected l1, l2 or linf)");
}

double norm(VectorView v, NormKind kind) noexcept {
    switch (kind) {
        case NormKind::L1: return detail::norm_of<NormKind::L1>(v);
        case NormKind::L2: return detail::norm_of<NormKind::L2>(v);
        case NormKind::Linf: return detail::norm_of<NormKind::Linf>(v);
    }
    return 0.0;
}

ShellPartition::ShellPartition(std::size_t k, double r_b) {
    if (k == 0) {
        throw Error(ErrorCode::RangeError, "shell count k must be >= 1");
    }
    if (!(r_b > 0.0) || !std::isfinite(r_b)) {
        throw Error(ErrorCode::RangeError, "outer radius must be positive and finite");
    }
    radii_.resize(k + 1);
    const double kd = static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
        radii_[j] = static_cast<double>(j) * r_b / kd;
    }
    radii_[k] = r_b;
    for (std::size_t j = 1; j <= k; ++j) {
        if (!(radii_[j] > radii_[j - 1])) {
            throw Error(ErrorCode::RangeError, "outer radius too small to split into " +
                                                   std::to_string(k) + " distinct shells");
        }
    }
}

std::optional<std::size_t> ShellPartition::shell_of_norm(double n) const noexcept {
    const std::size_t shells = k();
    if (!(n <= r_b())) {
        return std::nullopt;
    }
    if (n <= 0.0) {
        return 1;
    }
    // Arithmetic guess, then snapped against the stored radii so membership is
    // decided by the same numbers radius() reports.
    auto guess = static_cast<std::size_t>(n / r_b() * static_cast<double>(shells));
    guess = std::min(guess, shells - 1);
    while (guess > 0 && n < radii_[guess]) {
        --guess;
    }
    while (guess + 1 < shells && n >= radii_[guess + 1]) {
        ++guess;
    }
    return guess + 1;
}

std::optional<std::size_t> assign_shell(VectorView v, const ShellPartition& p, NormKind kind) noexcept {
    return p.shell_of_norm(norm(v, kind));
}

}  // namespace oi
