#pragma once

#include "oi/error.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace oi {

/// A view of one validated sample. Views handed out by FeatureVector and
/// FeatureMatrix always refer to finite values.
using VectorView = std::span<const double>;

/// Dense sample in R^n. Construction rejects empty input and NaN/Inf entries.
class FeatureVector {
public:
    explicit FeatureVector(std::vector<double> values);
    FeatureVector(std::initializer_list<double> values);

    [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
    [[nodiscard]] VectorView view() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    bool operator==(const FeatureVector&) const = default;

private:
    std::vector<double> values_;
};

/// Row-major sample matrix with a common dimension. A matrix may have zero
/// rows (an empty batch) but its dimension is always at least one.
class FeatureMatrix {
public:
    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    explicit FeatureMatrix(std::size_t cols);
    static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static FeatureMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return rows_ == 0; }
    [[nodiscard]] VectorView row(std::size_t i) const noexcept {
        return VectorView(data_).subspan(i * cols_, cols_);
    }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    void append(VectorView row);
    /// Rows [first, first + count) as a new matrix.
    [[nodiscard]] FeatureMatrix slice(std::size_t first, std::size_t count) const;
    /// Vertical concatenation; dimensions must match.
    [[nodiscard]] static FeatureMatrix stack(const FeatureMatrix& top, const FeatureMatrix& bottom);

    bool operator==(const FeatureMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

enum class NormKind { L1, L2, Linf };

std::string_view to_string(NormKind kind) noexcept;
/// Accepts "l1", "l2", "linf" (case-insensitive). Throws RangeError otherwise.
NormKind parse_norm_kind(std::string_view text);

namespace detail {

// Reductions use four interleaved partial sums combined as (a0+a1)+(a2+a3).
// Every norm in the library goes through this accumulator so a fused pass and
// a norm of the materialised vector agree bit-for-bit.
inline constexpr std::size_t kLanes = 4;

struct LaneAccumulator {
    std::array<double, kLanes> lane{};

    template <NormKind Kind>
    void add(std::size_t l, double v) noexcept {
        if constexpr (Kind == NormKind::L1) {
            lane[l] += std::fabs(v);
        } else if constexpr (Kind == NormKind::L2) {
            lane[l] += v * v;
        } else {
            lane[l] = std::fmax(lane[l], std::fabs(v));
        }
    }

    template <NormKind Kind>
    [[nodiscard]] double finish() const noexcept {
        if constexpr (Kind == NormKind::Linf) {
            return std::fmax(std::fmax(lane[0], lane[1]), std::fmax(lane[2], lane[3]));
        } else {
            const double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
            if constexpr (Kind == NormKind::L2) {
                return std::sqrt(total);
            } else {
                return total;
            }
        }
    }
};

/// Feeds element i of a length-n sequence to lane i % kLanes, in index order.
template <NormKind Kind, typename ValueAt>
void lane_feed(LaneAccumulator& acc, std::size_t n, ValueAt&& value_at) noexcept {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc.add<Kind>(0, value_at(i));
        acc.add<Kind>(1, value_at(i + 1));
        acc.add<Kind>(2, value_at(i + 2));
        acc.add<Kind>(3, value_at(i + 3));
    }
    for (std::size_t l = 0; i < n; ++i, ++l) {
        acc.add<Kind>(l, value_at(i));
    }
}

template <NormKind Kind>
double norm_of(VectorView v) noexcept {
    LaneAccumulator acc;
    lane_feed<Kind>(acc, v.size(), [v](std::size_t i) { return v[i]; });
    return acc.finish<Kind>();
}

}  // namespace detail

double norm(VectorView v, NormKind kind) noexcept;
inline double norm(const FeatureVector& v, NormKind kind) noexcept { return norm(v.view(), kind); }

/// Concentric norm shells over [0, r_B]. Shell j (1-based) covers
/// [r_{j-1}, r_j) for j < k and the closed interval [r_{k-1}, r_k] for j = k,
/// with r_j = j * r_B / k and r_k pinned to r_B exactly.
class ShellPartition {
public:
    ShellPartition(std::size_t k, double r_b);

    [[nodiscard]] std::size_t k() const noexcept { return radii_.size() - 1; }
    [[nodiscard]] double r_b() const noexcept { return radii_.back(); }
    /// radius(0) == 0, radius(k) == r_B.
    [[nodiscard]] double radius(std::size_t j) const noexcept { return radii_[j]; }

    /// 1-based shell containing a vector of the given norm; nullopt beyond r_B.
    [[nodiscard]] std::optional<std::size_t> shell_of_norm(double n) const noexcept;

private:
    std::vector<double> radii_;
};

std::optional<std::size_t> assign_shell(VectorView v, const ShellPartition& p, NormKind kind) noexcept;

}  // namespace oi
