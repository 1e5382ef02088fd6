#pragma once

#include "oi/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace oi {

inline constexpr std::size_t kDefaultShells = 100;
inline constexpr std::size_t kRecommendedShellsMin = 50;
inline constexpr std::size_t kRecommendedShellsMax = 200;

[[nodiscard]] constexpr bool k_in_recommended_range(std::size_t k) noexcept {
    return k >= kRecommendedShellsMin && k <= kRecommendedShellsMax;
}

/// Fitted in-distribution state: everything the bound needs from the ID side,
/// O(n + k) in size. All quantities live in centered coordinates when a center
/// is set (the center is subtracted before any mean or norm is taken).
class IdSummary {
public:
    /// Rebuilds a summary from stored parts (used by the persistence layer).
    /// Throws RangeError/DimensionMismatch when the parts violate an invariant.
    IdSummary(std::vector<double> mean, std::size_t k, std::vector<double> shell_freq,
              std::vector<double> shell_max_norm, double r_b_id, std::size_t m, NormKind norm_kind,
              std::optional<std::vector<double>> center);

    [[nodiscard]] std::size_t dim() const noexcept { return mean_.size(); }
    [[nodiscard]] std::size_t k() const noexcept { return shell_freq_.size(); }
    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] double r_b_id() const noexcept { return r_b_id_; }
    [[nodiscard]] NormKind norm_kind() const noexcept { return norm_kind_; }
    [[nodiscard]] const ShellPartition& partition() const noexcept { return partition_; }
    [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }
    [[nodiscard]] const std::vector<double>& shell_freq() const noexcept { return shell_freq_; }
    [[nodiscard]] const std::vector<double>& shell_max_norm() const noexcept { return shell_max_norm_; }
    [[nodiscard]] const std::optional<std::vector<double>>& center() const noexcept { return center_; }

    bool operator==(const IdSummary& other) const;

private:
    std::vector<double> mean_;
    std::vector<double> shell_freq_;
    std::vector<double> shell_max_norm_;
    double r_b_id_;
    std::size_t m_;
    NormKind norm_kind_;
    std::optional<std::vector<double>> center_;
    ShellPartition partition_;
};

/// One evaluation of the overlap upper bound.
///   score = (1 - delta_mu_term) - shell_term
/// Both terms are rounded to multiples of 2^-53, which makes that identity and
/// score == eta1 + (eta2 - 1) hold exactly in double precision.
struct ScoreReport {
    double score = 1.0;
    double delta_mu_term = 0.0;  ///< ||mu+ - mu-|| / (2 r_B)
    double shell_term = 0.0;     ///< max_j s_j / (2 r_B)
    std::size_t best_shell = 1;  ///< 1-based; first shell attaining the max
    double r_b_effective = 0.0;

    bool operator==(const ScoreReport&) const = default;
};

enum class Decision { ID, OOD };

/// Throws EmptyInput, DimensionMismatch, AllZeroNorms, RangeError (k == 0).
IdSummary fit(const FeatureMatrix& id_samples, std::size_t k = kDefaultShells,
              NormKind norm_kind = NormKind::L2, const std::optional<FeatureVector>& center = std::nullopt);

/// Pooled bound between a set of candidate samples and the fitted ID side.
/// Shells stay frozen at fit time; r_B grows to cover candidates beyond the ID
/// ball, and such candidates belong to no shell.
ScoreReport compute_bound(const FeatureMatrix& plus_samples, const IdSummary& summary);

/// Confidence score of a single sample (the pooled bound with d = 1).
ScoreReport score(VectorView x, const IdSummary& summary);
inline ScoreReport score(const FeatureVector& x, const IdSummary& summary) { return score(x.view(), summary); }

/// Independent per-row scores; element i equals score(xs.row(i)). Rows are
/// split into contiguous blocks when threads > 1, output order is row order.
std::vector<ScoreReport> score_batch(const FeatureMatrix& xs, const IdSummary& summary, unsigned threads = 1);

/// ID iff score >= threshold.
Decision classify(VectorView x, const IdSummary& summary, double threshold);
inline Decision classify(const FeatureVector& x, const IdSummary& summary, double threshold) {
    return classify(x.view(), summary, threshold);
}

/// Ablations keeping a single term: eta1 = 1 - delta_mu_term, eta2 = 1 - shell_term.
double score_eta1(VectorView x, const IdSummary& summary);
double score_eta2(VectorView x, const IdSummary& summary);

/// Mean of a seeded uniform subsample (without replacement) of the pool.
/// Throws EmptyPool, RangeError (count == 0 or count > pool rows).
FeatureVector contaminated_center(const FeatureMatrix& pool, std::size_t sample_count, std::uint64_t seed);

}  // namespace oi
