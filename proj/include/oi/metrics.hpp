#pragma once

#include <cstddef>
#include <span>

namespace oi {

enum class PositiveClass { OOD, ID };

struct Tpr95 {
    double tpr95 = 0.0;
    double threshold = 0.0;
};

struct MetricsReport {
    double auroc = 0.0;
    double tpr95 = 0.0;
    double aupr = 0.0;
    double threshold_at_95 = 0.0;
    std::size_t n_id = 0;
    std::size_t n_ood = 0;
};

/// P(random ID score > random OOD score), ties counted one half. Small inputs
/// are compared pairwise, larger ones through a sort; both count the same
/// integers, so the two paths agree bit-for-bit.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);
double auroc_pairwise(std::span<const double> id_scores, std::span<const double> ood_scores);
double auroc_sorted(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Threshold T is the largest ID score that still accepts at least 95% of ID
/// scores (rank floor(0.05 n) + 1 from the bottom). tpr95 is the fraction of
/// OOD scores strictly below T.
Tpr95 tpr95(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Average precision (step-wise PR area over distinct thresholds). With
/// positive = OOD the ranking key is the negated confidence score.
double aupr(std::span<const double> id_scores, std::span<const double> ood_scores,
            PositiveClass positive = PositiveClass::OOD);

MetricsReport evaluate(std::span<const double> id_scores, std::span<const double> ood_scores,
                       PositiveClass positive = PositiveClass::OOD);

}  // namespace oi
