#include "oi/metrics.hpp"

#include "oi/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oi {

namespace {

constexpr std::size_t kPairwiseLimit = 1u << 16;

void require_scores(std::span<const double> id_scores, std::span<const double> ood_scores) {
    if (id_scores.empty() || ood_scores.empty()) {
        throw Error(ErrorCode::EmptyInput, "metrics need at least one ID and one OOD score");
    }
    auto bad = [](double v) { return std::isnan(v); };
    if (std::any_of(id_scores.begin(), id_scores.end(), bad) ||
        std::any_of(ood_scores.begin(), ood_scores.end(), bad)) {
        throw Error(ErrorCode::InvalidValue, "scores must not be NaN");
    }
}

// 2U as an integer: two points per win, one per tie.
double from_doubled_u(std::uint64_t doubled_u, std::size_t n_id, std::size_t n_ood) {
    return static_cast<double>(doubled_u) /
           (2.0 * static_cast<double>(n_id) * static_cast<double>(n_ood));
}

}  // namespace

double auroc_pairwise(std::span<const double> id_scores, std::span<const double> ood_scores) {
    require_scores(id_scores, ood_scores);
    std::uint64_t doubled_u = 0;
    for (double a : id_scores) {
        for (double b : ood_scores) {
            if (a > b) {
                doubled_u += 2;
            } else if (a == b) {
                doubled_u += 1;
            }
        }
    }
    return from_doubled_u(doubled_u, id_scores.size(), ood_scores.size());
}

double auroc_sorted(std::span<const double> id_scores, std::span<const double> ood_scores) {
    require_scores(id_scores, ood_scores);
    std::vector<double> ood(ood_scores.begin(), ood_scores.end());
    std::sort(ood.begin(), ood.end());
    std::uint64_t doubled_u = 0;
    for (double a : id_scores) {
        const auto lo = std::lower_bound(ood.begin(), ood.end(), a);
        const auto hi = std::upper_bound(lo, ood.end(), a);
        doubled_u += 2 * static_cast<std::uint64_t>(lo - ood.begin()) + static_cast<std::uint64_t>(hi - lo);
    }
    return from_doubled_u(doubled_u, id_scores.size(), ood_scores.size());
}

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
    if (id_scores.size() * ood_scores.size() <= kPairwiseLimit) {
        return auroc_pairwise(id_scores, ood_scores);
    }
    return auroc_sorted(id_scores, ood_scores);
}

Tpr95 tpr95(std::span<const double> id_scores, std::span<const double> ood_scores) {
    require_scores(id_scores, ood_scores);
    std::vector<double> id(id_scores.begin(), id_scores.end());
    std::sort(id.begin(), id.end());
    const std::size_t rank = id.size() / 20;  // 0-based index of rank floor(0.05 n) + 1
    const double threshold = id[rank];
    const auto below = std::count_if(ood_scores.begin(), ood_scores.end(), [&](double s) { return s < threshold; });
    return {static_cast<double>(below) / static_cast<double>(ood_scores.size()), threshold};
}

double aupr(std::span<const double> id_scores, std::span<const double> ood_scores, PositiveClass positive) {
    require_scores(id_scores, ood_scores);
    struct Item {
        double key;  // larger = more confidently positive
        bool is_positive;
    };
    std::vector<Item> items;
    items.reserve(id_scores.size() + ood_scores.size());
    const bool ood_positive = positive == PositiveClass::OOD;
    for (double s : id_scores) items.push_back({ood_positive ? -s : s, !ood_positive});
    for (double s : ood_scores) items.push_back({ood_positive ? -s : s, ood_positive});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.key > b.key; });

    const double total_pos = static_cast<double>(ood_positive ? ood_scores.size() : id_scores.size());
    std::size_t tp = 0;
    std::size_t seen = 0;
    double prev_recall = 0.0;
    double area = 0.0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && items[j].key == items[i].key) {
            tp += items[j].is_positive ? 1 : 0;
            ++j;
        }
        seen = j;
        const double recall = static_cast<double>(tp) / total_pos;
        const double precision = static_cast<double>(tp) / static_cast<double>(seen);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

MetricsReport evaluate(std::span<const double> id_scores, std::span<const double> ood_scores,
                       PositiveClass positive) {
    const Tpr95 t = tpr95(id_scores, ood_scores);
    MetricsReport rep;
    rep.auroc = auroc(id_scores, ood_scores);
    rep.tpr95 = t.tpr95;
    rep.threshold_at_95 = t.threshold;
    rep.aupr = aupr(id_scores, ood_scores, positive);
    rep.n_id = id_scores.size();
    rep.n_ood = ood_scores.size();
    return rep;
}

}  // namespace oi
