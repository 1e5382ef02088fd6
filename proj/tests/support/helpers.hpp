#pragma once

#include "oi/core.hpp"
#include "oracles.hpp"

#include <random>

namespace testing_support {

inline oracle::Rows rows_of(const oi::FeatureMatrix& m) {
    oracle::Rows out;
    for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
    return out;
}

inline oracle::Norm oracle_norm(oi::NormKind k) {
    switch (k) {
        case oi::NormKind::L1: return oracle::Norm::L1;
        case oi::NormKind::L2: return oracle::Norm::L2;
        case oi::NormKind::Linf: return oracle::Norm::Linf;
    }
    return oracle::Norm::L2;
}

inline oi::FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0,
                                       double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> data(rows * cols);
    for (double& v : data) v = shift + scale * normal(rng);
    return oi::FeatureMatrix(rows, cols, std::move(data));
}

inline constexpr oi::NormKind kAllNorms[] = {oi::NormKind::L1, oi::NormKind::L2, oi::NormKind::Linf};

}  // namespace testing_support
