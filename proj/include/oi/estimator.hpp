#pragma once

#include "oi/core.hpp"
#include "oi/synth.hpp"

#include <cstdint>
#include <functional>

namespace oi {

enum class EstimateMethod { EtaBarPrime, CohenD, OracleGrid, OracleMc };

std::string_view to_string(EstimateMethod method) noexcept;

struct OiEstimate {
    double value = 0.0;    ///< in [0, 1]
    double r_prime = 0.0;  ///< normalising radius (0 where the method has none)
    EstimateMethod method = EstimateMethod::EtaBarPrime;
};

/// Condition-function family for the estimator: nested balls 1{||x|| <= r_j}
/// (default) or the detector's disjoint shells.
enum class ConditionFamily { Balls, Shells };

inline constexpr std::size_t kDefaultGridPoints = 100000;
inline constexpr std::size_t kDefaultMcDraws = 1000000;

/// Clamped overlap estimate between two sample sets, normalised by r', the
/// lower median of the pooled norms. Radii r_j = j * r_B / k use the pooled
/// maximum norm r_B. Optionally recentres both sets on their merged mean first.
/// Throws EmptyInput, DimensionMismatch, AllZeroNorms (r' == 0), RangeError (k == 0).
OiEstimate estimate_oi(const FeatureMatrix& a, const FeatureMatrix& b, std::size_t k = 100,
                       NormKind norm_kind = NormKind::L2, bool center_at_merged_mean = true,
                       ConditionFamily family = ConditionFamily::Balls);

/// 2 Phi(-|mu_a - mu_b| / (2 sigma)) with pooled standard deviation sigma.
/// One-dimensional data is used as is; wider data is reduced to Euclidean norms
/// after centering on the merged mean. Throws ZeroVariance when sigma == 0 and
/// the means differ.
OiEstimate cohen_d_oi(const FeatureMatrix& a, const FeatureMatrix& b);

double standard_normal_cdf(double z) noexcept;

using Density1d = std::function<double(double)>;

/// Composite trapezoid integral of min(f, g) over grid_points evenly spaced
/// nodes spanning [lo, hi]. Throws NotNormalized if either density integrates
/// more than 1e-3 away from 1 on the grid.
double oi_oracle_grid_1d(const Density1d& f, const Density1d& g, double lo, double hi,
                         std::size_t grid_points = kDefaultGridPoints);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of E_{x~P}[min(1, f_Q(x) / f_P(x))].
/// Draws are split into fixed blocks of kMcBlock; block b uses its own engine
/// seeded from (seed, b), and block sums are combined in block order, so the
/// result does not depend on the thread count.
inline constexpr std::size_t kMcBlock = 1u << 14;
McEstimate oi_oracle_mc(const Sampler& sampler_p, const Density& density_p, const Density& density_q,
                        std::size_t dim, std::size_t n_draws = kDefaultMcDraws, std::uint64_t seed = 0,
                        unsigned threads = 1);

/// Convenience overload drawing P from a synthetic spec.
McEstimate oi_oracle_mc(const SyntheticSpec& p, const SyntheticSpec& q, std::size_t n_draws = kDefaultMcDraws,
                        std::uint64_t seed = 0, unsigned threads = 1);

}  // namespace oi
