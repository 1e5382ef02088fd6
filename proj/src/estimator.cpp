#include "oi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace oi {

namespace {

void require_pair(const FeatureMatrix& a, const FeatureMatrix& b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::EmptyInput, "both sample sets must be non-empty");
    }
    if (a.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "sample sets have dimensions " + std::to_string(a.cols()) +
                                                      " and " + std::to_string(b.cols()));
    }
}

std::vector<double> column_means(const FeatureMatrix& x) {
    std::vector<double> mean(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const VectorView row = x.row(r);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= static_cast<double>(x.rows());
    return mean;
}

std::vector<double> merged_mean(const FeatureMatrix& a, const FeatureMatrix& b) {
    std::vector<double> mean(a.cols(), 0.0);
    for (const FeatureMatrix* m : {&a, &b}) {
        for (std::size_t r = 0; r < m->rows(); ++r) {
            const VectorView row = m->row(r);
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
        }
    }
    for (double& v : mean) v /= static_cast<double>(a.rows() + b.rows());
    return mean;
}

FeatureMatrix shifted(const FeatureMatrix& x, const std::vector<double>& origin) {
    std::vector<double> data = x.data();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t i = 0; i < x.cols(); ++i) data[r * x.cols() + i] -= origin[i];
    }
    return FeatureMatrix(x.rows(), x.cols(), std::move(data));
}

std::vector<double> row_norms(const FeatureMatrix& x, NormKind kind) {
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = norm(x.row(r), kind);
    return out;
}

// Count of sorted values <= bound, and the largest such value (0 if none).
std::pair<std::size_t, double> at_most(const std::vector<double>& sorted, double bound) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), bound);
    const auto count = static_cast<std::size_t>(it - sorted.begin());
    return {count, count == 0 ? 0.0 : *(it - 1)};
}

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sum_sq_dev(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s;
}

}  // namespace

std::string_view to_string(EstimateMethod method) noexcept {
    switch (method) {
        case EstimateMethod::EtaBarPrime: return "eta_bar_prime";
        case EstimateMethod::CohenD: return "cohen_d";
        case EstimateMethod::OracleGrid: return "oracle_grid";
        case EstimateMethod::OracleMc: return "oracle_mc";
    }
    return "unknown";
}

OiEstimate estimate_oi(const FeatureMatrix& a_in, const FeatureMatrix& b_in, std::size_t k, NormKind norm_kind,
                       bool center_at_merged_mean, ConditionFamily family) {
    require_pair(a_in, b_in);
    if (k == 0) {
        throw Error(ErrorCode::RangeError, "condition-function count k must be >= 1");
    }
    FeatureMatrix a = a_in;
    FeatureMatrix b = b_in;
    if (center_at_merged_mean) {
        const std::vector<double> origin = merged_mean(a_in, b_in);
        a = shifted(a_in, origin);
        b = shifted(b_in, origin);
    }

    std::vector<double> na = row_norms(a, norm_kind);
    std::vector<double> nb = row_norms(b, norm_kind);
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    std::vector<double> pooled;
    pooled.reserve(na.size() + nb.size());
    std::merge(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(pooled));

    const double r_prime = pooled[(pooled.size() - 1) / 2];
    if (!(r_prime > 0.0)) {
        throw Error(ErrorCode::AllZeroNorms, "median norm is 0; the estimate has no scale");
    }
    const double r_b = pooled.back();
    const ShellPartition radii(k, r_b);

    std::vector<double> diff = column_means(a);
    const std::vector<double> mean_b = column_means(b);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= mean_b[i];
    const double delta_mu = norm(diff, norm_kind);

    const double size_a = static_cast<double>(na.size());
    const double size_b = static_cast<double>(nb.size());
    double best = 0.0;
    if (family == ConditionFamily::Balls) {
        for (std::size_t j = 1; j <= k; ++j) {
            const double outer = radii.radius(j);
            const auto [count_a, max_a] = at_most(na, outer);
            const auto [count_b, max_b] = at_most(nb, outer);
            const double r_a = std::max(max_a, max_b);
            const double gap =
                std::fabs(static_cast<double>(count_a) / size_a - static_cast<double>(count_b) / size_b);
            best = std::max(best, (r_b - r_a) * gap);
        }
    } else {
        std::vector<std::size_t> count_a(k, 0);
        std::vector<std::size_t> count_b(k, 0);
        std::vector<double> r_a(k, 0.0);
        auto bin = [&](const std::vector<double>& norms, std::vector<std::size_t>& counts) {
            for (double v : norms) {
                const std::size_t j = *radii.shell_of_norm(v) - 1;
                ++counts[j];
                r_a[j] = std::max(r_a[j], v);
            }
        };
        bin(na, count_a);
        bin(nb, count_b);
        for (std::size_t j = 0; j < k; ++j) {
            const double gap =
                std::fabs(static_cast<double>(count_a[j]) / size_a - static_cast<double>(count_b[j]) / size_b);
            best = std::max(best, (r_b - r_a[j]) * gap);
        }
    }

    const double value = 1.0 - delta_mu / (2.0 * r_prime) - best / (2.0 * r_prime);
    return {std::clamp(value, 0.0, 1.0), r_prime, EstimateMethod::EtaBarPrime};
}

double standard_normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

OiEstimate cohen_d_oi(const FeatureMatrix& a, const FeatureMatrix& b) {
    require_pair(a, b);
    std::vector<double> va;
    std::vector<double> vb;
    if (a.cols() == 1) {
        va = a.data();
        vb = b.data();
    } else {
        const std::vector<double> origin = merged_mean(a, b);
        va = row_norms(shifted(a, origin), NormKind::L2);
        vb = row_norms(shifted(b, origin), NormKind::L2);
    }
    const double mean_a = sample_mean(va);
    const double mean_b = sample_mean(vb);
    const double dof = static_cast<double>(va.size() + vb.size()) - 2.0;
    const double pooled_var = dof > 0.0 ? (sum_sq_dev(va, mean_a) + sum_sq_dev(vb, mean_b)) / dof : 0.0;
    const double sigma = std::sqrt(pooled_var);
    const double gap = std::fabs(mean_a - mean_b);
    if (!(sigma > 0.0)) {
        if (gap == 0.0) return {1.0, 0.0, EstimateMethod::CohenD};
        throw Error(ErrorCode::ZeroVariance, "pooled standard deviation is 0 while the means differ");
    }
    const double value = 2.0 * standard_normal_cdf(-gap / (2.0 * sigma));
    return {std::min(1.0, value), 0.0, EstimateMethod::CohenD};
}

double oi_oracle_grid_1d(const Density1d& f, const Density1d& g, double lo, double hi, std::size_t grid_points) {
    if (grid_points < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::RangeError, "grid needs >= 2 points over a finite interval with hi > lo");
    }
    const double h = (hi - lo) / static_cast<double>(grid_points - 1);
    double int_f = 0.0;
    double int_g = 0.0;
    double int_min = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = i + 1 == grid_points ? hi : lo + static_cast<double>(i) * h;
        const double fx = f(x);
        const double gx = g(x);
        if (!(fx >= 0.0) || !(gx >= 0.0)) {
            throw Error(ErrorCode::InvalidValue, "density negative or NaN at x = " + std::to_string(x));
        }
        const double w = (i == 0 || i + 1 == grid_points) ? 0.5 : 1.0;
        int_f += w * fx;
        int_g += w * gx;
        int_min += w * std::min(fx, gx);
    }
    int_f *= h;
    int_g *= h;
    int_min *= h;
    if (std::fabs(int_f - 1.0) > 1e-3 || std::fabs(int_g - 1.0) > 1e-3) {
        throw Error(ErrorCode::NotNormalized, "densities integrate to " + std::to_string(int_f) + " and " +
                                                  std::to_string(int_g) + " on the grid");
    }
    return int_min;
}

McEstimate oi_oracle_mc(const Sampler& sampler_p, const Density& density_p, const Density& density_q,
                        std::size_t dim, std::size_t n_draws, std::uint64_t seed, unsigned threads) {
    if (n_draws == 0 || dim == 0) {
        throw Error(ErrorCode::RangeError, "Monte-Carlo oracle needs n_draws >= 1 and dim >= 1");
    }
    const std::size_t blocks = (n_draws + kMcBlock - 1) / kMcBlock;
    struct BlockSum {
        double sum = 0.0;
        double sum_sq = 0.0;
        bool bad = false;
    };
    std::vector<BlockSum> sums(blocks);

    auto run_block = [&](std::size_t blk) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32)};
        std::mt19937_64 rng(seq);
        std::vector<double> x(dim);
        const std::size_t count = std::min(kMcBlock, n_draws - blk * kMcBlock);
        BlockSum& out = sums[blk];
        for (std::size_t i = 0; i < count; ++i) {
            sampler_p(rng, x);
            const double fp = density_p(x);
            if (!(fp > 0.0)) {
                out.bad = true;
                return;
            }
            const double w = std::min(1.0, density_q(x) / fp);
            out.sum += w;
            out.sum_sq += w * w;
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, blocks);
    if (workers == 1) {
        for (std::size_t blk = 0; blk < blocks; ++blk) run_block(blk);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t blk = w; blk < blocks; blk += workers) run_block(blk);
            });
        }
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const BlockSum& s : sums) {
        if (s.bad) {
            throw Error(ErrorCode::InvalidValue, "density of P is not positive at one of its own draws");
        }
        sum += s.sum;
        sum_sq += s.sum_sq;
    }
    const double n = static_cast<double>(n_draws);
    const double mean = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

McEstimate oi_oracle_mc(const SyntheticSpec& p, const SyntheticSpec& q, std::size_t n_draws, std::uint64_t seed,
                        unsigned threads) {
    if (p.dim() != q.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "oracle distributions must share a dimension");
    }
    return oi_oracle_mc(sampler_of(p), density_of(p), density_of(q), p.dim(), n_draws, seed, threads);
}

}  // namespace oi
