#include "bench.hpp"

#include "oi/detector.hpp"
#include "oi/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace oi::bench {

namespace {

FeatureMatrix gaussian_rows(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> data(rows * dim);
    for (double& v : data) v = normal(rng);
    return FeatureMatrix(rows, dim, std::move(data));
}

double median_of(std::vector<double> v) {
    const std::size_t mid = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

double quantile_of(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    return v[std::min(idx, v.size() - 1)];
}

}  // namespace

Cell measure(std::size_t dim, std::size_t k, const Config& cfg) {
    const IdSummary summary = fit(gaussian_rows(cfg.fit_rows, dim, cfg.seed), k, cfg.norm_kind);
    const FeatureMatrix pool = gaussian_rows(cfg.pool_rows, dim, cfg.seed + 1);
    using clock = std::chrono::steady_clock;

    double sink = 0.0;
    std::size_t next = 0;
    auto one = [&] {
        sink += score(pool.row(next), summary).score;
        next = next + 1 == pool.rows() ? 0 : next + 1;
    };
    for (std::size_t i = 0; i < cfg.warmup; ++i) one();

    const std::size_t chunks = std::max<std::size_t>(1, cfg.samples / cfg.chunk);
    std::vector<double> run_medians;
    std::vector<double> all_chunks;
    for (std::size_t run = 0; run < cfg.runs; ++run) {
        std::vector<double> per_sample;
        per_sample.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            const auto t0 = clock::now();
            for (std::size_t i = 0; i < cfg.chunk; ++i) one();
            const auto t1 = clock::now();
            const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            per_sample.push_back(ms / static_cast<double>(cfg.chunk));
        }
        run_medians.push_back(median_of(per_sample));
        all_chunks.insert(all_chunks.end(), per_sample.begin(), per_sample.end());
    }
    volatile double keep = sink;
    (void)keep;

    Cell cell;
    cell.dim = dim;
    cell.k = k;
    cell.median_ms = median_of(run_medians);
    cell.p95_ms = quantile_of(all_chunks, 0.95);
    cell.scored = chunks * cfg.chunk * cfg.runs;
    cell.summary_bytes = summary_json_text(summary).size();
    return cell;
}

double linear_r2(const std::vector<double>& x, const std::vector<double>& y, double* slope) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (slope) *slope = sxx > 0.0 ? sxy / sxx : 0.0;
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return (sxy * sxy) / (sxx * syy);
}

Result run(const Config& cfg) {
    Result r;
    for (std::size_t dim : cfg.dims) r.dim_sweep.push_back(measure(dim, cfg.fixed_k, cfg));
    for (std::size_t k : cfg.k_sweep) r.k_sweep.push_back(measure(cfg.fixed_dim, k, cfg));

    if (!r.dim_sweep.empty()) {
        const auto [lo, hi] = std::minmax_element(r.dim_sweep.begin(), r.dim_sweep.end(),
                                                  [](const Cell& a, const Cell& b) { return a.median_ms < b.median_ms; });
        r.dim_ratio = hi->median_ms / lo->median_ms;
    }
    if (r.k_sweep.size() >= 2) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const Cell& c : r.k_sweep) {
            xs.push_back(static_cast<double>(c.k));
            ys.push_back(c.median_ms);
        }
        r.k_r2 = linear_r2(xs, ys, &r.k_slope_ms);
    }
    return r;
}

std::string result_json_text(const Result& r, const Config& cfg) {
    nlohmann::ordered_json j;
    auto cells = [](const std::vector<Cell>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const Cell& c : v) {
            arr.push_back({{"dim", c.dim},
                           {"k", c.k},
                           {"median_ms", c.median_ms},
                           {"p95_ms", c.p95_ms},
                           {"scored", c.scored},
                           {"summary_bytes", c.summary_bytes}});
        }
        return arr;
    };
    j["norm_kind"] = std::string(to_string(cfg.norm_kind));
    j["fixed_k"] = cfg.fixed_k;
    j["fixed_dim"] = cfg.fixed_dim;
    j["dim_sweep"] = cells(r.dim_sweep);
    j["k_sweep"] = cells(r.k_sweep);
    j["dim_ratio_max_over_min"] = r.dim_ratio;
    j["k_slope_ms_per_shell"] = r.k_slope_ms;
    j["k_linear_r2"] = r.k_r2;
    return j.dump(2) + "\n";
}

}  // namespace oi::bench
