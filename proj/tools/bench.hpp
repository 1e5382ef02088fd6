#pragma once

#include "oi/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oi::bench {

struct Config {
    std::vector<std::size_t> dims{10, 100, 500, 1000, 2000};
    std::vector<std::size_t> k_sweep{100, 200, 500, 1000};
    std::size_t fixed_k = 100;     // k used by the dimension sweep
    std::size_t fixed_dim = 10;    // dimension used by the k sweep
    std::size_t samples = 10000;   // timed scores per run
    std::size_t warmup = 1000;
    std::size_t runs = 5;
    std::size_t chunk = 100;       // scores per clock reading
    std::size_t fit_rows = 1000;
    std::size_t pool_rows = 64;    // candidates cycled through, kept cache-resident
    std::uint64_t seed = 1;
    NormKind norm_kind = NormKind::L2;
};

struct Cell {
    std::size_t dim = 0;
    std::size_t k = 0;
    double median_ms = 0.0;  // median over runs of the per-run median per-sample latency
    double p95_ms = 0.0;     // 95th percentile of per-sample latency over all chunks
    std::size_t scored = 0;
    std::size_t summary_bytes = 0;
};

Cell measure(std::size_t dim, std::size_t k, const Config& cfg);

struct Result {
    std::vector<Cell> dim_sweep;
    std::vector<Cell> k_sweep;
    double dim_ratio = 0.0;   // max / min median across the dimension sweep
    double k_slope_ms = 0.0;  // least-squares slope of median vs k
    double k_r2 = 0.0;
};

Result run(const Config& cfg);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_r2(const std::vector<double>& x, const std::vector<double>& y, double* slope = nullptr);

std::string result_json_text(const Result& r, const Config& cfg);

}  // namespace oi::bench
