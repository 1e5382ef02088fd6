#include "oi/detector.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace oi {

namespace {

constexpr double kFreqSumTolerance = 1e-12;

double snap_to_grid(double t) noexcept {
    return std::ldexp(std::nearbyint(std::ldexp(t, 53)), -53);
}

ShellPartition checked_partition(std::size_t k, double r_b_id) {
    if (!(r_b_id > 0.0)) {
        throw Error(ErrorCode::AllZeroNorms, "every centered ID sample has norm 0; shells are undefined");
    }
    return ShellPartition(k, r_b_id);
}

void check_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " + std::to_string(got) +
                                                      ", summary expects " + std::to_string(want));
    }
}

// Sequential row-order sum of (row - center), divided by the row count. Fit and
// compute_bound share this so a self-score sees bit-identical means.
std::vector<double> centered_mean(const FeatureMatrix& xs, const std::optional<std::vector<double>>& center) {
    std::vector<double> sum(xs.cols(), 0.0);
    for (std::size_t r = 0; r < xs.rows(); ++r) {
        const VectorView row = xs.row(r);
        if (center) {
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += row[i] - (*center)[i];
        } else {
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += row[i];
        }
    }
    const double count = static_cast<double>(xs.rows());
    for (double& v : sum) v /= count;
    return sum;
}

double centered_norm(VectorView row, const std::optional<std::vector<double>>& center, NormKind kind,
                     std::vector<double>& scratch) {
    if (!center) {
        return norm(row, kind);
    }
    scratch.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) scratch[i] = row[i] - (*center)[i];
    return norm(scratch, kind);
}

struct Norms {
    double self;   // ||x - c||
    double to_mu;  // ||x - c - mu||
};

// One pass over x producing both norms with the same lane layout as norm().
template <NormKind Kind>
Norms fused_norms(VectorView x, const IdSummary& s) {
    detail::LaneAccumulator self;
    detail::LaneAccumulator diff;
    const double* mu = s.mean().data();
    const std::size_t n = x.size();
    if (s.center()) {
        const double* c = s.center()->data();
        auto feed = [&](std::size_t l, std::size_t i) {
            const double v = x[i] - c[i];
            self.add<Kind>(l, v);
            diff.add<Kind>(l, v - mu[i]);
        };
        std::size_t i = 0;
        for (; i + detail::kLanes <= n; i += detail::kLanes) {
            feed(0, i);
            feed(1, i + 1);
            feed(2, i + 2);
            feed(3, i + 3);
        }
        for (std::size_t l = 0; i < n; ++i, ++l) feed(l, i);
    } else {
        auto feed = [&](std::size_t l, std::size_t i) {
            self.add<Kind>(l, x[i]);
            diff.add<Kind>(l, x[i] - mu[i]);
        };
        std::size_t i = 0;
        for (; i + detail::kLanes <= n; i += detail::kLanes) {
            feed(0, i);
            feed(1, i + 1);
            feed(2, i + 2);
            feed(3, i + 3);
        }
        for (std::size_t l = 0; i < n; ++i, ++l) feed(l, i);
    }
    return {self.finish<Kind>(), diff.finish<Kind>()};
}

ScoreReport finish_report(double delta_mu, double best_s, std::size_t best_j, double r_b_eff) {
    ScoreReport rep;
    rep.r_b_effective = r_b_eff;
    rep.delta_mu_term = snap_to_grid(std::min(1.0, delta_mu / (2.0 * r_b_eff)));
    rep.shell_term = snap_to_grid(std::min(0.5, best_s / (2.0 * r_b_eff)));
    rep.best_shell = best_j + 1;
    rep.score = (1.0 - rep.delta_mu_term) - rep.shell_term;
    return rep;
}

}  // namespace

IdSummary::IdSummary(std::vector<double> mean, std::size_t k, std::vector<double> shell_freq,
                     std::vector<double> shell_max_norm, double r_b_id, std::size_t m, NormKind norm_kind,
                     std::optional<std::vector<double>> center)
    : mean_(std::move(mean)),
      shell_freq_(std::move(shell_freq)),
      shell_max_norm_(std::move(shell_max_norm)),
      r_b_id_(r_b_id),
      m_(m),
      norm_kind_(norm_kind),
      center_(std::move(center)),
      partition_(checked_partition(k, r_b_id)) {
    if (mean_.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "summary mean must have dimension >= 1");
    }
    if (shell_freq_.size() != k || shell_max_norm_.size() != k) {
        throw Error(ErrorCode::DimensionMismatch, "shell arrays must have k = " + std::to_string(k) + " entries");
    }
    if (center_) {
        check_dim(center_->size(), mean_.size(), "center");
    }
    if (m_ == 0) {
        throw Error(ErrorCode::RangeError, "summary sample count must be >= 1");
    }
    auto all_finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!all_finite(mean_) || (center_ && !all_finite(*center_))) {
        throw Error(ErrorCode::InvalidValue, "summary vectors must be finite");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double f = shell_freq_[j];
        if (!(f >= 0.0 && f <= 1.0)) {
            throw Error(ErrorCode::RangeError, "shell frequency " + std::to_string(j + 1) + " outside [0, 1]");
        }
        const double mx = shell_max_norm_[j];
        if (!(mx >= 0.0 && mx <= partition_.radius(j + 1))) {
            throw Error(ErrorCode::RangeError, "shell max norm " + std::to_string(j + 1) + " outside its shell");
        }
        total += f;
    }
    if (std::fabs(total - 1.0) > kFreqSumTolerance) {
        throw Error(ErrorCode::RangeError, "shell frequencies sum to " + std::to_string(total) + ", expected 1");
    }
    if (norm(mean_, norm_kind_) > r_b_id_ * (1.0 + 1e-12)) {
        throw Error(ErrorCode::RangeError, "summary mean lies outside the ID ball");
    }
}

bool IdSummary::operator==(const IdSummary& other) const {
    return mean_ == other.mean_ && shell_freq_ == other.shell_freq_ && shell_max_norm_ == other.shell_max_norm_ &&
           r_b_id_ == other.r_b_id_ && m_ == other.m_ && norm_kind_ == other.norm_kind_ &&
           center_ == other.center_;
}

IdSummary fit(const FeatureMatrix& id_samples, std::size_t k, NormKind norm_kind,
              const std::optional<FeatureVector>& center) {
    if (id_samples.empty()) {
        throw Error(ErrorCode::EmptyInput, "fit needs at least one ID sample");
    }
    if (k == 0) {
        throw Error(ErrorCode::RangeError, "shell count k must be >= 1");
    }
    std::optional<std::vector<double>> c;
    if (center) {
        check_dim(center->dim(), id_samples.cols(), "center");
        c = center->values();
    }

    const std::size_t m = id_samples.rows();
    std::vector<double> norms(m);
    std::vector<double> scratch;
    for (std::size_t r = 0; r < m; ++r) {
        norms[r] = centered_norm(id_samples.row(r), c, norm_kind, scratch);
    }
    const double r_b = *std::max_element(norms.begin(), norms.end());
    const ShellPartition partition = checked_partition(k, r_b);

    std::vector<std::size_t> counts(k, 0);
    std::vector<double> max_norm(k, 0.0);
    for (double nr : norms) {
        const std::size_t j = *partition.shell_of_norm(nr) - 1;
        ++counts[j];
        max_norm[j] = std::max(max_norm[j], nr);
    }
    std::vector<double> freq(k);
    const double md = static_cast<double>(m);
    for (std::size_t j = 0; j < k; ++j) freq[j] = static_cast<double>(counts[j]) / md;

    std::vector<double> mean = centered_mean(id_samples, c);
    return IdSummary(std::move(mean), k, std::move(freq), std::move(max_norm), r_b, m, norm_kind, std::move(c));
}

ScoreReport compute_bound(const FeatureMatrix& plus_samples, const IdSummary& summary) {
    check_dim(plus_samples.cols(), summary.dim(), "plus samples");
    if (plus_samples.empty()) {
        throw Error(ErrorCode::EmptyInput, "compute_bound needs at least one plus sample");
    }
    const std::size_t k = summary.k();
    const NormKind kind = summary.norm_kind();
    const ShellPartition& partition = summary.partition();

    std::vector<std::size_t> counts(k, 0);
    std::vector<double> plus_max(k, 0.0);
    double r_b_eff = summary.r_b_id();
    std::vector<double> scratch;
    for (std::size_t r = 0; r < plus_samples.rows(); ++r) {
        const double nr = centered_norm(plus_samples.row(r), summary.center(), kind, scratch);
        r_b_eff = std::max(r_b_eff, nr);
        if (const auto shell = partition.shell_of_norm(nr)) {
            ++counts[*shell - 1];
            plus_max[*shell - 1] = std::max(plus_max[*shell - 1], nr);
        }
    }

    std::vector<double> diff = centered_mean(plus_samples, summary.center());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= summary.mean()[i];
    const double delta_mu = norm(diff, kind);

    const double d = static_cast<double>(plus_samples.rows());
    const auto& freq = summary.shell_freq();
    const auto& id_max = summary.shell_max_norm();
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const double r_a = std::max(id_max[j], plus_max[j]);
        const double s = (r_b_eff - r_a) * std::fabs(static_cast<double>(counts[j]) / d - freq[j]);
        if (s > best) {
            best = s;
            best_j = j;
        }
    }
    return finish_report(delta_mu, best, best_j, r_b_eff);
}

ScoreReport score(VectorView x, const IdSummary& summary) {
    check_dim(x.size(), summary.dim(), "sample");
    Norms nm{};
    switch (summary.norm_kind()) {
        case NormKind::L1: nm = fused_norms<NormKind::L1>(x, summary); break;
        case NormKind::L2: nm = fused_norms<NormKind::L2>(x, summary); break;
        case NormKind::Linf: nm = fused_norms<NormKind::Linf>(x, summary); break;
    }
    const double r_b_eff = std::max(summary.r_b_id(), nm.self);
    const auto shell = summary.partition().shell_of_norm(nm.self);
    // k is the shell count; an out-of-ball sample matches no shell index.
    const std::size_t k = summary.k();
    const std::size_t cand = shell ? *shell - 1 : k;
    const double* freq = summary.shell_freq().data();
    const double* id_max = summary.shell_max_norm().data();
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < k; ++j) {
        double s;
        if (j == cand) {
            s = (r_b_eff - std::max(id_max[j], nm.self)) * std::fabs(1.0 - freq[j]);
        } else {
            s = (r_b_eff - id_max[j]) * std::fabs(0.0 - freq[j]);
        }
        if (s > best) {
            best = s;
            best_j = j;
        }
    }
    return finish_report(nm.to_mu, best, best_j, r_b_eff);
}

std::vector<ScoreReport> score_batch(const FeatureMatrix& xs, const IdSummary& summary, unsigned threads) {
    check_dim(xs.cols(), summary.dim(), "batch");
    std::vector<ScoreReport> out(xs.rows());
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) out[r] = score(xs.row(r), summary);
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, xs.rows()));
    if (workers == 1) {
        run(0, xs.rows());
        return out;
    }
    const std::size_t chunk = (xs.rows() + workers - 1) / workers;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(xs.rows(), w * chunk);
            const std::size_t end = std::min(xs.rows(), begin + chunk);
            pool.emplace_back(run, begin, end);
        }
    }
    return out;
}

Decision classify(VectorView x, const IdSummary& summary, double threshold) {
    return score(x, summary).score >= threshold ? Decision::ID : Decision::OOD;
}

double score_eta1(VectorView x, const IdSummary& summary) {
    return 1.0 - score(x, summary).delta_mu_term;
}

double score_eta2(VectorView x, const IdSummary& summary) {
    return 1.0 - score(x, summary).shell_term;
}

FeatureVector contaminated_center(const FeatureMatrix& pool, std::size_t sample_count, std::uint64_t seed) {
    if (pool.empty()) {
        throw Error(ErrorCode::EmptyPool, "contaminated pool has no rows");
    }
    if (sample_count == 0 || sample_count > pool.rows()) {
        throw Error(ErrorCode::RangeError, "sample count " + std::to_string(sample_count) +
                                               " must be in [1, " + std::to_string(pool.rows()) + "]");
    }
    std::vector<std::size_t> all(pool.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> picked;
    picked.reserve(sample_count);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), sample_count, rng);

    std::vector<double> mean(pool.cols(), 0.0);
    for (std::size_t r : picked) {
        const VectorView row = pool.row(r);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= static_cast<double>(sample_count);
    return FeatureVector(std::move(mean));
}

}  // namespace oi
