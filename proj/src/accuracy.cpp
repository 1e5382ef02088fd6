#include "oi/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace oi {

namespace {

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::RangeError, std::string(what) + " = " + std::to_string(v) + " is outside [0, 1]");
    }
}

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

double accuracy_upper_bound(const AccuracyBoundInput& input) {
    require_unit(input.p, "p");
    require_unit(input.q, "q");
    if (input.sigma) require_unit(*input.sigma, "sigma");
    if (!(input.overlap_bound >= -0.5 && input.overlap_bound <= 1.0)) {
        throw Error(ErrorCode::RangeError, "overlap bound " + std::to_string(input.overlap_bound) +
                                               " is outside [-0.5, 1]");
    }
    const double o = std::clamp(input.overlap_bound, 0.0, 1.0);
    return o * input.p + (1.0 - o) * input.q;
}

double backdoor_mixture_bound(double p, double sigma, double delta_mu_term, double shell_term) {
    require_unit(p, "p");
    require_unit(sigma, "sigma");
    require_unit(delta_mu_term, "delta_mu_term");
    if (!(shell_term >= 0.0 && shell_term <= 0.5)) {
        throw Error(ErrorCode::RangeError, "shell_term = " + std::to_string(shell_term) + " is outside [0, 0.5]");
    }
    return p * std::max(0.0, 1.0 - (1.0 - sigma) * delta_mu_term - (1.0 - sigma) * shell_term);
}

double measured_accuracy(const Classifier& classifier, const LabeledSamples& data) {
    if (data.x.empty()) {
        throw Error(ErrorCode::EmptyInput, "accuracy needs at least one labeled sample");
    }
    if (data.labels.size() != data.x.rows()) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(data.labels.size()) + " labels for " +
                                                      std::to_string(data.x.rows()) + " samples");
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.x.rows(); ++r) {
        if (classifier(data.x.row(r)) == data.labels[r]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.x.rows());
}

BoundCheck verify_bound_empirically(const Classifier& classifier, const LabeledSamples& d, const LabeledSamples& dstar,
                                    const std::vector<bool>& dstar_shifted, std::size_t k, NormKind norm_kind) {
    if (dstar_shifted.size() != dstar.x.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "shift mask length differs from the D* row count");
    }
    BoundCheck out;
    out.p = measured_accuracy(classifier, d);
    out.acc = measured_accuracy(classifier, dstar);

    LabeledSamples shifted{FeatureMatrix(dstar.x.cols()), {}};
    for (std::size_t r = 0; r < dstar.x.rows(); ++r) {
        if (!dstar_shifted[r]) continue;
        shifted.x.append(dstar.x.row(r));
        shifted.labels.push_back(dstar.labels[r]);
    }
    out.q = shifted.x.empty() ? 0.0 : measured_accuracy(classifier, shifted);

    const IdSummary summary = fit(d.x, k, norm_kind);
    out.overlap_bound = compute_bound(dstar.x, summary).score;
    out.bound = accuracy_upper_bound({out.p, out.q, out.overlap_bound, std::nullopt});
    out.holds = out.acc <= out.bound + kAccuracySlack;
    return out;
}

Classifier BackdoorScenario::classifier() const {
    const double trigger_cut = trigger_shift / 2.0;
    return [trigger_cut](VectorView x) {
        if (x.size() > 1 && x[1] > trigger_cut) return 1;
        return x[0] > 0.0 ? 1 : 0;
    };
}

LabeledSamples BackdoorScenario::clean(std::size_t count, std::uint64_t stream) const {
    if (dim < 2) {
        throw Error(ErrorCode::BadSpec, "backdoor scenario needs dim >= 2");
    }
    std::mt19937_64 rng = stream_engine(seed, stream);
    std::normal_distribution<double> normal;
    std::bernoulli_distribution coin(0.5);
    LabeledSamples out{FeatureMatrix(dim), {}};
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < count; ++i) {
        const int label = coin(rng) ? 1 : 0;
        for (double& v : row) v = normal(rng);
        row[0] += label == 1 ? class_gap / 2.0 : -class_gap / 2.0;
        out.x.append(row);
        out.labels.push_back(label);
    }
    return out;
}

LabeledSamples BackdoorScenario::poisoned(std::size_t count, std::uint64_t stream) const {
    if (dim < 2) {
        throw Error(ErrorCode::BadSpec, "backdoor scenario needs dim >= 2");
    }
    std::mt19937_64 rng = stream_engine(seed, stream);
    std::normal_distribution<double> normal;
    LabeledSamples out{FeatureMatrix(dim), {}};
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < count; ++i) {
        for (double& v : row) v = normal(rng);
        row[0] -= class_gap / 2.0;
        row[1] += trigger_shift;
        out.x.append(row);
        out.labels.push_back(0);
    }
    return out;
}

std::vector<SigmaPoint> sigma_sweep(const BackdoorScenario& scenario, const std::vector<double>& sigmas,
                                    std::size_t k, NormKind norm_kind) {
    const Classifier clf = scenario.classifier();
    const LabeledSamples train = scenario.clean(scenario.train_count, 0);
    const LabeledSamples clean_test = scenario.clean(scenario.test_count, 1);
    const LabeledSamples poison_test = scenario.poisoned(scenario.test_count, 2);

    // Mixture-bound terms come from clean versus fully poisoned samples.
    const IdSummary clean_summary = fit(train.x, k, norm_kind);
    const ScoreReport mix = compute_bound(poison_test.x, clean_summary);

    std::vector<SigmaPoint> out;
    out.reserve(sigmas.size());
    for (double sigma : sigmas) {
        require_unit(sigma, "sigma");
        const auto n_clean = static_cast<std::size_t>(
            std::llround(sigma * static_cast<double>(scenario.test_count)));
        const std::size_t n_poison = scenario.test_count - n_clean;

        LabeledSamples dstar{FeatureMatrix(scenario.dim), {}};
        std::vector<bool> shifted;
        for (std::size_t r = 0; r < n_clean; ++r) {
            dstar.x.append(clean_test.x.row(r));
            dstar.labels.push_back(clean_test.labels[r]);
            shifted.push_back(false);
        }
        for (std::size_t r = 0; r < n_poison; ++r) {
            dstar.x.append(poison_test.x.row(r));
            dstar.labels.push_back(poison_test.labels[r]);
            shifted.push_back(true);
        }

        const BoundCheck check = verify_bound_empirically(clf, train, dstar, shifted, k, norm_kind);
        SigmaPoint pt;
        pt.sigma = sigma;
        pt.acc = check.acc;
        pt.p = check.p;
        pt.q = check.q;
        pt.eq8_bound = check.bound;
        pt.eq10_bound = backdoor_mixture_bound(check.p, sigma, mix.delta_mu_term, mix.shell_term);
        pt.holds = pt.acc <= std::min(pt.eq8_bound, pt.eq10_bound) + kAccuracySlack;
        out.push_back(pt);
    }
    return out;
}

std::vector<double> default_sigma_grid() {
    std::vector<double> grid(11);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 10.0;
    return grid;
}

}  // namespace oi
