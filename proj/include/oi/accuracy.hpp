#pragma once

#include "oi/core.hpp"
#include "oi/detector.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace oi {

struct AccuracyBoundInput {
    double p = 1.0;              ///< accuracy on the reference distribution D
    double q = 0.0;              ///< accuracy on the shifted part D* \ D
    double overlap_bound = 1.0;  ///< bound value between D and D*, in [-0.5, 1]
    std::optional<double> sigma;  ///< clean fraction of a D / poisoned mixture
};

/// (p - q) * clamp(overlap_bound, 0, 1) + q. Throws RangeError on out-of-range inputs.
double accuracy_upper_bound(const AccuracyBoundInput& input);

/// p * (1 - (1 - sigma) * delta_mu_term - (1 - sigma) * shell_term), with both
/// terms taken from a clean-vs-poisoned bound evaluation. Throws RangeError.
double backdoor_mixture_bound(double p, double sigma, double delta_mu_term, double shell_term);

using Classifier = std::function<int(VectorView)>;

struct LabeledSamples {
    FeatureMatrix x;
    std::vector<int> labels;
};

/// Measured accuracy of a classifier on labeled samples; throws EmptyInput or
/// DimensionMismatch (label count).
double measured_accuracy(const Classifier& classifier, const LabeledSamples& data);

struct BoundCheck {
    double acc = 0.0;    ///< measured accuracy on D*
    double p = 0.0;      ///< measured accuracy on D
    double q = 0.0;      ///< measured accuracy on the shifted rows of D* (0 if none)
    double overlap_bound = 0.0;
    double bound = 0.0;  ///< accuracy_upper_bound(p, q, overlap_bound)
    bool holds = false;  ///< acc <= bound + kAccuracySlack
};

inline constexpr double kAccuracySlack = 0.02;

/// Measures p on D, acc on D*, q on the rows of D* flagged as shifted, fits a
/// summary on D and bounds acc with compute_bound(D*, summary).
BoundCheck verify_bound_empirically(const Classifier& classifier, const LabeledSamples& d,
                                    const LabeledSamples& dstar, const std::vector<bool>& dstar_shifted,
                                    std::size_t k = kDefaultShells, NormKind norm_kind = NormKind::L2);

/// Synthetic backdoor task: two Gaussian classes separated along axis 0, and a
/// trigger that adds `trigger_shift` to axis 1 of class-0 samples. The
/// backdoored classifier predicts class 1 whenever the trigger is present, so
/// its accuracy on poisoned samples is exactly 0.
struct BackdoorScenario {
    std::size_t dim = 8;
    double class_gap = 4.0;
    double trigger_shift = 8.0;
    std::size_t train_count = 4000;
    std::size_t test_count = 4000;
    std::uint64_t seed = 1;

    [[nodiscard]] Classifier classifier() const;
    [[nodiscard]] LabeledSamples clean(std::size_t count, std::uint64_t stream) const;
    [[nodiscard]] LabeledSamples poisoned(std::size_t count, std::uint64_t stream) const;
};

struct SigmaPoint {
    double sigma = 0.0;
    double acc = 0.0;
    double p = 0.0;
    double q = 0.0;
    double eq8_bound = 0.0;   ///< general domain-shift bound against the D* mixture
    double eq10_bound = 0.0;  ///< mixture bound from clean-vs-poisoned terms
    bool holds = false;       ///< acc <= min(eq8, eq10) + kAccuracySlack
};

/// Evaluates both bounds at each clean fraction sigma of the test mixture
/// D* = sigma D + (1 - sigma) D^p.
std::vector<SigmaPoint> sigma_sweep(const BackdoorScenario& scenario, const std::vector<double>& sigmas,
                                    std::size_t k = kDefaultShells, NormKind norm_kind = NormKind::L2);

/// 11 evenly spaced values 0, 0.1, ..., 1.
std::vector<double> default_sigma_grid();

}  // namespace oi
