#pragma once

#include "oi/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oi {

class SyntheticSpec;

namespace synth {

/// Axis-aligned box [lo, hi] with constant density.
struct UniformBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// N(mean, diag(sigma^2)) restricted to the standardized ball
/// ||(x - mean) / sigma||_2 <= radius.
struct TruncGaussBall {
    std::vector<double> mean;
    std::vector<double> sigma;
    double radius = 3.0;
};

/// Density 1 + sin(2 pi omega x) on [0, 1], integer omega >= 1.
struct Sine1d {
    int omega = 1;
};

struct Gauss1d {
    double mean = 0.0;
    double sigma = 1.0;
};

/// (1 - eps) * base + eps * contaminant.
struct HuberMixture {
    std::shared_ptr<const SyntheticSpec> base;
    std::shared_ptr<const SyntheticSpec> contaminant;
    double eps = 0.0;
};

using Params = std::variant<UniformBox, TruncGaussBall, Sine1d, HuberMixture, Gauss1d>;

}  // namespace synth

enum class SynthKind { UniformBox, TruncGaussBall, Sine1d, HuberMixture, Gauss1d };

std::string_view to_string(SynthKind kind) noexcept;

/// Parametric test distribution plus the seed its sampler starts from.
/// Immutable; the truncated-Gaussian normalizer is computed once at creation.
class SyntheticSpec {
public:
    static SyntheticSpec uniform_box(std::vector<double> lo, std::vector<double> hi, std::uint64_t seed = 0);
    static SyntheticSpec trunc_gauss_ball(std::vector<double> mean, std::vector<double> sigma, double radius = 3.0,
                                          std::uint64_t seed = 0);
    static SyntheticSpec sine_1d(int omega, std::uint64_t seed = 0);
    static SyntheticSpec gauss_1d(double mean, double sigma, std::uint64_t seed = 0);
    static SyntheticSpec huber_mixture(const SyntheticSpec& base, const SyntheticSpec& contaminant, double eps,
                                       std::uint64_t seed = 0);

    [[nodiscard]] SynthKind kind() const noexcept;
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const synth::Params& params() const noexcept { return params_; }
    /// P(standardized radius <= R) for trunc_gauss_ball, 1 otherwise.
    [[nodiscard]] double mass() const noexcept { return mass_; }

    [[nodiscard]] SyntheticSpec with_seed(std::uint64_t seed) const;

private:
    SyntheticSpec(synth::Params params, std::size_t dim, std::uint64_t seed, double mass);

    synth::Params params_;
    std::size_t dim_;
    std::uint64_t seed_;
    double mass_;
};

/// Seeded draws; identical spec and count give an identical matrix.
/// Throws BadSpec for count == 0.
FeatureMatrix sample(const SyntheticSpec& spec, std::size_t count);

/// Closed-form density; 0 outside the support. Throws DimensionMismatch.
double density(const SyntheticSpec& spec, VectorView x);

/// Draws one sample into out using the given engine.
using Sampler = std::function<void(std::mt19937_64&, std::span<double>)>;
using Density = std::function<double(VectorView)>;

Sampler sampler_of(const SyntheticSpec& spec);
Density density_of(const SyntheticSpec& spec);

/// Closed-form CDF of the sine_1d density.
double sine_cdf(int omega, double x) noexcept;

/// JSON form, e.g. {"kind":"uniform_box","lo":[0],"hi":[1],"seed":7}.
/// Mixtures nest their components under "base" and "contaminant".
SyntheticSpec parse_synth_spec(std::string_view json_text);
std::string to_json_text(const SyntheticSpec& spec);

}  // namespace oi
