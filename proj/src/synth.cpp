#include "oi/synth.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace oi {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void bad_spec(const std::string& what) { throw Error(ErrorCode::BadSpec, what); }

double uniform01(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

double standard_normal(std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

// P(chi_n <= radius), by composite Simpson on the chi density.
double chi_ball_mass(std::size_t n, double radius) {
    const double nd = static_cast<double>(n);
    const double log_c = std::log(2.0) - (nd / 2.0) * std::log(2.0) - std::lgamma(nd / 2.0);
    auto pdf = [&](double r) {
        if (r <= 0.0) return n == 1 ? std::exp(log_c) : 0.0;
        return std::exp(log_c + (nd - 1.0) * std::log(r) - 0.5 * r * r);
    };
    constexpr int kIntervals = 20000;
    const double h = radius / kIntervals;
    double acc = pdf(0.0) + pdf(radius);
    for (int i = 1; i < kIntervals; ++i) {
        acc += (i % 2 == 1 ? 4.0 : 2.0) * pdf(i * h);
    }
    return std::min(1.0, acc * h / 3.0);
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) bad_spec(std::string(what) + " must be finite");
    }
}

void draw(const SyntheticSpec& spec, std::mt19937_64& rng, std::span<double> out);

void draw_params(const synth::UniformBox& p, std::mt19937_64& rng, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.lo[i] + (p.hi[i] - p.lo[i]) * uniform01(rng);
}

void draw_params(const synth::TruncGaussBall& p, std::mt19937_64& rng, std::span<double> out) {
    const double r2 = p.radius * p.radius;
    for (;;) {
        double sq = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double z = standard_normal(rng);
            out[i] = z;
            sq += z * z;
        }
        if (sq <= r2) break;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.mean[i] + p.sigma[i] * out[i];
}

void draw_params(const synth::Sine1d& p, std::mt19937_64& rng, std::span<double> out) {
    const double u = uniform01(rng);
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (sine_cdf(p.omega, mid) < u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out[0] = 0.5 * (lo + hi);
}

void draw_params(const synth::Gauss1d& p, std::mt19937_64& rng, std::span<double> out) {
    out[0] = p.mean + p.sigma * standard_normal(rng);
}

void draw_params(const synth::HuberMixture& p, std::mt19937_64& rng, std::span<double> out) {
    // eps in {0, 1} skips the Bernoulli draw so the stream matches the component's.
    bool contaminated = p.eps >= 1.0;
    if (p.eps > 0.0 && p.eps < 1.0) {
        contaminated = uniform01(rng) < p.eps;
    }
    draw(contaminated ? *p.contaminant : *p.base, rng, out);
}

void draw(const SyntheticSpec& spec, std::mt19937_64& rng, std::span<double> out) {
    std::visit([&](const auto& p) { draw_params(p, rng, out); }, spec.params());
}

double density_params(const synth::UniformBox& p, VectorView x, double) {
    double volume = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < p.lo[i] || x[i] > p.hi[i]) return 0.0;
        volume *= p.hi[i] - p.lo[i];
    }
    return 1.0 / volume;
}

double density_params(const synth::TruncGaussBall& p, VectorView x, double mass) {
    double sq = 0.0;
    double log_det = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = (x[i] - p.mean[i]) / p.sigma[i];
        sq += z * z;
        log_det += std::log(p.sigma[i]);
    }
    if (sq > p.radius * p.radius) return 0.0;
    const double nd = static_cast<double>(x.size());
    const double log_pdf = -0.5 * sq - 0.5 * nd * std::log(2.0 * std::numbers::pi) - log_det;
    return std::exp(log_pdf) / mass;
}

double density_params(const synth::Sine1d& p, VectorView x, double) {
    const double v = x[0];
    if (v < 0.0 || v > 1.0) return 0.0;
    return 1.0 + std::sin(2.0 * std::numbers::pi * p.omega * v);
}

double density_params(const synth::Gauss1d& p, VectorView x, double) {
    const double z = (x[0] - p.mean) / p.sigma;
    return std::exp(-0.5 * z * z) / (p.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double density_params(const synth::HuberMixture& p, VectorView x, double) {
    return (1.0 - p.eps) * density(*p.base, x) + p.eps * density(*p.contaminant, x);
}

ordered_json spec_to_json(const SyntheticSpec& spec) {
    ordered_json j;
    j["kind"] = std::string(to_string(spec.kind()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, synth::UniformBox>) {
                j["lo"] = p.lo;
                j["hi"] = p.hi;
            } else if constexpr (std::is_same_v<T, synth::TruncGaussBall>) {
                j["mean"] = p.mean;
                j["sigma"] = p.sigma;
                j["radius"] = p.radius;
            } else if constexpr (std::is_same_v<T, synth::Sine1d>) {
                j["omega"] = p.omega;
            } else if constexpr (std::is_same_v<T, synth::Gauss1d>) {
                j["mean"] = p.mean;
                j["sigma"] = p.sigma;
            } else {
                j["eps"] = p.eps;
                j["base"] = spec_to_json(*p.base);
                j["contaminant"] = spec_to_json(*p.contaminant);
            }
        },
        spec.params());
    j["seed"] = spec.seed();
    return j;
}

template <typename T>
T field(const ordered_json& j, const char* key) {
    if (!j.contains(key)) bad_spec(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        bad_spec(std::string("field '") + key + "': " + e.what());
    }
}

SyntheticSpec spec_from_json(const ordered_json& j) {
    if (!j.is_object()) bad_spec("spec must be a JSON object");
    const auto kind = field<std::string>(j, "kind");
    const std::uint64_t seed = j.contains("seed") ? field<std::uint64_t>(j, "seed") : 0;
    if (kind == "uniform_box") {
        return SyntheticSpec::uniform_box(field<std::vector<double>>(j, "lo"), field<std::vector<double>>(j, "hi"),
                                          seed);
    }
    if (kind == "trunc_gauss_ball") {
        const double radius = j.contains("radius") ? field<double>(j, "radius") : 3.0;
        return SyntheticSpec::trunc_gauss_ball(field<std::vector<double>>(j, "mean"),
                                               field<std::vector<double>>(j, "sigma"), radius, seed);
    }
    if (kind == "sine_1d") {
        return SyntheticSpec::sine_1d(field<int>(j, "omega"), seed);
    }
    if (kind == "gauss_1d") {
        return SyntheticSpec::gauss_1d(field<double>(j, "mean"), field<double>(j, "sigma"), seed);
    }
    if (kind == "huber_mixture") {
        if (!j.contains("base") || !j.contains("contaminant")) bad_spec("mixture needs 'base' and 'contaminant'");
        return SyntheticSpec::huber_mixture(spec_from_json(j.at("base")), spec_from_json(j.at("contaminant")),
                                            field<double>(j, "eps"), seed);
    }
    bad_spec("unknown kind '" + kind + "'");
}

}  // namespace

std::string_view to_string(SynthKind kind) noexcept {
    switch (kind) {
        case SynthKind::UniformBox: return "uniform_box";
        case SynthKind::TruncGaussBall: return "trunc_gauss_ball";
        case SynthKind::Sine1d: return "sine_1d";
        case SynthKind::HuberMixture: return "huber_mixture";
        case SynthKind::Gauss1d: return "gauss_1d";
    }
    return "unknown";
}

SyntheticSpec::SyntheticSpec(synth::Params params, std::size_t dim, std::uint64_t seed, double mass)
    : params_(std::move(params)), dim_(dim), seed_(seed), mass_(mass) {}

SynthKind SyntheticSpec::kind() const noexcept { return static_cast<SynthKind>(params_.index()); }

SyntheticSpec SyntheticSpec::with_seed(std::uint64_t seed) const {
    SyntheticSpec copy = *this;
    copy.seed_ = seed;
    return copy;
}

SyntheticSpec SyntheticSpec::uniform_box(std::vector<double> lo, std::vector<double> hi, std::uint64_t seed) {
    if (lo.empty() || lo.size() != hi.size()) bad_spec("uniform_box needs lo and hi of equal, non-zero length");
    require_finite(lo, "lo");
    require_finite(hi, "hi");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] > lo[i])) bad_spec("uniform_box needs hi > lo in every dimension");
    }
    const std::size_t dim = lo.size();
    return SyntheticSpec(synth::UniformBox{std::move(lo), std::move(hi)}, dim, seed, 1.0);
}

SyntheticSpec SyntheticSpec::trunc_gauss_ball(std::vector<double> mean, std::vector<double> sigma, double radius,
                                              std::uint64_t seed) {
    if (mean.empty() || mean.size() != sigma.size()) bad_spec("trunc_gauss_ball needs mean and sigma of equal length");
    require_finite(mean, "mean");
    require_finite(sigma, "sigma");
    for (double s : sigma) {
        if (!(s > 0.0)) bad_spec("sigma entries must be positive");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) bad_spec("truncation radius must be positive");
    const std::size_t dim = mean.size();
    const double mass = chi_ball_mass(dim, radius);
    if (!(mass > 1e-6)) bad_spec("truncation ball holds almost no mass in this dimension");
    return SyntheticSpec(synth::TruncGaussBall{std::move(mean), std::move(sigma), radius}, dim, seed, mass);
}

SyntheticSpec SyntheticSpec::sine_1d(int omega, std::uint64_t seed) {
    if (omega < 1) bad_spec("sine_1d needs integer omega >= 1");
    return SyntheticSpec(synth::Sine1d{omega}, 1, seed, 1.0);
}

SyntheticSpec SyntheticSpec::gauss_1d(double mean, double sigma, std::uint64_t seed) {
    if (!std::isfinite(mean) || !(sigma > 0.0) || !std::isfinite(sigma)) bad_spec("gauss_1d needs finite mean, sigma > 0");
    return SyntheticSpec(synth::Gauss1d{mean, sigma}, 1, seed, 1.0);
}

SyntheticSpec SyntheticSpec::huber_mixture(const SyntheticSpec& base, const SyntheticSpec& contaminant, double eps,
                                           std::uint64_t seed) {
    if (!(eps >= 0.0 && eps <= 1.0)) bad_spec("huber eps must lie in [0, 1]");
    if (base.dim() != contaminant.dim()) bad_spec("mixture components must share a dimension");
    return SyntheticSpec(synth::HuberMixture{std::make_shared<const SyntheticSpec>(base),
                                             std::make_shared<const SyntheticSpec>(contaminant), eps},
                         base.dim(), seed, 1.0);
}

double sine_cdf(int omega, double x) noexcept {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double w = 2.0 * std::numbers::pi * omega;
    return x + (1.0 - std::cos(w * x)) / w;
}

FeatureMatrix sample(const SyntheticSpec& spec, std::size_t count) {
    if (count == 0) bad_spec("sample count must be >= 1");
    std::mt19937_64 rng(spec.seed());
    std::vector<double> data(count * spec.dim());
    for (std::size_t r = 0; r < count; ++r) {
        draw(spec, rng, std::span<double>(data).subspan(r * spec.dim(), spec.dim()));
    }
    return FeatureMatrix(count, spec.dim(), std::move(data));
}

double density(const SyntheticSpec& spec, VectorView x) {
    if (x.size() != spec.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "density point has dimension " + std::to_string(x.size()) +
                                                      ", spec has " + std::to_string(spec.dim()));
    }
    return std::visit([&](const auto& p) { return density_params(p, x, spec.mass()); }, spec.params());
}

Sampler sampler_of(const SyntheticSpec& spec) {
    return [spec](std::mt19937_64& rng, std::span<double> out) { draw(spec, rng, out); };
}

Density density_of(const SyntheticSpec& spec) {
    return [spec](VectorView x) { return density(spec, x); };
}

SyntheticSpec parse_synth_spec(std::string_view json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        bad_spec(std::string("invalid JSON: ") + e.what());
    }
    return spec_from_json(j);
}

std::string to_json_text(const SyntheticSpec& spec) { return spec_to_json(spec).dump(); }

}  // namespace oi
