#include "cli.hpp"

#include "bench.hpp"
#include "oi/accuracy.hpp"
#include "oi/detector.hpp"
#include "oi/estimator.hpp"
#include "oi/io.hpp"
#include "oi/metrics.hpp"
#include "oi/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <sstream>

namespace oi::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Collects what a command read and resolved, then writes <out>.manifest.json.
class Manifest {
public:
    explicit Manifest(std::string command) { doc_["command"] = std::move(command); }

    template <typename T>
    void param(const std::string& key, const T& value) {
        doc_["params"][key] = value;
    }
    void seed(std::uint64_t s) { doc_["seed"] = s; }
    void input(const std::string& role, const std::string& path) {
        doc_["inputs"][role] = {{"path", path}, {"sha256", sha256_file(path)}};
    }
    void output(const std::string& path) { doc_["outputs"].push_back(path); }

    void write(const std::string& out_path) {
        if (!doc_.contains("params")) doc_["params"] = ordered_json::object();
        if (!doc_.contains("seed")) doc_["seed"] = nullptr;
        if (!doc_.contains("inputs")) doc_["inputs"] = ordered_json::object();
        doc_["tool"] = "oi";
        doc_["tool_version"] = std::string(kToolVersion);
        write_file(out_path + ".manifest.json", doc_.dump(2) + "\n");
    }

private:
    ordered_json doc_;
};

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw Error(ErrorCode::RangeError, "'" + item + "' in list '" + text + "' is not a non-negative integer");
        }
    }
    if (out.empty()) throw Error(ErrorCode::RangeError, "empty list '" + text + "'");
    return out;
}

struct MatrixArgs {
    std::string format = "csv";
    bool header = false;
};

void add_matrix_flags(CLI::App* cmd, MatrixArgs& m) {
    cmd->add_option("--format", m.format, "Matrix format: csv or f32le")->capture_default_str();
    cmd->add_flag("--header", m.header, "CSV input starts with a header row");
}

FeatureMatrix load_matrix(const std::string& path, const MatrixArgs& m) {
    return read_matrix(path, parse_matrix_format(m.format), m.header);
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string out;
    std::size_t k = kDefaultShells;
    std::string norm = "l2";
    std::string center = "none";
    MatrixArgs matrix;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    Manifest man("fit");
    const FeatureMatrix id = load_matrix(a.input, a.matrix);
    man.input("input", a.input);
    const NormKind kind = parse_norm_kind(a.norm);
    if (!k_in_recommended_range(a.k)) {
        err << "warning: k outside recommended [" << kRecommendedShellsMin << "," << kRecommendedShellsMax
            << "] (k = " << a.k << ")\n";
    }

    std::optional<FeatureVector> center;
    ordered_json center_doc = "none";
    if (a.center.rfind("contaminated:", 0) == 0) {
        // contaminated:<pool>,<count>,<seed>; the pool path may itself hold commas.
        const std::string spec = a.center.substr(13);
        const auto c2 = spec.rfind(',');
        const auto c1 = c2 == std::string::npos || c2 == 0 ? std::string::npos : spec.rfind(',', c2 - 1);
        if (c1 == std::string::npos) {
            throw Error(ErrorCode::RangeError, "--center contaminated:<pool>,<count>,<seed> expected");
        }
        const std::string pool_path = spec.substr(0, c1);
        const auto count = parse_size_list(spec.substr(c1 + 1, c2 - c1 - 1)).front();
        const auto seed = parse_size_list(spec.substr(c2 + 1)).front();
        const FeatureMatrix pool = load_matrix(pool_path, a.matrix);
        man.input("center_pool", pool_path);
        man.seed(seed);
        center = contaminated_center(pool, count, seed);
        center_doc = {{"kind", "contaminated"}, {"pool", pool_path}, {"count", count}, {"seed", seed}};
    } else if (a.center != "none") {
        const FeatureMatrix c = load_matrix(a.center, a.matrix);
        if (c.rows() != 1) {
            throw Error(ErrorCode::DimensionMismatch, "center file must hold exactly one row");
        }
        man.input("center", a.center);
        center = FeatureVector(std::vector<double>(c.row(0).begin(), c.row(0).end()));
        center_doc = {{"kind", "file"}, {"path", a.center}};
    }

    const IdSummary summary = fit(id, a.k, kind, center);
    save_summary(a.out, summary);
    man.param("k", a.k);
    man.param("norm", std::string(to_string(kind)));
    man.param("format", a.matrix.format);
    man.param("header", a.matrix.header);
    man.param("center", center_doc);
    man.output(a.out);
    man.write(a.out);
    out << "fit: m=" << summary.m() << " dim=" << summary.dim() << " k=" << summary.k()
        << " r_B_id=" << format_double(summary.r_b_id()) << "\n";
    return kExitOk;
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
    std::string summary;
    std::string input;
    std::string out;
    std::optional<double> threshold;
    unsigned threads = 1;
    MatrixArgs matrix;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
    Manifest man("score");
    const IdSummary summary = load_summary(a.summary);
    man.input("summary", a.summary);
    const FeatureMatrix xs = load_matrix(a.input, a.matrix);
    man.input("input", a.input);
    const std::vector<ScoreReport> reports = score_batch(xs, summary, a.threads);
    std::optional<std::vector<Decision>> labels;
    if (a.threshold) {
        labels.emplace();
        for (const ScoreReport& r : reports) labels->push_back(r.score >= *a.threshold ? Decision::ID : Decision::OOD);
        man.param("threshold", *a.threshold);
    } else {
        man.param("threshold", nullptr);
    }
    write_scores(a.out, reports, labels);
    man.param("format", a.matrix.format);
    man.param("header", a.matrix.header);
    man.output(a.out);
    man.write(a.out);
    out << "score: " << reports.size() << " samples\n";
    return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string id_scores;
    std::string ood_scores;
    std::string out;
    std::string positive = "ood";
    std::string histograms;
    std::size_t bins = 50;
};

std::string histogram_csv(const std::vector<double>& id, const std::vector<double>& ood, std::size_t bins) {
    double lo = std::min(*std::min_element(id.begin(), id.end()), *std::min_element(ood.begin(), ood.end()));
    double hi = std::max(*std::max_element(id.begin(), id.end()), *std::max_element(ood.begin(), ood.end()));
    if (!(hi > lo)) hi = lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> hid(bins, 0);
    std::vector<std::size_t> hood(bins, 0);
    auto bin_of = [&](double v) {
        const auto b = static_cast<std::size_t>((v - lo) / width);
        return std::min(b, bins - 1);
    };
    for (double v : id) ++hid[bin_of(v)];
    for (double v : ood) ++hood[bin_of(v)];
    std::string csv = "bin_lo,bin_hi,id_count,ood_count\n";
    for (std::size_t b = 0; b < bins; ++b) {
        const double blo = lo + static_cast<double>(b) * width;
        const double bhi = b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width;
        csv += format_double(blo) + ',' + format_double(bhi) + ',' + std::to_string(hid[b]) + ',' +
               std::to_string(hood[b]) + '\n';
    }
    return csv;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    Manifest man("eval");
    const std::vector<double> id = read_score_list(a.id_scores);
    man.input("id_scores", a.id_scores);
    const std::vector<double> ood = read_score_list(a.ood_scores);
    man.input("ood_scores", a.ood_scores);
    PositiveClass positive;
    if (a.positive == "ood") {
        positive = PositiveClass::OOD;
    } else if (a.positive == "id") {
        positive = PositiveClass::ID;
    } else {
        throw Error(ErrorCode::RangeError, "--aupr-positive must be ood or id");
    }
    const MetricsReport rep = evaluate(id, ood, positive);
    write_file(a.out, metrics_json_text(rep));
    man.param("aupr_positive", a.positive);
    man.output(a.out);
    if (!a.histograms.empty()) {
        if (a.bins == 0) throw Error(ErrorCode::RangeError, "--bins must be >= 1");
        write_file(a.histograms, histogram_csv(id, ood, a.bins));
        man.param("bins", a.bins);
        man.output(a.histograms);
    }
    man.write(a.out);
    out << "auroc=" << format_double(rep.auroc) << " tpr95=" << format_double(rep.tpr95)
        << " aupr=" << format_double(rep.aupr) << "\n";
    return kExitOk;
}

// ---- estimate-oi -----------------------------------------------------------

struct EstimateArgs {
    std::string a;
    std::string b;
    std::string out;
    std::size_t k = kDefaultShells;
    std::string norm = "l2";
    bool center = true;
    std::string family = "balls";
    MatrixArgs matrix;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
    Manifest man("estimate-oi");
    const FeatureMatrix ma = load_matrix(a.a, a.matrix);
    man.input("a", a.a);
    const FeatureMatrix mb = load_matrix(a.b, a.matrix);
    man.input("b", a.b);
    ConditionFamily family;
    if (a.family == "balls") {
        family = ConditionFamily::Balls;
    } else if (a.family == "shells") {
        family = ConditionFamily::Shells;
    } else {
        throw Error(ErrorCode::RangeError, "--family must be balls or shells");
    }
    const NormKind kind = parse_norm_kind(a.norm);
    const OiEstimate est = estimate_oi(ma, mb, a.k, kind, a.center, family);
    ordered_json doc;
    doc["eta_bar_prime"] = est.value;
    doc["r_prime"] = est.r_prime;
    try {
        doc["cohen_d"] = cohen_d_oi(ma, mb).value;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVariance) throw;
        doc["cohen_d"] = nullptr;
    }
    write_file(a.out, doc.dump(2) + "\n");
    man.param("k", a.k);
    man.param("norm", std::string(to_string(kind)));
    man.param("center_merged_mean", a.center);
    man.param("family", a.family);
    man.param("format", a.matrix.format);
    man.param("header", a.matrix.header);
    man.output(a.out);
    man.write(a.out);
    out << "eta_bar_prime=" << format_double(est.value) << "\n";
    return kExitOk;
}

// ---- accuracy-bound --------------------------------------------------------

struct AccuracyArgs {
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> sigma;
    std::optional<double> overlap;
    std::string clean;
    std::string shifted;
    std::size_t k = kDefaultShells;
    std::string norm = "l2";
    bool sweep = false;
    std::uint64_t seed = 1;
    std::string out;
    MatrixArgs matrix;
};

int cmd_accuracy(const AccuracyArgs& a, std::ostream& out) {
    Manifest man("accuracy-bound");
    const NormKind kind = parse_norm_kind(a.norm);
    man.param("k", a.k);
    man.param("norm", std::string(to_string(kind)));
    ordered_json doc;

    if (a.sweep) {
        BackdoorScenario scenario;
        scenario.seed = a.seed;
        man.seed(a.seed);
        ordered_json rows = ordered_json::array();
        bool all = true;
        for (const SigmaPoint& pt : sigma_sweep(scenario, default_sigma_grid(), a.k, kind)) {
            rows.push_back({{"sigma", pt.sigma},
                            {"acc", pt.acc},
                            {"p", pt.p},
                            {"q", pt.q},
                            {"eq8_bound", pt.eq8_bound},
                            {"eq10_bound", pt.eq10_bound},
                            {"holds", pt.holds}});
            all = all && pt.holds;
        }
        doc["sweep"] = rows;
        doc["all_hold"] = all;
        man.param("mode", "sweep");
        out << "sigma sweep: " << (all ? "bound holds at every sigma" : "bound violated") << "\n";
    } else {
        if (!a.p) throw Error(ErrorCode::RangeError, "--p is required unless --sweep is given");
        const double q = a.q.value_or(0.0);
        double overlap = 0.0;
        std::optional<ScoreReport> terms;
        if (!a.clean.empty() || !a.shifted.empty()) {
            if (a.clean.empty() || a.shifted.empty()) {
                throw Error(ErrorCode::RangeError, "--clean and --shifted must be given together");
            }
            const FeatureMatrix clean = load_matrix(a.clean, a.matrix);
            man.input("clean", a.clean);
            const FeatureMatrix shifted = load_matrix(a.shifted, a.matrix);
            man.input("shifted", a.shifted);
            terms = compute_bound(shifted, fit(clean, a.k, kind));
            overlap = terms->score;
            doc["delta_mu_term"] = terms->delta_mu_term;
            doc["shell_term"] = terms->shell_term;
        } else if (a.overlap) {
            overlap = *a.overlap;
        } else {
            throw Error(ErrorCode::RangeError, "give --overlap or both --clean and --shifted");
        }
        doc["p"] = *a.p;
        doc["q"] = q;
        doc["overlap_bound"] = overlap;
        const double eq8 = accuracy_upper_bound({*a.p, q, overlap, a.sigma});
        doc["eq8_bound"] = eq8;
        if (a.sigma) {
            if (!terms) throw Error(ErrorCode::RangeError, "--sigma needs --clean and --shifted (poisoned) samples");
            doc["sigma"] = *a.sigma;
            doc["eq10_bound"] = backdoor_mixture_bound(*a.p, *a.sigma, terms->delta_mu_term, terms->shell_term);
        }
        man.param("mode", "direct");
        man.param("p", *a.p);
        man.param("q", q);
        if (a.sigma) man.param("sigma", *a.sigma);
        if (a.overlap) man.param("overlap", *a.overlap);
        out << "eq8_bound=" << format_double(eq8) << "\n";
    }
    write_file(a.out, doc.dump(2) + "\n");
    man.output(a.out);
    man.write(a.out);
    return kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string spec;
    std::size_t count = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    Manifest man("synth");
    std::string text = a.spec;
    if (!text.empty() && text.front() == '@') {
        man.input("spec", text.substr(1));
        text = read_file(text.substr(1));
    }
    SyntheticSpec spec = parse_synth_spec(text);
    if (a.seed) spec = spec.with_seed(*a.seed);
    const FeatureMatrix m = sample(spec, a.count);
    write_matrix(a.out, m, parse_matrix_format(a.format));
    man.param("spec", ordered_json::parse(to_json_text(spec)));
    man.param("count", a.count);
    man.param("format", a.format);
    man.seed(spec.seed());
    man.output(a.out);
    man.write(a.out);
    out << "synth: " << m.rows() << "x" << m.cols() << "\n";
    return kExitOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
    std::string dims = "10,100,500,1000,2000";
    std::string k_sweep = "100,200,500,1000";
    std::size_t fixed_k = 100;
    std::size_t fixed_dim = 10;
    std::size_t samples = 10000;
    std::size_t warmup = 1000;
    std::size_t runs = 5;
    std::uint64_t seed = 1;
    std::string norm = "l2";
    std::string out = "timing.json";
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    Manifest man("bench");
    bench::Config cfg;
    cfg.dims = parse_size_list(a.dims);
    cfg.k_sweep = parse_size_list(a.k_sweep);
    cfg.fixed_k = a.fixed_k;
    cfg.fixed_dim = a.fixed_dim;
    cfg.samples = a.samples;
    cfg.warmup = a.warmup;
    cfg.runs = a.runs;
    cfg.seed = a.seed;
    cfg.norm_kind = parse_norm_kind(a.norm);
    if (cfg.samples < cfg.chunk || cfg.runs == 0) {
        throw Error(ErrorCode::RangeError, "--samples must be >= 100 and --runs >= 1");
    }
    const bench::Result r = bench::run(cfg);
    write_file(a.out, bench::result_json_text(r, cfg));
    man.param("dims", cfg.dims);
    man.param("k_sweep", cfg.k_sweep);
    man.param("fixed_k", cfg.fixed_k);
    man.param("fixed_dim", cfg.fixed_dim);
    man.param("samples", cfg.samples);
    man.param("warmup", cfg.warmup);
    man.param("runs", cfg.runs);
    man.param("norm", std::string(to_string(cfg.norm_kind)));
    man.seed(cfg.seed);
    man.output(a.out);
    man.write(a.out);
    out << "bench: dim ratio " << format_double(r.dim_ratio) << ", k-sweep R^2 " << format_double(r.k_r2) << "\n";
    return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::RaggedRows:
        case ErrorCode::BadMagic: return kExitParse;
        case ErrorCode::DimensionMismatch: return kExitDimension;
        case ErrorCode::SchemaVersionMismatch: return kExitSchema;
        case ErrorCode::RangeError:
        case ErrorCode::BadSpec:
        case ErrorCode::InvalidValue: return kExitRange;
        case ErrorCode::IoError: return kExitIo;
        case ErrorCode::AllZeroNorms:
        case ErrorCode::ZeroVariance:
        case ErrorCode::EmptyInput:
        case ErrorCode::NotNormalized:
        case ErrorCode::EmptyPool: return kExitNumeric;
    }
    return kExitRange;
}

std::string sha256_file(const std::string& path) {
    const std::string bytes = read_file(path);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 failed for '" + path + "'");
    }
    std::string hex;
    hex.reserve(2 * len);
    static constexpr char kDigits[] = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kDigits[md[i] >> 4]);
        hex.push_back(kDigits[md[i] & 0xF]);
    }
    return hex;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Overlap-index OOD detector", "oi"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit an ID summary from samples");
    fit_cmd->add_option("--input", fit_args.input, "ID samples")->required();
    fit_cmd->add_option("--out", fit_args.out, "Summary JSON to write")->required();
    fit_cmd->add_option("--k", fit_args.k, "Shell count")->capture_default_str();
    fit_cmd->add_option("--norm", fit_args.norm, "l1, l2 or linf")->capture_default_str();
    fit_cmd->add_option("--center", fit_args.center, "none | <file> | contaminated:<pool>,<count>,<seed>")
        ->capture_default_str();
    add_matrix_flags(fit_cmd, fit_args.matrix);

    ScoreArgs score_args;
    auto* score_cmd = app.add_subcommand("score", "Score samples against a summary");
    score_cmd->add_option("--summary", score_args.summary)->required();
    score_cmd->add_option("--input", score_args.input)->required();
    score_cmd->add_option("--out", score_args.out, "Score CSV to write")->required();
    score_cmd->add_option("--threshold", score_args.threshold, "Adds an ID/OOD label column (score >= T is ID)");
    score_cmd->add_option("--threads", score_args.threads)->capture_default_str()->check(CLI::Range(1u, 1024u));
    add_matrix_flags(score_cmd, score_args.matrix);

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "AUROC, TPR95 and AUPR from two score files");
    eval_cmd->add_option("--id-scores", eval_args.id_scores)->required();
    eval_cmd->add_option("--ood-scores", eval_args.ood_scores)->required();
    eval_cmd->add_option("--out", eval_args.out, "Metrics JSON to write")->required();
    eval_cmd->add_option("--aupr-positive", eval_args.positive, "ood or id")->capture_default_str();
    eval_cmd->add_option("--emit-histograms", eval_args.histograms, "Histogram CSV to write");
    eval_cmd->add_option("--bins", eval_args.bins)->capture_default_str();

    EstimateArgs est_args;
    auto* est_cmd = app.add_subcommand("estimate-oi", "Estimate the overlap index of two sample sets");
    est_cmd->add_option("--a", est_args.a)->required();
    est_cmd->add_option("--b", est_args.b)->required();
    est_cmd->add_option("--out", est_args.out, "Estimate JSON to write")->required();
    est_cmd->add_option("--k", est_args.k)->capture_default_str();
    est_cmd->add_option("--norm", est_args.norm)->capture_default_str();
    est_cmd->add_flag("--center-merged-mean,!--no-center-merged-mean", est_args.center,
                      "Recentre both sets on their merged mean (default on)");
    est_cmd->add_option("--family", est_args.family, "balls or shells")->capture_default_str();
    add_matrix_flags(est_cmd, est_args.matrix);

    AccuracyArgs acc_args;
    auto* acc_cmd = app.add_subcommand("accuracy-bound", "Accuracy upper bounds under distribution shift");
    acc_cmd->add_option("--p", acc_args.p, "Accuracy on D");
    acc_cmd->add_option("--q", acc_args.q, "Accuracy on the shifted part (default 0)");
    acc_cmd->add_option("--sigma", acc_args.sigma, "Clean fraction for the backdoor mixture bound");
    acc_cmd->add_option("--overlap", acc_args.overlap, "Precomputed bound value between D and D*");
    acc_cmd->add_option("--clean", acc_args.clean, "Samples of D");
    acc_cmd->add_option("--shifted", acc_args.shifted, "Samples of D* (or poisoned samples with --sigma)");
    acc_cmd->add_option("--k", acc_args.k)->capture_default_str();
    acc_cmd->add_option("--norm", acc_args.norm)->capture_default_str();
    acc_cmd->add_flag("--sweep", acc_args.sweep, "Run the synthetic backdoor sigma sweep");
    acc_cmd->add_option("--seed", acc_args.seed)->capture_default_str();
    acc_cmd->add_option("--out", acc_args.out, "Report JSON to write")->required();
    add_matrix_flags(acc_cmd, acc_args.matrix);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Draw samples from a synthetic distribution");
    synth_cmd->add_option("--spec", synth_args.spec, "JSON spec, or @file")->required();
    synth_cmd->add_option("--count", synth_args.count)->required();
    synth_cmd->add_option("--seed", synth_args.seed, "Overrides the spec seed");
    synth_cmd->add_option("--out", synth_args.out)->required();
    synth_cmd->add_option("--format", synth_args.format)->capture_default_str();

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Per-sample scoring latency sweeps");
    bench_cmd->add_option("--dims", bench_args.dims)->capture_default_str();
    bench_cmd->add_option("--k-sweep", bench_args.k_sweep)->capture_default_str();
    bench_cmd->add_option("--fixed-k", bench_args.fixed_k)->capture_default_str();
    bench_cmd->add_option("--fixed-dim", bench_args.fixed_dim)->capture_default_str();
    bench_cmd->add_option("--samples", bench_args.samples)->capture_default_str();
    bench_cmd->add_option("--warmup", bench_args.warmup)->capture_default_str();
    bench_cmd->add_option("--runs", bench_args.runs)->capture_default_str();
    bench_cmd->add_option("--seed", bench_args.seed)->capture_default_str();
    bench_cmd->add_option("--norm", bench_args.norm)->capture_default_str();
    bench_cmd->add_option("--out", bench_args.out)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_args, out, err);
        if (*score_cmd) return cmd_score(score_args, out);
        if (*eval_cmd) return cmd_eval(eval_args, out);
        if (*est_cmd) return cmd_estimate(est_args, out);
        if (*acc_cmd) return cmd_accuracy(acc_args, out);
        if (*synth_cmd) return cmd_synth(synth_args, out);
        if (*bench_cmd) return cmd_bench(bench_args, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

}  // namespace oi::cli
