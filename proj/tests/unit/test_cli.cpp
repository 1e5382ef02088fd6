#include "cli.hpp"
#include "oi/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <random>
#include <sstream>

using namespace oi;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("oi_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("fit reproduces the hand-traced summary and writes a manifest") {
    TempDir dir;
    write_file(dir / "id.csv", "0\n2\n");
    const Run r = run({"fit", "--input", dir / "id.csv", "--k", "2", "--out", dir / "s.json"});
    CHECK(r.code == 0);
    CHECK(r.err.find("k outside recommended [50,200]") != std::string::npos);
    const IdSummary s = load_summary(dir / "s.json");
    CHECK(s.shell_freq() == std::vector<double>{0.5, 0.5});
    CHECK(s.shell_max_norm() == std::vector<double>{0.0, 2.0});
    CHECK(s.r_b_id() == 2.0);

    const json man = json::parse(read_file(dir / "s.json.manifest.json"));
    CHECK(man["command"] == "fit");
    CHECK(man["params"]["k"] == 2);
    CHECK(man["params"]["norm"] == "l2");
    CHECK(man["tool_version"] == "0.1.0");
    CHECK(man["inputs"]["input"]["sha256"] == cli::sha256_file(dir / "id.csv"));
    CHECK(man["inputs"]["input"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("fit warnings and failures") {
    TempDir dir;
    write_file(dir / "id.csv", "1,2\n3,4\n5,6\n");
    const Run warn = run({"fit", "--input", dir / "id.csv", "--k", "10", "--out", dir / "s.json"});
    CHECK(warn.code == 0);
    CHECK(warn.err.find("k outside recommended [50,200]") != std::string::npos);
    const Run quiet = run({"fit", "--input", dir / "id.csv", "--out", dir / "s.json"});
    CHECK(quiet.code == 0);
    CHECK(quiet.err.empty());

    CHECK(run({"fit", "--input", dir / "missing.csv", "--out", dir / "s.json"}).code == cli::kExitIo);
    write_file(dir / "ragged.csv", "1,2\n3\n");
    CHECK(run({"fit", "--input", dir / "ragged.csv", "--out", dir / "s.json"}).code == cli::kExitParse);
    write_file(dir / "zero.csv", "0,0\n0,0\n");
    CHECK(run({"fit", "--input", dir / "zero.csv", "--out", dir / "s.json"}).code == cli::kExitNumeric);
    CHECK(run({"fit", "--input", dir / "id.csv", "--norm", "l7", "--out", dir / "s.json"}).code == cli::kExitRange);
    CHECK(run({"fit", "--input", dir / "id.csv"}).code == cli::kExitUsage);
    CHECK(run({"bogus"}).code == cli::kExitUsage);
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("fit with centering options") {
    TempDir dir;
    write_file(dir / "id.csv", "1,2\n3,4\n5,7\n");
    write_file(dir / "c.csv", "3,4\n");
    CHECK(run({"fit", "--input", dir / "id.csv", "--center", dir / "c.csv", "--out", dir / "a.json"}).code == 0);
    CHECK(load_summary(dir / "a.json").center() == std::vector<double>{3.0, 4.0});

    write_file(dir / "pool.csv", "1,1\n2,2\n3,3\n4,4\n");
    const std::string spec = "contaminated:" + (dir / "pool.csv") + ",4,7";
    CHECK(run({"fit", "--input", dir / "id.csv", "--center", spec, "--out", dir / "b.json"}).code == 0);
    CHECK(load_summary(dir / "b.json").center() == std::vector<double>{2.5, 2.5});
    const json man = json::parse(read_file(dir / "b.json.manifest.json"));
    CHECK(man["seed"] == 7);
    CHECK(man["params"]["center"]["count"] == 4);

    write_file(dir / "two.csv", "1,1\n2,2\n");
    CHECK(run({"fit", "--input", dir / "id.csv", "--center", dir / "two.csv", "--out", dir / "c.json"}).code ==
          cli::kExitDimension);
}

TEST_CASE("score examples end to end") {
    TempDir dir;
    write_file(dir / "one.csv", "1.5,-2\n");
    CHECK(run({"fit", "--input", dir / "one.csv", "--out", dir / "self.json"}).code == 0);
    CHECK(run({"score", "--summary", dir / "self.json", "--input", dir / "one.csv", "--out", dir / "a.csv"}).code ==
          0);
    CHECK(read_scores(dir / "a.csv").at(0).score == 1.0);

    write_file(dir / "id.csv", "2\n");
    write_file(dir / "x.csv", "0\n");
    CHECK(run({"fit", "--input", dir / "id.csv", "--k", "2", "--out", dir / "s2.json"}).code == 0);
    CHECK(run({"score", "--summary", dir / "s2.json", "--input", dir / "x.csv", "--out", dir / "b.csv",
               "--threshold", "0.5"})
              .code == 0);
    CHECK(read_scores(dir / "b.csv").at(0).score == 0.0);
    CHECK(read_file(dir / "b.csv") == "score,delta_mu_term,shell_term,best_shell,label\n0,0.5,0.5,1,OOD\n");

    write_file(dir / "sym.csv", "1,0\n-1,0\n0,1\n0,-1\n");
    write_file(dir / "far.csv", "0,2\n");
    CHECK(run({"fit", "--input", dir / "sym.csv", "--out", dir / "sym.json"}).code == 0);
    CHECK(run({"score", "--summary", dir / "sym.json", "--input", dir / "far.csv", "--out", dir / "c.csv"}).code ==
          0);
    CHECK(read_scores(dir / "c.csv").at(0).delta_mu_term == 0.5);

    CHECK(run({"score", "--summary", dir / "sym.json", "--input", dir / "x.csv", "--out", dir / "d.csv"}).code ==
          cli::kExitDimension);
}

TEST_CASE("score reads f32le input and rejects unknown schema versions") {
    TempDir dir;
    write_file(dir / "id.csv", "1,2\n3,4\n5,7\n");
    CHECK(run({"fit", "--input", dir / "id.csv", "--out", dir / "s.json"}).code == 0);
    write_matrix(dir / "x.bin", FeatureMatrix::from_rows({{1, 2}, {3, 4}}), MatrixFormat::F32le);
    CHECK(run({"score", "--summary", dir / "s.json", "--input", dir / "x.bin", "--format", "f32le", "--out",
               dir / "o.csv"})
              .code == 0);
    CHECK(read_scores(dir / "o.csv").size() == 2);
    write_file(dir / "bad.bin", "NOPE0000000000000000");
    CHECK(run({"score", "--summary", dir / "s.json", "--input", dir / "bad.bin", "--format", "f32le", "--out",
               dir / "o.csv"})
              .code == cli::kExitParse);

    std::string doc = read_file(dir / "s.json");
    doc.replace(doc.find("\"version\":1"), 11, "\"version\":9");
    write_file(dir / "future.json", doc);
    CHECK(run({"score", "--summary", dir / "future.json", "--input", dir / "id.csv", "--out", dir / "o.csv"}).code ==
          cli::kExitSchema);
}

TEST_CASE("eval on perfect separation, with histograms") {
    TempDir dir;
    write_file(dir / "id.csv", "0.9\n0.95\n1\n");
    write_file(dir / "ood.csv", "score,delta_mu_term,shell_term,best_shell\n0.1,0.5,0.4,1\n0.2,0.4,0.4,1\n");
    const Run r = run({"eval", "--id-scores", dir / "id.csv", "--ood-scores", dir / "ood.csv", "--out",
                       dir / "m.json", "--emit-histograms", dir / "h.csv", "--bins", "10"});
    CHECK(r.code == 0);
    const json m = json::parse(read_file(dir / "m.json"));
    CHECK(m["auroc"] == 1.0);
    CHECK(m["tpr95"] == 1.0);
    CHECK(m["aupr"] == 1.0);
    CHECK(m["n_id"] == 3);
    CHECK(m["n_ood"] == 2);
    const std::string h = read_file(dir / "h.csv");
    CHECK(std::count(h.begin(), h.end(), '\n') == 11);
    CHECK(run({"eval", "--id-scores", dir / "id.csv", "--ood-scores", dir / "ood.csv", "--out", dir / "m.json",
               "--aupr-positive", "maybe"})
              .code == cli::kExitRange);
}

TEST_CASE("synth is byte-reproducible from its manifest") {
    TempDir dir;
    const std::string spec = R"({"kind":"trunc_gauss_ball","mean":[0,0,0,0],"sigma":[1,1,1,1],"seed":4})";
    CHECK(run({"synth", "--spec", spec, "--count", "100", "--out", dir / "a.csv"}).code == 0);
    CHECK(run({"synth", "--spec", spec, "--count", "100", "--out", dir / "b.csv"}).code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    const json man = json::parse(read_file(dir / "a.csv.manifest.json"));
    const std::string resolved = man["params"]["spec"].dump();
    CHECK(run({"synth", "--spec", resolved, "--count", "100", "--out", dir / "c.csv"}).code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "c.csv"));
    CHECK(run({"synth", "--spec", spec, "--count", "100", "--seed", "5", "--out", dir / "d.csv"}).code == 0);
    CHECK(read_file(dir / "a.csv") != read_file(dir / "d.csv"));
    write_file(dir / "spec.json", spec);
    CHECK(run({"synth", "--spec", "@" + (dir / "spec.json"), "--count", "100", "--out", dir / "e.csv"}).code == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "e.csv"));
    CHECK(run({"synth", "--spec", R"({"kind":"sine_1d","omega":0})", "--count", "5", "--out", dir / "f.csv"}).code ==
          cli::kExitRange);
}

TEST_CASE("estimate-oi") {
    TempDir dir;
    write_file(dir / "a.csv", "-1\n");
    write_file(dir / "b.csv", "1\n");
    CHECK(run({"estimate-oi", "--a", dir / "a.csv", "--b", dir / "b.csv", "--k", "1", "--out", dir / "e.json"}).code ==
          0);
    const json e = json::parse(read_file(dir / "e.json"));
    CHECK(e["eta_bar_prime"] == 0.0);
    CHECK(e["r_prime"] == 1.0);
    CHECK(e["cohen_d"].is_null());
    CHECK(run({"estimate-oi", "--a", dir / "a.csv", "--b", dir / "b.csv", "--no-center-merged-mean", "--family",
               "shells", "--out", dir / "e2.json"})
              .code == 0);
    write_file(dir / "c.csv", "1,2\n");
    CHECK(run({"estimate-oi", "--a", dir / "a.csv", "--b", dir / "c.csv", "--out", dir / "e3.json"}).code ==
          cli::kExitDimension);
}

TEST_CASE("accuracy-bound modes") {
    TempDir dir;
    CHECK(run({"accuracy-bound", "--p", "0.9", "--q", "0.1", "--overlap", "0.5", "--out", dir / "a.json"}).code == 0);
    CHECK(json::parse(read_file(dir / "a.json"))["eq8_bound"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(run({"accuracy-bound", "--p", "1.5", "--overlap", "0.5", "--out", dir / "b.json"}).code == cli::kExitRange);

    write_file(dir / "clean.csv", "0,0\n1,0\n0,1\n1,1\n");
    write_file(dir / "poison.csv", "5,5\n6,5\n");
    CHECK(run({"accuracy-bound", "--p", "0.95", "--sigma", "0.5", "--clean", dir / "clean.csv", "--shifted",
               dir / "poison.csv", "--out", dir / "c.json"})
              .code == 0);
    const json c = json::parse(read_file(dir / "c.json"));
    const double expect = 0.95 * (1.0 - 0.5 * c["delta_mu_term"].get<double>() - 0.5 * c["shell_term"].get<double>());
    CHECK(c["eq10_bound"].get<double>() == doctest::Approx(expect).epsilon(1e-14));

    CHECK(run({"accuracy-bound", "--sweep", "--out", dir / "s.json"}).code == 0);
    const json s = json::parse(read_file(dir / "s.json"));
    CHECK(s["sweep"].size() == 11);
    CHECK(s["all_hold"] == true);
}

TEST_CASE("bench writes a timing report") {
    TempDir dir;
    const Run r = run({"bench", "--dims", "10,20", "--k-sweep", "10,20,40", "--samples", "200", "--warmup", "10",
                       "--runs", "1", "--out", dir / "t.json"});
    CHECK(r.code == 0);
    const json t = json::parse(read_file(dir / "t.json"));
    CHECK(t["dim_sweep"].size() == 2);
    CHECK(t["k_sweep"].size() == 3);
    CHECK(t["dim_sweep"][0]["median_ms"].get<double>() > 0.0);
    CHECK(fs::exists(dir / "t.json.manifest.json"));
    CHECK(run({"bench", "--dims", "10,x", "--out", dir / "t.json"}).code == cli::kExitRange);
}

TEST_CASE("exit code classes are distinct") {
    using cli::exit_code_for;
    CHECK(exit_code_for(ErrorCode::ParseError) == cli::kExitParse);
    CHECK(exit_code_for(ErrorCode::RaggedRows) == cli::kExitParse);
    CHECK(exit_code_for(ErrorCode::BadMagic) == cli::kExitParse);
    CHECK(exit_code_for(ErrorCode::DimensionMismatch) == cli::kExitDimension);
    CHECK(exit_code_for(ErrorCode::SchemaVersionMismatch) == cli::kExitSchema);
    CHECK(exit_code_for(ErrorCode::RangeError) == cli::kExitRange);
    CHECK(exit_code_for(ErrorCode::IoError) == cli::kExitIo);
    CHECK(exit_code_for(ErrorCode::AllZeroNorms) == cli::kExitNumeric);
    const std::vector<int> classes{cli::kExitUsage, cli::kExitParse, cli::kExitDimension, cli::kExitSchema,
                                   cli::kExitRange, cli::kExitIo,    cli::kExitNumeric};
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j) CHECK(classes[i] != classes[j]);
}
