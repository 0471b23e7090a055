#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <sys/wait.h>

#include "cld/cli.hpp"
#include "cld/detector.hpp"
#include "cld/series.hpp"
#include "cld/text.hpp"
#include "oracles.hpp"

using namespace cld;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cld");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) lines.push_back(line);
    return lines;
}

std::string p(const fs::path& path) { return path.string(); }

/// Shared inputs: a normal training series, a labeled validation series and a model.
struct Workspace {
    fs::path dir = test::scratch_dir("cli");
    fs::path train = dir / "train.csv";
    fs::path validation = dir / "validation.csv";
    fs::path model = dir / "model.txt";

    Workspace() {
        REQUIRE(run_cli({"synth", "--length", "300", "--attacks", "0", "--seed", "11", "-o", p(train)}).code == 0);
        REQUIRE(run_cli({"synth", "--length", "600", "--attacks", "3", "--seed", "12", "-o", p(validation)}).code == 0);
        REQUIRE(run_cli({"train", "-i", p(train), "--hidden", "6", "--epochs", "40", "--seed", "3", "-o", p(model)})
                    .code == 0);
    }
};

Workspace& workspace() {
    static Workspace ws;
    return ws;
}

}  // namespace

TEST_CASE("exit codes for bad invocations") {
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
    CHECK(run_cli({"synth"}).code == cli::kUsage);
    const auto v = run_cli({"--version"});
    CHECK(v.code == cli::kOk);
    CHECK(v.out.find(cli::kVersion) != std::string::npos);
    CHECK(run_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("the installed binary reports usage errors through its exit status") {
    const std::string cmd = std::string(CLD_BINARY) + " train > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == cli::kUsage);
}

TEST_CASE("synth writes the requested rows and is reproducible") {
    const auto dir = test::scratch_dir("cli_synth");
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    REQUIRE(run_cli({"synth", "--length", "500", "--seed", "9", "-o", p(a)}).code == 0);
    REQUIRE(run_cli({"synth", "--length", "500", "--seed", "9", "-o", p(b)}).code == 0);
    const auto text = test::read_file(a);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 502);
    CHECK(lines[0] == "# seed=9");
    CHECK(lines[1] == "step,timestamp,count,label");
    CHECK(text == test::read_file(b));
    CHECK(fs::exists(dir / "a.csv.manifest.json"));
    CHECK(test::read_file(dir / "a.csv.manifest.json").find("\"series\"") != std::string::npos);

    CHECK(run_cli({"synth", "--length", "50", "--attacks", "4", "-o", p(dir / "c.csv")}).code == cli::kDataError);
    CHECK(run_cli({"synth", "--length", "50", "--multiplier", "0.5", "-o", p(dir / "c.csv")}).code == cli::kUsage);
}

TEST_CASE("ingest conserves packets and reports rejected rows") {
    const auto dir = test::scratch_dir("cli_ingest");
    const auto out = dir / "series.csv";
    auto r = run_cli({"ingest", "-i", p(test::data_path("tshark_1000.csv")), "--step-seconds", "1", "--start",
                      "1999-03-11T08:00:00Z", "--end", "1999-03-11T08:01:40Z", "-o", p(out)});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("records=1000 rejected=0") != std::string::npos);
    std::ifstream in(out);
    const auto series = read_series_csv(in);
    CHECK(series.data.series.size() == 100);
    CHECK(std::accumulate(series.data.series.values.begin(), series.data.series.values.end(), 0.0) == 1000.0);

    // default range covers every record
    r = run_cli({"ingest", "-i", p(test::data_path("tshark_1000.csv")), "-o", p(out)});
    REQUIRE(r.code == 0);
    std::ifstream in2(out);
    const auto whole = read_series_csv(in2);
    CHECK(std::accumulate(whole.data.series.values.begin(), whole.data.series.values.end(), 0.0) == 1000.0);

    r = run_cli({"ingest", "-i", p(test::data_path("tshark_malformed.csv")), "-o", p(out)});
    CHECK(r.code == 0);
    CHECK(r.out.find("records=9 rejected=1") != std::string::npos);
    CHECK(r.err.find("line 7") != std::string::npos);

    const auto empty = dir / "empty.csv";
    std::ofstream(empty).close();
    r = run_cli({"ingest", "-i", p(empty), "-o", p(out)});
    CHECK(r.code == cli::kDataError);
    CHECK(r.err.find("missing header") != std::string::npos);

    r = run_cli({"ingest", "-i", p(test::data_path("tshark_small.csv")), "--start", "1999-03-11T08:00:05Z", "--end",
                 "1999-03-11T08:00:05Z", "-o", p(out)});
    CHECK(r.code == cli::kUsage);

    CHECK(run_cli({"ingest", "-i", p(dir / "absent.csv"), "-o", p(out)}).code == cli::kFailure);
}

TEST_CASE("train validates its flags and its data") {
    auto& ws = workspace();
    const auto out = ws.dir / "bad_model.txt";
    CHECK(run_cli({"train", "-i", p(ws.train), "--lag", "4", "-o", p(out)}).code == cli::kUsage);
    CHECK(run_cli({"train", "-i", p(ws.train), "--lag", "0", "-o", p(out)}).code == cli::kUsage);
    CHECK(run_cli({"train", "-i", p(ws.train), "--epochs", "0", "-o", p(out)}).code == cli::kUsage);
    CHECK(run_cli({"train", "-i", p(ws.train), "--regime", "minibatch", "-o", p(out)}).code == cli::kUsage);
    CHECK(run_cli({"train", "-i", p(ws.validation), "--epochs", "2", "-o", p(out)}).code == cli::kDataError);

    CHECK(fs::exists(ws.model));
    const auto curve = lines_of(test::read_file(ws.dir / "model.txt.curve.csv"));
    REQUIRE(curve.size() == 41);
    CHECK(curve[0] == "epoch,loss");
    CHECK(test::read_file(ws.model).rfind("lstm-model v1\ninput_dim=3 hidden_dim=6\n", 0) == 0);
}

TEST_CASE("compare-lags prints one row per lag") {
    auto& ws = workspace();
    const auto r = run_cli({"compare-lags", "-i", p(ws.train), "--hidden", "4", "--epochs", "5", "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "lag,final_loss,seconds");
    CHECK(lines[1].rfind("1,", 0) == 0);
    CHECK(lines[2].rfind("2,", 0) == 0);
    CHECK(lines[3].rfind("3,", 0) == 0);
}

TEST_CASE("calibrate with a fixed ret and alpha sweeps only beta") {
    auto& ws = workspace();
    const auto cfg = ws.dir / "fixed.cfg";
    const auto r = run_cli({"calibrate", "--model", p(ws.model), "-i", p(ws.validation), "--mat", "12", "--ret",
                            "0.5", "--alpha", "0.66", "--beta-list", "0.52,0.62,0.66,0.69", "-o", p(cfg)});
    REQUIRE(r.code == 0);
    const auto sweep = lines_of(test::read_file(ws.dir / "fixed.cfg.sweep.csv"));
    REQUIRE(sweep.size() == 5);
    CHECK(sweep[0] == "ret,alpha,beta,detection_rate_pct,false_alarms,events_total");
    CHECK(sweep[1].rfind("0.5,0.66,0.52,", 0) == 0);
    CHECK(sweep[4].rfind("0.5,0.66,0.69,", 0) == 0);
    const auto config = DetectorConfig::parse(test::read_file(cfg));
    CHECK(config.mat == 12);
    CHECK(config.alpha == 0.66);

    CHECK(run_cli({"calibrate", "--model", p(ws.model), "-i", p(ws.validation), "--beta-list", "", "-o", p(cfg)})
              .code == cli::kUsage);
    CHECK(run_cli({"calibrate", "--model", p(ws.model), "-i", p(ws.train), "-o", p(cfg)}).code == cli::kDataError);
}

TEST_CASE("detect output replays to the same alarm log") {
    auto& ws = workspace();
    const auto cfg = ws.dir / "detector.cfg";
    REQUIRE(run_cli({"calibrate", "--model", p(ws.model), "-i", p(ws.validation), "-o", p(cfg)}).code == 0);
    const auto verdicts = ws.dir / "verdicts.csv";
    const auto r = run_cli({"detect", "--model", p(ws.model), "--config", p(cfg), "-i", p(ws.validation), "-o",
                            p(verdicts)});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("detection_rate") != std::string::npos);

    std::ifstream in(verdicts);
    const auto v = read_verdicts_csv(in);
    CHECK(v.size() == 597);
    std::ostringstream log;
    write_alarm_log(log, segment_alarms(v));
    CHECK(log.str() == test::read_file(ws.dir / "verdicts.csv.alarms"));
    CHECK_FALSE(log.str().empty());

    // overrides take precedence over the config file
    const auto strict = ws.dir / "strict.csv";
    REQUIRE(run_cli({"detect", "--model", p(ws.model), "--config", p(cfg), "--beta", "1e9", "-i",
                     p(ws.validation), "-o", p(strict)})
                .code == 0);
    CHECK(test::read_file(ws.dir / "strict.csv.alarms").empty());

    CHECK(run_cli({"detect", "--model", p(ws.dir / "nope.txt"), "--config", p(cfg), "-i", p(ws.validation), "-o",
                   p(strict)})
              .code == cli::kFailure);
}
