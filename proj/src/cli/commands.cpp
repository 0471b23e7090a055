#include "cld/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "cld/calibration.hpp"
#include "cld/error.hpp"
#include "cld/pipeline.hpp"
#include "cld/series.hpp"
#include "cld/synth.hpp"
#include "cld/text.hpp"

namespace cld::cli {

namespace {

using nlohmann::ordered_json;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CLD_SEED")) {
        const auto v = text::parse_int(env);
        if (v && *v >= 0) return static_cast<std::uint64_t>(*v);
    }
    return 42;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

// Writes through a string so a failed command never leaves a half file.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buffer;
    body(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << buffer.str();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void write_manifest(const std::string& output, const std::string& command, std::uint64_t seed,
                    ordered_json config, ordered_json inputs, ordered_json outputs) {
    ordered_json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["seed"] = seed;
    m["config"] = std::move(config);
    m["inputs"] = std::move(inputs);
    m["outputs"] = std::move(outputs);
    write_file(output + ".manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

std::vector<double> parse_list(const std::string& raw, const char* flag) {
    std::vector<double> out;
    for (auto token : text::split(raw, ',')) {
        if (text::trim(token).empty()) continue;
        const auto v = text::parse_double(token);
        if (!v) throw usage_error(std::string(flag) + ": cannot parse '" + std::string(token) + "'");
        out.push_back(*v);
    }
    if (out.empty()) throw usage_error(std::string(flag) + " produces an empty grid");
    return out;
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

ordered_json train_json(const TrainConfig& c) {
    ordered_json j;
    j["lag"] = c.lag;
    j["hidden_dim"] = c.hidden_dim;
    j["learning_rate"] = c.learning_rate;
    j["epochs"] = c.epochs;
    j["rng_seed"] = c.rng_seed;
    j["gradient_clip"] = c.gradient_clip ? ordered_json(*c.gradient_clip) : ordered_json(nullptr);
    j["regime"] = c.regime == TrainRegime::per_step ? "per-step" : "full-batch";
    return j;
}

ordered_json detector_json(const DetectorConfig& c) {
    ordered_json j;
    j["ret"] = c.ret;
    j["mat"] = c.mat;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["epsilon_floor"] = c.epsilon_floor;
    return j;
}

ordered_json report_json(const EvalReport& r) {
    ordered_json j;
    j["detection_rate_pct"] = r.detection_rate;
    j["false_alarms"] = r.false_alarm_count;
    j["events_total"] = r.events_total;
    j["attacks_total"] = r.attacks_total;
    j["attacks_detected"] = r.attacks_detected;
    return j;
}

std::string report_line(const EvalReport& r) {
    return "detection_rate_pct=" + text::format_double(r.detection_rate) +
           " false_alarms=" + std::to_string(r.false_alarm_count) +
           " events_total=" + std::to_string(r.events_total) +
           " attacks_total=" + std::to_string(r.attacks_total) +
           " attacks_detected=" + std::to_string(r.attacks_detected);
}

SeriesFile read_series(const std::string& path) {
    auto in = open_input(path);
    return read_series_csv(in);
}

Model read_model_file(const std::string& path) {
    auto in = open_input(path);
    return load_model(in);
}

TrainRegime parse_regime(const std::string& s) {
    return s == "full-batch" ? TrainRegime::full_batch : TrainRegime::per_step;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
    SynthConfig config;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
    SynthConfig config = o.config;
    config.rng_seed = o.seed;
    const auto series = generate_synthetic(config);
    write_file(o.output, [&](std::ostream& os) { write_series_csv(os, series.series, &series.labels, o.seed); });

    ordered_json cfg;
    cfg["length"] = config.length;
    cfg["baseline_mean"] = config.baseline_mean;
    cfg["baseline_std"] = config.baseline_std;
    cfg["attack_count"] = config.attack_count;
    cfg["attack_min_len"] = config.attack_min_len;
    cfg["attack_max_len"] = config.attack_max_len;
    cfg["attack_multiplier"] = config.attack_multiplier;
    cfg["min_gap"] = config.min_gap;
    cfg["step_seconds"] = config.step_seconds;
    ordered_json intervals = ordered_json::array();
    for (const auto& i : series.attack_intervals) intervals.push_back({i.start, i.end});
    write_manifest(o.output, "synth", o.seed, cfg, ordered_json::object(),
                   {{"series", o.output}, {"attack_intervals", intervals}});
    out << "wrote " << series.series.size() << " steps with " << series.attack_intervals.size()
        << " attack intervals to " << o.output << '\n';
    return kOk;
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
    std::string input;
    double step_seconds = 1.0;
    std::string start;
    std::string end;
    std::string output;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
    auto in = open_input(o.input);
    const IngestResult ingest = load_tshark_csv(in);
    for (const auto& r : ingest.rejected) err << "rejected line " << r.line << ": " << r.reason << '\n';
    out << "records=" << ingest.records.size() << " rejected=" << ingest.rejected.size() << '\n';

    const std::chrono::microseconds step{std::llround(o.step_seconds * 1e6)};
    if (!(o.step_seconds > 0.0) || step.count() < 1) throw usage_error("--step-seconds must be positive");
    auto parse_bound = [](const std::string& s, const char* flag) {
        const auto ts = parse_timestamp(s);
        if (!ts) throw usage_error(std::string(flag) + ": unparseable timestamp '" + s + "'");
        return *ts;
    };
    Timestamp start{}, end{};
    if (!o.start.empty()) {
        start = parse_bound(o.start, "--start");
    } else if (!ingest.records.empty()) {
        start = ingest.records.front().timestamp;
    } else {
        throw data_error("no records to infer --start from");
    }
    if (!o.end.empty()) {
        end = parse_bound(o.end, "--end");
    } else if (!ingest.records.empty() && ingest.records.back().timestamp >= start) {
        end = start + step * ((ingest.records.back().timestamp - start) / step + 1);
    } else {
        throw data_error("no records to infer --end from");
    }
    const TimeSeries series = aggregate_counts(ingest.records, o.step_seconds, start, end);
    write_file(o.output, [&](std::ostream& os) { write_series_csv(os, series); });

    double total = 0.0;
    for (double v : series.values) total += v;
    ordered_json cfg;
    cfg["step_seconds"] = o.step_seconds;
    cfg["start"] = format_timestamp(start);
    cfg["end"] = format_timestamp(end);
    write_manifest(o.output, "ingest", 0, cfg, {{"tshark_csv", o.input}},
                   {{"series", o.output},
                    {"records", ingest.records.size()},
                    {"rejected_rows", ingest.rejected.size()},
                    {"counted", total}});
    out << "wrote " << series.size() << " steps (" << text::format_double(total) << " packets) to "
        << o.output << '\n';
    return kOk;
}

// ---------------------------------------------------------------- split

struct SplitOptions {
    std::string input;
    double train_fraction = 0.4;
    double validation_fraction = 0.2;
    std::string train_out, validation_out, test_out;
};

int cmd_split(const SplitOptions& o, std::ostream& out) {
    const SeriesFile file = read_series(o.input);
    const SplitResult parts = split_protocol(file.data, o.train_fraction, o.validation_fraction);
    write_file(o.train_out, [&](std::ostream& os) { write_series_csv(os, parts.train); });
    write_file(o.validation_out,
               [&](std::ostream& os) { write_series_csv(os, parts.validation.series, &parts.validation.labels); });
    write_file(o.test_out, [&](std::ostream& os) { write_series_csv(os, parts.test.series, &parts.test.labels); });
    ordered_json cfg;
    cfg["train_fraction"] = o.train_fraction;
    cfg["validation_fraction"] = o.validation_fraction;
    write_manifest(o.train_out, "split", file.seed.value_or(0), cfg, {{"series", o.input}},
                   {{"train", o.train_out}, {"validation", o.validation_out}, {"test", o.test_out}});
    out << "train=" << parts.train.size() << " validation=" << parts.validation.series.size()
        << " test=" << parts.test.series.size() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
    std::string input;
    TrainConfig config;
    std::optional<double> clip;
    std::string regime = "per-step";
    std::uint64_t seed = 0;
    std::string output;
    std::string curve;
};

TrainConfig resolve(const TrainOptions& o) {
    TrainConfig c = o.config;
    c.rng_seed = o.seed;
    c.gradient_clip = o.clip;
    c.regime = parse_regime(o.regime);
    return c;
}

const SeriesFile& require_normal(const SeriesFile& file, const std::string& path) {
    if (file.data.has_attacks()) {
        const auto& first = file.data.attack_intervals.front();
        throw data_error("training series '" + path + "' contains attack-labelled steps (first at step " +
                         std::to_string(first.start) + "); train on normal data only");
    }
    return file;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
    const TrainConfig config = resolve(o);
    const SeriesFile file = read_series(o.input);
    require_normal(file, o.input);
    const FitResult fit = fit_model(config, file.data.series.values);
    const std::string curve = o.curve.empty() ? o.output + ".curve.csv" : o.curve;

    write_file(o.output, [&](std::ostream& os) { save_model(os, fit.model); });
    write_file(curve, [&](std::ostream& os) {
        os << "epoch,loss\n";
        for (std::size_t e = 0; e < fit.report.epoch_loss.size(); ++e) {
            os << e + 1 << ',' << text::format_double(fit.report.epoch_loss[e]) << '\n';
        }
    });
    write_manifest(o.output, "train", o.seed, train_json(config), {{"series", o.input}},
                   {{"model", o.output},
                    {"curve", curve},
                    {"final_loss", fit.report.epoch_loss.back()}});
    out << "final_loss=" << text::format_double(fit.report.epoch_loss.back())
        << " seconds=" << text::format_double(fit.report.seconds) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- compare-lags

int cmd_compare_lags(const TrainOptions& o, std::ostream& out) {
    const SeriesFile file = read_series(o.input);
    require_normal(file, o.input);
    struct Row {
        std::size_t lag;
        double final_loss;
        double seconds;
    };
    std::vector<Row> rows;
    ordered_json losses = ordered_json::array();
    for (std::size_t lag = 1; lag <= 3; ++lag) {
        TrainConfig config = resolve(o);
        config.lag = lag;
        const FitResult fit = fit_model(config, file.data.series.values);
        rows.push_back({lag, fit.report.epoch_loss.back(), fit.report.seconds});
        losses.push_back(fit.report.epoch_loss.back());
    }
    auto emit = [&](std::ostream& os) {
        os << "lag,final_loss,seconds\n";
        for (const auto& r : rows) {
            os << r.lag << ',' << text::format_double(r.final_loss) << ',' << text::format_double(r.seconds)
               << '\n';
        }
    };
    emit(out);
    if (!o.output.empty()) {
        write_file(o.output, emit);
        auto cfg = train_json(resolve(o));
        cfg.erase("lag");
        write_manifest(o.output, "compare-lags", o.seed, cfg, {{"series", o.input}},
                       {{"report", o.output}, {"final_loss_by_lag", losses}});
    }
    return kOk;
}

// ---------------------------------------------------------------- calibrate

struct DetectorFlags {
    std::optional<std::size_t> mat;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> ret;
    std::optional<double> epsilon_floor;
};

struct CalibrateOptions {
    std::string model;
    std::string input;
    DetectorFlags flags;
    std::optional<std::string> ret_list, alpha_list, beta_list;
    std::string output;
    std::string sweep;
};

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out) {
    const Model model = read_model_file(o.model);
    const SeriesFile file = read_series(o.input);
    if (!file.data.has_attacks()) {
        throw data_error("validation series '" + o.input + "' has no attack labels to calibrate against");
    }
    const std::size_t mat = o.flags.mat.value_or(12);
    const double floor = o.flags.epsilon_floor.value_or(1e-6);
    if (mat < 1) throw usage_error("--mat must be at least 1");
    const auto points = predict_stream(model, file.data.series.values);
    if (points.empty()) throw data_error("validation series is shorter than the model lag + 1");

    CalibrationGrid grid = default_grid(points, mat, floor);
    if (o.flags.ret) grid.ret_candidates = {*o.flags.ret};
    if (o.ret_list) grid.ret_candidates = sorted_unique(parse_list(*o.ret_list, "--ret-list"));
    if (o.flags.alpha) grid.alpha_candidates = {*o.flags.alpha};
    if (o.alpha_list) grid.alpha_candidates = sorted_unique(parse_list(*o.alpha_list, "--alpha-list"));
    if (o.flags.beta) grid.beta_candidates = {*o.flags.beta};
    if (o.beta_list) grid.beta_candidates = sorted_unique(parse_list(*o.beta_list, "--beta-list"));

    const CalibrationResult result = calibrate(points, file.data.attack_intervals, grid);
    const std::string sweep = o.sweep.empty() ? o.output + ".sweep.csv" : o.sweep;
    write_file(o.output, [&](std::ostream& os) { os << result.config.to_string() << '\n'; });
    write_file(sweep, [&](std::ostream& os) { write_sweep_csv(os, result.table); });

    ordered_json cfg;
    cfg["mat"] = mat;
    cfg["epsilon_floor"] = floor;
    cfg["ret_candidates"] = grid.ret_candidates;
    cfg["alpha_candidates"] = grid.alpha_candidates;
    cfg["beta_candidates"] = grid.beta_candidates;
    write_manifest(o.output, "calibrate", 0, cfg, {{"model", o.model}, {"validation", o.input}},
                   {{"config", o.output},
                    {"sweep", sweep},
                    {"selected", detector_json(result.config)},
                    {"metrics", report_json(result.report)}});
    out << result.config.to_string() << '\n' << report_line(result.report) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
    std::string model;
    std::string config;
    std::string input;
    DetectorFlags flags;
    std::string output;
    std::string alarms;
};

int cmd_detect(const DetectOptions& o, std::ostream& out, std::ostream& err) {
    const Model model = read_model_file(o.model);
    DetectorConfig config;
    {
        auto in = open_input(o.config);
        std::stringstream text_config;
        text_config << in.rdbuf();
        config = DetectorConfig::parse(text_config.str());
    }
    if (o.flags.mat) config.mat = *o.flags.mat;
    if (o.flags.alpha) config.alpha = *o.flags.alpha;
    if (o.flags.beta) config.beta = *o.flags.beta;
    if (o.flags.ret) config.ret = *o.flags.ret;
    if (o.flags.epsilon_floor) config.epsilon_floor = *o.flags.epsilon_floor;
    config.validate();

    const SeriesFile file = read_series(o.input);
    const auto points = predict_stream(model, file.data.series.values);
    if (points.size() < config.mat) {
        err << "warning: series of " << file.data.series.size() << " steps is shorter than lag + mat ("
            << model.lag() + config.mat << "); every verdict is warmup\n";
    }
    const auto verdicts = run_detector(config, points);
    const auto events = segment_alarms(verdicts);
    const std::string alarms = o.alarms.empty() ? o.output + ".alarms" : o.alarms;
    write_file(o.output, [&](std::ostream& os) { write_verdicts_csv(os, verdicts); });
    write_file(alarms, [&](std::ostream& os) { write_alarm_log(os, events); });

    ordered_json outputs{{"verdicts", o.output}, {"alarms", alarms}, {"events", events.size()}};
    out << "steps=" << verdicts.size() << " alarm_events=" << events.size() << '\n';
    if (file.labeled) {
        const EvalReport report = evaluate_events(events, file.data.attack_intervals);
        outputs["metrics"] = report_json(report);
        out << report_line(report) << '\n';
    }
    write_manifest(o.output, "detect", 0, detector_json(config),
                   {{"model", o.model}, {"config", o.config}, {"series", o.input}}, outputs);
    return kOk;
}

void add_detector_flags(CLI::App* cmd, DetectorFlags& f) {
    cmd->add_option("--mat", f.mat, "Minimum attack time (ring capacity)")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", f.alpha, "Danger coefficient threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--beta", f.beta, "Averaged relative error threshold")->check(CLI::NonNegativeNumber);
    cmd->add_option("--ret", f.ret, "Relative error threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon-floor", f.epsilon_floor, "Relative error denominator floor")
        ->check(CLI::PositiveNumber);
}

void add_train_flags(CLI::App* cmd, TrainOptions& o, bool with_lag) {
    if (with_lag) {
        cmd->add_option("--lag", o.config.lag, "Number of past samples per prediction")
            ->check(CLI::IsMember({1, 2, 3}))
            ->capture_default_str();
    }
    cmd->add_option("--hidden", o.config.hidden_dim, "Hidden units")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--lr", o.config.learning_rate, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--epochs", o.config.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--clip", o.clip, "Element-wise gradient clip")->check(CLI::PositiveNumber);
    cmd->add_option("--regime", o.regime, "per-step or full-batch")
        ->check(CLI::IsMember({"per-step", "full-batch"}))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "RNG seed (falls back to CLD_SEED)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collective anomaly detection on traffic count series with an LSTM predictor", "cld"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    const std::uint64_t seed = default_seed();

    SynthOptions synth;
    synth.seed = seed;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic traffic series");
    synth_cmd->add_option("--length", synth.config.length, "Number of steps")->check(CLI::PositiveNumber)->capture_default_str();
    synth_cmd->add_option("--baseline-mean", synth.config.baseline_mean)->capture_default_str();
    synth_cmd->add_option("--baseline-std", synth.config.baseline_std)->capture_default_str();
    synth_cmd->add_option("--attacks", synth.config.attack_count, "Number of bursts")->capture_default_str();
    synth_cmd->add_option("--attack-min-len", synth.config.attack_min_len)->capture_default_str();
    synth_cmd->add_option("--attack-max-len", synth.config.attack_max_len)->capture_default_str();
    synth_cmd->add_option("--multiplier", synth.config.attack_multiplier, "Burst height over baseline")->capture_default_str();
    synth_cmd->add_option("--min-gap", synth.config.min_gap, "Normal steps around each burst")->capture_default_str();
    synth_cmd->add_option("--step-seconds", synth.config.step_seconds)->check(CLI::PositiveNumber)->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "RNG seed (falls back to CLD_SEED)")->capture_default_str();
    synth_cmd->add_option("-o,--output", synth.output, "Series CSV to write")->required();

    IngestOptions ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Aggregate a tshark CSV export into per-step packet counts");
    ingest_cmd->add_option("-i,--input", ingest.input, "tshark CSV (frame.number,frame.len,frame.time,ip.proto)")->required();
    ingest_cmd->add_option("--step-seconds", ingest.step_seconds)->check(CLI::PositiveNumber)->capture_default_str();
    ingest_cmd->add_option("--start", ingest.start, "First step start (default: first packet)");
    ingest_cmd->add_option("--end", ingest.end, "Exclusive end (default: after last packet)");
    ingest_cmd->add_option("-o,--output", ingest.output, "Series CSV to write")->required();

    SplitOptions split;
    auto* split_cmd = app.add_subcommand("split", "Chronological train/validation/test split");
    split_cmd->add_option("-i,--input", split.input)->required();
    split_cmd->add_option("--train-fraction", split.train_fraction)->capture_default_str();
    split_cmd->add_option("--validation-fraction", split.validation_fraction)->capture_default_str();
    split_cmd->add_option("--train-out", split.train_out)->required();
    split_cmd->add_option("--validation-out", split.validation_out)->required();
    split_cmd->add_option("--test-out", split.test_out)->required();

    TrainOptions train_opts;
    train_opts.seed = seed;
    auto* train_cmd = app.add_subcommand("train", "Train the predictor on a normal series");
    train_cmd->add_option("-i,--input", train_opts.input, "Normal training series")->required();
    add_train_flags(train_cmd, train_opts, true);
    train_cmd->add_option("-o,--output", train_opts.output, "Model file to write")->required();
    train_cmd->add_option("--curve", train_opts.curve, "Per-epoch loss CSV (default <output>.curve.csv)");

    TrainOptions compare_opts;
    compare_opts.seed = seed;
    auto* compare_cmd = app.add_subcommand("compare-lags", "Train lags 1, 2 and 3 and report loss and time");
    compare_cmd->add_option("-i,--input", compare_opts.input, "Normal training series")->required();
    add_train_flags(compare_cmd, compare_opts, false);
    compare_cmd->add_option("-o,--output", compare_opts.output, "Report CSV to write");

    CalibrateOptions calib;
    auto* calib_cmd = app.add_subcommand("calibrate", "Choose RET, alpha and beta on a labeled validation series");
    calib_cmd->add_option("--model", calib.model)->required();
    calib_cmd->add_option("-i,--input", calib.input, "Labeled validation series")->required();
    add_detector_flags(calib_cmd, calib.flags);
    calib_cmd->add_option("--ret-list", calib.ret_list, "Comma-separated RET candidates");
    calib_cmd->add_option("--alpha-list", calib.alpha_list, "Comma-separated alpha candidates");
    calib_cmd->add_option("--beta-list", calib.beta_list, "Comma-separated beta candidates");
    calib_cmd->add_option("-o,--output", calib.output, "Detector config to write")->required();
    calib_cmd->add_option("--sweep", calib.sweep, "Sweep table CSV (default <output>.sweep.csv)");

    DetectOptions detect;
    auto* detect_cmd = app.add_subcommand("detect", "Stream a series through the predictor and detector");
    detect_cmd->add_option("--model", detect.model)->required();
    detect_cmd->add_option("--config", detect.config, "Detector config from calibrate")->required();
    detect_cmd->add_option("-i,--input", detect.input, "Series to scan")->required();
    add_detector_flags(detect_cmd, detect.flags);
    detect_cmd->add_option("-o,--output", detect.output, "Verdict CSV to write")->required();
    detect_cmd->add_option("--alarms", detect.alarms, "Alarm log (default <output>.alarms)");

    std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth, out);
        if (ingest_cmd->parsed()) return cmd_ingest(ingest, out, err);
        if (split_cmd->parsed()) return cmd_split(split, out);
        if (train_cmd->parsed()) return cmd_train(train_opts, out);
        if (compare_cmd->parsed()) return cmd_compare_lags(compare_opts, out);
        if (calib_cmd->parsed()) return cmd_calibrate(calib, out);
        if (detect_cmd->parsed()) return cmd_detect(detect, out, err);
    } catch (const usage_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const divergence_error& e) {
        err << "error: " << e.what() << '\n';
        return kDivergence;
    } catch (const data_error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace cld::cli
