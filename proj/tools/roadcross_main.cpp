// roadcross: end-to-end offline pipeline for road-crossing safety
// classification on simulated traffic scenes.
//
//   simulate -> track -> features -> train-svm -> eval
//   gen-weights -> cnn-infer -> assist
//
// Every command is a deterministic function of its inputs and seeds and
// writes a manifest.json next to its outputs.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roadcross/cnn.hpp"
#include "roadcross/csv.hpp"
#include "roadcross/decision.hpp"
#include "roadcross/eval.hpp"
#include "roadcross/features.hpp"
#include "roadcross/pipeline.hpp"
#include "roadcross/scene_sim.hpp"
#include "roadcross/svm.hpp"
#include "roadcross/text.hpp"
#include "roadcross/tracking.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace roadcross;

constexpr const char* kToolVersion = "0.1.0";

void write_manifest(const fs::path& dir, json manifest)
{
    manifest["tool_version"] = kToolVersion;
    std::ofstream out(dir / "manifest.json");
    if (!out)
        throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

sim::ScenarioConfig resolve_scenario_config(const std::string& config_path,
                                            const std::string& preset)
{
    if (!config_path.empty())
        return sim::load_config(config_path);
    if (preset == "default")
        return sim::ScenarioConfig::default_config();
    if (preset == "linear-oracle")
        return sim::ScenarioConfig::linear_oracle_config();
    throw std::runtime_error("unknown preset '" + preset +
                             "' (use default or linear-oracle)");
}

std::vector<std::pair<long long, double>>
read_probabilities_csv(const fs::path& path)
{
    const auto rows = csv::read_rows(path, "frame_index,probability");
    std::vector<std::pair<long long, double>> out;
    out.reserve(rows.size());
    for (const csv::Row& row : rows) {
        const long long frame = csv::parse_int(row.fields[0], path, row.line_number);
        const double p = csv::parse_double(row.fields[1], path, row.line_number);
        if (p < 0.0 || p > 1.0)
            throw csv::ParseError(path.string() + ":" +
                                  std::to_string(row.line_number) +
                                  ": probability outside [0,1]");
        out.emplace_back(frame, p);
    }
    return out;
}

std::vector<int> read_labels_csv(const fs::path& path)
{
    const auto rows = csv::read_rows(path, "frame_index,label");
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (const csv::Row& row : rows)
        labels.push_back(static_cast<int>(
            csv::parse_int(row.fields[1], path, row.line_number)));
    return labels;
}

// ----------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string config_path;
    std::string preset = "default";
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> frames;
};

void cmd_simulate(const SimulateArgs& args)
{
    sim::ScenarioConfig cfg = resolve_scenario_config(args.config_path, args.preset);
    if (args.seed)
        cfg.rng_seed = *args.seed;
    if (args.frames)
        cfg.num_frames = *args.frames;

    const sim::Scenario scenario = sim::generate_scenario(cfg);
    fs::create_directories(args.out_dir);
    sim::export_dataset(scenario, args.out_dir);
    sim::save_config(cfg, fs::path(args.out_dir) / "config.cfg");

    long long safe = 0;
    for (const auto& frame : scenario.frames)
        safe += frame.truth_label == sim::SafetyLabel::safe ? 1 : 0;

    json manifest;
    manifest["command"] = "simulate";
    manifest["seed"] = cfg.rng_seed;
    manifest["params"] = {{"config", args.config_path},
                          {"preset", args.preset},
                          {"num_frames", cfg.num_frames}};
    manifest["outputs"] = {"boxes.csv", "labels.csv", "config.cfg"};
    write_manifest(args.out_dir, manifest);

    std::cout << "simulated " << cfg.num_frames << " frames, "
              << scenario.trajectories.size() << " vehicles, " << safe
              << " safe / " << (cfg.num_frames - safe) << " unsafe\n";
}

// ----------------------------------------------------------------------
// track

struct TrackArgs {
    std::string dataset_dir;
    std::string out_dir;
    tracking::TrackerConfig config;
};

void cmd_track(const TrackArgs& args)
{
    const auto cfg = sim::load_config(fs::path(args.dataset_dir) / "config.cfg");
    const auto data = sim::import_dataset(args.dataset_dir);
    const auto tracks = tracking::associate(data.frames, args.config, cfg.origin);

    fs::create_directories(args.out_dir);
    tracking::export_tracks_csv(tracks, cfg.num_frames, args.config, cfg.origin,
                                fs::path(args.out_dir) / "tracks.csv");

    json manifest;
    manifest["command"] = "track";
    manifest["params"] = {{"dataset", args.dataset_dir},
                          {"iou_match_threshold", args.config.iou_match_threshold},
                          {"max_frames_lost", args.config.max_frames_lost},
                          {"speed_window", args.config.speed_window}};
    manifest["outputs"] = {"tracks.csv"};
    write_manifest(args.out_dir, manifest);

    std::cout << "tracked " << data.frames.size() << " frames into "
              << tracks.size() << " tracks\n";
}

// ----------------------------------------------------------------------
// features

struct FeaturesArgs {
    std::string dataset_dir;
    std::string tracks_path;
    std::string mode = "single";
    int k = 10;
    std::string model_path; // single-frame model, multi mode only
    std::string out_dir;
};

void cmd_features(const FeaturesArgs& args)
{
    const auto cfg = sim::load_config(fs::path(args.dataset_dir) / "config.cfg");
    const auto data = sim::import_dataset(args.dataset_dir);
    const auto per_frame =
        tracking::import_tracks_csv(args.tracks_path, cfg.num_frames);

    const features::RegionGrid grid{2, 3, cfg.frame_width, cfg.frame_height};
    std::vector<std::vector<double>> raw;
    std::vector<int> labels;
    raw.reserve(data.frames.size());
    for (std::size_t n = 0; n < data.frames.size(); ++n) {
        const auto filtered = tracking::directional_filter(
            per_frame[n], cfg.divider_x, cfg.origin);
        raw.push_back(features::single_frame_features(filtered, grid, cfg.origin));
        labels.push_back(static_cast<int>(data.frames[n].truth_label));
    }
    const int feature_columns = features::single_frame_dim(grid);

    fs::create_directories(args.out_dir);
    const fs::path out_csv = fs::path(args.out_dir) / "features.csv";
    if (args.mode == "single") {
        features::write_feature_csv(out_csv, raw, labels, feature_columns);
    } else if (args.mode == "multi") {
        if (args.k < 1)
            throw std::runtime_error("features --mode multi needs --k >= 1");
        if (args.model_path.empty())
            throw std::runtime_error(
                "features --mode multi needs --model (single-frame SVM)");
        const auto sf_model = svm::load_model(args.model_path);
        std::vector<int> preds;
        preds.reserve(raw.size());
        for (const auto& row : raw)
            preds.push_back(svm::predict(sf_model, row));
        std::vector<std::vector<double>> rows;
        rows.reserve(raw.size());
        for (std::size_t n = 0; n < raw.size(); ++n) {
            std::vector<double> row = raw[n];
            for (int j = 0; j < args.k - 1; ++j) {
                const long long m =
                    static_cast<long long>(n) - (args.k - 1) + j;
                row.push_back(m >= 0 ? preds[static_cast<std::size_t>(m)] : 0);
            }
            rows.push_back(std::move(row));
        }
        features::write_feature_csv(out_csv, rows, labels, feature_columns);
    } else {
        throw std::runtime_error("mode must be single or multi");
    }

    json manifest;
    manifest["command"] = "features";
    manifest["params"] = {{"dataset", args.dataset_dir},
                          {"tracks", args.tracks_path},
                          {"mode", args.mode},
                          {"k", args.k},
                          {"model", args.model_path}};
    manifest["outputs"] = {"features.csv"};
    write_manifest(args.out_dir, manifest);

    std::cout << "wrote " << raw.size() << " feature rows (" << args.mode
              << ")\n";
}

// ----------------------------------------------------------------------
// train-svm

struct TrainSvmArgs {
    std::vector<std::string> feature_paths;
    std::string out_dir;
    double lambda = 1e-4;
    int epochs = 50;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    std::string class_weights = "auto"; // or "w_unsafe,w_safe"
};

void cmd_train_svm(const TrainSvmArgs& args)
{
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    int feature_columns = -1;
    int prediction_columns = -1;
    for (const std::string& path : args.feature_paths) {
        const auto csv = features::read_feature_csv(path);
        if (feature_columns < 0) {
            feature_columns = csv.feature_columns;
            prediction_columns = csv.prediction_columns;
        } else if (feature_columns != csv.feature_columns ||
                   prediction_columns != csv.prediction_columns) {
            throw std::runtime_error("feature files disagree on columns");
        }
        X.insert(X.end(), csv.rows.begin(), csv.rows.end());
        y.insert(y.end(), csv.labels.begin(), csv.labels.end());
    }

    svm::ClassWeights weights;
    if (args.class_weights == "auto") {
        long long safe = 0, unsafe = 0;
        for (int label : y)
            (label == 1 ? safe : unsafe) += 1;
        weights = svm::class_weights_from_counts(unsafe, safe);
    } else {
        const auto comma = args.class_weights.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(
                "--class-weights expects 'auto' or 'W_UNSAFE,W_SAFE'");
        weights.unsafe_weight = std::stod(args.class_weights.substr(0, comma));
        weights.safe_weight = std::stod(args.class_weights.substr(comma + 1));
    }

    svm::SvmTrainConfig config;
    config.regularization_lambda = args.lambda;
    config.epochs = args.epochs;
    config.rng_seed = args.seed;

    svm::LinearSvmModel model = svm::train(X, y, weights, config, feature_columns);
    model.threshold = args.threshold;

    fs::create_directories(args.out_dir);
    svm::save_model(model, fs::path(args.out_dir) / "model.svm");

    json manifest;
    manifest["command"] = "train-svm";
    manifest["seed"] = args.seed;
    manifest["params"] = {{"features", args.feature_paths},
                          {"lambda", args.lambda},
                          {"epochs", args.epochs},
                          {"threshold", args.threshold},
                          {"class_weight_unsafe", weights.unsafe_weight},
                          {"class_weight_safe", weights.safe_weight},
                          {"class_weight_safe_echo",
                           cnn::format_class_weight(weights.safe_weight)}};
    manifest["outputs"] = {"model.svm"};
    write_manifest(args.out_dir, manifest);

    std::cout << "trained on " << X.size() << " rows, dim "
              << (X.empty() ? 0 : X.front().size()) << ", class weights ("
              << format_double(weights.unsafe_weight) << ", "
              << format_double(weights.safe_weight) << ")\n";
}

// ----------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string labels_path;
    std::vector<std::string> svm_entries;   // NAME=MODEL:FEATURES
    std::vector<std::string> probs_entries; // NAME=FILE
    std::vector<std::string> throughput_entries; // NAME=FPS
    double threshold = 0.5;
    std::string out_dir;
};

void cmd_eval(const EvalArgs& args)
{
    std::map<std::string, double> throughput;
    for (const std::string& entry : args.throughput_entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--throughput expects NAME=FPS");
        throughput[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    }

    std::vector<eval::MethodResult> results;
    for (const std::string& entry : args.svm_entries) {
        const auto eq = entry.find('=');
        const auto colon = entry.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos)
            throw std::runtime_error("--svm expects NAME=MODEL:FEATURES");
        const std::string name = entry.substr(0, eq);
        const std::string model_path = entry.substr(eq + 1, colon - eq - 1);
        const std::string features_path = entry.substr(colon + 1);

        const auto model = svm::load_model(model_path);
        const auto csv = features::read_feature_csv(features_path);
        std::vector<int> preds;
        preds.reserve(csv.rows.size());
        for (const auto& row : csv.rows)
            preds.push_back(svm::predict(model, row));
        const eval::Metrics m = eval::compute_metrics(preds, csv.labels);
        eval::MethodResult r{name, m.precision, m.recall, std::nullopt};
        if (auto it = throughput.find(name); it != throughput.end())
            r.throughput_fps = it->second;
        results.push_back(std::move(r));
    }
    for (const std::string& entry : args.probs_entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--probs expects NAME=FILE");
        const std::string name = entry.substr(0, eq);
        if (args.labels_path.empty())
            throw std::runtime_error("--probs needs --labels for ground truth");
        const auto probs = read_probabilities_csv(entry.substr(eq + 1));
        const auto truths = read_labels_csv(args.labels_path);
        if (probs.size() != truths.size())
            throw std::runtime_error("probabilities and labels disagree on length");
        std::vector<int> preds;
        preds.reserve(probs.size());
        for (const auto& [frame, p] : probs)
            preds.push_back(p > args.threshold ? 1 : 0);
        const eval::Metrics m = eval::compute_metrics(preds, truths);
        eval::MethodResult r{name, m.precision, m.recall, std::nullopt};
        if (auto it = throughput.find(name); it != throughput.end())
            r.throughput_fps = it->second;
        results.push_back(std::move(r));
    }

    fs::create_directories(args.out_dir);
    eval::write_report_csv(results, fs::path(args.out_dir) / "report.csv");
    std::cout << eval::format_report_table(results);

    json manifest;
    manifest["command"] = "eval";
    manifest["params"] = {{"labels", args.labels_path},
                          {"svm", args.svm_entries},
                          {"probs", args.probs_entries},
                          {"threshold", args.threshold}};
    manifest["outputs"] = {"report.csv"};
    write_manifest(args.out_dir, manifest);
}

// ----------------------------------------------------------------------
// gen-weights / cnn-infer

struct GenWeightsArgs {
    std::string spec_path;
    std::uint64_t seed = 0;
    std::string out_dir;
};

void cmd_gen_weights(const GenWeightsArgs& args)
{
    const auto spec = cnn::parse_network_spec(args.spec_path);
    const auto net = cnn::random_network(spec, args.seed);
    fs::create_directories(args.out_dir);
    cnn::save_weights(net, fs::path(args.out_dir) / "weights.bin");

    json manifest;
    manifest["command"] = "gen-weights";
    manifest["seed"] = args.seed;
    manifest["params"] = {{"spec", args.spec_path}, {"network", spec.name}};
    manifest["outputs"] = {"weights.bin"};
    write_manifest(args.out_dir, manifest);

    std::cout << "wrote weights for " << spec.name << " (" << spec.layers.size()
              << " layers)\n";
}

struct CnnInferArgs {
    std::string spec_path;
    std::string weights_path;
    std::string dataset_dir;
    std::string out_dir;
    int limit = 0; // 0 = all frames
};

void cmd_cnn_infer(const CnnInferArgs& args)
{
    const auto cfg = sim::load_config(fs::path(args.dataset_dir) / "config.cfg");
    const auto data = sim::import_dataset(args.dataset_dir);
    const auto net = cnn::load_network(args.spec_path, args.weights_path);

    const std::size_t count =
        args.limit > 0
            ? std::min<std::size_t>(data.frames.size(),
                                    static_cast<std::size_t>(args.limit))
            : data.frames.size();

    fs::create_directories(args.out_dir);
    std::ofstream out(fs::path(args.out_dir) / "probabilities.csv");
    if (!out)
        throw std::runtime_error("cannot write probabilities.csv");
    out << "frame_index,probability\n";

    const auto t0 = std::chrono::steady_clock::now();
    char buf[32];
    for (std::size_t n = 0; n < count; ++n) {
        const cnn::Tensor native = cnn::rasterize_boxes(
            data.frames[n], cfg.frame_width, cfg.frame_height);
        const cnn::Tensor image =
            cnn::nearest_resize(native, net.spec.input_h, net.spec.input_w);
        const double p = cnn::forward(net, image);
        std::snprintf(buf, sizeof(buf), "%.9f", p);
        out << data.frames[n].frame_index << ',' << buf << '\n';
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    const double fps = seconds > 0.0 ? static_cast<double>(count) / seconds : 0.0;

    // Local wall clock, machine-dependent; kept out of the deterministically
    // compared outputs on purpose.
    {
        std::ofstream timing(fs::path(args.out_dir) / "timing.txt");
        std::snprintf(buf, sizeof(buf), "%.3f", fps);
        timing << "frames_per_second=" << buf << '\n';
    }

    json manifest;
    manifest["command"] = "cnn-infer";
    manifest["params"] = {{"spec", args.spec_path},
                          {"weights", args.weights_path},
                          {"dataset", args.dataset_dir},
                          {"network", net.spec.name},
                          {"frames", count}};
    manifest["outputs"] = {"probabilities.csv", "timing.txt"};
    write_manifest(args.out_dir, manifest);

    std::cout << "inferred " << count << " frames at " << buf
              << " fps (local wall clock)\n";
}

// ----------------------------------------------------------------------
// assist

struct AssistArgs {
    std::string probs_path;
    double threshold = 0.85;
    int consecutive = 5;
    std::string out_dir;
};

void cmd_assist(const AssistArgs& args)
{
    decision::DecisionConfig config;
    config.probability_threshold = args.threshold;
    config.required_consecutive_safe = args.consecutive;

    const auto probs = read_probabilities_csv(args.probs_path);
    const auto events = decision::run_session(config, probs);

    fs::create_directories(args.out_dir);
    std::ofstream out(fs::path(args.out_dir) / "events.csv");
    if (!out)
        throw std::runtime_error("cannot write events.csv");
    out << "frame_index,kind\n";
    for (const auto& event : events)
        out << event.frame_index << ',' << decision::to_string(event.kind) << '\n';

    json manifest;
    manifest["command"] = "assist";
    manifest["params"] = {{"probs", args.probs_path},
                          {"threshold", args.threshold},
                          {"consecutive", args.consecutive}};
    manifest["outputs"] = {"events.csv"};
    write_manifest(args.out_dir, manifest);

    std::cout << "wrote " << events.size() << " events\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"road-crossing safety pipeline"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic scenario");
    sim_cmd->add_option("--config", sim_args.config_path, "scenario config file");
    sim_cmd->add_option("--preset", sim_args.preset,
                        "built-in config: default or linear-oracle");
    sim_cmd->add_option("--seed", sim_args.seed, "override rng_seed");
    sim_cmd->add_option("--frames", sim_args.frames, "override num_frames");
    sim_cmd->add_option("--out", sim_args.out_dir, "output directory")->required();

    TrackArgs track_args;
    auto* track_cmd = app.add_subcommand("track", "associate boxes into tracks");
    track_cmd->add_option("--dataset", track_args.dataset_dir, "dataset directory")
        ->required();
    track_cmd->add_option("--iou-threshold", track_args.config.iou_match_threshold,
                          "IoU match threshold");
    track_cmd->add_option("--max-lost", track_args.config.max_frames_lost,
                          "frames before a track closes");
    track_cmd->add_option("--speed-window", track_args.config.speed_window,
                          "observations in the speed estimate");
    track_cmd->add_option("--out", track_args.out_dir, "output directory")->required();

    FeaturesArgs feat_args;
    auto* feat_cmd = app.add_subcommand("features", "extract feature vectors");
    feat_cmd->add_option("--dataset", feat_args.dataset_dir, "dataset directory")
        ->required();
    feat_cmd->add_option("--tracks", feat_args.tracks_path, "tracks.csv path")
        ->required();
    feat_cmd->add_option("--mode", feat_args.mode, "single or multi");
    feat_cmd->add_option("--k", feat_args.k, "sliding window size");
    feat_cmd->add_option("--model", feat_args.model_path,
                         "single-frame SVM model (multi mode)");
    feat_cmd->add_option("--out", feat_args.out_dir, "output directory")->required();

    TrainSvmArgs train_args;
    auto* train_cmd = app.add_subcommand("train-svm", "train a linear SVM");
    train_cmd->add_option("--features", train_args.feature_paths,
                          "feature CSV (repeatable)")
        ->required();
    train_cmd->add_option("--lambda", train_args.lambda, "regularization");
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    train_cmd->add_option("--seed", train_args.seed, "sampling seed");
    train_cmd->add_option("--threshold", train_args.threshold, "decision threshold");
    train_cmd->add_option("--class-weights", train_args.class_weights,
                          "'auto' or W_UNSAFE,W_SAFE");
    train_cmd->add_option("--out", train_args.out_dir, "output directory")->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "precision/recall report");
    eval_cmd->add_option("--labels", eval_args.labels_path,
                         "labels.csv for --probs entries");
    eval_cmd->add_option("--svm", eval_args.svm_entries,
                         "NAME=MODEL:FEATURES (repeatable)");
    eval_cmd->add_option("--probs", eval_args.probs_entries,
                         "NAME=FILE (repeatable)");
    eval_cmd->add_option("--throughput", eval_args.throughput_entries,
                         "NAME=FPS measured externally (repeatable)");
    eval_cmd->add_option("--threshold", eval_args.threshold,
                         "score threshold for --probs entries");
    eval_cmd->add_option("--out", eval_args.out_dir, "output directory")->required();

    GenWeightsArgs gw_args;
    auto* gw_cmd = app.add_subcommand("gen-weights", "seeded random network weights");
    gw_cmd->add_option("--spec", gw_args.spec_path, "network spec file")->required();
    gw_cmd->add_option("--seed", gw_args.seed, "init seed");
    gw_cmd->add_option("--out", gw_args.out_dir, "output directory")->required();

    CnnInferArgs infer_args;
    auto* infer_cmd = app.add_subcommand("cnn-infer", "per-frame CNN probabilities");
    infer_cmd->add_option("--spec", infer_args.spec_path, "network spec file")
        ->required();
    infer_cmd->add_option("--weights", infer_args.weights_path, "weights file")
        ->required();
    infer_cmd->add_option("--dataset", infer_args.dataset_dir, "dataset directory")
        ->required();
    infer_cmd->add_option("--limit", infer_args.limit, "max frames (0 = all)");
    infer_cmd->add_option("--out", infer_args.out_dir, "output directory")->required();

    AssistArgs assist_args;
    auto* assist_cmd = app.add_subcommand("assist", "replay the decision state machine");
    assist_cmd->add_option("--probs", assist_args.probs_path, "probabilities.csv")
        ->required();
    assist_cmd->add_option("--threshold", assist_args.threshold,
                           "probability threshold");
    assist_cmd->add_option("--consecutive", assist_args.consecutive,
                           "required consecutive safe frames");
    assist_cmd->add_option("--out", assist_args.out_dir, "output directory")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_cmd->parsed())
            cmd_simulate(sim_args);
        else if (track_cmd->parsed())
            cmd_track(track_args);
        else if (feat_cmd->parsed())
            cmd_features(feat_args);
        else if (train_cmd->parsed())
            cmd_train_svm(train_args);
        else if (eval_cmd->parsed())
            cmd_eval(eval_args);
        else if (gw_cmd->parsed())
            cmd_gen_weights(gw_args);
        else if (infer_cmd->parsed())
            cmd_cnn_infer(infer_args);
        else if (assist_cmd->parsed())
            cmd_assist(assist_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
