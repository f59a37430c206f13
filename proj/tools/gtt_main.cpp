// Command-line front end: dataset synthesis, motion-model fitting,
// training, tracking, scoring and the comparison suites, glued together
// through plain files so each stage can be re-run or replaced.

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "gtt/harness.hpp"

namespace fs = std::filesystem;
using namespace gtt;

namespace {

using Scalar = float;

constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

SyntheticSceneConfig scene_from_kv(const KeyValueFile& kv) {
    SyntheticSceneConfig c;
    c.canvas_width = static_cast<int>(kv.get_int("canvas_width", c.canvas_width));
    c.canvas_height = static_cast<int>(kv.get_int("canvas_height", c.canvas_height));
    c.frame_count = static_cast<int>(kv.get_int("frame_count", c.frame_count));
    c.motion_scale = kv.get_double("motion_scale", c.motion_scale);
    c.size_scale = kv.get_double("size_scale", c.size_scale);
    c.drift_x = kv.get_double("drift_x", c.drift_x);
    c.drift_y = kv.get_double("drift_y", c.drift_y);
    c.distractor_count = static_cast<int>(kv.get_int("distractor_count", c.distractor_count));
    c.near_identical_distractors =
        kv.get_bool("near_identical_distractors", c.near_identical_distractors);
    c.illumination_amplitude = kv.get_double("illumination_amplitude", c.illumination_amplitude);
    c.illumination_period = static_cast<int>(kv.get_int("illumination_period", c.illumination_period));
    c.occluder_period = static_cast<int>(kv.get_int("occluder_period", c.occluder_period));
    c.occluder_duration = static_cast<int>(kv.get_int("occluder_duration", c.occluder_duration));
    c.camera_motion_amplitude =
        kv.get_double("camera_motion_amplitude", c.camera_motion_amplitude);
    return c;
}

void write_snapshot(const std::string& out_dir, const std::string& subcommand,
                    KeyValueFile kv) {
    fs::create_directories(out_dir);
    kv.set("subcommand", subcommand);
    kv.write_file((fs::path(out_dir) / "resolved_config.txt").string());
}

int cmd_synthesize(const std::string& config_path, int count, std::uint64_t seed,
                   const std::string& out_dir) {
    SyntheticSceneConfig base;
    KeyValueFile kv;
    if (!config_path.empty()) kv = KeyValueFile::parse_file(config_path);
    base = scene_from_kv(kv);

    std::vector<SyntheticVideo> videos;
    for (int i = 0; i < count; ++i) {
        SyntheticSceneConfig sc = base;
        sc.seed = Rng::stream(seed, static_cast<std::uint64_t>(i)).raw();
        sc.id = "seq_" + std::to_string(i);
        videos.push_back(generate_synthetic_video(sc));
    }
    write_synthetic_dataset(videos, out_dir);

    KeyValueFile snap = kv;
    snap.set("count", static_cast<long>(count));
    snap.set("seed", static_cast<long>(seed));
    write_snapshot(out_dir, "synthesize", snap);
    std::cout << "wrote " << videos.size() << " sequences to " << out_dir << "\n";
    return 0;
}

int cmd_fit_motion(const std::string& manifest, const std::string& out_path) {
    const auto seqs = load_manifest(manifest);
    if (seqs.empty()) throw std::runtime_error("fit-motion: manifest lists no sequences");
    MotionStats stats;
    for (const auto& seq : seqs)
        for (std::size_t i = 0; i + 1 < seq.annotations.size(); ++i)
            stats.add_pair(seq.annotations[i].box, seq.annotations[i + 1].box);
    const FittedMotion fit = fit_motion(stats);
    save_motion_model(fit, out_path);
    auto report = [](const char* name, const LaplaceFit& f) {
        std::cout << name << ": location " << f.dist.location << ", scale " << f.dist.scale
                  << " (n=" << f.count << (f.degenerate ? ", degenerate" : "") << ")\n";
    };
    report("dx", fit.dx);
    report("dy", fit.dy);
    report("gw", fit.gw);
    report("gh", fit.gh);
    if (stats.skipped_pairs)
        std::cout << "skipped " << stats.skipped_pairs << " zero-size pairs\n";
    return 0;
}

int cmd_train(const std::string& manifest, const std::string& train_cfg_path,
              const std::string& net_cfg_path, const std::string& motion_path,
              std::uint64_t seed, const std::string& out_dir) {
    TrainConfig tc;
    if (!train_cfg_path.empty())
        tc = TrainConfig::from_kv(KeyValueFile::parse_file(train_cfg_path));
    NetConfig nc;
    if (!net_cfg_path.empty())
        nc = NetConfig::from_kv(KeyValueFile::parse_file(net_cfg_path));
    if (!motion_path.empty()) {
        MotionModel m = load_motion_model(motion_path);
        m.mode = tc.motion.mode;
        tc.motion = m;
    }
    tc.seed = seed;

    const auto metas = load_manifest(manifest);
    const TrainingData data = make_training_data(load_all_sequence_data(metas));

    fs::create_directories(out_dir);
    Network<Scalar> net(nc, seed);
    const TrainResult result = train(tc, data, net, out_dir, [](long iter, double loss) {
        if (iter % 100 == 0) std::cout << "iter " << iter << " loss " << loss << "\n";
    });
    write_training_log(result, tc, (fs::path(out_dir) / "training_log.csv").string());
    net.save((fs::path(out_dir) / "weights.net").string());

    KeyValueFile snap = tc.to_kv();
    const KeyValueFile nkv = nc.to_kv();
    for (const auto& k : nkv.keys()) snap.set("net_" + k, nkv.get_string(k));
    write_snapshot(out_dir, "train", snap);

    if (result.aborted) {
        std::cerr << "training aborted: " << result.abort_reason << "\n";
        return kExitRuntime;
    }
    std::cout << "trained " << result.iterations_run << " iterations, final loss "
              << (result.losses.empty() ? 0.0 : result.losses.back()) << "\n";
    return 0;
}

int cmd_track(const std::string& weights, const std::string& manifest,
              const std::string& sequence_id, const std::string& out_path, bool live_eval,
              bool timing) {
    Network<Scalar> net = Network<Scalar>::load(weights);
    const auto metas = load_manifest(manifest);
    const VideoSequence* meta = nullptr;
    for (const auto& m : metas)
        if (m.id == sequence_id) meta = &m;
    if (!meta) throw std::runtime_error("track: sequence not in manifest: " + sequence_id);

    const SequenceData seq = load_sequence_data(*meta);
    TrackerOptions opts;
    opts.collect_timing = timing;
    EvalParams params;
    const TrackRecord rec = track_sequence(net, seq, seq.meta.annotations.front().box, opts,
                                           live_eval ? &params : nullptr);
    write_predictions(rec, out_path, fs::path(weights).filename().string());
    std::cout << "tracked " << rec.frames.size() << " frames";
    if (timing)
        std::cout << " (" << rec.mean_frame_ms << " +- " << rec.stddev_frame_ms << " ms/frame)";
    std::cout << "\n";
    return 0;
}

int cmd_eval(const std::string& manifest, const std::string& pred_dir,
             const std::string& tracker_id, const std::string& out_path) {
    const auto metas = load_manifest(manifest);
    EvalParams params;
    std::vector<SequenceScore> scores;
    for (const auto& meta : metas) {
        const fs::path pred_path = fs::path(pred_dir) / (meta.id + ".txt");
        if (!fs::exists(pred_path))
            throw std::runtime_error("eval: missing prediction file: " + pred_path.string());
        const auto preds = parse_annotations(pred_path.string(), AnnotationFormat::corner4);
        TrackRecord rec;
        rec.tracker_id = tracker_id;
        rec.sequence_id = meta.id;
        std::map<int, BoundingBox> by_frame;
        for (const auto& p : preds) by_frame[p.frame] = p.box;
        for (const auto& a : meta.annotations) {
            TrackRecord::Frame fr;
            fr.frame = a.frame;
            fr.gt = a.box;
            fr.attributes = a.attributes;
            if (auto it = by_frame.find(a.frame); it != by_frame.end()) fr.pred = it->second;
            rec.frames.push_back(fr);
        }
        scores.push_back(score_sequence(rec, params));
    }
    const TrackerScores agg = aggregate_scores(tracker_id, scores, params);
    ReportRow row{tracker_id, agg.overall_error(), agg.accuracy_error(),
                  agg.robustness_error(), false};
    std::cout << format_report_table({row});
    const auto& all = agg.buckets.at("all");
    std::cout << "failures: " << all.failures << " over " << all.frames
              << " evaluated frames\n";
    if (!out_path.empty()) write_report_csv({row}, out_path);
    return 0;
}

int cmd_ablate(std::uint64_t seed, int reps, long iterations, const std::string& out_dir) {
    // compact benchmark + net so the whole suite runs on one desk CPU
    BenchmarkConfig bc;
    bc.train_videos = 12;
    bc.test_videos = 6;
    bc.seed = seed;
    const Benchmark bench = make_benchmark(bc);

    NetConfig nc;
    nc.input_size = 32;
    nc.conv_stages = {{8, 3, 1, 2}, {16, 3, 1, 2}};
    nc.fc_width = 64;
    TrainConfig tc;
    tc.batch_size = 16;
    tc.iterations = iterations;

    const auto variants = standard_variants(tc, nc);
    const auto results = run_ablation_suite<Scalar>(variants, bench, reps, seed);
    const auto rows = ablation_report(results);
    std::cout << format_report_table(rows);
    fs::create_directories(out_dir);
    write_report_csv(rows, (fs::path(out_dir) / "ablation_report.csv").string());
    for (const auto& r : results)
        if (r.failed) std::cerr << r.name << " failed: " << r.failure_reason << "\n";

    KeyValueFile snap = tc.to_kv();
    snap.set("seed", static_cast<long>(seed));
    snap.set("repetitions", static_cast<long>(reps));
    write_snapshot(out_dir, "ablate", snap);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generic object tracking toolkit"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker threads (1 = fully deterministic)");

    std::string config, out, manifest, weights, sequence, pred_dir, net_cfg, motion_file;
    std::uint64_t seed = 0;
    int count = 10;
    int reps = 3;
    long iterations = 400;
    bool live_eval = false, timing = false;

    auto* synth = app.add_subcommand("synthesize", "generate a labeled synthetic dataset");
    synth->add_option("--config", config, "scene config file (key=value)");
    synth->add_option("--count", count, "number of sequences");
    synth->add_option("--seed", seed, "root seed");
    synth->add_option("--out", out, "output directory")->required();

    auto* fitm = app.add_subcommand("fit-motion", "fit the motion model from a manifest");
    fitm->add_option("manifest", manifest, "dataset manifest")->required();
    fitm->add_option("--out", out, "motion model file")->required();

    auto* train_cmd = app.add_subcommand("train", "train a network");
    train_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    train_cmd->add_option("--config", config, "train config file");
    train_cmd->add_option("--net", net_cfg, "net config file");
    train_cmd->add_option("--motion", motion_file, "fitted motion model file");
    train_cmd->add_option("--seed", seed, "root seed");
    train_cmd->add_option("--out", out, "output directory")->required();

    auto* track_cmd = app.add_subcommand("track", "track one sequence");
    track_cmd->add_option("--weights", weights, "weight file")->required();
    track_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    track_cmd->add_option("--sequence", sequence, "sequence id")->required();
    track_cmd->add_option("--out", out, "prediction file")->required();
    track_cmd->add_flag("--live-eval", live_eval, "run the failure/reinit protocol");
    track_cmd->add_flag("--timing", timing, "collect per-frame timing");

    auto* eval_cmd = app.add_subcommand("eval", "score prediction files against a manifest");
    eval_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    eval_cmd->add_option("--pred-dir", pred_dir, "directory of <sequence id>.txt predictions")
        ->required();
    eval_cmd->add_option("--tracker-id", sequence, "name in the report");
    eval_cmd->add_option("--out", out, "report CSV path");

    auto* ablate_cmd = app.add_subcommand("ablate", "train and compare the standard variants");
    ablate_cmd->add_option("--seed", seed, "root seed");
    ablate_cmd->add_option("--reps", reps, "repetitions per variant");
    ablate_cmd->add_option("--iterations", iterations, "training iterations per variant");
    ablate_cmd->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    omp_set_num_threads(std::max(1, threads));

    try {
        if (synth->parsed()) return cmd_synthesize(config, count, seed, out);
        if (fitm->parsed()) return cmd_fit_motion(manifest, out);
        if (train_cmd->parsed())
            return cmd_train(manifest, config, net_cfg, motion_file, seed, out);
        if (track_cmd->parsed())
            return cmd_track(weights, manifest, sequence, out, live_eval, timing);
        if (eval_cmd->parsed())
            return cmd_eval(manifest, pred_dir, sequence.empty() ? "tracker" : sequence, out);
        if (ablate_cmd->parsed()) return cmd_ablate(seed, reps, iterations, out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 1;
}
