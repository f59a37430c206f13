#ifndef GTT_HARNESS_HPP
#define GTT_HARNESS_HPP

// Experiment harness: synthetic benchmarks, tracker scoring, the noisy
// initialization experiment, and the ablation / training-set-size /
// seen-vs-unseen comparison suites.

#include <algorithm>
#include <map>

#include "gtt/eval.hpp"
#include "gtt/synth.hpp"
#include "gtt/tracker.hpp"
#include "gtt/trainer.hpp"

namespace gtt {

inline SequenceData to_sequence_data(const SyntheticVideo& video) {
    SequenceData d;
    d.meta = video.meta;
    d.frames.reserve(video.frames.size());
    for (const auto& f : video.frames) d.frames.push_back(Frame8::from_image(f));
    return d;
}

// Benchmark scenes: a mix of plain, occluded, camera-shake and
// illumination-drift sequences so every attribute bucket is populated.
struct BenchmarkConfig {
    int train_videos = 40;
    int test_videos = 10;
    int frame_count = 24;
    int canvas_width = 120;
    int canvas_height = 90;
    double motion_scale = 0.05;
    double size_scale = 0.01;
    // Constant per-step drift magnitude in box widths; the direction
    // rotates with the scene index. Keeps a do-nothing baseline from
    // scoring well on short sequences.
    double drift = 0.0;
    std::uint64_t seed = 0;
};

inline SyntheticSceneConfig benchmark_scene(const BenchmarkConfig& cfg, int index,
                                            bool test_split) {
    SyntheticSceneConfig sc;
    sc.canvas_width = cfg.canvas_width;
    sc.canvas_height = cfg.canvas_height;
    sc.frame_count = cfg.frame_count;
    sc.motion_scale = cfg.motion_scale;
    sc.size_scale = cfg.size_scale;
    sc.distractor_count = 2 + index % 3;
    if (cfg.drift != 0.0) {
        // eight directions, rotating with the index
        const double angle = (index % 8) * 0.25 * 3.14159265358979323846;
        sc.drift_x = cfg.drift * std::cos(angle);
        sc.drift_y = cfg.drift * std::sin(angle);
    }
    // rotate through the attribute-generating mechanisms
    switch (index % 4) {
        case 0: break;  // plain
        case 1:
            sc.occluder_period = cfg.frame_count / 2;
            sc.occluder_duration = 4;
            break;
        case 2: sc.camera_motion_amplitude = 0.8; break;
        case 3:
            sc.illumination_amplitude = 0.25;
            sc.illumination_period = cfg.frame_count / 2;
            break;
    }
    sc.seed = Rng::stream(cfg.seed, (test_split ? 0x9000u : 0x1000u) + index).raw();
    sc.id = std::string(test_split ? "test_" : "train_") + std::to_string(index);
    return sc;
}

struct Benchmark {
    std::vector<SequenceData> train;
    std::vector<SequenceData> test;
};

inline Benchmark make_benchmark(const BenchmarkConfig& cfg) {
    Benchmark b;
    for (int i = 0; i < cfg.train_videos; ++i)
        b.train.push_back(to_sequence_data(generate_synthetic_video(benchmark_scene(cfg, i, false))));
    for (int i = 0; i < cfg.test_videos; ++i)
        b.test.push_back(to_sequence_data(generate_synthetic_video(benchmark_scene(cfg, i, true))));
    return b;
}

inline TrainingData make_training_data(const std::vector<SequenceData>& videos) {
    TrainingData d;
    d.videos = videos;
    d.stills = make_training_stills(videos);
    return d;
}

// Mean IoU of predictions against ground truth over all frames after the
// init frame, without the reinit protocol. The quick health metric.
template <class S>
double mean_test_iou(Network<S>& net, const std::vector<SequenceData>& videos,
                     const TrackerOptions& opts = {}) {
    double sum = 0;
    long n = 0;
    for (const auto& seq : videos) {
        const TrackRecord rec =
            track_sequence(net, seq, seq.meta.annotations.front().box, opts);
        for (const auto& fr : rec.frames) {
            if (fr.frame == 0 || !fr.pred || !fr.gt) continue;
            sum += iou(*fr.pred, *fr.gt);
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

// Full protocol scoring of one net over a benchmark split.
template <class S>
TrackerScores evaluate_tracker(Network<S>& net, const std::vector<SequenceData>& videos,
                               const std::string& tracker_id,
                               const EvalParams& params = {},
                               const TrackerOptions& opts = {}) {
    std::vector<SequenceScore> scores;
    for (const auto& seq : videos) {
        const TrackRecord rec =
            track_sequence(net, seq, seq.meta.annotations.front().box, opts, &params);
        scores.push_back(score_sequence(rec, params));
    }
    return aggregate_scores(tracker_id, scores, params);
}

struct NoisyInitSpec {
    int count = 15;
    double center_jitter = 0.1;  // stddev-like magnitude in box units
    double scale_jitter = 0.1;
    std::uint64_t seed = 0;

    void validate() const {
        if (count < 1) throw std::invalid_argument("noisy init: count >= 1");
    }
};

inline BoundingBox jitter_box(const BoundingBox& box, const NoisyInitSpec& spec, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double dx = rng.uniform(-spec.center_jitter, spec.center_jitter) * box.width();
        const double dy = rng.uniform(-spec.center_jitter, spec.center_jitter) * box.height();
        const double gw = 1.0 + rng.uniform(-spec.scale_jitter, spec.scale_jitter);
        const double gh = 1.0 + rng.uniform(-spec.scale_jitter, spec.scale_jitter);
        const BoundingBox j = BoundingBox::from_center(box.center_x() + dx, box.center_y() + dy,
                                                       box.width() * gw, box.height() * gh);
        if (j.valid()) return j;  // degenerate draws are resampled
    }
    return box;
}

// The same seeded jittered initializations per sequence; the reported
// table is the mean over initializations.
template <class S>
TrackerScores run_noisy_init_experiment(Network<S>& net,
                                        const std::vector<SequenceData>& videos,
                                        const NoisyInitSpec& spec,
                                        const std::string& tracker_id,
                                        const EvalParams& params = {},
                                        const TrackerOptions& opts = {}) {
    spec.validate();
    std::vector<SequenceScore> scores;
    for (std::size_t si = 0; si < videos.size(); ++si) {
        const auto& seq = videos[si];
        Rng rng = Rng::stream(spec.seed, 0x21u + si);
        for (int i = 0; i < spec.count; ++i) {
            const BoundingBox init = jitter_box(seq.meta.annotations.front().box, spec, rng);
            const TrackRecord rec = track_sequence(net, seq, init, opts, &params);
            scores.push_back(score_sequence(rec, params));
        }
    }
    return aggregate_scores(tracker_id, scores, params);
}

// One named training configuration of the comparison suite.
struct Variant {
    std::string name;
    TrainConfig train;
    NetConfig net;
};

inline std::vector<Variant> standard_variants(const TrainConfig& base, const NetConfig& net) {
    std::vector<Variant> v;
    v.push_back({"full", base, net});
    {
        Variant x{"l2_loss", base, net};
        x.train.loss = LossKind::l2;
        v.push_back(x);
    }
    {
        Variant x{"uniform_crops", base, net};
        x.train.augmentation = AugmentationMode::uniform;
        v.push_back(x);
    }
    {
        Variant x{"images_only", base, net};
        x.train.mix = SourceMix::images_only;
        v.push_back(x);
    }
    {
        Variant x{"videos_only", base, net};
        x.train.mix = SourceMix::videos_only;
        v.push_back(x);
    }
    {
        Variant x{"single_input", base, net};
        x.net.single_input = true;
        v.push_back(x);
    }
    return v;
}

template <class S>
struct VariantResult {
    std::string name;
    std::vector<double> overall_errors;  // one per repetition
    std::vector<TrackerScores> scores;   // aligned with repetitions
    bool failed = false;
    std::string failure_reason;

    double median_overall() const {
        std::vector<double> e = overall_errors;
        std::sort(e.begin(), e.end());
        return e.empty() ? 1.0 : e[e.size() / 2];
    }
};

// Trains one repetition of a variant under the shared seed protocol
// (seed = hash of suite seed and repetition, same for every variant) and
// scores it on the test split.
template <class S>
TrackerScores train_and_score(const Variant& variant, const Benchmark& bench,
                              const TrainingData& data, std::uint64_t rep_seed,
                              const EvalParams& params = {}) {
    TrainConfig tc = variant.train;
    tc.seed = rep_seed;
    Network<S> net(variant.net, rep_seed);
    const TrainResult tr = train(tc, data, net);
    if (tr.aborted) throw std::runtime_error(variant.name + ": " + tr.abort_reason);
    return evaluate_tracker(net, bench.test, variant.name, params);
}

template <class S>
std::vector<VariantResult<S>> run_ablation_suite(const std::vector<Variant>& variants,
                                                 const Benchmark& bench, int repetitions,
                                                 std::uint64_t seed,
                                                 const EvalParams& params = {},
                                                 TrainLogFn log = nullptr) {
    const TrainingData data = make_training_data(bench.train);
    std::vector<VariantResult<S>> out;
    for (const auto& variant : variants) {
        VariantResult<S> res;
        res.name = variant.name;
        for (int rep = 0; rep < repetitions; ++rep) {
            const std::uint64_t rep_seed = Rng::stream(seed, 0xab0u + rep).raw();
            try {
                TrainConfig tc = variant.train;
                tc.seed = rep_seed;
                Network<S> net(variant.net, rep_seed);
                const TrainResult tr = train(tc, data, net, "", log);
                if (tr.aborted) throw std::runtime_error(tr.abort_reason);
                res.scores.push_back(evaluate_tracker(net, bench.test, variant.name, params));
                res.overall_errors.push_back(res.scores.back().overall_error());
            } catch (const std::exception& e) {
                // a failed variant marks its row without killing the suite
                res.failed = true;
                res.failure_reason = e.what();
                break;
            }
        }
        out.push_back(std::move(res));
    }
    return out;
}

template <class S>
std::vector<ReportRow> ablation_report(const std::vector<VariantResult<S>>& results) {
    std::vector<ReportRow> rows;
    for (const auto& r : results) {
        ReportRow row;
        row.name = r.name;
        row.failed = r.failed;
        if (!r.failed && !r.scores.empty()) {
            // median repetition by overall error
            std::vector<std::size_t> order(r.scores.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return r.overall_errors[a] < r.overall_errors[b];
            });
            const TrackerScores& mid = r.scores[order[order.size() / 2]];
            row.overall_error = mid.overall_error();
            row.accuracy_error = mid.accuracy_error();
            row.robustness_error = mid.robustness_error();
        }
        rows.push_back(row);
    }
    return rows;
}

// Training-set-size sweep: medians of the overall error when training on
// the first fraction of the training videos.
template <class S>
std::vector<std::pair<double, double>> run_size_sweep(const Variant& variant,
                                                      const Benchmark& bench,
                                                      const std::vector<double>& fractions,
                                                      int repetitions, std::uint64_t seed,
                                                      const EvalParams& params = {}) {
    std::vector<std::pair<double, double>> out;
    for (const double frac : fractions) {
        const std::size_t n = std::max<std::size_t>(
            1, static_cast<std::size_t>(frac * static_cast<double>(bench.train.size())));
        Benchmark sub;
        sub.train.assign(bench.train.begin(), bench.train.begin() + n);
        sub.test = bench.test;
        const TrainingData data = make_training_data(sub.train);
        std::vector<double> errors;
        for (int rep = 0; rep < repetitions; ++rep) {
            const std::uint64_t rep_seed = Rng::stream(seed, 0xab0u + rep).raw();
            errors.push_back(
                train_and_score<S>(variant, sub, data, rep_seed, params).overall_error());
        }
        std::sort(errors.begin(), errors.end());
        out.emplace_back(frac, errors[errors.size() / 2]);
    }
    return out;
}

// Seen/unseen class split of the test videos: a class counts as "seen"
// when the training set holds at least `threshold` videos of it.
struct ClassSplit {
    std::vector<SequenceData> seen;
    std::vector<SequenceData> unseen;
};

inline ClassSplit split_by_class(const std::vector<SequenceData>& train,
                                 const std::vector<SequenceData>& test,
                                 int threshold = 25) {
    std::map<std::string, int> counts;
    for (const auto& s : train)
        if (s.meta.class_label) ++counts[*s.meta.class_label];
    ClassSplit out;
    for (const auto& s : test) {
        const bool seen = s.meta.class_label && counts[*s.meta.class_label] >= threshold;
        (seen ? out.seen : out.unseen).push_back(s);
    }
    return out;
}

} // namespace gtt

#endif
