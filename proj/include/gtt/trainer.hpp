#ifndef GTT_TRAINER_HPP
#define GTT_TRAINER_HPP

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "gtt/dataset.hpp"
#include "gtt/motion.hpp"
#include "gtt/net.hpp"

namespace gtt {

enum class LossKind { l1, l2 };
enum class SourceMix { both, videos_only, images_only };

std::string to_string(LossKind k);
std::string to_string(SourceMix m);
LossKind loss_kind_from_string(const std::string& s);
SourceMix source_mix_from_string(const std::string& s);

inline std::string to_string(LossKind k) { return k == LossKind::l1 ? "l1" : "l2"; }
inline std::string to_string(SourceMix m) {
    switch (m) {
        case SourceMix::both: return "both";
        case SourceMix::videos_only: return "videos_only";
        default: return "images_only";
    }
}
inline LossKind loss_kind_from_string(const std::string& s) {
    if (s == "l1") return LossKind::l1;
    if (s == "l2") return LossKind::l2;
    throw std::runtime_error("unknown loss: " + s);
}
inline SourceMix source_mix_from_string(const std::string& s) {
    if (s == "both") return SourceMix::both;
    if (s == "videos_only") return SourceMix::videos_only;
    if (s == "images_only") return SourceMix::images_only;
    throw std::runtime_error("unknown source mix: " + s);
}

// The reference-scale learning rate (1e-5) targets a much larger
// pretrained feature stack; the desk-scale net trains from scratch and
// wants a much hotter constant rate (the bounded L1 gradients make small
// rates painfully slow).
inline constexpr double kReferenceLearningRate = 1e-5;
inline constexpr double kDeskLearningRate = 5e-3;

struct TrainConfig {
    int batch_size = 50;
    int k3 = 10;              // augmented crops per sampled base example
    int aug_per_batch = -1;   // fixed augmented count per batch; -1 disables
    double learning_rate = kDeskLearningRate;
    long iterations = 2000;
    LossKind loss = LossKind::l1;
    AugmentationMode augmentation = AugmentationMode::laplace;
    SourceMix mix = SourceMix::both;
    MotionModel motion;
    double k1 = kDefaultContextFactor;
    double k2 = kDefaultContextFactor;
    long checkpoint_every = 0;  // 0 = only final
    std::uint64_t seed = 0;
    double online_learning_rate = 0.0;  // 0 = online fine-tuning off

    void validate() const {
        if (batch_size < 1) throw std::invalid_argument("train config: batch_size >= 1");
        if (k3 < 0) throw std::invalid_argument("train config: k3 >= 0");
        if (aug_per_batch >= batch_size)
            throw std::invalid_argument(
                "train config: aug_per_batch must leave room for at least 1 real example");
        if (iterations < 0) throw std::invalid_argument("train config: iterations >= 0");
        motion.validate();
    }

    KeyValueFile to_kv() const;
    static TrainConfig from_kv(const KeyValueFile& kv);
};

inline std::string to_string(AugmentationMode m) {
    switch (m) {
        case AugmentationMode::laplace: return "laplace";
        case AugmentationMode::uniform: return "uniform";
        default: return "none";
    }
}
inline AugmentationMode augmentation_mode_from_string(const std::string& s) {
    if (s == "laplace") return AugmentationMode::laplace;
    if (s == "uniform") return AugmentationMode::uniform;
    if (s == "none") return AugmentationMode::none;
    throw std::runtime_error("unknown augmentation mode: " + s);
}

inline KeyValueFile TrainConfig::to_kv() const {
    KeyValueFile kv;
    kv.set("batch_size", static_cast<long>(batch_size));
    kv.set("k3", static_cast<long>(k3));
    kv.set("aug_per_batch", static_cast<long>(aug_per_batch));
    kv.set("learning_rate", learning_rate);
    kv.set("iterations", static_cast<long>(iterations));
    kv.set("loss", to_string(loss));
    kv.set("augmentation", to_string(augmentation));
    kv.set("source_mix", to_string(mix));
    kv.set("k1", k1);
    kv.set("k2", k2);
    kv.set("b_dx", motion.dx.scale);
    kv.set("b_dy", motion.dy.scale);
    kv.set("b_gw", motion.gw.scale);
    kv.set("b_gh", motion.gh.scale);
    kv.set("checkpoint_every", checkpoint_every);
    kv.set("seed", static_cast<long>(seed));
    kv.set("online_learning_rate", online_learning_rate);
    return kv;
}

inline TrainConfig TrainConfig::from_kv(const KeyValueFile& kv) {
    TrainConfig c;
    c.batch_size = static_cast<int>(kv.get_int("batch_size", c.batch_size));
    c.k3 = static_cast<int>(kv.get_int("k3", c.k3));
    c.aug_per_batch = static_cast<int>(kv.get_int("aug_per_batch", c.aug_per_batch));
    c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
    c.iterations = kv.get_int("iterations", c.iterations);
    c.loss = loss_kind_from_string(kv.get_string("loss", to_string(c.loss)));
    c.augmentation =
        augmentation_mode_from_string(kv.get_string("augmentation", to_string(c.augmentation)));
    c.mix = source_mix_from_string(kv.get_string("source_mix", to_string(c.mix)));
    c.k1 = kv.get_double("k1", c.k1);
    c.k2 = kv.get_double("k2", c.k2);
    c.motion.dx.scale = kv.get_double("b_dx", c.motion.dx.scale);
    c.motion.dy.scale = kv.get_double("b_dy", c.motion.dy.scale);
    c.motion.gw.scale = kv.get_double("b_gw", c.motion.gw.scale);
    c.motion.gh.scale = kv.get_double("b_gh", c.motion.gh.scale);
    c.motion.mode = c.augmentation;
    c.checkpoint_every = kv.get_int("checkpoint_every", c.checkpoint_every);
    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long>(c.seed)));
    c.online_learning_rate = kv.get_double("online_learning_rate", c.online_learning_rate);
    c.validate();
    return c;
}

enum class Provenance { video_real, video_augmented, image_augmented };

template <class S>
struct TrainingExample {
    Tensor<S> target_crop;
    Tensor<S> search_crop;
    std::array<S, 4> label{};
    Provenance provenance = Provenance::video_real;
};

struct TrainingStill {
    Frame8 image;
    BoundingBox box;
};

// Training sources: loaded videos plus still-image examples (already
// through the fill filter).
struct TrainingData {
    std::vector<SequenceData> videos;
    std::vector<TrainingStill> stills;
};

// Annotated frames of `seqs` as stills, with the fill filter applied.
std::vector<TrainingStill> make_training_stills(const std::vector<SequenceData>& seqs,
                                                double max_fill = 0.66);

inline std::vector<TrainingStill> make_training_stills(const std::vector<SequenceData>& seqs,
                                                       double max_fill) {
    std::vector<TrainingStill> stills;
    for (const auto& seq : seqs) {
        for (const auto& a : seq.meta.annotations) {
            const Frame8& f = seq.frames.at(static_cast<std::size_t>(a.frame));
            const bool fills_x = a.box.width() >= max_fill * f.width;
            const bool fills_y = a.box.height() >= max_fill * f.height;
            if (fills_x || fills_y) continue;
            stills.push_back({f, a.box});
        }
    }
    return stills;
}

// Target crop from the previous frame at k1 context; search crop from
// the current frame centered on `anchor_box` at k2 context; label is the
// current box encoded in that search region.
template <class S>
TrainingExample<S> make_pair_example(const Image& prev_frame, const BoundingBox& prev_box,
                                     const Image& curr_frame, const BoundingBox& curr_box,
                                     const BoundingBox& anchor_box, const NetConfig& net_cfg,
                                     double k1, double k2, Provenance prov) {
    TrainingExample<S> ex;
    SearchRegion target_region = make_search_region(prev_box, k1);
    const Image target_crop = crop_and_resize(prev_frame, target_region, net_cfg.input_size);
    SearchRegion search_region = make_search_region(anchor_box, k2);
    const Image search_crop = crop_and_resize(curr_frame, search_region, net_cfg.input_size);
    ex.target_crop = tensor_from_image<S>(target_crop);
    ex.search_crop = tensor_from_image<S>(search_crop);
    const CornerCode code = encode_target(curr_box, search_region, net_cfg.output_scale);
    ex.label = {static_cast<S>(code.x1), static_cast<S>(code.y1), static_cast<S>(code.x2),
                static_cast<S>(code.y2)};
    ex.provenance = prov;
    return ex;
}

template <class S>
TrainingExample<S> make_video_pair_example(const Image& prev_frame,
                                           const Annotation& prev_ann,
                                           const Image& curr_frame,
                                           const Annotation& curr_ann,
                                           const NetConfig& net_cfg, const TrainConfig& cfg) {
    if (!prev_ann.box.valid() || !curr_ann.box.valid())
        throw std::invalid_argument("make_video_pair_example: invalid box");
    return make_pair_example<S>(prev_frame, prev_ann.box, curr_frame, curr_ann.box,
                                prev_ann.box, net_cfg, cfg.k1, cfg.k2,
                                Provenance::video_real);
}

// The still image plays both frames; the search region sits at a
// pseudo-motion-displaced anchor so the true box appears shifted.
template <class S>
TrainingExample<S> make_image_pseudo_pair(const Image& image, const BoundingBox& box,
                                          const MotionModel& motion, Rng& rng,
                                          const NetConfig& net_cfg, const TrainConfig& cfg) {
    const BoundingBox anchor = sample_pseudo_motion(box, motion, rng);
    return make_pair_example<S>(image, box, image, box, anchor, net_cfg, cfg.k1, cfg.k2,
                                Provenance::image_augmented);
}

namespace detail {

struct PairRef {
    std::size_t video = 0;
    std::size_t pair = 0;  // index into consecutive annotated pairs
};

inline PairRef sample_video_pair(const TrainingData& data, Rng& rng) {
    // two-stage uniform: video first, then one of its consecutive pairs
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < data.videos.size(); ++i)
        if (data.videos[i].meta.annotations.size() >= 2) usable.push_back(i);
    if (usable.empty())
        throw std::runtime_error("assemble_batch: no video with >= 2 annotations");
    const std::size_t v = usable[rng.uniform_index(usable.size())];
    const std::size_t n_pairs = data.videos[v].meta.annotations.size() - 1;
    return {v, rng.uniform_index(n_pairs)};
}

} // namespace detail

// Batch assembly: base examples alternate video/image (when both are
// enabled), each contributing 1 real + k3 freshly sampled crops; always
// re-sampled, never cached across batches. Truncated to batch_size.
template <class S>
std::vector<TrainingExample<S>> assemble_batch(const TrainingData& data,
                                               const NetConfig& net_cfg,
                                               const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    const bool want_videos = cfg.mix != SourceMix::images_only;
    const bool want_images = cfg.mix != SourceMix::videos_only;
    if (want_videos && data.videos.empty())
        throw std::runtime_error("assemble_batch: video source enabled but empty");
    if (want_images && data.stills.empty())
        throw std::runtime_error("assemble_batch: image source enabled but empty");

    std::vector<TrainingExample<S>> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));

    MotionModel motion = cfg.motion;  // the augmentation choice wins
    motion.mode = cfg.augmentation;

    auto emit_video_base = [&](bool real, int aug_count) {
        const auto ref = detail::sample_video_pair(data, rng);
        const SequenceData& seq = data.videos[ref.video];
        const Annotation& prev = seq.meta.annotations[ref.pair];
        const Annotation& curr = seq.meta.annotations[ref.pair + 1];
        const Image prev_img = seq.frames.at(static_cast<std::size_t>(prev.frame)).to_image();
        const Image curr_img = seq.frames.at(static_cast<std::size_t>(curr.frame)).to_image();
        if (real && static_cast<int>(batch.size()) < cfg.batch_size)
            batch.push_back(
                make_video_pair_example<S>(prev_img, prev, curr_img, curr, net_cfg, cfg));
        for (int a = 0; a < aug_count && static_cast<int>(batch.size()) < cfg.batch_size; ++a) {
            const BoundingBox anchor = sample_pseudo_motion(curr.box, motion, rng);
            auto ex = make_pair_example<S>(prev_img, prev.box, curr_img, curr.box, anchor,
                                           net_cfg, cfg.k1, cfg.k2,
                                           Provenance::video_augmented);
            batch.push_back(std::move(ex));
        }
    };
    auto emit_image_base = [&](bool identity, int aug_count) {
        const TrainingStill& still = data.stills[rng.uniform_index(data.stills.size())];
        const Image img = still.image.to_image();
        if (identity && static_cast<int>(batch.size()) < cfg.batch_size)
            batch.push_back(make_pair_example<S>(img, still.box, img, still.box, still.box,
                                                 net_cfg, cfg.k1, cfg.k2,
                                                 Provenance::image_augmented));
        for (int a = 0; a < aug_count && static_cast<int>(batch.size()) < cfg.batch_size; ++a)
            batch.push_back(
                make_image_pseudo_pair<S>(img, still.box, motion, rng, net_cfg, cfg));
    };

    const int aug_count = cfg.augmentation == AugmentationMode::none ? 0 : cfg.k3;

    if (cfg.aug_per_batch >= 0) {
        // fixed augmented/real composition per batch (sweep mode)
        const int n_real = cfg.batch_size - cfg.aug_per_batch;
        for (int i = 0; i < n_real; ++i) emit_video_base(true, 0);
        bool video_turn = true;
        while (static_cast<int>(batch.size()) < cfg.batch_size) {
            const int chunk = std::max(1, aug_count);
            if (want_videos && (video_turn || !want_images))
                emit_video_base(false, chunk);
            else
                emit_image_base(false, chunk);
            if (want_videos && want_images) video_turn = !video_turn;
        }
        return batch;
    }

    bool video_turn = want_videos;  // videos lead when enabled
    while (static_cast<int>(batch.size()) < cfg.batch_size) {
        if (video_turn)
            emit_video_base(true, aug_count);
        else
            emit_image_base(true, aug_count);
        if (want_videos && want_images) video_turn = !video_turn;
    }
    return batch;
}

struct TrainResult {
    std::vector<double> losses;  // per iteration, batch mean
    long iterations_run = 0;
    bool aborted = false;
    std::string abort_reason;
    std::string last_checkpoint;
};

using TrainLogFn = std::function<void(long iteration, double loss)>;

// Offline training loop: assemble -> forward -> loss -> backward -> SGD,
// with CSV-able loss history and checkpointing. Aborts on non-finite
// loss, keeping the last checkpoint on disk.
template <class S>
TrainResult train(const TrainConfig& cfg, const TrainingData& data, Network<S>& net,
                  const std::string& checkpoint_dir = "", TrainLogFn log = nullptr) {
    cfg.validate();
    TrainResult result;
    Rng rng = Rng::stream(cfg.seed, 0x7261u);
    net.zero_grads();

    auto save_checkpoint = [&](long iter) {
        if (checkpoint_dir.empty()) return;
        std::filesystem::create_directories(checkpoint_dir);
        std::ostringstream name;
        name << checkpoint_dir << "/checkpoint_" << iter << ".net";
        net.save(name.str());
        std::ofstream state(name.str() + ".state");
        state << "iteration = " << iter << "\n";
        state << "rng_state = " << rng.save_state() << "\n";
        result.last_checkpoint = name.str();
    };

    for (long iter = 0; iter < cfg.iterations; ++iter) {
        const auto batch = assemble_batch<S>(data, net.config(), cfg, rng);
        net.set_mode(NetMode::train);

        double total = 0;
        const S inv_batch = static_cast<S>(1.0 / static_cast<double>(batch.size()));
        for (const auto& ex : batch) {
            const std::array<S, 4> out = net.forward(ex.target_crop, ex.search_crop);
            std::array<S, 4> g;
            if (cfg.loss == LossKind::l1) {
                total += static_cast<double>(l1_loss(out, ex.label));
                g = l1_loss_grad(out, ex.label);
            } else {
                total += static_cast<double>(l2_loss(out, ex.label));
                g = l2_loss_grad(out, ex.label);
            }
            for (auto& v : g) v *= inv_batch;
            net.backward(g);
        }
        const double mean_loss = total / static_cast<double>(batch.size());
        if (!std::isfinite(mean_loss)) {
            result.aborted = true;
            result.abort_reason = "non-finite loss at iteration " + std::to_string(iter);
            return result;
        }
        net.sgd_step(cfg.learning_rate);

        result.losses.push_back(mean_loss);
        result.iterations_run = iter + 1;
        if (log) log(iter, mean_loss);
        if (cfg.checkpoint_every > 0 && (iter + 1) % cfg.checkpoint_every == 0)
            save_checkpoint(iter + 1);
    }
    save_checkpoint(cfg.iterations);
    net.set_mode(NetMode::eval);
    return result;
}

inline void write_training_log(const TrainResult& result, const TrainConfig& cfg,
                               const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write training log: " + path);
    f << "iteration,loss,lr,source_mix\n";
    for (std::size_t i = 0; i < result.losses.size(); ++i)
        f << i << "," << result.losses[i] << "," << cfg.learning_rate << ","
          << to_string(cfg.mix) << "\n";
}

// One self-labeled SGD step during tracking (optional mode; off by
// default since the offline-trained net needs no online updates).
template <class S>
void online_finetune_step(Network<S>& net, const Image& prev_frame,
                          const BoundingBox& prev_box, const Image& curr_frame,
                          const BoundingBox& predicted_box, const TrainConfig& cfg) {
    if (cfg.online_learning_rate == 0) return;
    const auto ex = make_pair_example<S>(prev_frame, prev_box, curr_frame, predicted_box,
                                         prev_box, net.config(), cfg.k1, cfg.k2,
                                         Provenance::video_real);
    const NetMode saved = net.mode();
    net.set_mode(NetMode::train);
    net.zero_grads();
    const auto out = net.forward(ex.target_crop, ex.search_crop);
    net.backward(l1_loss_grad(out, ex.label));
    net.sgd_step(cfg.online_learning_rate);
    net.set_mode(saved);
}

} // namespace gtt

#endif
