#ifndef GTT_TRACKER_HPP
#define GTT_TRACKER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "gtt/dataset.hpp"
#include "gtt/eval.hpp"
#include "gtt/net.hpp"

namespace gtt {

struct TrackerOptions {
    double k1 = kDefaultContextFactor;  // target crop context
    double k2 = kDefaultContextFactor;  // search region context
    double min_box_size = 2.0;          // px, enforced after decode
    bool collect_timing = false;
};

struct TrackerTiming {
    std::vector<double> frame_ms;  // crop + forward + decode per step

    double mean() const {
        if (frame_ms.empty()) return 0;
        double s = 0;
        for (double v : frame_ms) s += v;
        return s / static_cast<double>(frame_ms.size());
    }
    double stddev() const {
        if (frame_ms.size() < 2) return 0;
        const double m = mean();
        double s = 0;
        for (double v : frame_ms) s += (v - m) * (v - m);
        return std::sqrt(s / static_cast<double>(frame_ms.size() - 1));
    }
};

template <class S>
struct TrackerState {
    BoundingBox box;
    Image prev_frame;
    int frame_index = 0;
    bool init_clamped = false;
    std::vector<int> fallback_frames;
    TrackerTiming timing;
};

inline BoundingBox clamp_box_to_frame(BoundingBox b, int width, int height,
                                      double min_size) {
    b.x1 = std::clamp(b.x1, 0.0, static_cast<double>(width) - min_size);
    b.y1 = std::clamp(b.y1, 0.0, static_cast<double>(height) - min_size);
    b.x2 = std::clamp(b.x2, min_size, static_cast<double>(width));
    b.y2 = std::clamp(b.y2, min_size, static_cast<double>(height));
    if (b.x2 - b.x1 < min_size) {
        const double cx = std::clamp(b.center_x(), 0.5 * min_size, width - 0.5 * min_size);
        b.x1 = cx - 0.5 * min_size;
        b.x2 = cx + 0.5 * min_size;
    }
    if (b.y2 - b.y1 < min_size) {
        const double cy = std::clamp(b.center_y(), 0.5 * min_size, height - 0.5 * min_size);
        b.y1 = cy - 0.5 * min_size;
        b.y2 = cy + 0.5 * min_size;
    }
    return b;
}

template <class S>
TrackerState<S> tracker_init(const Image& first_frame, const BoundingBox& gt_box,
                             const TrackerOptions& opts = {}) {
    if (!gt_box.valid()) throw std::invalid_argument("tracker_init: degenerate box");
    TrackerState<S> st;
    st.box = clamp_box_to_frame(gt_box, first_frame.width, first_frame.height,
                                opts.min_box_size);
    st.init_clamped = !(st.box == gt_box);
    st.prev_frame = first_frame;
    st.frame_index = 0;
    return st;
}

// One tracking step: crop previous-frame target and current-frame search
// region around the carried box, forward once, decode, clamp, advance.
template <class S>
BoundingBox tracker_step(TrackerState<S>& state, Network<S>& net,
                         const Image& current_frame, const TrackerOptions& opts = {}) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    const int in_size = net.config().input_size;
    const double scale = net.config().output_scale;

    SearchRegion target_region = make_search_region(state.box, opts.k1);
    const Image target_crop = crop_and_resize(state.prev_frame, target_region, in_size);
    SearchRegion search_region = make_search_region(state.box, opts.k2);
    const Image search_crop = crop_and_resize(current_frame, search_region, in_size);

    const Tensor<S> target_t = tensor_from_image<S>(target_crop);
    const Tensor<S> search_t = tensor_from_image<S>(search_crop);

    const std::array<S, 4> out = net.forward(target_t, search_t);
    CornerCode code{static_cast<double>(out[0]), static_cast<double>(out[1]),
                    static_cast<double>(out[2]), static_cast<double>(out[3])};
    const std::optional<BoundingBox> decoded = decode_output(code, search_region, scale);

    BoundingBox pred;
    if (decoded) {
        pred = clamp_box_to_frame(*decoded, current_frame.width, current_frame.height,
                                  opts.min_box_size);
    } else {
        // degenerate regression output: keep the previous box
        pred = clamp_box_to_frame(state.box, current_frame.width, current_frame.height,
                                  opts.min_box_size);
        state.fallback_frames.push_back(state.frame_index + 1);
    }

    state.box = pred;
    state.prev_frame = current_frame;
    ++state.frame_index;

    if (opts.collect_timing) {
        const auto t1 = clock::now();
        state.timing.frame_ms.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return pred;
}

namespace detail {
inline const Annotation* find_annotation(const VideoSequence& meta, int frame) {
    for (const auto& a : meta.annotations)
        if (a.frame == frame) return &a;
    return nullptr;
}
} // namespace detail

// Track a whole sequence from an initial box. When `params` is given,
// the failure/reinit protocol runs live: a failure on an annotated frame
// reinitializes from ground truth `reinit_delay` frames later.
template <class S>
TrackRecord track_sequence(Network<S>& net, const SequenceData& seq,
                           const BoundingBox& init_box, const TrackerOptions& opts = {},
                           const EvalParams* params = nullptr) {
    if (seq.frames.empty()) throw std::invalid_argument("track_sequence: empty sequence");
    net.set_mode(NetMode::eval);

    TrackRecord rec;
    rec.sequence_id = seq.meta.id;

    Image first = seq.frames[0].to_image();
    TrackerState<S> st = tracker_init<S>(first, init_box, opts);

    auto push_frame = [&](int idx, std::optional<BoundingBox> pred, bool fallback) {
        TrackRecord::Frame fr;
        fr.frame = idx;
        fr.pred = pred;
        if (const Annotation* a = detail::find_annotation(seq.meta, idx)) {
            fr.gt = a->box;
            fr.attributes = a->attributes;
        }
        fr.fallback = fallback;
        rec.frames.push_back(fr);
    };

    push_frame(0, st.box, false);

    long reinit_at = -1;  // pending reinitialization frame
    for (std::size_t i = 1; i < seq.frames.size(); ++i) {
        const int idx = static_cast<int>(i);
        Image frame = seq.frames[i].to_image();

        if (params && reinit_at >= 0) {
            if (idx < reinit_at) {
                push_frame(idx, std::nullopt, false);  // inside the reinit gap
                st.prev_frame = frame;                 // keep the frame chain fresh
                ++st.frame_index;
                continue;
            }
            // reinitialize from ground truth; without an annotation here,
            // the gap extends to the next annotated frame
            const Annotation* a = detail::find_annotation(seq.meta, idx);
            if (!a) {
                push_frame(idx, std::nullopt, false);
                st.prev_frame = frame;
                ++st.frame_index;
                continue;
            }
            st = tracker_init<S>(frame, a->box, opts);
            st.frame_index = idx;
            rec.reinit_frames.push_back(idx);
            reinit_at = -1;
            push_frame(idx, st.box, false);
            continue;
        }

        const std::size_t fallbacks_before = st.fallback_frames.size();
        const BoundingBox pred = tracker_step(st, net, frame, opts);
        push_frame(idx, pred, st.fallback_frames.size() != fallbacks_before);

        if (params) {
            if (const Annotation* a = detail::find_annotation(seq.meta, idx)) {
                if (iou(pred, a->box) <= params->failure_threshold) {
                    rec.failure_frames.push_back(idx);
                    reinit_at = idx + params->reinit_delay;
                }
            }
        }
    }

    rec.mean_frame_ms = st.timing.mean();
    rec.stddev_frame_ms = st.timing.stddev();
    rec.timed_frames = static_cast<int>(st.timing.frame_ms.size());
    return rec;
}

// Prediction file: corner4 rows with a '#' metadata header. Timing goes
// to a sidecar so the primary output is byte-stable across runs.
inline void write_predictions(const TrackRecord& rec, const std::string& path,
                              const std::string& checkpoint_id) {
    std::vector<Annotation> anns;
    for (const auto& fr : rec.frames)
        if (fr.pred) anns.push_back({fr.frame, *fr.pred, 0});
    write_corner4(anns, path,
                  {"tracker predictions", "checkpoint: " + checkpoint_id,
                   "sequence: " + rec.sequence_id});
    if (rec.timed_frames > 0) {
        std::ofstream t(path + ".timing");
        t << "frames = " << rec.timed_frames << "\n"
          << "mean_ms = " << rec.mean_frame_ms << "\n"
          << "stddev_ms = " << rec.stddev_frame_ms << "\n";
    }
}

} // namespace gtt

#endif
