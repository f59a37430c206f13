#ifndef GTT_SYNTH_HPP
#define GTT_SYNTH_HPP

#include <string>
#include <vector>

#include "gtt/dataset.hpp"
#include "gtt/image.hpp"

namespace gtt {

enum class ShapeKind { rectangle, ellipse, textured };
std::string shape_kind_name(ShapeKind k);

// Desk-scale stand-in for a labeled tracking dataset: one designated
// target moving under Laplace translation/scale streams among
// distractors, with dense ground truth and per-frame attribute flags.
struct SyntheticSceneConfig {
    int canvas_width = 160;
    int canvas_height = 120;
    int frame_count = 40;
    // Per-step Laplace scales in box-relative units (translation) and
    // multiplicative size change.
    double motion_scale = 0.06;
    double size_scale = 0.015;
    // Constant per-step drift added on top of the random walk, in
    // box-relative units (useful for pure-translation scenes).
    double drift_x = 0.0, drift_y = 0.0;
    double gamma_min = 0.6, gamma_max = 1.4;
    int distractor_count = 3;
    // Distractors reuse the target's shape and color, exercising the
    // small-motion prior.
    bool near_identical_distractors = true;
    double illumination_amplitude = 0.0;  // 0 disables the drift
    int illumination_period = 20;
    int occluder_period = 0;  // frames between occlusion passes; 0 disables
    int occluder_duration = 5;
    double camera_motion_amplitude = 0.0;  // Laplace scale of global shift, px
    std::uint64_t seed = 0;
    std::string id = "synthetic";

    void validate() const;
};

struct SyntheticVideo {
    VideoSequence meta;           // frame_paths empty; annotations dense
    std::vector<Image> frames;    // aligned with annotation frame indices
};

// Seed-deterministic at the pixel level. If the target cannot be kept on
// the canvas the sequence is truncated at the last valid frame.
SyntheticVideo generate_synthetic_video(const SyntheticSceneConfig& cfg);

// Single still frame with one labeled object, for the image branch of
// training.
struct SyntheticStill {
    Image image;
    BoundingBox box;
    ShapeKind shape = ShapeKind::rectangle;
};
SyntheticStill generate_synthetic_still(const SyntheticSceneConfig& cfg);

// Writes frames (.ppm), groundtruth.txt (corner4), attributes.txt and a
// top-level manifest.txt under out_dir.
void write_synthetic_dataset(const std::vector<SyntheticVideo>& videos,
                             const std::string& out_dir);

} // namespace gtt

#endif
