#ifndef GTT_MOTION_HPP
#define GTT_MOTION_HPP

#include <string>
#include <vector>

#include "gtt/bbox.hpp"
#include "gtt/rng.hpp"

namespace gtt {

struct LaplaceDist {
    double location = 0.0;
    double scale = 1.0;  // > 0

    double pdf(double x) const;
    // Inverse-CDF draw: mu - b * sign(u - 1/2) * ln(1 - 2|u - 1/2|).
    double sample(Rng& rng) const;
};

struct LaplaceFit {
    LaplaceDist dist;
    bool degenerate = false;  // all samples identical, scale 0
    std::size_t count = 0;
};

// Maximum-likelihood fit: location = sample median, scale = mean
// absolute deviation from that median. Requires >= 2 samples.
LaplaceFit fit_laplace(const std::vector<double>& samples);

enum class AugmentationMode { laplace, uniform, none };

// Motion-smoothness prior for (dx, dy, gamma_w, gamma_h) driving the
// pseudo-motion augmentation. dx, dy are center shifts in units of box
// width/height; gammas are multiplicative size changes.
struct MotionModel {
    LaplaceDist dx{0.0, 1.0 / 5.0};
    LaplaceDist dy{0.0, 1.0 / 5.0};
    LaplaceDist gw{1.0, 1.0 / 15.0};
    LaplaceDist gh{1.0, 1.0 / 15.0};
    double gamma_min = 0.6;
    double gamma_max = 1.4;
    // Min fraction of the target's extent the induced search region must
    // cover, per axis.
    double containment = 0.5;
    // Context factor of the search region the constraint is checked against.
    double context = kDefaultContextFactor;
    int max_attempts = 1000;
    AugmentationMode mode = AugmentationMode::laplace;

    void validate() const;
    // Half-range of the matched uniform baseline for dx/dy: the largest
    // |dx| accepted at gamma = 1 under the containment constraint.
    double uniform_delta_max() const;
};

// One constrained draw of (dx, dy, gw, gh) applied to `box` (Eqs. of the
// smoothness model). The whole 4-tuple is rejection-sampled until the
// gamma interval and per-axis containment hold; throws after
// max_attempts naming the violated constraint.
BoundingBox sample_pseudo_motion(const BoundingBox& box, const MotionModel& m, Rng& rng);

// Relative motion statistics of consecutive annotated boxes.
struct MotionStats {
    std::vector<double> dx, dy, gw, gh;
    std::size_t skipped_pairs = 0;  // zero-size annotations

    void add_pair(const BoundingBox& prev, const BoundingBox& curr);
};

// Fit all four variables and serialize as a key=value file.
struct FittedMotion {
    LaplaceFit dx, dy, gw, gh;
};
FittedMotion fit_motion(const MotionStats& stats);
void save_motion_model(const FittedMotion& fit, const std::string& path);
MotionModel load_motion_model(const std::string& path);

} // namespace gtt

#endif
