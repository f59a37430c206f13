#include "gtt/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gtt/config.hpp"

namespace gtt {

double LaplaceDist::pdf(double x) const {
    return std::exp(-std::abs(x - location) / scale) / (2.0 * scale);
}

double LaplaceDist::sample(Rng& rng) const {
    const double u = rng.uniform() - 0.5;
    const double s = u < 0 ? -1.0 : (u > 0 ? 1.0 : 0.0);
    return location - scale * s * std::log(1.0 - 2.0 * std::abs(u));
}

LaplaceFit fit_laplace(const std::vector<double>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("fit_laplace: need at least 2 samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double mad = 0;
    for (double x : sorted) mad += std::abs(x - median);
    mad /= static_cast<double>(n);
    LaplaceFit fit;
    fit.dist = {median, mad};
    fit.degenerate = mad == 0.0;
    fit.count = n;
    return fit;
}

void MotionModel::validate() const {
    if (dx.scale <= 0 || dy.scale <= 0 || gw.scale <= 0 || gh.scale <= 0)
        throw std::invalid_argument("motion model: scales must be positive");
    if (!(gamma_min < 1.0 && 1.0 < gamma_max))
        throw std::invalid_argument("motion model: need gamma_min < 1 < gamma_max");
    if (!(containment > 0 && containment <= 1.0))
        throw std::invalid_argument("motion model: containment must be in (0,1]");
    if (context <= 0) throw std::invalid_argument("motion model: context must be > 0");
}

double MotionModel::uniform_delta_max() const {
    // Largest |dx| the containment constraint accepts at gamma = 1.
    return std::max(0.0, 0.5 * (1.0 + context) - containment);
}

namespace {

// Overlap of [c - e/2, c + e/2] with [0 - w/2, 0 + w/2], both centered
// in units where the target center is the origin.
double axis_overlap(double region_center, double region_extent, double target_extent) {
    const double lo = std::max(region_center - 0.5 * region_extent, -0.5 * target_extent);
    const double hi = std::min(region_center + 0.5 * region_extent, 0.5 * target_extent);
    return std::max(0.0, hi - lo);
}

} // namespace

BoundingBox sample_pseudo_motion(const BoundingBox& box, const MotionModel& m, Rng& rng) {
    if (!box.valid()) throw std::invalid_argument("sample_pseudo_motion: invalid box");
    m.validate();

    const double w = box.width(), h = box.height();
    const char* last_violation = "none";

    for (int attempt = 0; attempt < m.max_attempts; ++attempt) {
        double dxv = 0, dyv = 0, gwv = 1, ghv = 1;
        switch (m.mode) {
            case AugmentationMode::laplace:
                dxv = m.dx.sample(rng);
                dyv = m.dy.sample(rng);
                gwv = m.gw.sample(rng);
                ghv = m.gh.sample(rng);
                break;
            case AugmentationMode::uniform: {
                const double dmax = m.uniform_delta_max();
                dxv = rng.uniform(-dmax, dmax);
                dyv = rng.uniform(-dmax, dmax);
                gwv = rng.uniform(m.gamma_min, m.gamma_max);
                ghv = rng.uniform(m.gamma_min, m.gamma_max);
                break;
            }
            case AugmentationMode::none:
                return box;
        }

        if (!(gwv > m.gamma_min && gwv < m.gamma_max && ghv > m.gamma_min &&
              ghv < m.gamma_max)) {
            last_violation = "gamma interval";
            continue;
        }

        const double cx = dxv * w;  // shifted center relative to the target center
        const double cy = dyv * h;
        const double rw = m.context * gwv * w;
        const double rh = m.context * ghv * h;
        if (axis_overlap(cx, rw, w) < m.containment * w ||
            axis_overlap(cy, rh, h) < m.containment * h) {
            last_violation = "containment";
            continue;
        }

        return BoundingBox::from_center(box.center_x() + cx, box.center_y() + cy,
                                        gwv * w, ghv * h);
    }
    throw std::runtime_error(
        std::string("sample_pseudo_motion: rejection budget exhausted, last violated "
                    "constraint: ") +
        last_violation);
}

void MotionStats::add_pair(const BoundingBox& prev, const BoundingBox& curr) {
    if (prev.width() <= 0 || prev.height() <= 0 || curr.width() <= 0 ||
        curr.height() <= 0) {
        ++skipped_pairs;
        return;
    }
    dx.push_back((curr.center_x() - prev.center_x()) / prev.width());
    dy.push_back((curr.center_y() - prev.center_y()) / prev.height());
    gw.push_back(curr.width() / prev.width());
    gh.push_back(curr.height() / prev.height());
}

FittedMotion fit_motion(const MotionStats& stats) {
    return {fit_laplace(stats.dx), fit_laplace(stats.dy), fit_laplace(stats.gw),
            fit_laplace(stats.gh)};
}

void save_motion_model(const FittedMotion& fit, const std::string& path) {
    KeyValueFile kv;
    kv.set("mu_dx", fit.dx.dist.location);
    kv.set("b_dx", fit.dx.dist.scale);
    kv.set("mu_dy", fit.dy.dist.location);
    kv.set("b_dy", fit.dy.dist.scale);
    kv.set("mu_gw", fit.gw.dist.location);
    kv.set("b_gw", fit.gw.dist.scale);
    kv.set("mu_gh", fit.gh.dist.location);
    kv.set("b_gh", fit.gh.dist.scale);
    kv.set("n_dx", static_cast<long>(fit.dx.count));
    kv.set("n_dy", static_cast<long>(fit.dy.count));
    kv.set("n_gw", static_cast<long>(fit.gw.count));
    kv.set("n_gh", static_cast<long>(fit.gh.count));
    kv.write_file(path);
}

MotionModel load_motion_model(const std::string& path) {
    const KeyValueFile kv = KeyValueFile::parse_file(path);
    MotionModel m;
    m.dx = {kv.get_double("mu_dx"), kv.get_double("b_dx")};
    m.dy = {kv.get_double("mu_dy"), kv.get_double("b_dy")};
    m.gw = {kv.get_double("mu_gw"), kv.get_double("b_gw")};
    m.gh = {kv.get_double("mu_gh"), kv.get_double("b_gh")};
    m.validate();
    return m;
}

} // namespace gtt
