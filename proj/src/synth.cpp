#include "gtt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "gtt/motion.hpp"
#include "gtt/rng.hpp"

namespace fs = std::filesystem;

namespace gtt {

std::string shape_kind_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::rectangle: return "rectangle";
        case ShapeKind::ellipse: return "ellipse";
        case ShapeKind::textured: return "textured";
    }
    return "unknown";
}

void SyntheticSceneConfig::validate() const {
    if (canvas_width < 32 || canvas_height < 32)
        throw std::invalid_argument("synth: canvas too small");
    if (frame_count < 1) throw std::invalid_argument("synth: frame_count must be >= 1");
    if (distractor_count < 0)
        throw std::invalid_argument("synth: distractor_count must be >= 0");
    if (motion_scale < 0 || size_scale < 0)
        throw std::invalid_argument("synth: motion scales must be >= 0");
}

namespace {

struct Obj {
    ShapeKind kind;
    double cx, cy, w, h;        // world coordinates
    std::array<float, 3> color;
    std::uint64_t tex_seed;
};

std::uint64_t pixel_hash(std::uint64_t seed, int x, int y) {
    std::uint64_t v = seed ^ (static_cast<std::uint64_t>(x) * 0x9e3779b97f4a7c15ull) ^
                      (static_cast<std::uint64_t>(y) * 0xc2b2ae3d27d4eb4full);
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
    return v ^ (v >> 31);
}

bool inside(const Obj& o, double wx, double wy) {
    const double nx = (wx - o.cx) / (0.5 * o.w);
    const double ny = (wy - o.cy) / (0.5 * o.h);
    if (o.kind == ShapeKind::ellipse) return nx * nx + ny * ny <= 1.0;
    return std::abs(nx) <= 1.0 && std::abs(ny) <= 1.0;
}

std::array<float, 3> shade(const Obj& o, double wx, double wy) {
    if (o.kind != ShapeKind::textured) return o.color;
    // 4px procedural checker in object-local coordinates
    const int tx = static_cast<int>(std::floor((wx - o.cx) / 4.0));
    const int ty = static_cast<int>(std::floor((wy - o.cy) / 4.0));
    const float dark = (pixel_hash(o.tex_seed, tx, ty) & 1) ? 0.55f : 1.0f;
    return {o.color[0] * dark, o.color[1] * dark, o.color[2] * dark};
}

std::array<float, 3> background(int wx, int wy) {
    const float a = 90.f + 35.f * std::sin(0.13f * wx) * std::sin(0.17f * wy);
    const float b = 90.f + 30.f * std::sin(0.07f * wx + 1.3f);
    const float n = static_cast<float>(pixel_hash(0xb16b00b5, wx, wy) & 15);
    return {a + n, b + n, 0.5f * (a + b) + n};
}

std::array<float, 3> random_color(Rng& rng) {
    // saturated-ish colors that contrast with the dim background
    return {static_cast<float>(rng.uniform(120, 255)),
            static_cast<float>(rng.uniform(120, 255)),
            static_cast<float>(rng.uniform(120, 255))};
}

Obj make_object(const SyntheticSceneConfig& cfg, Rng& rng, ShapeKind kind) {
    Obj o;
    o.kind = kind;
    o.w = rng.uniform(14, 0.25 * cfg.canvas_width);
    o.h = rng.uniform(14, 0.25 * cfg.canvas_height);
    o.cx = rng.uniform(0.2 * cfg.canvas_width, 0.8 * cfg.canvas_width);
    o.cy = rng.uniform(0.2 * cfg.canvas_height, 0.8 * cfg.canvas_height);
    o.color = random_color(rng);
    o.tex_seed = rng.raw();
    return o;
}

ShapeKind pick_shape(Rng& rng) {
    switch (rng.uniform_index(3)) {
        case 0: return ShapeKind::rectangle;
        case 1: return ShapeKind::ellipse;
        default: return ShapeKind::textured;
    }
}

void render(Image& img, const std::vector<const Obj*>& objs, double cam_x, double cam_y,
            double illum) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double wx = x + cam_x;
            const double wy = y + cam_y;
            std::array<float, 3> px =
                background(static_cast<int>(std::floor(wx)), static_cast<int>(std::floor(wy)));
            for (const Obj* o : objs)
                if (inside(*o, wx, wy)) px = shade(*o, wx, wy);
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = std::clamp(static_cast<float>(px[c] * illum), 0.f, 255.f);
        }
    }
}

} // namespace

SyntheticVideo generate_synthetic_video(const SyntheticSceneConfig& cfg) {
    cfg.validate();
    Rng scene_rng = Rng::stream(cfg.seed, 0);
    Rng motion_rng = Rng::stream(cfg.seed, 1);
    Rng cam_rng = Rng::stream(cfg.seed, 2);

    const ShapeKind target_shape = pick_shape(scene_rng);
    Obj target = make_object(cfg, scene_rng, target_shape);

    std::vector<Obj> distractors;
    for (int i = 0; i < cfg.distractor_count; ++i) {
        Obj d = make_object(cfg, scene_rng,
                            cfg.near_identical_distractors ? target_shape : pick_shape(scene_rng));
        if (cfg.near_identical_distractors) {
            d.color = target.color;
            d.tex_seed = target.tex_seed;
            d.w = target.w * scene_rng.uniform(0.9, 1.1);
            d.h = target.h * scene_rng.uniform(0.9, 1.1);
        }
        // keep distractors from spawning on top of the target
        if (std::abs(d.cx - target.cx) < target.w && std::abs(d.cy - target.cy) < target.h)
            d.cx = std::fmod(d.cx + 0.45 * cfg.canvas_width, 0.9 * cfg.canvas_width) +
                   0.05 * cfg.canvas_width;
        distractors.push_back(d);
    }

    Obj occluder;
    occluder.kind = ShapeKind::rectangle;
    occluder.color = {40, 40, 40};
    occluder.tex_seed = 0;

    const LaplaceDist step_dx{0.0, cfg.motion_scale};
    const LaplaceDist step_dy{0.0, cfg.motion_scale};
    const LaplaceDist step_g{1.0, cfg.size_scale};
    const LaplaceDist cam_step{0.0, cfg.camera_motion_amplitude};

    const double min_w = 10, min_h = 10;
    const double max_w = 0.45 * cfg.canvas_width, max_h = 0.45 * cfg.canvas_height;

    SyntheticVideo out;
    out.meta.id = cfg.id;
    out.meta.class_label = shape_kind_name(target_shape);

    double cam_x = 0, cam_y = 0;

    for (int t = 0; t < cfg.frame_count; ++t) {
        std::uint8_t attrs = 0;

        if (t > 0) {
            // target step; resample rather than walking off the canvas
            bool placed = false;
            double dxv = 0, dyv = 0, gwv = 1, ghv = 1;
            for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
                dxv = cfg.drift_x + (cfg.motion_scale > 0 ? step_dx.sample(motion_rng) : 0.0);
                dyv = cfg.drift_y + (cfg.motion_scale > 0 ? step_dy.sample(motion_rng) : 0.0);
                gwv = cfg.size_scale > 0 ? step_g.sample(motion_rng) : 1.0;
                ghv = cfg.size_scale > 0 ? step_g.sample(motion_rng) : 1.0;
                if (gwv <= cfg.gamma_min || gwv >= cfg.gamma_max || ghv <= cfg.gamma_min ||
                    ghv >= cfg.gamma_max)
                    continue;
                const double nw = std::clamp(target.w * gwv, min_w, max_w);
                const double nh = std::clamp(target.h * ghv, min_h, max_h);
                const double ncx = target.cx + target.w * dxv;
                const double ncy = target.cy + target.h * dyv;
                // the whole box must stay inside the world window seen by the camera
                if (ncx - 0.5 * nw < cam_x + 1 || ncx + 0.5 * nw > cam_x + cfg.canvas_width - 1 ||
                    ncy - 0.5 * nh < cam_y + 1 || ncy + 0.5 * nh > cam_y + cfg.canvas_height - 1)
                    continue;
                target.cx = ncx;
                target.cy = ncy;
                target.w = nw;
                target.h = nh;
                placed = true;
            }
            if (!placed) break;  // truncate: target would leave the canvas

            if (std::abs(gwv - 1.0) > 0.01 || std::abs(ghv - 1.0) > 0.01)
                attrs |= attr_size_change;
            if (cfg.motion_scale > 0 && std::hypot(dxv, dyv) > 1.5 * cfg.motion_scale)
                attrs |= attr_motion_change;

            if (cfg.camera_motion_amplitude > 0) {
                const double sx = cam_step.sample(cam_rng);
                const double sy = cam_step.sample(cam_rng);
                cam_x += sx;
                cam_y += sy;
                if (std::hypot(sx, sy) > 0.1) attrs |= attr_camera_motion;
            }

            for (auto& d : distractors) {
                d.cx += d.w * step_dx.sample(motion_rng);
                d.cy += d.h * step_dy.sample(motion_rng);
                // reflect scenery at the world window borders
                d.cx = std::clamp(d.cx, cam_x, cam_x + static_cast<double>(cfg.canvas_width));
                d.cy = std::clamp(d.cy, cam_y, cam_y + static_cast<double>(cfg.canvas_height));
            }
        }

        double illum = 1.0;
        if (cfg.illumination_amplitude > 0) {
            illum = 1.0 + cfg.illumination_amplitude *
                              std::sin(2.0 * M_PI * t / cfg.illumination_period);
            if (std::abs(illum - 1.0) > 0.02) attrs |= attr_illumination_change;
        }

        std::vector<const Obj*> draw;
        for (const auto& d : distractors) draw.push_back(&d);
        draw.push_back(&target);

        bool occluded = false;
        if (cfg.occluder_period > 0 && t >= cfg.occluder_period) {
            const int phase = t % cfg.occluder_period;
            if (phase < cfg.occluder_duration) {
                // sweep across the target over the occlusion window
                const double u = (phase + 0.5) / cfg.occluder_duration;  // 0..1
                occluder.w = 0.8 * target.w;
                occluder.h = 1.3 * target.h;
                occluder.cx = target.cx + (u - 0.5) * 2.0 * target.w;
                occluder.cy = target.cy;
                if (std::abs(occluder.cx - target.cx) < 0.5 * (occluder.w + target.w))
                    occluded = true;
                draw.push_back(&occluder);
            }
        }
        if (occluded) attrs |= attr_occlusion;

        Image frame(cfg.canvas_width, cfg.canvas_height);
        render(frame, draw, cam_x, cam_y, illum);

        Annotation a;
        a.frame = t;
        a.box = BoundingBox::from_center(target.cx - cam_x, target.cy - cam_y, target.w,
                                         target.h);
        a.attributes = attrs;
        out.meta.annotations.push_back(a);
        out.frames.push_back(std::move(frame));
    }
    return out;
}

SyntheticStill generate_synthetic_still(const SyntheticSceneConfig& cfg) {
    SyntheticSceneConfig one = cfg;
    one.frame_count = 1;
    one.occluder_period = 0;
    const SyntheticVideo v = generate_synthetic_video(one);
    SyntheticStill s;
    s.image = v.frames.at(0);
    s.box = v.meta.annotations.at(0).box;
    s.shape = ShapeKind::rectangle;
    if (v.meta.class_label) {
        if (*v.meta.class_label == "ellipse") s.shape = ShapeKind::ellipse;
        if (*v.meta.class_label == "textured") s.shape = ShapeKind::textured;
    }
    return s;
}

void write_synthetic_dataset(const std::vector<SyntheticVideo>& videos,
                             const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
    if (!manifest)
        throw std::runtime_error("write_synthetic_dataset: cannot write manifest in " + out_dir);
    manifest << "# <frame_dir> <annotations> <format> [attrs=...] [class=...]\n";
    for (const auto& v : videos) {
        const fs::path seq_dir = fs::path(out_dir) / v.meta.id;
        fs::create_directories(seq_dir);
        for (std::size_t i = 0; i < v.frames.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%06zu.ppm", i);
            write_ppm(v.frames[i], (seq_dir / name).string());
        }
        write_corner4(v.meta.annotations, (seq_dir / "groundtruth.txt").string());
        std::ofstream attrs(seq_dir / "attributes.txt");
        for (const auto& a : v.meta.annotations)
            attrs << a.frame << " " << attributes_to_string(a.attributes) << "\n";
        manifest << v.meta.id << " " << v.meta.id << "/groundtruth.txt corner4 attrs="
                 << v.meta.id << "/attributes.txt";
        if (v.meta.class_label) manifest << " class=" << *v.meta.class_label;
        manifest << "\n";
    }
}

} // namespace gtt
