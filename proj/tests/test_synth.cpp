#include <doctest.h>

#include <cmath>

#include "gtt/synth.hpp"

using namespace gtt;

TEST_CASE("synthetic videos are pixel-deterministic per seed") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 6;
    cfg.canvas_width = 80;
    cfg.canvas_height = 60;
    cfg.seed = 21;
    const SyntheticVideo a = generate_synthetic_video(cfg);
    const SyntheticVideo b = generate_synthetic_video(cfg);
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t f = 0; f < a.frames.size(); ++f)
        CHECK(a.frames[f].data == b.frames[f].data);
    for (std::size_t f = 0; f < a.meta.annotations.size(); ++f)
        CHECK(a.meta.annotations[f].box == b.meta.annotations[f].box);

    cfg.seed = 22;
    const SyntheticVideo c = generate_synthetic_video(cfg);
    CHECK(a.frames[1].data != c.frames[1].data);
}

TEST_CASE("zero motion scales keep the box static") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 8;
    cfg.motion_scale = 1e-300;
    cfg.size_scale = 1e-300;
    cfg.seed = 3;
    const SyntheticVideo v = generate_synthetic_video(cfg);
    REQUIRE(v.meta.annotations.size() == 8);
    const BoundingBox first = v.meta.annotations[0].box;
    for (const auto& a : v.meta.annotations) {
        CHECK(a.box.center_x() == doctest::Approx(first.center_x()).epsilon(1e-9));
        CHECK(a.box.center_y() == doctest::Approx(first.center_y()).epsilon(1e-9));
        CHECK(a.box.width() == doctest::Approx(first.width()).epsilon(1e-9));
    }
}

TEST_CASE("constant drift advances the center by a fixed box fraction") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 5;
    cfg.motion_scale = 1e-300;
    cfg.size_scale = 1e-300;
    cfg.drift_x = 0.2;
    cfg.seed = 4;
    const SyntheticVideo v = generate_synthetic_video(cfg);
    REQUIRE(v.meta.annotations.size() == 5);
    for (std::size_t f = 1; f < v.meta.annotations.size(); ++f) {
        const auto& prev = v.meta.annotations[f - 1].box;
        const auto& cur = v.meta.annotations[f].box;
        CHECK(cur.center_x() - prev.center_x() ==
              doctest::Approx(0.2 * prev.width()).epsilon(1e-6));
        CHECK(cur.center_y() == doctest::Approx(prev.center_y()).epsilon(1e-6));
    }
}

TEST_CASE("occluder scenes mark occlusion frames") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 20;
    cfg.occluder_period = 8;
    cfg.occluder_duration = 3;
    cfg.seed = 5;
    const SyntheticVideo v = generate_synthetic_video(cfg);
    int occluded = 0;
    for (const auto& a : v.meta.annotations)
        if (a.attributes & attr_occlusion) ++occluded;
    CHECK(occluded > 0);
    CHECK(occluded < static_cast<int>(v.meta.annotations.size()));

    SyntheticSceneConfig plain = cfg;
    plain.occluder_period = 0;
    const SyntheticVideo p = generate_synthetic_video(plain);
    for (const auto& a : p.meta.annotations) CHECK((a.attributes & attr_occlusion) == 0);
}

TEST_CASE("camera motion and illumination scenes carry their attributes") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 10;
    cfg.camera_motion_amplitude = 1.0;
    cfg.seed = 6;
    const SyntheticVideo cam = generate_synthetic_video(cfg);
    bool any_cam = false;
    for (const auto& a : cam.meta.annotations) any_cam |= (a.attributes & attr_camera_motion) != 0;
    CHECK(any_cam);

    SyntheticSceneConfig icfg;
    icfg.frame_count = 10;
    icfg.illumination_amplitude = 0.3;
    icfg.seed = 7;
    const SyntheticVideo ill = generate_synthetic_video(icfg);
    bool any_ill = false;
    for (const auto& a : ill.meta.annotations)
        any_ill |= (a.attributes & attr_illumination_change) != 0;
    CHECK(any_ill);
}

TEST_CASE("runaway drift truncates the sequence instead of leaving the canvas") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 60;
    cfg.canvas_width = 80;
    cfg.canvas_height = 60;
    cfg.motion_scale = 1e-300;
    cfg.size_scale = 1e-300;
    cfg.drift_x = 0.8;  // leaves an 80px canvas within a few frames
    cfg.seed = 8;
    const SyntheticVideo v = generate_synthetic_video(cfg);
    CHECK(v.meta.annotations.size() < 60);
    CHECK(v.meta.annotations.size() >= 2);
    CHECK(v.frames.size() == v.meta.annotations.size());
    for (const auto& a : v.meta.annotations) {
        CHECK(a.box.x1 >= 0);
        CHECK(a.box.x2 <= cfg.canvas_width);
    }
}

TEST_CASE("annotations are dense and boxes stay valid") {
    SyntheticSceneConfig cfg;
    cfg.frame_count = 12;
    cfg.seed = 9;
    const SyntheticVideo v = generate_synthetic_video(cfg);
    for (std::size_t f = 0; f < v.meta.annotations.size(); ++f) {
        CHECK(v.meta.annotations[f].frame == static_cast<int>(f));
        CHECK(v.meta.annotations[f].box.valid());
    }
    CHECK(v.frames[0].width == cfg.canvas_width);
    CHECK(v.frames[0].height == cfg.canvas_height);
}

TEST_CASE("synthetic stills are deterministic and labeled inside the image") {
    SyntheticSceneConfig cfg;
    cfg.canvas_width = 64;
    cfg.canvas_height = 48;
    cfg.seed = 10;
    const SyntheticStill a = generate_synthetic_still(cfg);
    const SyntheticStill b = generate_synthetic_still(cfg);
    CHECK(a.image.data == b.image.data);
    CHECK(a.box.valid());
    CHECK(a.box.x1 >= 0);
    CHECK(a.box.y2 <= cfg.canvas_height);
}
