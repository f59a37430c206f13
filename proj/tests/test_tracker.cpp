#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gtt/tracker.hpp"

using namespace gtt;
namespace fs = std::filesystem;

namespace {

NetConfig tiny_net() {
    NetConfig c;
    c.input_size = 8;
    c.conv_stages = {{4, 3, 1, 2}};
    c.fc_layers = 2;
    c.fc_width = 8;
    c.dropout = 0.0;
    return c;
}

// A network whose output is a constant: zero every parameter, then set
// the output bias. Bias (2.5,2.5,7.5,7.5) decodes to the previous box.
Network<float> constant_output_net(const std::array<float, 4>& bias) {
    Network<float> net(tiny_net(), 0);
    for (auto* p : net.parameters()) p->zero();
    auto& b = *net.parameters().back();
    for (int i = 0; i < 4; ++i) b.v[i] = bias[i];
    return net;
}

SequenceData constant_sequence(int frames, int w, int h,
                               const std::vector<BoundingBox>& gt) {
    SequenceData seq;
    seq.meta.id = "const";
    const Frame8 f8 = Frame8::from_image(Image(w, h, 90.f));
    for (int i = 0; i < frames; ++i) {
        seq.frames.push_back(f8);
        seq.meta.annotations.push_back({i, gt[static_cast<std::size_t>(i) % gt.size()], 0});
    }
    return seq;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("init keeps an in-frame box and flags a clamped one") {
    const Image frame(40, 30, 10.f);
    const BoundingBox inside{5, 5, 15, 15};
    auto st = tracker_init<float>(frame, inside);
    CHECK(st.box == inside);
    CHECK_FALSE(st.init_clamped);

    const BoundingBox overhang{-5, 5, 15, 15};
    auto st2 = tracker_init<float>(frame, overhang);
    CHECK(st2.init_clamped);
    CHECK(st2.box.x1 == 0.0);
    CHECK(st2.box.x2 == 15.0);

    CHECK_THROWS_AS(tracker_init<float>(frame, {10, 10, 5, 20}), std::invalid_argument);
}

TEST_CASE("the carried-box oracle keeps the box constant") {
    Network<float> net = constant_output_net({2.5f, 2.5f, 7.5f, 7.5f});
    const BoundingBox start{8, 6, 18, 16};
    const SequenceData seq = constant_sequence(6, 40, 30, {start});
    const TrackRecord rec = track_sequence(net, seq, start);
    REQUIRE(rec.frames.size() == 6);
    for (const auto& fr : rec.frames) {
        REQUIRE(fr.pred.has_value());
        CHECK(fr.pred->x1 == doctest::Approx(start.x1).epsilon(1e-4));
        CHECK(fr.pred->y2 == doctest::Approx(start.y2).epsilon(1e-4));
        CHECK_FALSE(fr.fallback);
    }
}

TEST_CASE("a one-frame sequence reports only the initialization") {
    Network<float> net = constant_output_net({2.5f, 2.5f, 7.5f, 7.5f});
    const BoundingBox start{5, 5, 15, 15};
    const SequenceData seq = constant_sequence(1, 40, 30, {start});
    const TrackRecord rec = track_sequence(net, seq, start);
    REQUIRE(rec.frames.size() == 1);
    CHECK(rec.frames[0].pred == start);
    CHECK_THROWS_AS(track_sequence(net, SequenceData{}, start), std::invalid_argument);
}

TEST_CASE("replaying a sequence is deterministic") {
    Network<float> net(tiny_net(), 5);
    const BoundingBox start{10, 8, 22, 20};
    const SequenceData seq = constant_sequence(8, 40, 30, {start});
    const TrackRecord a = track_sequence(net, seq, start);
    const TrackRecord b = track_sequence(net, seq, start);
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i) CHECK(a.frames[i].pred == b.frames[i].pred);
}

TEST_CASE("a degenerate regression output falls back to the previous box") {
    // code (5,5,5,5) decodes to a zero-area box
    Network<float> net = constant_output_net({5.f, 5.f, 5.f, 5.f});
    const BoundingBox start{8, 6, 18, 16};
    const SequenceData seq = constant_sequence(4, 40, 30, {start});
    const TrackRecord rec = track_sequence(net, seq, start);
    for (std::size_t i = 1; i < rec.frames.size(); ++i) {
        CHECK(rec.frames[i].fallback);
        CHECK(rec.frames[i].pred == start);
    }
}

TEST_CASE("prediction files are byte-stable; timing goes to a sidecar") {
    Network<float> net(tiny_net(), 6);
    const BoundingBox start{10, 8, 22, 20};
    const SequenceData seq = constant_sequence(6, 40, 30, {start});
    TrackerOptions opts;
    opts.collect_timing = true;
    const TrackRecord a = track_sequence(net, seq, start, opts);
    const TrackRecord b = track_sequence(net, seq, start, opts);
    CHECK(a.timed_frames == 5);

    const fs::path dir = fs::temp_directory_path() / "gtt_test_pred";
    fs::create_directories(dir);
    const std::string pa = (dir / "a.txt").string();
    const std::string pb = (dir / "b.txt").string();
    write_predictions(a, pa, "w.net");
    write_predictions(b, pb, "w.net");
    CHECK(read_file(pa) == read_file(pb));
    CHECK(fs::exists(pa + ".timing"));
    const std::string timing = read_file(pa + ".timing");
    CHECK(timing.find("mean_ms") != std::string::npos);

    const auto parsed = parse_annotations(pa, AnnotationFormat::corner4);
    CHECK(parsed.size() == a.frames.size());
    fs::remove_all(dir);
}

TEST_CASE("the live protocol reinitializes from ground truth after a delay") {
    Network<float> net = constant_output_net({2.5f, 2.5f, 7.5f, 7.5f});
    const BoundingBox a{2, 2, 10, 10};
    const BoundingBox b{25, 18, 35, 28};
    SequenceData seq;
    seq.meta.id = "jump";
    const Frame8 f8 = Frame8::from_image(Image(40, 30, 90.f));
    for (int i = 0; i < 12; ++i) {
        seq.frames.push_back(f8);
        seq.meta.annotations.push_back({i, i < 3 ? a : b, 0});
    }
    EvalParams params;  // threshold 0, delay 5
    const TrackRecord rec = track_sequence(net, seq, a, {}, &params);

    REQUIRE(rec.failure_frames == std::vector<int>{3});
    REQUIRE(rec.reinit_frames == std::vector<int>{8});
    for (int i = 4; i <= 7; ++i) CHECK_FALSE(rec.frames[static_cast<std::size_t>(i)].pred);
    for (int i = 8; i <= 11; ++i) {
        REQUIRE(rec.frames[static_cast<std::size_t>(i)].pred);
        CHECK(rec.frames[static_cast<std::size_t>(i)].pred->x1 ==
              doctest::Approx(b.x1).epsilon(1e-4));
    }
}

TEST_CASE("clamping pushes boxes back into the frame with a minimum size") {
    const BoundingBox pushed = clamp_box_to_frame({-10, -10, -6, -6}, 40, 30, 2.0);
    CHECK(pushed.x1 == 0.0);
    CHECK(pushed.x2 == 2.0);
    CHECK(pushed.width() >= 2.0);
    const BoundingBox kept = clamp_box_to_frame({5, 5, 15, 15}, 40, 30, 2.0);
    CHECK(kept == BoundingBox{5, 5, 15, 15});
}
