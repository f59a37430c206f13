#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gtt/dataset.hpp"
#include "gtt/synth.hpp"

using namespace gtt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
    return p.string();
}

} // namespace

TEST_CASE("corner4 parsing") {
    TempDir dir("gtt_test_corner4");
    const auto path = write_text(dir.path / "ann.txt",
                                 "# comment\n"
                                 "3 10 10 50 40\n"
                                 "8 11.5 12.25 51 41\n");
    const auto anns = parse_annotations(path, AnnotationFormat::corner4);
    REQUIRE(anns.size() == 2);
    CHECK(anns[0].frame == 3);
    CHECK(anns[0].box.x2 == 50);
    CHECK(anns[1].box.x1 == 11.5);
}

TEST_CASE("corner4 rejects malformed rows with line numbers") {
    TempDir dir("gtt_test_badcorner4");
    const auto path = write_text(dir.path / "ann.txt", "0 1 2 3 4\n1 1 2 3 4 junk\n");
    try {
        parse_annotations(path, AnnotationFormat::corner4);
        FAIL("expected parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("non-monotone frames and empty files are rejected") {
    TempDir dir("gtt_test_monotone");
    const auto bad = write_text(dir.path / "bad.txt", "5 0 0 1 1\n3 0 0 1 1\n");
    CHECK_THROWS(parse_annotations(bad, AnnotationFormat::corner4));
    const auto empty = write_text(dir.path / "empty.txt", "# only a comment\n");
    CHECK_THROWS(parse_annotations(empty, AnnotationFormat::corner4));
}

TEST_CASE("vot8 rows reduce to the axis-aligned hull") {
    TempDir dir("gtt_test_vot8");
    const double r = std::sqrt(2.0);
    std::ostringstream row;  // 45-degree rotated square around the origin
    row.precision(17);
    row << r << ",0,0," << r << "," << -r << ",0,0," << -r << "\n";
    const auto path = write_text(dir.path / "ann.txt", row.str() + row.str());
    const auto anns = parse_annotations(path, AnnotationFormat::vot8);
    REQUIRE(anns.size() == 2);
    CHECK(anns[0].frame == 0);
    CHECK(anns[1].frame == 1);
    CHECK(anns[0].box.x1 == doctest::Approx(-r).epsilon(1e-12));
    CHECK(anns[0].box.y1 == doctest::Approx(-r).epsilon(1e-12));
    CHECK(anns[0].box.x2 == doctest::Approx(r).epsilon(1e-12));
    CHECK(anns[0].box.y2 == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("corner4 write/read round trip is lossless") {
    TempDir dir("gtt_test_rt");
    std::vector<Annotation> anns{{0, {0.1, 0.2, 10.0 / 3.0, 4.5}, 0},
                                 {7, {1, 2, 3, 4}, 0}};
    const auto path = (dir.path / "out.txt").string();
    write_corner4(anns, path, {"header"});
    const auto back = parse_annotations(path, AnnotationFormat::corner4);
    REQUIRE(back.size() == 2);
    CHECK(back[0].box.x2 == anns[0].box.x2);  // bit-exact through precision 17
    CHECK(back[1].frame == 7);
}

TEST_CASE("attribute flags round-trip through names") {
    CHECK(attributes_to_string(0) == "none");
    const std::uint8_t flags = attr_occlusion | attr_camera_motion;
    CHECK(attributes_from_string(attributes_to_string(flags)) == flags);
    CHECK_THROWS(attributes_from_string("wobble"));
}

TEST_CASE("attributes sidecar merges by frame") {
    TempDir dir("gtt_test_attrs");
    std::vector<Annotation> anns{{0, {0, 0, 1, 1}, 0}, {5, {0, 0, 1, 1}, 0}};
    const auto path = write_text(dir.path / "attrs.txt", "5 occlusion,size_change\n");
    apply_attributes_file(anns, path);
    CHECK(anns[0].attributes == 0);
    CHECK(anns[1].attributes == (attr_occlusion | attr_size_change));
}

TEST_CASE("still-image fill filter drops per-dimension with OR semantics") {
    StillImageExample wide{"", 100, 100, {0, 0, 70, 10}};    // 70% in x
    StillImageExample small{"", 100, 100, {0, 0, 50, 50}};   // under threshold
    StillImageExample tall{"", 100, 100, {0, 0, 10, 66}};    // exactly 66% in y
    const auto kept = filter_still_images({wide, small, tall}, 0.66);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].box.x2 == 50);

    const auto all = filter_still_images({small}, 1.0);
    CHECK(all.size() == 1);
    CHECK_THROWS(filter_still_images({small}, 0.0));
}

TEST_CASE("dataset split is an exact deterministic partition") {
    std::vector<VideoSequence> videos(10);
    for (int i = 0; i < 10; ++i) videos[i].id = "v" + std::to_string(i);
    const auto split = split_dataset(videos, {"v0", "v9", "ghost"}, 0.25, 42);
    CHECK(split.validation.size() == 2);  // floor(0.25 * 8)
    CHECK(split.train.size() == 6);
    REQUIRE(split.warnings.size() == 1);
    CHECK(split.warnings[0].find("ghost") != std::string::npos);

    // partition: no overlap, union complete, exclusions absent
    std::vector<std::string> seen;
    for (const auto& v : split.train) seen.push_back(v.id);
    for (const auto& v : split.validation) seen.push_back(v.id);
    std::sort(seen.begin(), seen.end());
    CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
    CHECK(seen.size() == 8);
    CHECK(std::find(seen.begin(), seen.end(), "v0") == seen.end());

    const auto again = split_dataset(videos, {"v0", "v9"}, 0.25, 42);
    for (std::size_t i = 0; i < split.train.size(); ++i)
        CHECK(split.train[i].id == again.train[i].id);
}

TEST_CASE("exclusion list parsing skips comments and blank lines") {
    TempDir dir("gtt_test_excl");
    const auto path = write_text(dir.path / "excl.txt", "# removed videos\nseq_a\n\n  seq_b \n");
    const auto ids = parse_exclusion_list(path);
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] == "seq_a");
    CHECK(ids[1] == "seq_b");
}

TEST_CASE("manifest load round-trips a written synthetic dataset") {
    TempDir dir("gtt_test_manifest");
    SyntheticSceneConfig sc;
    sc.frame_count = 4;
    sc.canvas_width = 64;
    sc.canvas_height = 48;
    sc.seed = 11;
    sc.id = "seq_x";
    SyntheticSceneConfig sc2 = sc;
    sc2.seed = 12;
    sc2.id = "seq_y";
    write_synthetic_dataset({generate_synthetic_video(sc), generate_synthetic_video(sc2)},
                            dir.path.string());

    const auto seqs = load_manifest((dir.path / "manifest.txt").string());
    REQUIRE(seqs.size() == 2);
    CHECK(seqs[0].id == "seq_x");
    CHECK(seqs[0].frame_paths.size() == 4);
    CHECK(seqs[0].annotations.size() == 4);
    CHECK(seqs[0].class_label.has_value());

    const SequenceData data = load_sequence_data(seqs[0]);
    CHECK(data.frames.size() == 4);
    CHECK(data.frames[0].width == 64);

    const auto stills = stills_from_sequences(seqs);
    CHECK(stills.size() == 8);
    CHECK(stills[0].image_width == 64);
}

TEST_CASE("manifest errors point at the offending line") {
    TempDir dir("gtt_test_badmanifest");
    const auto path = write_text(dir.path / "manifest.txt", "missing_dir ann.txt corner4\n");
    CHECK_THROWS(load_manifest(path));
}
