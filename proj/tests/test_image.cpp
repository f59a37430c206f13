#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "gtt/image.hpp"
#include "gtt/rng.hpp"

using namespace gtt;
namespace fs = std::filesystem;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
    Image img(w, h);
    Rng rng(seed);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform_index(256));
    return img;
}

std::string tmp_path(const char* name) {
    return (fs::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("identity crop equals the source exactly") {
    const Image src = random_image(16, 12, 2);
    SearchRegion sq;
    sq.cx = 6;
    sq.cy = 6;
    sq.width = 12;
    sq.height = 12;
    Image out_sq = crop_and_resize(src, sq, 12, {0, 0, 0});
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x)
            for (int c = 0; c < 3; ++c) CHECK(out_sq.at(x, y, c) == src.at(x, y, c));
    CHECK_FALSE(sq.clipped);
}

TEST_CASE("constant image crops to a constant") {
    Image src(10, 10, 77.f);
    SearchRegion r;
    r.cx = 3.7;
    r.cy = 6.1;
    r.width = 5.3;
    r.height = 2.9;
    const Image out = crop_and_resize(src, r, 8, {77, 77, 77});
    for (float v : out.data) CHECK(v == doctest::Approx(77.f));
}

TEST_CASE("2x2 checkerboard upsampled to 4x4 matches hand bilinear weights") {
    Image src(2, 2);
    // channel 0: 0 100 / 100 0
    src.at(0, 0, 0) = 0;
    src.at(1, 0, 0) = 100;
    src.at(0, 1, 0) = 100;
    src.at(1, 1, 0) = 0;
    SearchRegion r;
    r.cx = 1;
    r.cy = 1;
    r.width = 2;
    r.height = 2;
    const Image out = crop_and_resize(src, r, 4, {50, 50, 50});
    // output sample x maps to source coordinate (x+0.5)/2 - 0.5 = {-.25,.25,.75,1.25}
    // rows 0: sy=-0.25 -> pad row above mixes in with weight 0.25
    // center samples: sx=0.25 between columns 0 and 1 -> 0.75*a + 0.25*b
    CHECK(out.at(1, 1, 0) == doctest::Approx(0.75f * (0.75f * 0 + 0.25f * 100) +
                                             0.25f * (0.75f * 100 + 0.25f * 0)));
    CHECK(out.at(2, 1, 0) == doctest::Approx(0.75f * (0.25f * 0 + 0.75f * 100) +
                                             0.25f * (0.25f * 100 + 0.75f * 0)));
    CHECK(out.at(2, 2, 0) == doctest::Approx(0.25f * (0.25f * 0 + 0.75f * 100) +
                                             0.75f * (0.25f * 100 + 0.75f * 0)));
}

TEST_CASE("out-of-image samples take the pad value and set the clip flag") {
    const Image src = random_image(8, 8, 3);
    SearchRegion r;
    r.cx = 0;
    r.cy = 0;
    r.width = 8;
    r.height = 8;
    const Image out = crop_and_resize(src, r, 8, {9, 9, 9});
    CHECK(r.clipped);
    CHECK(out.at(0, 0, 0) == doctest::Approx(9.f));
}

TEST_CASE("mean padding uses the source channel means") {
    Image src(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            src.at(x, y, 0) = 10;
            src.at(x, y, 1) = 20;
            src.at(x, y, 2) = 30;
        }
    SearchRegion r;
    r.cx = -10;
    r.cy = -10;
    r.width = 4;
    r.height = 4;
    const Image out = crop_and_resize(src, r, 2);
    CHECK(out.at(0, 0, 0) == doctest::Approx(10.f));
    CHECK(out.at(0, 0, 1) == doctest::Approx(20.f));
    CHECK(out.at(0, 0, 2) == doctest::Approx(30.f));
}

TEST_CASE("crop rejects degenerate inputs") {
    const Image src = random_image(4, 4, 4);
    SearchRegion bad;
    bad.width = 0;
    bad.height = 5;
    CHECK_THROWS_AS(crop_and_resize(src, bad, 4, {0, 0, 0}), std::invalid_argument);
    SearchRegion ok;
    ok.cx = 2;
    ok.cy = 2;
    ok.width = 2;
    ok.height = 2;
    CHECK_THROWS_AS(crop_and_resize(src, ok, 0, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(crop_and_resize(Image(), ok, 4, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("ppm round-trip is bit-exact for quantized images") {
    const Image src = random_image(21, 9, 5);
    const std::string path = tmp_path("gtt_test_roundtrip.ppm");
    write_ppm(src, path);
    const Image back = read_ppm(path);
    REQUIRE(back.width == src.width);
    REQUIRE(back.height == src.height);
    for (size_t i = 0; i < src.data.size(); ++i) CHECK(back.data[i] == src.data[i]);
    std::remove(path.c_str());
}

TEST_CASE("ppm reader honors header comments") {
    const std::string path = tmp_path("gtt_test_comment.ppm");
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("P6\n# a comment\n2 1\n255\n", f);
        const unsigned char px[6] = {1, 2, 3, 4, 5, 6};
        std::fwrite(px, 1, 6, f);
        std::fclose(f);
    }
    const Image img = read_ppm(path);
    CHECK(img.width == 2);
    CHECK(img.at(1, 0, 2) == 6);
    std::remove(path.c_str());
}

TEST_CASE("png round-trip preserves quantized pixels") {
    const Image src = random_image(15, 11, 6);
    const std::string path = tmp_path("gtt_test_roundtrip.png");
    write_png(src, path);
    const Image back = read_png(path);
    REQUIRE(back.width == src.width);
    for (size_t i = 0; i < src.data.size(); ++i) CHECK(back.data[i] == src.data[i]);
    std::remove(path.c_str());
}

TEST_CASE("frame8 quantization matches the ppm boundary") {
    Image src(3, 1);
    src.at(0, 0, 0) = 12.4f;   // rounds down
    src.at(1, 0, 1) = 12.5f;   // rounds up
    src.at(2, 0, 2) = 300.f;   // clamps
    src.at(2, 0, 0) = -4.f;    // clamps
    const std::string path = tmp_path("gtt_test_quant.ppm");
    write_ppm(src, path);
    const Image disk = read_ppm(path);
    const Image mem = Frame8::from_image(src).to_image();
    for (size_t i = 0; i < disk.data.size(); ++i) CHECK(mem.data[i] == disk.data[i]);
    std::remove(path.c_str());
}

TEST_CASE("a constant rectangle keeps its relative position through crop and decode") {
    Image src(64, 64, 10.f);
    const BoundingBox rect{20, 24, 36, 40};
    for (int y = 24; y < 40; ++y)
        for (int x = 20; x < 36; ++x)
            for (int c = 0; c < 3; ++c) src.at(x, y, c) = 250.f;

    SearchRegion region = make_search_region(rect, 2.0);
    const Image crop = crop_and_resize(src, region, 32, {10, 10, 10});

    // locate the bright area in crop coordinates and map it back
    int xmin = 32, xmax = -1, ymin = 32, ymax = -1;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (crop.at(x, y, 0) > 130.f) {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
    const double step = region.width / 32;
    const double bx1 = region.min_x() + xmin * step;
    const double bx2 = region.min_x() + (xmax + 1) * step;
    const double by1 = region.min_y() + ymin * step;
    const double by2 = region.min_y() + (ymax + 1) * step;
    CHECK(std::abs(bx1 - rect.x1) <= 0.5 + step);
    CHECK(std::abs(bx2 - rect.x2) <= 0.5 + step);
    CHECK(std::abs(by1 - rect.y1) <= 0.5 + step);
    CHECK(std::abs(by2 - rect.y2) <= 0.5 + step);
}
