#ifndef GTT_IMAGE_HPP
#define GTT_IMAGE_HPP

#include <array>
#include <string>
#include <vector>

#include "gtt/bbox.hpp"

namespace gtt {

// Row-major interleaved RGB image. Values are stored as float in
// [0, 255]; quantized to 8 bits only at the file boundary.
struct Image {
    int width = 0;
    int height = 0;
    static constexpr int channels = 3;
    std::vector<float> data;  // width * height * channels

    Image() = default;
    Image(int w, int h, float fill = 0.f)
        : width(w), height(h), data(static_cast<size_t>(w) * h * channels, fill) {}

    float& at(int x, int y, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    bool empty() const { return width == 0 || height == 0; }

    std::array<float, 3> channel_mean() const;
};

// Quantized in-memory frame storage. Matches what a PPM round-trip
// yields, so in-memory and on-disk pipelines see identical pixels.
struct Frame8 {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> px;  // interleaved RGB

    static Frame8 from_image(const Image& img);
    Image to_image() const;
};

// Bilinear crop of `region` resampled to out_size x out_size. Samples
// outside the source image take `pad` (per channel). Sets region.clipped
// when any sample fell outside.
Image crop_and_resize(const Image& src, SearchRegion& region, int out_size,
                      const std::array<float, 3>& pad);

// Same, padding with the per-channel mean of the source image.
Image crop_and_resize(const Image& src, SearchRegion& region, int out_size);

// Binary PPM (P6, maxval 255). The bit-exact canonical format.
Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

// 8-bit PNG via libpng; gray and RGBA inputs are expanded to RGB.
Image read_png(const std::string& path);
void write_png(const Image& img, const std::string& path);

// Dispatch on extension (.ppm / .png).
Image read_image(const std::string& path);
void write_image(const Image& img, const std::string& path);

} // namespace gtt

#endif
