#include "gtt/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gtt {

std::array<float, 3> Image::channel_mean() const {
    std::array<double, 3> acc{0, 0, 0};
    const size_t n = static_cast<size_t>(width) * height;
    for (size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) acc[c] += data[i * 3 + c];
    std::array<float, 3> m{0, 0, 0};
    if (n > 0)
        for (int c = 0; c < 3; ++c) m[c] = static_cast<float>(acc[c] / n);
    return m;
}

Frame8 Frame8::from_image(const Image& img) {
    Frame8 f;
    f.width = img.width;
    f.height = img.height;
    f.px.resize(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        const float r = std::round(img.data[i]);
        f.px[i] = static_cast<unsigned char>(r < 0 ? 0 : (r > 255 ? 255 : r));
    }
    return f;
}

Image Frame8::to_image() const {
    Image img(width, height);
    for (size_t i = 0; i < px.size(); ++i) img.data[i] = px[i];
    return img;
}

Image crop_and_resize(const Image& src, SearchRegion& region, int out_size,
                      const std::array<float, 3>& pad) {
    if (out_size <= 0)
        throw std::invalid_argument("crop_and_resize: out_size must be > 0");
    if (!region.valid() || src.empty())
        throw std::invalid_argument("crop_and_resize: empty region or image");

    Image out(out_size, out_size);
    bool clipped = false;
    const double step_x = region.width / out_size;
    const double step_y = region.height / out_size;

    auto sample = [&](int x, int y, int c) -> float {
        if (x < 0 || y < 0 || x >= src.width || y >= src.height) {
            clipped = true;
            return pad[c];
        }
        return src.at(x, y, c);
    };

    for (int oy = 0; oy < out_size; ++oy) {
        const double sy = region.min_y() + (oy + 0.5) * step_y - 0.5;
        const int y0 = static_cast<int>(std::floor(sy));
        const float fy = static_cast<float>(sy - y0);
        for (int ox = 0; ox < out_size; ++ox) {
            const double sx = region.min_x() + (ox + 0.5) * step_x - 0.5;
            const int x0 = static_cast<int>(std::floor(sx));
            const float fx = static_cast<float>(sx - x0);
            for (int c = 0; c < 3; ++c) {
                const float v00 = sample(x0, y0, c);
                const float v10 = fx > 0 ? sample(x0 + 1, y0, c) : 0.f;
                const float v01 = fy > 0 ? sample(x0, y0 + 1, c) : 0.f;
                const float v11 = (fx > 0 && fy > 0) ? sample(x0 + 1, y0 + 1, c) : 0.f;
                const float top = fx > 0 ? v00 * (1 - fx) + v10 * fx : v00;
                const float bot = fx > 0 ? v01 * (1 - fx) + v11 * fx : v01;
                out.at(ox, oy, c) = fy > 0 ? top * (1 - fy) + bot * fy : top;
            }
        }
    }
    if (clipped) region.clipped = true;
    return out;
}

Image crop_and_resize(const Image& src, SearchRegion& region, int out_size) {
    return crop_and_resize(src, region, out_size, src.channel_mean());
}

// ---- PPM ----

Image read_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_ppm: cannot open " + path);
    std::string magic;
    f >> magic;
    if (magic != "P6") throw std::runtime_error("read_ppm: not a P6 file: " + path);
    auto next_int = [&]() {
        // skip whitespace and '#' comments
        int ch;
        while ((ch = f.peek()) != EOF && (std::isspace(ch) || ch == '#')) {
            if (ch == '#') {
                std::string line;
                std::getline(f, line);
            } else {
                f.get();
            }
        }
        int v;
        if (!(f >> v)) throw std::runtime_error("read_ppm: truncated header in " + path);
        return v;
    };
    const int w = next_int();
    const int h = next_int();
    const int maxval = next_int();
    if (maxval != 255) throw std::runtime_error("read_ppm: only maxval 255 supported");
    f.get();  // single whitespace after header
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h * 3);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<size_t>(f.gcount()) != buf.size())
        throw std::runtime_error("read_ppm: truncated pixel data in " + path);
    Image img(w, h);
    for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i];
    return img;
}

static unsigned char quantize(float v) {
    const float r = std::round(v);
    return static_cast<unsigned char>(r < 0 ? 0 : (r > 255 ? 255 : r));
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ppm: cannot open " + path);
    f << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> buf(img.data.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = quantize(img.data[i]);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("write_ppm: write failed: " + path);
}

// ---- PNG ----

Image read_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("read_png: cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("read_png: decode failed: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    std::vector<unsigned char> row(static_cast<size_t>(w) * 3);
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w * 3; ++x) img.data[static_cast<size_t>(y) * w * 3 + x] = row[x];
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

void write_png(const Image& img, const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_png: cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("write_png: encode failed: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width * 3; ++x)
            row[x] = quantize(img.data[static_cast<size_t>(y) * img.width * 3 + x]);
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

static bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

Image read_image(const std::string& path) {
    if (ends_with(path, ".ppm")) return read_ppm(path);
    if (ends_with(path, ".png")) return read_png(path);
    throw std::runtime_error("read_image: unsupported extension: " + path);
}

void write_image(const Image& img, const std::string& path) {
    if (ends_with(path, ".ppm")) return write_ppm(img, path);
    if (ends_with(path, ".png")) return write_png(img, path);
    throw std::runtime_error("write_image: unsupported extension: " + path);
}

} // namespace gtt
