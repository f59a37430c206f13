#include "gtt/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gtt/rng.hpp"

namespace fs = std::filesystem;

namespace gtt {

namespace {

const std::pair<Attribute, const char*> kAttrNames[] = {
    {attr_occlusion, "occlusion"},
    {attr_illumination_change, "illumination_change"},
    {attr_motion_change, "motion_change"},
    {attr_size_change, "size_change"},
    {attr_camera_motion, "camera_motion"},
};

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

[[noreturn]] void parse_fail(const std::string& path, int lineno, const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
}

} // namespace

std::string attributes_to_string(std::uint8_t flags) {
    if (flags == 0) return "none";
    std::string out;
    for (const auto& [bit, name] : kAttrNames) {
        if (flags & bit) {
            if (!out.empty()) out += ',';
            out += name;
        }
    }
    return out;
}

std::uint8_t attributes_from_string(const std::string& s) {
    if (s == "none" || s.empty()) return 0;
    std::uint8_t flags = 0;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        bool known = false;
        for (const auto& [bit, name] : kAttrNames) {
            if (tok == name) {
                flags |= bit;
                known = true;
                break;
            }
        }
        if (!known) throw std::runtime_error("unknown attribute: " + tok);
    }
    return flags;
}

AnnotationFormat annotation_format_from_string(const std::string& s) {
    if (s == "corner4") return AnnotationFormat::corner4;
    if (s == "vot8") return AnnotationFormat::vot8;
    throw std::runtime_error("unknown annotation format tag: " + s);
}

std::vector<Annotation> parse_annotations(const std::string& path, AnnotationFormat fmt) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("parse_annotations: cannot open " + path);
    std::vector<Annotation> anns;
    std::string raw;
    int lineno = 0;
    int vot_frame = 0;
    while (std::getline(f, raw)) {
        ++lineno;
        const std::string line = strip_comment(raw);
        if (blank(line)) continue;
        Annotation a;
        if (fmt == AnnotationFormat::corner4) {
            std::istringstream is(line);
            if (!(is >> a.frame >> a.box.x1 >> a.box.y1 >> a.box.x2 >> a.box.y2))
                parse_fail(path, lineno, "expected 'frame x1 y1 x2 y2'");
            std::string rest;
            if (is >> rest) parse_fail(path, lineno, "trailing data: " + rest);
        } else {
            // 8 comma-separated polygon coordinates -> axis-aligned hull
            std::istringstream is(line);
            double coords[8];
            for (int i = 0; i < 8; ++i) {
                std::string tok;
                if (!std::getline(is, tok, ','))
                    parse_fail(path, lineno, "expected 8 comma-separated values");
                try {
                    coords[i] = std::stod(tok);
                } catch (const std::exception&) {
                    parse_fail(path, lineno, "bad number: " + tok);
                }
            }
            a.frame = vot_frame++;
            a.box.x1 = std::min({coords[0], coords[2], coords[4], coords[6]});
            a.box.x2 = std::max({coords[0], coords[2], coords[4], coords[6]});
            a.box.y1 = std::min({coords[1], coords[3], coords[5], coords[7]});
            a.box.y2 = std::max({coords[1], coords[3], coords[5], coords[7]});
        }
        if (!anns.empty() && a.frame <= anns.back().frame)
            parse_fail(path, lineno, "non-monotone frame index");
        anns.push_back(a);
    }
    if (anns.empty())
        throw std::runtime_error("parse_annotations: no annotations in " + path);
    return anns;
}

void write_corner4(const std::vector<Annotation>& anns, const std::string& path,
                   const std::vector<std::string>& header_comments) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_corner4: cannot open " + path);
    f.precision(17);
    for (const auto& c : header_comments) f << "# " << c << "\n";
    for (const auto& a : anns)
        f << a.frame << " " << a.box.x1 << " " << a.box.y1 << " " << a.box.x2 << " "
          << a.box.y2 << "\n";
}

void apply_attributes_file(std::vector<Annotation>& anns, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("apply_attributes_file: cannot open " + path);
    std::string raw;
    int lineno = 0;
    while (std::getline(f, raw)) {
        ++lineno;
        const std::string line = strip_comment(raw);
        if (blank(line)) continue;
        std::istringstream is(line);
        int frame;
        std::string attrs;
        if (!(is >> frame >> attrs)) parse_fail(path, lineno, "expected 'frame attrs'");
        for (auto& a : anns)
            if (a.frame == frame) a.attributes = attributes_from_string(attrs);
    }
}

std::vector<StillImageExample> filter_still_images(
    const std::vector<StillImageExample>& examples, double max_fill) {
    if (!(max_fill > 0 && max_fill <= 1.0))
        throw std::invalid_argument("filter_still_images: max_fill must be in (0,1]");
    std::vector<StillImageExample> kept;
    for (const auto& e : examples) {
        const bool fills_x = e.box.width() >= max_fill * e.image_width;
        const bool fills_y = e.box.height() >= max_fill * e.image_height;
        if (!fills_x && !fills_y) kept.push_back(e);
    }
    return kept;
}

SplitResult split_dataset(const std::vector<VideoSequence>& videos,
                          const std::vector<std::string>& exclusion_ids,
                          double val_fraction, std::uint64_t seed) {
    if (!(val_fraction >= 0 && val_fraction < 1.0))
        throw std::invalid_argument("split_dataset: val_fraction must be in [0,1)");

    SplitResult out;
    std::vector<const VideoSequence*> remaining;
    for (const auto& v : videos) {
        if (std::find(exclusion_ids.begin(), exclusion_ids.end(), v.id) ==
            exclusion_ids.end())
            remaining.push_back(&v);
    }
    for (const auto& id : exclusion_ids) {
        const bool found = std::any_of(videos.begin(), videos.end(),
                                       [&](const VideoSequence& v) { return v.id == id; });
        if (!found) out.warnings.push_back("exclusion id not found: " + id);
    }

    std::vector<std::size_t> order(remaining.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);

    const std::size_t n_val =
        static_cast<std::size_t>(val_fraction * static_cast<double>(remaining.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < n_val)
            out.validation.push_back(*remaining[order[i]]);
        else
            out.train.push_back(*remaining[order[i]]);
    }
    return out;
}

std::vector<std::string> parse_exclusion_list(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("parse_exclusion_list: cannot open " + path);
    std::vector<std::string> ids;
    std::string raw;
    while (std::getline(f, raw)) {
        std::string line = strip_comment(raw);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        ids.push_back(line.substr(b, e - b + 1));
    }
    return ids;
}

std::vector<VideoSequence> load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_manifest: cannot open " + path);
    const fs::path base = fs::path(path).parent_path();

    std::vector<VideoSequence> seqs;
    std::string raw;
    int lineno = 0;
    while (std::getline(f, raw)) {
        ++lineno;
        const std::string line = strip_comment(raw);
        if (blank(line)) continue;
        std::istringstream is(line);
        std::string dir, ann_file, fmt_tag;
        if (!(is >> dir >> ann_file >> fmt_tag))
            parse_fail(path, lineno, "expected '<dir> <annotations> <format>'");

        VideoSequence seq;
        const fs::path dir_path = base / dir;
        seq.id = fs::path(dir).filename().string();
        seq.annotations =
            parse_annotations((base / ann_file).string(), annotation_format_from_string(fmt_tag));

        std::string extra;
        while (is >> extra) {
            if (extra.rfind("attrs=", 0) == 0) {
                apply_attributes_file(seq.annotations, (base / extra.substr(6)).string());
            } else if (extra.rfind("class=", 0) == 0) {
                seq.class_label = extra.substr(6);
            } else {
                parse_fail(path, lineno, "unknown manifest option: " + extra);
            }
        }

        if (!fs::is_directory(dir_path))
            parse_fail(path, lineno, "frame directory missing: " + dir_path.string());
        for (const auto& entry : fs::directory_iterator(dir_path)) {
            const std::string ext = entry.path().extension().string();
            if (ext == ".ppm" || ext == ".png") seq.frame_paths.push_back(entry.path().string());
        }
        std::sort(seq.frame_paths.begin(), seq.frame_paths.end());
        for (const auto& a : seq.annotations)
            if (a.frame < 0 || static_cast<std::size_t>(a.frame) >= seq.frame_paths.size())
                parse_fail(path, lineno,
                           "annotation frame " + std::to_string(a.frame) +
                               " has no image in " + dir_path.string());
        seqs.push_back(std::move(seq));
    }
    return seqs;
}

SequenceData load_sequence_data(const VideoSequence& meta) {
    SequenceData d;
    d.meta = meta;
    d.frames.reserve(meta.frame_paths.size());
    for (const auto& p : meta.frame_paths) d.frames.push_back(Frame8::from_image(read_image(p)));
    return d;
}

std::vector<SequenceData> load_all_sequence_data(const std::vector<VideoSequence>& metas) {
    std::vector<SequenceData> out;
    out.reserve(metas.size());
    for (const auto& m : metas) out.push_back(load_sequence_data(m));
    return out;
}

std::vector<StillImageExample> stills_from_sequences(
    const std::vector<VideoSequence>& seqs) {
    std::vector<StillImageExample> stills;
    for (const auto& seq : seqs) {
        for (const auto& a : seq.annotations) {
            StillImageExample e;
            e.image_path = seq.frame_paths.at(static_cast<std::size_t>(a.frame));
            const Image img = read_image(e.image_path);  // header only would do; files are small
            e.image_width = img.width;
            e.image_height = img.height;
            e.box = a.box;
            stills.push_back(std::move(e));
        }
    }
    return stills;
}

} // namespace gtt
