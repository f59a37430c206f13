#ifndef GTT_DATASET_HPP
#define GTT_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtt/bbox.hpp"
#include "gtt/image.hpp"

namespace gtt {

// Per-frame attribute flags for bucketizing evaluation results.
enum Attribute : std::uint8_t {
    attr_occlusion = 1 << 0,
    attr_illumination_change = 1 << 1,
    attr_motion_change = 1 << 2,
    attr_size_change = 1 << 3,
    attr_camera_motion = 1 << 4,
};

std::string attributes_to_string(std::uint8_t flags);  // "none" when empty
std::uint8_t attributes_from_string(const std::string& s);

struct Annotation {
    int frame = 0;
    BoundingBox box;
    std::uint8_t attributes = 0;
};

struct VideoSequence {
    std::string id;
    // Frame image paths, ordered by frame index. Empty for in-memory
    // sequences, which keep their frames alongside (see synth.hpp).
    std::vector<std::string> frame_paths;
    std::vector<Annotation> annotations;  // sparse, strictly increasing frame index
    std::optional<std::string> class_label;
};

struct StillImageExample {
    std::string image_path;
    int image_width = 0;
    int image_height = 0;
    BoundingBox box;
};

enum class AnnotationFormat { corner4, vot8 };
AnnotationFormat annotation_format_from_string(const std::string& s);

// corner4: "frame x1 y1 x2 y2" per line, '#' comments.
// vot8: 8 comma-separated polygon coordinates per line, dense; the frame
// index is the 0-based line number and the box is the axis-aligned hull.
std::vector<Annotation> parse_annotations(const std::string& path, AnnotationFormat fmt);
void write_corner4(const std::vector<Annotation>& anns, const std::string& path,
                   const std::vector<std::string>& header_comments = {});

// Optional sidecar: "frame attr[,attr...]" per line, merged onto parsed
// annotations by frame index.
void apply_attributes_file(std::vector<Annotation>& anns, const std::string& path);

// Drops examples whose box fills at least max_fill of the image in
// either dimension.
std::vector<StillImageExample> filter_still_images(
    const std::vector<StillImageExample>& examples, double max_fill = 0.66);

struct SplitResult {
    std::vector<VideoSequence> train;
    std::vector<VideoSequence> validation;
    std::vector<std::string> warnings;  // e.g. unknown exclusion ids
};

// Removes excluded ids, then splits deterministically by seed into an
// exact partition.
SplitResult split_dataset(const std::vector<VideoSequence>& videos,
                          const std::vector<std::string>& exclusion_ids,
                          double val_fraction, std::uint64_t seed);

std::vector<std::string> parse_exclusion_list(const std::string& path);

// Manifest: one sequence per line,
//   <frame_dir> <annotation_file> <corner4|vot8> [attrs=<file>] [class=<label>]
// Paths are resolved relative to the manifest location. Frames are the
// .ppm/.png files of frame_dir in lexicographic order.
std::vector<VideoSequence> load_manifest(const std::string& path);

// A sequence with its frames resident in memory (quantized). The common
// currency of the trainer, tracker and evaluation harness.
struct SequenceData {
    VideoSequence meta;
    std::vector<Frame8> frames;
};

// Reads every frame of a disk-backed sequence.
SequenceData load_sequence_data(const VideoSequence& meta);
std::vector<SequenceData> load_all_sequence_data(const std::vector<VideoSequence>& metas);

// Every annotated frame of every sequence as a still-image example
// (the 66% fill filter is applied by the caller).
std::vector<StillImageExample> stills_from_sequences(const std::vector<VideoSequence>& seqs);

} // namespace gtt

#endif
