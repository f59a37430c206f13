#ifndef GTT_BBOX_HPP
#define GTT_BBOX_HPP

#include <optional>
#include <stdexcept>

namespace gtt {

// Axis-aligned box in continuous image pixel coordinates.
struct BoundingBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double center_x() const { return 0.5 * (x1 + x2); }
    double center_y() const { return 0.5 * (y1 + y2); }
    double area() const { return width() * height(); }
    bool valid() const { return x2 > x1 && y2 > y1; }

    static BoundingBox from_center(double cx, double cy, double w, double h) {
        return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    }

    bool operator==(const BoundingBox&) const = default;
};

// Context-padded crop window around a previous box. Defines the
// coordinate frame the network regresses in. May extend past the image;
// extraction pads and sets `clipped`.
struct SearchRegion {
    double cx = 0, cy = 0;
    double width = 0, height = 0;
    double context = 1.0;  // the factor k the region was built with
    bool clipped = false;  // true once extraction truncated at an image border

    double min_x() const { return cx - 0.5 * width; }
    double min_y() const { return cy - 0.5 * height; }
    double max_x() const { return cx + 0.5 * width; }
    double max_y() const { return cy + 0.5 * height; }
    bool valid() const { return width > 0 && height > 0; }
};

// Network output units: corner coordinates as search-region-relative
// fractions times the output scale S.
struct CornerCode {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

inline constexpr double kDefaultContextFactor = 2.0;  // k1 = k2 = 2
inline constexpr double kDefaultOutputScale = 10.0;   // S

// Region centered on the previous box (constant-position motion model)
// with dimensions k*w x k*h.
SearchRegion make_search_region(const BoundingBox& prev_box, double k);

// Map a box into output units relative to the region.
CornerCode encode_target(const BoundingBox& gt_box, const SearchRegion& region,
                         double scale = kDefaultOutputScale);

// Inverse of encode_target. Returns nullopt when the decoded box has
// non-positive extent, so the tracker can apply its fallback.
std::optional<BoundingBox> decode_output(const CornerCode& code,
                                         const SearchRegion& region,
                                         double scale = kDefaultOutputScale);

// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

} // namespace gtt

#endif
