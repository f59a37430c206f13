#include "gtt/bbox.hpp"

#include <algorithm>

namespace gtt {

SearchRegion make_search_region(const BoundingBox& prev_box, double k) {
    if (!prev_box.valid())
        throw std::invalid_argument("make_search_region: invalid box");
    if (k <= 0)
        throw std::invalid_argument("make_search_region: context factor must be > 0");
    SearchRegion r;
    r.cx = prev_box.center_x();
    r.cy = prev_box.center_y();
    r.width = k * prev_box.width();
    r.height = k * prev_box.height();
    r.context = k;
    return r;
}

CornerCode encode_target(const BoundingBox& gt_box, const SearchRegion& region,
                         double scale) {
    if (!region.valid())
        throw std::invalid_argument("encode_target: zero-extent region");
    if (scale <= 0)
        throw std::invalid_argument("encode_target: scale must be > 0");
    const double sx = scale / region.width;
    const double sy = scale / region.height;
    CornerCode c;
    c.x1 = (gt_box.x1 - region.min_x()) * sx;
    c.y1 = (gt_box.y1 - region.min_y()) * sy;
    c.x2 = (gt_box.x2 - region.min_x()) * sx;
    c.y2 = (gt_box.y2 - region.min_y()) * sy;
    return c;
}

std::optional<BoundingBox> decode_output(const CornerCode& code,
                                         const SearchRegion& region,
                                         double scale) {
    if (!region.valid())
        throw std::invalid_argument("decode_output: zero-extent region");
    if (scale <= 0)
        throw std::invalid_argument("decode_output: scale must be > 0");
    BoundingBox b;
    b.x1 = region.min_x() + code.x1 / scale * region.width;
    b.y1 = region.min_y() + code.y1 / scale * region.height;
    b.x2 = region.min_x() + code.x2 / scale * region.width;
    b.y2 = region.min_y() + code.y2 / scale * region.height;
    if (!b.valid()) return std::nullopt;
    return b;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (!a.valid() || !b.valid())
        throw std::invalid_argument("iou: invalid box");
    const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (ix <= 0 || iy <= 0) return 0.0;
    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

} // namespace gtt
