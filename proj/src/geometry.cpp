#include "mangaspeak/geometry.hpp"

#include <algorithm>

#include "mangaspeak/errors.hpp"

namespace mspk {

Point centroid(const Box& b) {
    return Point{(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0};
}

double centroid_distance(const Box& a, const Box& b) {
    const Point ca = centroid(a);
    const Point cb = centroid(b);
    return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

double intersection_area(const Box& a, const Box& b) {
    const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

double iou(const Box& a, const Box& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

double overlap_fraction(const Box& inner, const Box& outer) {
    const double inner_area = inner.area();
    if (inner_area <= 0.0) raise(Error::Code::range, "degenerate box");
    return intersection_area(inner, outer) / inner_area;
}

} // namespace mspk
