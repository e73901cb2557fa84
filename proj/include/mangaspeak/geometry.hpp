#pragma once

#include <cmath>

namespace mspk {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned rectangle in page pixel coordinates, y growing downward.
// Stored corner-form; construct from (x, y, w, h) via from_xywh.
struct Box {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    static Box from_xywh(double x, double y, double w, double h) {
        return Box{x, y, x + w, y + h};
    }

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }

    bool valid() const {
        return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
               std::isfinite(y1) && x0 <= x1 && y0 <= y1 && x0 >= 0.0 && y0 >= 0.0;
    }

    bool contains(Point p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

Point centroid(const Box& b);
double centroid_distance(const Box& a, const Box& b);

// Intersection area; touching edges count as zero overlap, not an error.
double intersection_area(const Box& a, const Box& b);

// Intersection over union; 0 for disjoint boxes, and 0 when both areas are 0.
double iou(const Box& a, const Box& b);

// intersection_area(inner, outer) / area(inner). Throws on a zero-area inner box.
double overlap_fraction(const Box& inner, const Box& outer);

} // namespace mspk
