#pragma once

#include <map>
#include <string>
#include <vector>

#include "mangaspeak/geometry.hpp"
#include "mangaspeak/model.hpp"

namespace mspk {

enum class ReadingDirection { RightToLeft, LeftToRight };

struct FrameOrder {
    std::vector<Frame> ordered;             // permutation of the input frames, reading order
    std::map<std::string, int> order_index; // frame id -> k, 1-based, exactly 1..n

    int k_of(const std::string& frame_id) const;
};

// Fraction of each page dimension a frame is shrunk by before a cut line is
// tested against it, so slightly overlapping panels still admit cuts.
inline constexpr double kCutTolerance = 0.03;

// Recursive cut procedure: exhaust horizontal cuts (top band first), then one
// vertical cut at the widest clear gap (right part first under right-to-left
// reading), recurse; groups admitting no cut are ordered by ascending
// y-centroid, then x-centroid against the reading direction, then id.
FrameOrder order_frames(const std::vector<Frame>& frames, double page_width,
                        double page_height,
                        ReadingDirection direction = ReadingDirection::RightToLeft);

struct FrameSlot {
    std::string frame_id; // empty when the page has no frames
    int k = 1;
    bool fallback = false; // no positive overlap; assigned by nearest centroid
};

// Frame holding the largest fraction of the box; ties go to the smaller k.
FrameSlot assign_frame(const Box& b, const FrameOrder& order);

// Per-object frame assignment for every character and text box on the page.
struct FrameAssignment {
    std::map<std::string, FrameSlot> by_object;

    const FrameSlot& of(const std::string& object_id) const;
};

FrameAssignment assign_objects(const Page& page, const FrameOrder& order);

} // namespace mspk
