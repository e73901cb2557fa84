#pragma once

#include <string>

#include "mangaspeak/frame_order.hpp"
#include "mangaspeak/model.hpp"
#include "mangaspeak/predict.hpp"

namespace mspk {

// SVG overlay for one page: frame outlines with reading-order labels,
// character and text boxes, and centroid-to-centroid prediction lines.
// Lines are #1aff1a when the predicted speaker is a ground-truth speaker of
// the text, #ff1a1a when it is not, and #808080 when the text has no ground
// truth. Output is byte-stable for fixed input.
std::string render_page_svg(const Page& page, const FrameOrder& order,
                            const Prediction& prediction);

} // namespace mspk
