#include "mangaspeak/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace mspk {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

void rect(std::string& out, const Box& b, const char* stroke, const char* extra = "") {
    out += "  <rect x=\"" + num(b.x0) + "\" y=\"" + num(b.y0) + "\" width=\"" + num(b.width()) +
           "\" height=\"" + num(b.height()) + "\" fill=\"none\" stroke=\"" + stroke + "\"" +
           extra + "/>\n";
}

} // namespace

std::string render_page_svg(const Page& page, const FrameOrder& order,
                            const Prediction& prediction) {
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(page.width) + " " +
           num(page.height) + "\" width=\"" + num(page.width) + "\" height=\"" +
           num(page.height) + "\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"" + num(page.width) + "\" height=\"" +
           num(page.height) + "\" fill=\"#ffffff\"/>\n";

    for (const Frame& f : order.ordered) {
        rect(out, f.box, "#444444", " stroke-width=\"3\"");
        out += "  <text x=\"" + num(f.box.x0 + 8) + "\" y=\"" + num(f.box.y0 + 26) +
               "\" font-size=\"24\" fill=\"#444444\">" + std::to_string(order.k_of(f.id)) +
               "</text>\n";
    }
    for (const auto& c : page.characters) rect(out, c.box, "#3366ff", " stroke-width=\"2\"");
    for (const auto& t : page.texts) rect(out, t.box, "#ff9900", " stroke-width=\"2\"");

    for (const auto& t : page.texts) {
        auto it = prediction.by_text.find(t.id);
        if (it == prediction.by_text.end()) continue;
        const SpeakerPair* gt = page.pair_for_text(t.id);
        const size_t shown = gt ? std::min(it->second.ranking.size(), gt->speaker_box_ids.size())
                                : std::min<size_t>(it->second.ranking.size(), 1);
        const Point tc = centroid(t.box);
        for (size_t i = 0; i < shown; ++i) {
            const CharacterBox* c = page.character(it->second.ranking[i].character_id);
            if (!c) continue;
            const char* color = "#808080";
            if (gt) {
                const bool correct =
                    std::find(gt->speaker_box_ids.begin(), gt->speaker_box_ids.end(), c->id) !=
                    gt->speaker_box_ids.end();
                color = correct ? "#1aff1a" : "#ff1a1a";
            }
            const Point cc = centroid(c->box);
            out += "  <line x1=\"" + num(cc.x) + "\" y1=\"" + num(cc.y) + "\" x2=\"" + num(tc.x) +
                   "\" y2=\"" + num(tc.y) + "\" stroke=\"" + color + "\" stroke-width=\"3\"/>\n";
            out += "  <circle cx=\"" + num(cc.x) + "\" cy=\"" + num(cc.y) +
                   "\" r=\"5\" fill=\"" + color + "\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

} // namespace mspk
