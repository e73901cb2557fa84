#include "mangaspeak/frame_order.hpp"

#include <algorithm>
#include <limits>

#include "mangaspeak/errors.hpp"

namespace mspk {

int FrameOrder::k_of(const std::string& frame_id) const {
    auto it = order_index.find(frame_id);
    if (it == order_index.end())
        raise(Error::Code::invalid, "frame '" + frame_id + "' not in reading order");
    return it->second;
}

namespace {

struct Span {
    double lo;
    double hi;
};

// Interval left after shrinking both ends by tau; collapses to the midpoint
// for spans thinner than 2*tau instead of inverting.
Span shrunk(double lo, double hi, double tau) {
    const double mid = (lo + hi) / 2.0;
    return Span{std::min(lo + tau, mid), std::max(hi - tau, mid)};
}

struct Gap {
    double lo;
    double hi;
    double width() const { return hi - lo; }
};

// Maximal clear gaps between the spans; every gap has members on both sides.
std::vector<Gap> clear_gaps(std::vector<Span> spans) {
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
        return a.lo < b.lo;
    });
    std::vector<Gap> gaps;
    double cover_end = spans.front().hi;
    for (size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].lo > cover_end) gaps.push_back(Gap{cover_end, spans[i].lo});
        cover_end = std::max(cover_end, spans[i].hi);
    }
    return gaps;
}

class Orderer {
public:
    Orderer(const std::vector<Frame>& frames, double page_w, double page_h,
            ReadingDirection dir)
        : frames_(frames),
          tau_y_(kCutTolerance * page_h),
          tau_x_(kCutTolerance * page_w),
          rtl_(dir == ReadingDirection::RightToLeft) {}

    std::vector<int> run() {
        std::vector<int> all(frames_.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        // Canonical starting order makes the result independent of the
        // caller's frame list permutation.
        sort_base_case(all);
        out_.reserve(all.size());
        order_group(all);
        return out_;
    }

private:
    const std::vector<Frame>& frames_;
    double tau_y_;
    double tau_x_;
    bool rtl_;
    std::vector<int> out_;

    Span y_span(int i) const {
        return shrunk(frames_[i].box.y0, frames_[i].box.y1, tau_y_);
    }
    Span x_span(int i) const {
        return shrunk(frames_[i].box.x0, frames_[i].box.x1, tau_x_);
    }

    void sort_base_case(std::vector<int>& idx) const {
        std::sort(idx.begin(), idx.end(), [this](int a, int b) {
            const Point ca = centroid(frames_[a].box);
            const Point cb = centroid(frames_[b].box);
            if (ca.y != cb.y) return ca.y < cb.y;
            if (ca.x != cb.x) return rtl_ ? ca.x > cb.x : ca.x < cb.x;
            return frames_[a].id < frames_[b].id;
        });
    }

    // Step 1: split at every horizontal gap, top band first.
    void order_group(const std::vector<int>& members) {
        if (members.empty()) return;
        if (members.size() == 1) {
            out_.push_back(members[0]);
            return;
        }
        std::vector<Span> spans;
        spans.reserve(members.size());
        for (int i : members) spans.push_back(y_span(i));
        std::vector<Gap> gaps = clear_gaps(spans);
        if (gaps.empty()) {
            order_band(members);
            return;
        }
        std::vector<double> cuts;
        for (const Gap& g : gaps) cuts.push_back((g.lo + g.hi) / 2.0);
        std::sort(cuts.begin(), cuts.end());
        std::vector<std::vector<int>> bands(cuts.size() + 1);
        for (int i : members) {
            const double mid = (y_span(i).lo + y_span(i).hi) / 2.0;
            size_t band = std::upper_bound(cuts.begin(), cuts.end(), mid) - cuts.begin();
            bands[band].push_back(i);
        }
        for (const auto& band : bands) order_band(band);
    }

    // Step 2: one vertical cut at the widest gap, then back to step 1.
    void order_band(const std::vector<int>& members) {
        if (members.empty()) return;
        if (members.size() == 1) {
            out_.push_back(members[0]);
            return;
        }
        std::vector<Span> spans;
        spans.reserve(members.size());
        for (int i : members) spans.push_back(x_span(i));
        std::vector<Gap> gaps = clear_gaps(spans);
        if (gaps.empty()) {
            // Step 3: no cut exists in either direction.
            std::vector<int> sorted = members;
            sort_base_case(sorted);
            out_.insert(out_.end(), sorted.begin(), sorted.end());
            return;
        }
        const Gap* best = &gaps.front();
        for (const Gap& g : gaps) {
            if (g.width() > best->width()) best = &g;
            else if (g.width() == best->width()) {
                const bool further = rtl_ ? g.lo > best->lo : g.lo < best->lo;
                if (further) best = &g;
            }
        }
        const double cut = (best->lo + best->hi) / 2.0;
        std::vector<int> left, right;
        for (int i : members) {
            const Span s = x_span(i);
            ((s.lo + s.hi) / 2.0 < cut ? left : right).push_back(i);
        }
        if (rtl_) {
            order_group(right);
            order_group(left);
        } else {
            order_group(left);
            order_group(right);
        }
    }
};

} // namespace

FrameOrder order_frames(const std::vector<Frame>& frames, double page_width,
                        double page_height, ReadingDirection direction) {
    FrameOrder order;
    if (frames.empty()) return order;
    Orderer orderer(frames, page_width, page_height, direction);
    const std::vector<int> sequence = orderer.run();
    order.ordered.reserve(frames.size());
    for (size_t pos = 0; pos < sequence.size(); ++pos) {
        const Frame& f = frames[sequence[pos]];
        order.ordered.push_back(f);
        auto [it, inserted] = order.order_index.emplace(f.id, static_cast<int>(pos) + 1);
        if (!inserted) raise(Error::Code::invalid, "duplicate frame id '" + f.id + "'");
    }
    return order;
}

FrameSlot assign_frame(const Box& b, const FrameOrder& order) {
    if (order.ordered.empty()) return FrameSlot{"", 1, true};
    double best_overlap = 0.0;
    const Frame* best = nullptr;
    if (b.area() > 0.0) {
        for (const Frame& f : order.ordered) { // ordered by k: first hit wins ties
            const double frac = overlap_fraction(b, f.box);
            if (frac > best_overlap) {
                best_overlap = frac;
                best = &f;
            }
        }
    }
    if (best) return FrameSlot{best->id, order.k_of(best->id), false};
    // Nothing overlaps: nearest frame centroid, smaller k on exact ties.
    double best_dist = std::numeric_limits<double>::infinity();
    for (const Frame& f : order.ordered) {
        const double d = centroid_distance(b, f.box);
        if (d < best_dist) {
            best_dist = d;
            best = &f;
        }
    }
    return FrameSlot{best->id, order.k_of(best->id), true};
}

const FrameSlot& FrameAssignment::of(const std::string& object_id) const {
    auto it = by_object.find(object_id);
    if (it == by_object.end())
        raise(Error::Code::invalid, "object '" + object_id + "' has no frame assignment");
    return it->second;
}

FrameAssignment assign_objects(const Page& page, const FrameOrder& order) {
    FrameAssignment assignment;
    for (const auto& c : page.characters)
        assignment.by_object.emplace(c.id, assign_frame(c.box, order));
    for (const auto& t : page.texts)
        assignment.by_object.emplace(t.id, assign_frame(t.box, order));
    return assignment;
}

} // namespace mspk
