#include <doctest.h>

#include <algorithm>

#include "mangaspeak/errors.hpp"
#include "mangaspeak/frame_order.hpp"
#include "mangaspeak/rng.hpp"
#include "mangaspeak/synth.hpp"

using namespace mspk;

namespace {

std::vector<std::string> ids_of(const FrameOrder& order) {
    std::vector<std::string> out;
    for (const Frame& f : order.ordered) out.push_back(f.id);
    return out;
}

// 2x2 grid on a 1000x1000 page: TR, TL, BR, BL under right-to-left reading.
std::vector<Frame> grid_2x2() {
    return {
        Frame{"TL", Box{50, 50, 450, 450}},
        Frame{"TR", Box{550, 50, 950, 450}},
        Frame{"BL", Box{50, 550, 450, 950}},
        Frame{"BR", Box{550, 550, 950, 950}},
    };
}

} // namespace

TEST_CASE("single frame") {
    const FrameOrder order = order_frames({Frame{"only", Box{10, 10, 90, 90}}}, 100, 100);
    CHECK(ids_of(order) == std::vector<std::string>{"only"});
    CHECK(order.k_of("only") == 1);
}

TEST_CASE("zero frames gives an empty order") {
    const FrameOrder order = order_frames({}, 100, 100);
    CHECK(order.ordered.empty());
}

TEST_CASE("2x2 grid reads TR, TL, BR, BL") {
    const FrameOrder order = order_frames(grid_2x2(), 1000, 1000);
    CHECK(ids_of(order) == std::vector<std::string>{"TR", "TL", "BR", "BL"});
}

TEST_CASE("left-to-right flag mirrors the column order") {
    const FrameOrder order = order_frames(grid_2x2(), 1000, 1000, ReadingDirection::LeftToRight);
    CHECK(ids_of(order) == std::vector<std::string>{"TL", "TR", "BL", "BR"});
}

TEST_CASE("full-width top frame over two bottom frames") {
    const std::vector<Frame> frames = {
        Frame{"bottom_left", Box{50, 550, 450, 950}},
        Frame{"top", Box{50, 50, 950, 450}},
        Frame{"bottom_right", Box{550, 550, 950, 950}},
    };
    const FrameOrder order = order_frames(frames, 1000, 1000);
    CHECK(ids_of(order) ==
          std::vector<std::string>{"top", "bottom_right", "bottom_left"});
}

TEST_CASE("full-height right column is read before the stacked left frames") {
    const std::vector<Frame> frames = {
        Frame{"left_top", Box{50, 50, 450, 450}},
        Frame{"left_bottom", Box{50, 550, 450, 950}},
        Frame{"tall_right", Box{550, 50, 950, 950}},
    };
    const FrameOrder order = order_frames(frames, 1000, 1000);
    CHECK(ids_of(order) == std::vector<std::string>{"tall_right", "left_top", "left_bottom"});
}

TEST_CASE("staircase of 5 overlapping frames matches the permutation oracle") {
    // Each step overlaps the previous by 30px, less than the 2*tau clearance.
    std::vector<Frame> frames;
    for (int i = 0; i < 5; ++i) {
        const double y0 = i * 190.0;
        const double x1 = 1000.0 - i * 120.0;
        frames.push_back(Frame{"s" + std::to_string(i), Box{x1 - 300, y0, x1, y0 + 220}});
    }
    const FrameOrder order = order_frames(frames, 1000, 1200);
    const auto oracle = oracle_reading_order(frames, 1000, 1200);
    CHECK(ids_of(order) == oracle);
    CHECK(ids_of(order) == std::vector<std::string>{"s0", "s1", "s2", "s3", "s4"});
}

TEST_CASE("order is a permutation with gapless 1..n indices") {
    const FrameOrder order = order_frames(grid_2x2(), 1000, 1000);
    REQUIRE(order.ordered.size() == 4);
    std::vector<int> ks;
    for (const auto& [id, k] : order.order_index) ks.push_back(k);
    std::sort(ks.begin(), ks.end());
    CHECK(ks == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("invariant under permutation of the input list") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Frame> frames = gen_test_layout(1000 + trial, 8, 900, 1300);
        const FrameOrder base = order_frames(frames, 900, 1300);
        std::vector<Frame> shuffled = frames;
        for (size_t i = shuffled.size() - 1; i > 0; --i)
            std::swap(shuffled[i], shuffled[rng.next_below(i + 1)]);
        const FrameOrder again = order_frames(shuffled, 900, 1300);
        CHECK(ids_of(again) == ids_of(base));
    }
}

TEST_CASE("scaling page and frames leaves the order unchanged") {
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Frame> frames = gen_test_layout(2000 + trial, 8, 900, 1300);
        const FrameOrder base = order_frames(frames, 900, 1300);
        const double s = 2.75;
        std::vector<Frame> scaled = frames;
        for (Frame& f : scaled)
            f.box = Box{f.box.x0 * s, f.box.y0 * s, f.box.x1 * s, f.box.y1 * s};
        const FrameOrder after = order_frames(scaled, 900 * s, 1300 * s);
        CHECK(ids_of(after) == ids_of(base));
    }
}

TEST_CASE("strictly-above (tau-shrunk) frames come first; right of side-by-side first") {
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Frame> frames = gen_test_layout(3000 + trial, 8, 900, 1300);
        const FrameOrder order = order_frames(frames, 900, 1300);
        const double tau_x = kCutTolerance * 900, tau_y = kCutTolerance * 1300;
        for (size_t i = 0; i < frames.size(); ++i) {
            for (size_t j = 0; j < frames.size(); ++j) {
                if (i == j) continue;
                const Box& a = frames[i].box;
                const Box& b = frames[j].box;
                const bool a_above = a.y1 - tau_y < b.y0 + tau_y;
                const bool a_right_overlapping =
                    !a_above && !(b.y1 - tau_y < a.y0 + tau_y) && a.x0 + tau_x > b.x1 - tau_x;
                if (a_above)
                    CHECK(order.k_of(frames[i].id) < order.k_of(frames[j].id));
                else if (a_right_overlapping)
                    CHECK(order.k_of(frames[i].id) < order.k_of(frames[j].id));
            }
        }
    }
}

TEST_CASE("assign_frame") {
    const FrameOrder order = order_frames(grid_2x2(), 1000, 1000);

    SUBCASE("box inside a frame gets that frame") {
        const FrameSlot slot = assign_frame(Box{600, 600, 700, 700}, order);
        CHECK(slot.frame_id == "BR");
        CHECK(slot.k == 3);
        CHECK_FALSE(slot.fallback);
    }
    SUBCASE("box split 60/40 goes to the larger overlap") {
        // Spans TR/TL gutter: 60% inside TL, 40% inside TR.
        const Box b{390, 100, 590, 200}; // width 200: 60 in TL [*,450], 40 in TR [550,*]
        const FrameSlot slot = assign_frame(b, order);
        CHECK(slot.frame_id == "TL");
    }
    SUBCASE("balloon floating in the gutter falls back to nearest centroid") {
        const Box b{460, 60, 520, 120}; // in the gutter between the top columns
        const FrameSlot slot = assign_frame(b, order);
        CHECK(slot.fallback);
        // oracle: nearest frame centroid by hand
        double best = 1e18;
        std::string expect;
        for (const Frame& f : grid_2x2()) {
            const double d = centroid_distance(b, f.box);
            if (d < best) {
                best = d;
                expect = f.id;
            }
        }
        CHECK(slot.frame_id == expect);
    }
    SUBCASE("zero frames: everything lands in the pseudo-frame, flagged") {
        const FrameOrder empty = order_frames({}, 1000, 1000);
        const FrameSlot slot = assign_frame(Box{0, 0, 10, 10}, empty);
        CHECK(slot.frame_id.empty());
        CHECK(slot.k == 1);
        CHECK(slot.fallback);
    }
    SUBCASE("zero-area box uses the centroid fallback") {
        const FrameSlot slot = assign_frame(Box{600, 600, 600, 600}, order);
        CHECK(slot.frame_id == "BR");
        CHECK(slot.fallback);
    }
}

TEST_CASE("assign_objects covers every character and text") {
    Page page;
    page.width = 1000;
    page.height = 1000;
    page.frames = grid_2x2();
    page.characters = {CharacterBox{"b0", Box{600, 600, 700, 700}, "x"}};
    page.texts = {TextBox{"t0", Box{100, 100, 200, 160}, ""},
                  TextBox{"t1", Box{600, 100, 700, 160}, ""}};
    const FrameOrder order = order_frames(page.frames, page.width, page.height);
    const FrameAssignment assignment = assign_objects(page, order);
    CHECK(assignment.by_object.size() == 3);
    CHECK(assignment.of("b0").frame_id == "BR");
    CHECK(assignment.of("t0").frame_id == "TL");
    CHECK(assignment.of("t1").frame_id == "TR");
    CHECK_THROWS_AS(assignment.of("nope"), Error);
}
