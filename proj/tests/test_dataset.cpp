#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mangaspeak/dataset.hpp"
#include "mangaspeak/errors.hpp"

using namespace mspk;
using fixtures::TempDir;

TEST_CASE("load_book reads the fixture with exact counts") {
    std::vector<std::string> warnings;
    const Book book = parse_book(fixtures::kMiniBookXml, "mini.xml", &warnings);
    CHECK(book.title == "MiniBook");
    REQUIRE(book.pages.size() == 1);
    const Page& page = book.pages[0];
    CHECK(page.index == 0);
    CHECK(page.width == 1000);
    CHECK(page.height == 800);
    CHECK(page.frames.size() == 2);
    CHECK(page.characters.size() == 1);
    CHECK(page.texts.size() == 2);
    CHECK(page.characters[0].character_name == "hero");
    CHECK(page.texts[0].content == "first&line"); // entity decoded
    CHECK(warnings.empty());
}

TEST_CASE("empty pages element gives zero pages, no error") {
    const Book book = parse_book(R"(<book title="Empty"><pages></pages></book>)", "empty.xml");
    CHECK(book.pages.empty());
}

TEST_CASE("parser handles comments, CDATA and character references") {
    const std::string xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<!-- annotation export -->\n"
        "<book title=\"A &amp; B\">\n"
        "  <pages>\n"
        "    <!-- one page only -->\n"
        "    <page index=\"0\" width=\"100\" height=\"200\">\n"
        "      <text id=\"t0\" xmin=\"1\" ymin=\"2\" xmax=\"30\" ymax=\"20\">"
        "<![CDATA[a < b]]> &#x3042;&#12418;</text>\n"
        "    </page>\n"
        "  </pages>\n"
        "</book>\n";
    const Book book = parse_book(xml, "x.xml");
    CHECK(book.title == "A & B");
    REQUIRE(book.pages.size() == 1);
    CHECK(book.pages[0].texts[0].content == "a < b \xE3\x81\x82\xE3\x82\x82");
}

TEST_CASE("landscape spread with faces, character refs and Japanese text") {
    // Shaped like a production annotation file: two-page landscape spread,
    // face elements (ignored), bodies referencing the character roster.
    const std::string xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<book title=\"SampleVolume\">\n"
        "  <characters>\n"
        "    <character id=\"00000001\" name=\"\xE3\x83\xAB\xE3\x83\x95\xE3\x82\xA3\"/>\n"
        "  </characters>\n"
        "  <pages>\n"
        "    <page index=\"4\" width=\"1654\" height=\"1170\">\n"
        "      <frame id=\"00000010\" xmin=\"840\" ymin=\"50\" xmax=\"1600\" ymax=\"1120\"/>\n"
        "      <frame id=\"00000011\" xmin=\"60\" ymin=\"50\" xmax=\"800\" ymax=\"1120\"/>\n"
        "      <face id=\"00000020\" xmin=\"900\" ymin=\"200\" xmax=\"1000\" ymax=\"300\" character=\"00000001\"/>\n"
        "      <body id=\"00000021\" xmin=\"880\" ymin=\"180\" xmax=\"1100\" ymax=\"600\" character=\"00000001\"/>\n"
        "      <text id=\"00000030\" xmin=\"1200\" ymin=\"100\" xmax=\"1400\" ymax=\"260\">\xE3\x81\xAA\xE3\x81\xAB\xEF\xBC\x9F</text>\n"
        "    </page>\n"
        "  </pages>\n"
        "</book>\n";
    const Book book = parse_book(xml, "sample.xml");
    REQUIRE(book.pages.size() == 1);
    const Page& page = book.pages[0];
    CHECK(page.index == 4);
    CHECK(page.frames.size() == 2);
    CHECK(page.characters.size() == 1); // face ignored
    CHECK(page.characters[0].character_name == "\xE3\x83\xAB\xE3\x83\x95\xE3\x82\xA3");
    CHECK(page.texts[0].content == "\xE3\x81\xAA\xE3\x81\xAB\xEF\xBC\x9F");

    // spread counts as two pages in the stats denominator
    Dataset ds;
    ds.books.push_back(book);
    ds.books[0].pages[0].pairs = {
        SpeakerPair{"00000030", {"00000021"}, Difficulty::Unassigned}};
    assign_all_difficulty(ds);
    CHECK(ds.books[0].pages[0].pairs[0].difficulty == Difficulty::Easy);
    const StatsReport s = dataset_stats(ds);
    CHECK(s.page_units == 2);
    CHECK(s.total == 1);
}

TEST_CASE("parser rejects unknown entities and mismatched tags") {
    CHECK_THROWS_WITH_AS(parse_book("<book title=\"X\"><pages>&bogus;</pages></book>", "x.xml"),
                         doctest::Contains("bogus"), Error);
    CHECK_THROWS_WITH_AS(parse_book("<book title=\"X\"><pages></book>", "x.xml"),
                         doctest::Contains("mismatched"), Error);
    CHECK_THROWS_AS(parse_book("<notabook/>", "x.xml"), Error);
}

TEST_CASE("malformed XML reports line context") {
    const std::string bad = "<book title=\"X\">\n  <pages>\n  <page";
    CHECK_THROWS_WITH_AS(parse_book(bad, "bad.xml"), doctest::Contains("bad.xml:"), Error);
    try {
        parse_book(bad, "bad.xml");
    } catch (const Error& e) {
        CHECK(e.code() == Error::Code::parse);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("missing required attribute names the element id") {
    const std::string xml = R"(<book title="X"><pages>
      <page index="0" width="100" height="100">
        <frame id="f7" xmin="1" ymin="1" xmax="50"/>
      </page></pages></book>)";
    CHECK_THROWS_WITH_AS(parse_book(xml, "x.xml"), doctest::Contains("f7"), Error);
    CHECK_THROWS_WITH_AS(parse_book(xml, "x.xml"), doctest::Contains("ymax"), Error);
}

TEST_CASE("boxes past page bounds are clamped with a warning") {
    const std::string xml = R"(<book title="X"><pages>
      <page index="0" width="100" height="100">
        <body id="b0" xmin="80" ymin="10" xmax="130" ymax="40" character="who"/>
      </page></pages></book>)";
    std::vector<std::string> warnings;
    const Book book = parse_book(xml, "x.xml", &warnings);
    CHECK(book.pages[0].characters[0].box.x1 == 100);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("b0") != std::string::npos);
}

TEST_CASE("duplicate element id on a page is rejected") {
    const std::string xml = R"(<book title="X"><pages>
      <page index="0" width="100" height="100">
        <frame id="dup" xmin="0" ymin="0" xmax="10" ymax="10"/>
        <text id="dup" xmin="0" ymin="0" xmax="10" ymax="10">hi</text>
      </page></pages></book>)";
    CHECK_THROWS_WITH_AS(parse_book(xml, "x.xml"), doctest::Contains("dup"), Error);
}

TEST_CASE("load_pairs attaches records and validates references") {
    TempDir tmp;
    Dataset ds = fixtures::mini_dataset(tmp);

    SUBCASE("single-speaker record") {
        const auto path =
            tmp.write("p.jsonl",
                      R"({"book":"MiniBook","page":0,"text_id":"t0","speaker_ids":["b0"]})"
                      "\n");
        load_pairs(path, ds);
        REQUIRE(ds.books[0].pages[0].pairs.size() == 1);
        CHECK(ds.books[0].pages[0].pairs[0].link_count() == 1);
        CHECK(ds.books[0].pages[0].pairs[0].difficulty == Difficulty::Unassigned);
    }

    SUBCASE("multi-speaker record keeps every speaker") {
        // add a second body so the reference resolves
        Page& page = ds.books[0].pages[0];
        page.characters.push_back(CharacterBox{"b1", Box{100, 400, 200, 560}, "rival"});
        const auto path =
            tmp.write("p.jsonl",
                      R"({"book":"MiniBook","page":0,"text_id":"t0","speaker_ids":["b0","b1"]})"
                      "\n");
        load_pairs(path, ds);
        REQUIRE(ds.books[0].pages[0].pairs.size() == 1);
        CHECK(ds.books[0].pages[0].pairs[0].link_count() == 2);
    }

    SUBCASE("dangling text id is an error listing the record") {
        const auto path = tmp.write(
            "p.jsonl", R"({"book":"MiniBook","page":0,"text_id":"t99","speaker_ids":["b0"]})"
                       "\n");
        CHECK_THROWS_WITH_AS(load_pairs(path, ds), doctest::Contains("t99"), Error);
    }

    SUBCASE("duplicate record for one text is an error") {
        const auto path = tmp.write(
            "p.jsonl", R"({"book":"MiniBook","page":0,"text_id":"t0","speaker_ids":["b0"]})"
                       "\n"
                       R"({"book":"MiniBook","page":0,"text_id":"t0","speaker_ids":["b0"]})"
                       "\n");
        CHECK_THROWS_WITH_AS(load_pairs(path, ds), doctest::Contains("duplicate"), Error);
    }
}

namespace {

Page resolve_fixture_page() {
    Page page;
    page.book_title = "B";
    page.index = 0;
    page.width = 1000;
    page.height = 800;
    page.frames = {Frame{"f0", Box{520, 40, 960, 760}}, Frame{"f1", Box{40, 40, 480, 760}}};
    page.texts = {TextBox{"t0", Box{560, 80, 680, 160}, ""}};
    return page;
}

} // namespace

TEST_CASE("resolve_speaker_boxes") {
    SUBCASE("character appearing once resolves regardless of position") {
        Page page = resolve_fixture_page();
        page.characters = {CharacterBox{"b0", Box{60, 600, 160, 700}, "hero"}}; // other frame
        const FrameOrder order = order_frames(page.frames, page.width, page.height);
        const FrameAssignment assignment = assign_objects(page, order);
        const auto pairs = resolve_speaker_boxes(page, {{"t0", "hero"}}, assignment);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].speaker_box_ids == std::vector<std::string>{"b0"});
    }

    SUBCASE("same-frame box beats a nearer box in another frame") {
        Page page = resolve_fixture_page();
        page.characters = {
            // in f1, close to t0 across the gutter
            CharacterBox{"b_near", Box{440, 80, 478, 160}, "hero"},
            // in f0 (same frame as t0) but far away
            CharacterBox{"b_frame", Box{860, 640, 950, 750}, "hero"},
        };
        const FrameOrder order = order_frames(page.frames, page.width, page.height);
        const FrameAssignment assignment = assign_objects(page, order);
        const auto pairs = resolve_speaker_boxes(page, {{"t0", "hero"}}, assignment);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].speaker_box_ids == std::vector<std::string>{"b_frame"});
    }

    SUBCASE("neither in frame: nearest centroid wins (brute-force checked)") {
        Page page = resolve_fixture_page();
        page.characters = {
            CharacterBox{"b_a", Box{60, 600, 160, 700}, "hero"},
            CharacterBox{"b_b", Box{300, 120, 400, 220}, "hero"},
        };
        const FrameOrder order = order_frames(page.frames, page.width, page.height);
        const FrameAssignment assignment = assign_objects(page, order);
        const auto pairs = resolve_speaker_boxes(page, {{"t0", "hero"}}, assignment);

        // independent oracle: distances by hand over both candidates
        const TextBox& t = page.texts[0];
        const std::string expected =
            centroid_distance(page.characters[0].box, t.box) <
                    centroid_distance(page.characters[1].box, t.box)
                ? "b_a"
                : "b_b";
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].speaker_box_ids == std::vector<std::string>{expected});
    }

    SUBCASE("unknown character name is skipped and reported") {
        Page page = resolve_fixture_page();
        page.characters = {CharacterBox{"b0", Box{60, 600, 160, 700}, "hero"}};
        const FrameOrder order = order_frames(page.frames, page.width, page.height);
        const FrameAssignment assignment = assign_objects(page, order);
        std::vector<std::string> skipped;
        const auto pairs = resolve_speaker_boxes(page, {{"t0", "nobody"}}, assignment, &skipped);
        CHECK(pairs.empty());
        REQUIRE(skipped.size() == 1);
        CHECK(skipped[0].find("nobody") != std::string::npos);
    }

    SUBCASE("result never references a box of a different character") {
        Page page = resolve_fixture_page();
        page.characters = {
            CharacterBox{"b0", Box{560, 200, 660, 300}, "hero"},
            CharacterBox{"b1", Box{561, 200, 661, 300}, "rival"}, // nearer but wrong name
        };
        const FrameOrder order = order_frames(page.frames, page.width, page.height);
        const FrameAssignment assignment = assign_objects(page, order);
        const auto pairs = resolve_speaker_boxes(page, {{"t0", "hero"}}, assignment);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].speaker_box_ids == std::vector<std::string>{"b0"});
    }
}

TEST_CASE("assign_difficulty") {
    Page page = resolve_fixture_page();
    page.characters = {
        CharacterBox{"b_in", Box{700, 400, 800, 560}, "hero"},  // frame f0 with t0
        CharacterBox{"b_out", Box{60, 600, 160, 700}, "rival"}, // frame f1
    };
    const FrameOrder order = order_frames(page.frames, page.width, page.height);
    const FrameAssignment assignment = assign_objects(page, order);

    SUBCASE("speaker sharing the text's frame is Easy") {
        page.pairs = {SpeakerPair{"t0", {"b_in"}, Difficulty::Unassigned}};
        assign_difficulty(page, assignment);
        CHECK(page.pairs[0].difficulty == Difficulty::Easy);
    }
    SUBCASE("speaker in another frame is Hard") {
        page.pairs = {SpeakerPair{"t0", {"b_out"}, Difficulty::Unassigned}};
        assign_difficulty(page, assignment);
        CHECK(page.pairs[0].difficulty == Difficulty::Hard);
    }
    SUBCASE("multi-speaker with one in-frame speaker is Easy") {
        page.pairs = {SpeakerPair{"t0", {"b_out", "b_in"}, Difficulty::Unassigned}};
        assign_difficulty(page, assignment);
        CHECK(page.pairs[0].difficulty == Difficulty::Easy);
    }
    SUBCASE("after assignment every pair is Easy or Hard, counts add up") {
        page.pairs = {SpeakerPair{"t0", {"b_in"}, Difficulty::Unassigned},
                      SpeakerPair{"t1", {"b_out"}, Difficulty::Unassigned}};
        page.texts.push_back(TextBox{"t1", Box{80, 100, 220, 180}, ""});
        const FrameAssignment full = assign_objects(page, order);
        assign_difficulty(page, full);
        long long easy = 0, hard = 0, total = 0;
        for (const auto& p : page.pairs) {
            CHECK(p.difficulty != Difficulty::Unassigned);
            total += p.link_count();
            (p.difficulty == Difficulty::Easy ? easy : hard) += p.link_count();
        }
        CHECK(easy + hard == total);
    }
}

TEST_CASE("dataset_stats") {
    SUBCASE("empty dataset reports zeros") {
        Dataset ds;
        const StatsReport s = dataset_stats(ds);
        CHECK(s.total == 0);
        CHECK(s.annotated_images == 0);
        CHECK(s.pairs_per_page == 0.0);
    }

    SUBCASE("one portrait page with 3 pairs: 1 image, 3 pairs, 3.0 pairs/page") {
        Dataset ds;
        Book book;
        book.title = "B";
        Page page;
        page.book_title = "B";
        page.width = 800;
        page.height = 1200; // portrait: one page
        page.frames = {Frame{"f0", Box{50, 50, 750, 1150}}};
        page.characters = {CharacterBox{"b0", Box{100, 600, 200, 800}, "x"}};
        page.texts = {TextBox{"t0", Box{100, 100, 200, 160}, ""},
                      TextBox{"t1", Box{300, 100, 400, 160}, ""},
                      TextBox{"t2", Box{500, 100, 600, 160}, ""}};
        page.pairs = {SpeakerPair{"t0", {"b0"}, Difficulty::Easy},
                      SpeakerPair{"t1", {"b0"}, Difficulty::Easy},
                      SpeakerPair{"t2", {"b0"}, Difficulty::Easy}};
        book.pages.push_back(page);
        ds.books.push_back(book);
        const StatsReport s = dataset_stats(ds);
        CHECK(s.annotated_images == 1);
        CHECK(s.total == 3);
        CHECK(s.pairs_per_page == doctest::Approx(3.0));
    }

    SUBCASE("landscape sheets count as two pages") {
        Dataset ds;
        Book book;
        book.title = "B";
        Page page;
        page.book_title = "B";
        page.width = 1654;
        page.height = 1170; // landscape: two-page spread
        page.characters = {CharacterBox{"b0", Box{100, 600, 200, 800}, "x"}};
        page.texts = {TextBox{"t0", Box{100, 100, 200, 160}, ""}};
        page.pairs = {SpeakerPair{"t0", {"b0"}, Difficulty::Easy}};
        book.pages.push_back(page);
        ds.books.push_back(book);
        const StatsReport s = dataset_stats(ds);
        CHECK(s.page_units == 2);
        CHECK(s.pairs_per_page == doctest::Approx(0.5));
    }

    SUBCASE("unassigned difficulty is a state error") {
        TempDir tmp;
        Dataset ds = fixtures::mini_dataset(tmp);
        ds.books[0].pages[0].pairs = {SpeakerPair{"t0", {"b0"}, Difficulty::Unassigned}};
        CHECK_THROWS_AS(dataset_stats(ds), Error);
    }
}

namespace {

Dataset many_books(int n) {
    Dataset ds;
    for (int i = 0; i < n; ++i) {
        Book b;
        b.title = "BOOK" + std::to_string(i);
        ds.books.push_back(b);
    }
    return ds;
}

} // namespace

TEST_CASE("split_dataset") {
    SUBCASE("10 books at 0.7 gives 7 train / 3 test") {
        Dataset ds = many_books(10);
        split_dataset(ds, 0.7, 0);
        int train = 0, test = 0;
        for (const auto& [title, s] : ds.split) (s == Split::Train ? train : test)++;
        CHECK(train == 7);
        CHECK(test == 3);
    }
    SUBCASE("deterministic for a seed") {
        Dataset a = many_books(10), b = many_books(10);
        split_dataset(a, 0.7, 42);
        split_dataset(b, 0.7, 42);
        CHECK(a.split == b.split);
    }
    SUBCASE("different seeds usually differ") {
        Dataset a = many_books(10), b = many_books(10);
        split_dataset(a, 0.7, 1);
        split_dataset(b, 0.7, 2);
        CHECK(a.split != b.split);
    }
    SUBCASE("fraction 0.999 still forces one test book") {
        Dataset ds = many_books(10);
        split_dataset(ds, 0.999, 0);
        int test = 0;
        for (const auto& [title, s] : ds.split)
            if (s == Split::Test) ++test;
        CHECK(test == 1);
    }
    SUBCASE("fewer than 2 books is an error") {
        Dataset ds = many_books(1);
        CHECK_THROWS_AS(split_dataset(ds, 0.7, 0), Error);
    }
    SUBCASE("fraction outside (0,1) is an error") {
        Dataset ds = many_books(10);
        CHECK_THROWS_AS(split_dataset(ds, 0.0, 0), Error);
        CHECK_THROWS_AS(split_dataset(ds, 1.0, 0), Error);
    }
}

TEST_CASE("book XML round-trip is identity on the model") {
    std::vector<std::string> warnings;
    const Book original = parse_book(fixtures::kMiniBookXml, "mini.xml", &warnings);
    const std::string serialized = book_to_xml(original);
    const Book reloaded = parse_book(serialized, "roundtrip.xml");

    REQUIRE(reloaded.pages.size() == original.pages.size());
    const Page& a = original.pages[0];
    const Page& b = reloaded.pages[0];
    CHECK(b.width == a.width);
    CHECK(b.height == a.height);
    REQUIRE(b.frames.size() == a.frames.size());
    for (size_t i = 0; i < a.frames.size(); ++i) {
        CHECK(b.frames[i].id == a.frames[i].id);
        CHECK(b.frames[i].box.x0 == a.frames[i].box.x0);
        CHECK(b.frames[i].box.y1 == a.frames[i].box.y1);
    }
    REQUIRE(b.characters.size() == a.characters.size());
    CHECK(b.characters[0].character_name == a.characters[0].character_name);
    REQUIRE(b.texts.size() == a.texts.size());
    CHECK(b.texts[0].content == a.texts[0].content);

    // serialize(parse(serialize(x))) == serialize(x): fixed point
    CHECK(book_to_xml(reloaded) == serialized);
}
