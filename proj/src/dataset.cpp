#include "mangaspeak/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mangaspeak/errors.hpp"
#include "mangaspeak/rng.hpp"
#include "mangaspeak/xml.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mspk {

namespace {

double attr_number(const xml::Node& node, const char* key, const std::string& source) {
    const std::string* raw = node.attr(key);
    if (!raw) {
        const std::string* id = node.attr("id");
        raise(Error::Code::parse,
              source + ":" + std::to_string(node.line) + ": element <" + node.name + ">" +
                  (id ? " id=" + *id : "") + " missing required attribute '" + key + "'");
    }
    try {
        size_t used = 0;
        double v = std::stod(*raw, &used);
        if (used != raw->size() || !std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (...) {
        raise(Error::Code::parse, source + ":" + std::to_string(node.line) + ": attribute '" +
                                      std::string(key) + "'='" + *raw + "' is not a number");
    }
}

std::string attr_string(const xml::Node& node, const char* key, const std::string& source) {
    const std::string* raw = node.attr(key);
    if (!raw) {
        const std::string* id = node.attr("id");
        raise(Error::Code::parse,
              source + ":" + std::to_string(node.line) + ": element <" + node.name + ">" +
                  (id ? " id=" + *id : "") + " missing required attribute '" + key + "'");
    }
    return *raw;
}

Box read_box(const xml::Node& node, const Page& page, const std::string& source,
             std::vector<std::string>* warnings) {
    Box b{attr_number(node, "xmin", source), attr_number(node, "ymin", source),
          attr_number(node, "xmax", source), attr_number(node, "ymax", source)};
    if (b.x0 > b.x1 || b.y0 > b.y1)
        raise(Error::Code::parse, source + ":" + std::to_string(node.line) + ": element <" +
                                      node.name + "> id=" + attr_string(node, "id", source) +
                                      " has inverted box corners");
    const Box clamped{std::clamp(b.x0, 0.0, page.width), std::clamp(b.y0, 0.0, page.height),
                      std::clamp(b.x1, 0.0, page.width), std::clamp(b.y1, 0.0, page.height)};
    if (warnings && (clamped.x0 != b.x0 || clamped.y0 != b.y0 || clamped.x1 != b.x1 ||
                     clamped.y1 != b.y1)) {
        warnings->push_back(page.book_title + " page " + std::to_string(page.index) + ": box " +
                            attr_string(node, "id", source) + " clamped to page bounds");
    }
    return clamped;
}

void check_unique_id(std::set<std::string>& seen, const std::string& id, const Page& page,
                     const std::string& source, int line) {
    if (!seen.insert(id).second)
        raise(Error::Code::parse, source + ":" + std::to_string(line) + ": duplicate element id '" +
                                      id + "' on page " + std::to_string(page.index));
}

} // namespace

Book parse_book(const std::string& xml_content, const std::string& source_name,
                std::vector<std::string>* warnings) {
    const xml::Node root = xml::parse(xml_content, source_name);
    if (root.name != "book")
        raise(Error::Code::parse, source_name + ": document element is <" + root.name +
                                      ">, expected <book>");
    Book book;
    book.title = attr_string(root, "title", source_name);

    // Book-level character roster: id -> display name.
    std::map<std::string, std::string> roster;
    if (const xml::Node* characters = root.child("characters")) {
        for (const xml::Node* c : characters->children_named("character"))
            roster[attr_string(*c, "id", source_name)] = attr_string(*c, "name", source_name);
    }

    const xml::Node* pages = root.child("pages");
    if (!pages) raise(Error::Code::parse, source_name + ": <book> has no <pages> element");
    for (const xml::Node* page_node : pages->children_named("page")) {
        Page page;
        page.book_title = book.title;
        page.index = static_cast<int>(attr_number(*page_node, "index", source_name));
        page.width = attr_number(*page_node, "width", source_name);
        page.height = attr_number(*page_node, "height", source_name);
        if (const std::string* img = page_node->attr("image")) page.image_path = *img;
        std::set<std::string> ids;
        for (const xml::Node& el : page_node->children) {
            if (el.name == "frame") {
                Frame f;
                f.id = attr_string(el, "id", source_name);
                check_unique_id(ids, f.id, page, source_name, el.line);
                f.box = read_box(el, page, source_name, warnings);
                page.frames.push_back(std::move(f));
            } else if (el.name == "body") {
                CharacterBox c;
                c.id = attr_string(el, "id", source_name);
                check_unique_id(ids, c.id, page, source_name, el.line);
                c.box = read_box(el, page, source_name, warnings);
                if (const std::string* ref = el.attr("character")) {
                    auto it = roster.find(*ref);
                    c.character_name = it != roster.end() ? it->second : *ref;
                } else if (const std::string* name = el.attr("name")) {
                    c.character_name = *name;
                }
                page.characters.push_back(std::move(c));
            } else if (el.name == "text") {
                TextBox t;
                t.id = attr_string(el, "id", source_name);
                check_unique_id(ids, t.id, page, source_name, el.line);
                t.box = read_box(el, page, source_name, warnings);
                t.content = el.text;
                page.texts.push_back(std::move(t));
            }
            // face and anything else: ignored; pairs reference bodies only.
        }
        book.pages.push_back(std::move(page));
    }
    return book;
}

Book load_book(const std::string& xml_path, std::vector<std::string>* warnings) {
    std::ifstream f(xml_path, std::ios::binary);
    if (!f) raise(Error::Code::io, "cannot open " + xml_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_book(buf.str(), xml_path, warnings);
}

Dataset load_dataset(const std::string& root) {
    Dataset ds;
    fs::path p(root);
    if (!fs::exists(p)) raise(Error::Code::io, "dataset root not found: " + root);
    std::vector<fs::path> files;
    if (fs::is_regular_file(p)) {
        files.push_back(p);
    } else {
        fs::path dir = p;
        if (fs::is_directory(p / "annotations")) dir = p / "annotations";
        else if (fs::is_directory(p / "books")) dir = p / "books";
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".xml")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) raise(Error::Code::io, "no .xml annotation files under " + dir.string());
    }
    for (const auto& file : files)
        ds.books.push_back(load_book(file.string(), &ds.load_warnings));
    return ds;
}

namespace {

json parse_jsonl_line(const std::string& line, const std::string& path, size_t line_no) {
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
        raise(Error::Code::parse,
              path + ":" + std::to_string(line_no) + ": not a JSON object record");
    return rec;
}

void attach_pair_record(const json& rec, const std::string& where, Dataset& dataset,
                        std::vector<std::string>& problems) {
    for (const char* key : {"book", "page", "text_id", "speaker_ids"}) {
        if (!rec.contains(key)) {
            problems.push_back(where + ": missing field '" + std::string(key) + "'");
            return;
        }
    }
    const std::string book_title = rec["book"].get<std::string>();
    const int page_index = rec["page"].get<int>();
    Book* book = nullptr;
    for (auto& b : dataset.books)
        if (b.title == book_title) book = &b;
    if (!book) {
        problems.push_back(where + ": unknown book '" + book_title + "'");
        return;
    }
    Page* page = nullptr;
    for (auto& pg : book->pages)
        if (pg.index == page_index) page = &pg;
    if (!page) {
        problems.push_back(where + ": unknown page " + std::to_string(page_index) + " in '" +
                           book_title + "'");
        return;
    }
    SpeakerPair pair;
    pair.text_id = rec["text_id"].get<std::string>();
    if (!page->text(pair.text_id)) {
        problems.push_back(where + ": unknown text id '" + pair.text_id + "'");
        return;
    }
    if (page->pair_for_text(pair.text_id)) {
        problems.push_back(where + ": duplicate pair record for text '" + pair.text_id + "'");
        return;
    }
    if (!rec["speaker_ids"].is_array() || rec["speaker_ids"].empty()) {
        problems.push_back(where + ": speaker_ids must be a non-empty array");
        return;
    }
    std::set<std::string> seen;
    for (const auto& sid : rec["speaker_ids"]) {
        const std::string id = sid.get<std::string>();
        if (!seen.insert(id).second) {
            problems.push_back(where + ": duplicate speaker id '" + id + "'");
            return;
        }
        if (!page->character(id)) {
            problems.push_back(where + ": unknown speaker box id '" + id + "'");
            return;
        }
        pair.speaker_box_ids.push_back(id);
    }
    page->pairs.push_back(std::move(pair));
}

void finish_pair_load(const std::string& path, const std::vector<std::string>& problems) {
    if (problems.empty()) return;
    std::string msg = path + ": " + std::to_string(problems.size()) + " bad pair record(s):";
    const size_t shown = std::min<size_t>(problems.size(), 20);
    for (size_t i = 0; i < shown; ++i) msg += "\n  " + problems[i];
    if (problems.size() > shown) msg += "\n  ...";
    raise(Error::Code::invalid, msg);
}

std::map<std::string, PairAdapter>& adapter_registry() {
    static std::map<std::string, PairAdapter> registry;
    return registry;
}

} // namespace

void load_pairs(const std::string& jsonl_path, Dataset& dataset) {
    std::ifstream f(jsonl_path);
    if (!f) raise(Error::Code::io, "cannot open " + jsonl_path);
    std::vector<std::string> problems;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json rec = parse_jsonl_line(line, jsonl_path, line_no);
        attach_pair_record(rec, jsonl_path + ":" + std::to_string(line_no), dataset, problems);
    }
    finish_pair_load(jsonl_path, problems);
}

void register_pair_adapter(const std::string& format, PairAdapter adapter) {
    adapter_registry()[format] = std::move(adapter);
}

void load_pairs_with_adapter(const std::string& path, const std::string& format,
                             Dataset& dataset) {
    if (format.empty() || format == "canonical") {
        load_pairs(path, dataset);
        return;
    }
    auto it = adapter_registry().find(format);
    if (it == adapter_registry().end())
        raise(Error::Code::range, "no pair adapter registered for format '" + format + "'");
    std::ifstream f(path);
    if (!f) raise(Error::Code::io, "cannot open " + path);
    std::vector<std::string> problems;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        for (const std::string& converted : it->second(line)) {
            const json rec = parse_jsonl_line(converted, path, line_no);
            attach_pair_record(rec, path + ":" + std::to_string(line_no), dataset, problems);
        }
    }
    finish_pair_load(path, problems);
}

std::vector<SpeakerPair> resolve_speaker_boxes(const Page& page,
                                               const std::vector<NamePair>& name_pairs,
                                               const FrameAssignment& assignment,
                                               std::vector<std::string>* skipped) {
    std::vector<SpeakerPair> out;
    for (const NamePair& np : name_pairs) {
        const TextBox* text = page.text(np.text_id);
        if (!text) {
            if (skipped)
                skipped->push_back("text '" + np.text_id + "' not on page " +
                                   std::to_string(page.index));
            continue;
        }
        std::vector<const CharacterBox*> candidates;
        for (const auto& c : page.characters)
            if (c.character_name == np.character_name) candidates.push_back(&c);
        if (candidates.empty()) {
            if (skipped)
                skipped->push_back("character '" + np.character_name + "' not on page " +
                                   std::to_string(page.index));
            continue;
        }
        const std::string& text_frame = assignment.of(np.text_id).frame_id;
        const CharacterBox* chosen = nullptr;
        double chosen_dist = 0.0;
        bool chosen_in_frame = false;
        for (const CharacterBox* c : candidates) {
            const bool in_frame = assignment.of(c->id).frame_id == text_frame;
            const double dist = centroid_distance(c->box, text->box);
            const bool better = !chosen || (in_frame && !chosen_in_frame) ||
                                (in_frame == chosen_in_frame &&
                                 (dist < chosen_dist ||
                                  (dist == chosen_dist && c->id < chosen->id)));
            if (better) {
                chosen = c;
                chosen_dist = dist;
                chosen_in_frame = in_frame;
            }
        }
        out.push_back(SpeakerPair{np.text_id, {chosen->id}, Difficulty::Unassigned});
    }
    return out;
}

void assign_difficulty(Page& page, const FrameAssignment& assignment) {
    for (SpeakerPair& pair : page.pairs) {
        const std::string& text_frame = assignment.of(pair.text_id).frame_id;
        bool any_same_frame = false;
        for (const std::string& sid : pair.speaker_box_ids)
            if (assignment.of(sid).frame_id == text_frame) any_same_frame = true;
        pair.difficulty = any_same_frame ? Difficulty::Easy : Difficulty::Hard;
    }
}

void assign_all_difficulty(Dataset& dataset, ReadingDirection direction) {
    for (Book& book : dataset.books) {
        for (Page& page : book.pages) {
            if (page.pairs.empty()) continue;
            const FrameOrder order =
                order_frames(page.frames, page.width, page.height, direction);
            const FrameAssignment assignment = assign_objects(page, order);
            assign_difficulty(page, assignment);
        }
    }
}

StatsReport dataset_stats(const Dataset& dataset) {
    StatsReport s;
    s.books = static_cast<long long>(dataset.books.size());
    s.warnings = static_cast<long long>(dataset.load_warnings.size());
    for (const Book& book : dataset.books) {
        for (const Page& page : book.pages) {
            ++s.pages;
            s.frames += static_cast<long long>(page.frames.size());
            s.characters += static_cast<long long>(page.characters.size());
            s.texts += static_cast<long long>(page.texts.size());
            if (page.pairs.empty()) continue;
            ++s.annotated_images;
            // A landscape sheet is a two-page spread; count both pages.
            s.page_units += page.width > page.height ? 2 : 1;
            for (const SpeakerPair& pair : page.pairs) {
                const long long links = pair.link_count();
                switch (pair.difficulty) {
                    case Difficulty::Easy: s.easy += links; break;
                    case Difficulty::Hard: s.hard += links; break;
                    case Difficulty::Unassigned:
                        raise(Error::Code::state,
                              "dataset_stats called before difficulty assignment (book '" +
                                  book.title + "' page " + std::to_string(page.index) + ")");
                }
                s.total += links;
            }
        }
    }
    s.pairs_per_page = s.page_units > 0 ? static_cast<double>(s.total) / s.page_units : 0.0;
    return s;
}

std::string stats_to_json(const StatsReport& s) {
    json j{{"books", s.books},
           {"pages", s.pages},
           {"annotated_images", s.annotated_images},
           {"page_units", s.page_units},
           {"frames", s.frames},
           {"characters", s.characters},
           {"texts", s.texts},
           {"pairs", {{"easy", s.easy}, {"hard", s.hard}, {"total", s.total}}},
           {"pairs_per_page", s.pairs_per_page},
           {"warnings", s.warnings}};
    return j.dump(2);
}

std::string stats_table(const StatsReport& s) {
    char line[256];
    std::string out;
    out += "                    Speaker-to-text pairs\n";
    out += "Annotated images   Texts     Easy      Hard      Total     Pairs/page\n";
    std::snprintf(line, sizeof(line), "%-18lld %-9lld %-9lld %-9lld %-9lld %.2f\n",
                  s.annotated_images, s.texts, s.easy, s.hard, s.total, s.pairs_per_page);
    out += line;
    return out;
}

void split_dataset(Dataset& dataset, double train_fraction, uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        raise(Error::Code::range, "train fraction must be in (0, 1)");
    const size_t n = dataset.books.size();
    if (n < 2) raise(Error::Code::range, "need at least 2 books to split");
    std::vector<std::string> titles;
    titles.reserve(n);
    for (const Book& b : dataset.books) titles.push_back(b.title);
    std::sort(titles.begin(), titles.end());
    Rng rng(seed);
    for (size_t i = n - 1; i > 0; --i)
        std::swap(titles[i], titles[rng.next_below(i + 1)]);
    size_t n_train = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<size_t>(n_train, 1, n - 1);
    dataset.split.clear();
    for (size_t i = 0; i < n; ++i)
        dataset.split[titles[i]] = i < n_train ? Split::Train : Split::Test;
}

namespace {

std::string fmt_coord(double v) {
    // Annotation coordinates are integral pixels in practice; keep them short.
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

void append_box_attrs(std::string& out, const Box& b) {
    out += " xmin=\"" + fmt_coord(b.x0) + "\" ymin=\"" + fmt_coord(b.y0) + "\" xmax=\"" +
           fmt_coord(b.x1) + "\" ymax=\"" + fmt_coord(b.y1) + "\"";
}

} // namespace

std::string book_to_xml(const Book& book) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<book title=\"" + xml::escape_attr(book.title) + "\">\n";

    // Roster of distinct character names, stable order, synthetic ids.
    std::vector<std::string> names;
    for (const Page& page : book.pages)
        for (const auto& c : page.characters)
            if (std::find(names.begin(), names.end(), c.character_name) == names.end())
                names.push_back(c.character_name);
    std::sort(names.begin(), names.end());
    std::map<std::string, std::string> name_to_id;
    out += "  <characters>\n";
    for (size_t i = 0; i < names.size(); ++i) {
        const std::string id = "c" + std::to_string(i);
        name_to_id[names[i]] = id;
        out += "    <character id=\"" + id + "\" name=\"" + xml::escape_attr(names[i]) + "\"/>\n";
    }
    out += "  </characters>\n";

    out += "  <pages>\n";
    for (const Page& page : book.pages) {
        out += "    <page index=\"" + std::to_string(page.index) + "\" width=\"" +
               fmt_coord(page.width) + "\" height=\"" + fmt_coord(page.height) + "\"";
        if (page.image_path) out += " image=\"" + xml::escape_attr(*page.image_path) + "\"";
        out += ">\n";
        for (const Frame& f : page.frames) {
            out += "      <frame id=\"" + xml::escape_attr(f.id) + "\"";
            append_box_attrs(out, f.box);
            out += "/>\n";
        }
        for (const auto& c : page.characters) {
            out += "      <body id=\"" + xml::escape_attr(c.id) + "\"";
            append_box_attrs(out, c.box);
            out += " character=\"" + name_to_id[c.character_name] + "\"/>\n";
        }
        for (const auto& t : page.texts) {
            out += "      <text id=\"" + xml::escape_attr(t.id) + "\"";
            append_box_attrs(out, t.box);
            out += ">" + xml::escape_text(t.content) + "</text>\n";
        }
        out += "    </page>\n";
    }
    out += "  </pages>\n";
    out += "</book>\n";
    return out;
}

std::string pairs_to_jsonl(const Dataset& dataset) {
    std::string out;
    for (const Book& book : dataset.books) {
        for (const Page& page : book.pages) {
            for (const SpeakerPair& pair : page.pairs) {
                json rec{{"book", book.title},
                         {"page", page.index},
                         {"text_id", pair.text_id},
                         {"speaker_ids", pair.speaker_box_ids}};
                out += rec.dump();
                out += '\n';
            }
        }
    }
    return out;
}

void write_dataset(const Dataset& dataset, const std::string& out_dir) {
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "books", ec);
    if (ec) raise(Error::Code::io, "cannot create " + (root / "books").string());
    for (const Book& book : dataset.books) {
        const fs::path path = root / "books" / (book.title + ".xml");
        const fs::path tmp = root / "books" / (book.title + ".xml.tmp");
        std::ofstream f(tmp, std::ios::binary);
        if (!f) raise(Error::Code::io, "cannot write " + tmp.string());
        f << book_to_xml(book);
        f.close();
        fs::rename(tmp, path);
    }
    const fs::path pairs = root / "pairs.jsonl";
    const fs::path tmp = root / "pairs.jsonl.tmp";
    std::ofstream f(tmp, std::ios::binary);
    if (!f) raise(Error::Code::io, "cannot write " + tmp.string());
    f << pairs_to_jsonl(dataset);
    f.close();
    fs::rename(tmp, pairs);
}

} // namespace mspk
