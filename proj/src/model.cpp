#include "mangaspeak/model.hpp"

#include <cmath>

#include "mangaspeak/errors.hpp"

namespace mspk {

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Hard: return "hard";
        default: return "unassigned";
    }
}

const CharacterBox* Page::character(const std::string& id) const {
    for (const auto& c : characters)
        if (c.id == id) return &c;
    return nullptr;
}

const TextBox* Page::text(const std::string& id) const {
    for (const auto& t : texts)
        if (t.id == id) return &t;
    return nullptr;
}

const SpeakerPair* Page::pair_for_text(const std::string& text_id) const {
    for (const auto& p : pairs)
        if (p.text_id == text_id) return &p;
    return nullptr;
}

double Page::diagonal() const { return std::hypot(width, height); }

const Book* Dataset::book(const std::string& title) const {
    for (const auto& b : books)
        if (b.title == title) return &b;
    return nullptr;
}

bool Dataset::in_split(const std::string& book_title, const std::string& selector) const {
    if (selector == "all" || selector.empty()) return true;
    auto it = split.find(book_title);
    if (it == split.end())
        raise(Error::Code::state, "split requested but dataset is unsplit (book '" + book_title + "')");
    if (selector == "train") return it->second == Split::Train;
    if (selector == "test") return it->second == Split::Test;
    raise(Error::Code::range, "unknown split selector '" + selector + "'");
}

} // namespace mspk
