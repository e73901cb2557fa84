#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mangaspeak/geometry.hpp"

namespace mspk {

enum class Difficulty { Unassigned, Easy, Hard };

const char* to_string(Difficulty d);

struct Frame {
    std::string id;
    Box box;
};

struct CharacterBox {
    std::string id;
    Box box;
    std::string character_name; // identity label of the depicted character
};

struct TextBox {
    std::string id;
    Box box;
    std::string content;
};

// Ground-truth link from one text to the character box(es) speaking it.
struct SpeakerPair {
    std::string text_id;
    std::vector<std::string> speaker_box_ids; // non-empty, no duplicates
    Difficulty difficulty = Difficulty::Unassigned;

    int link_count() const { return static_cast<int>(speaker_box_ids.size()); }
};

struct Page {
    std::string book_title;
    int index = 0;
    double width = 0.0;
    double height = 0.0;
    std::vector<Frame> frames;
    std::vector<CharacterBox> characters;
    std::vector<TextBox> texts;
    std::vector<SpeakerPair> pairs;
    std::optional<std::string> image_path; // reference only, never decoded

    const CharacterBox* character(const std::string& id) const;
    const TextBox* text(const std::string& id) const;
    const SpeakerPair* pair_for_text(const std::string& text_id) const;
    double diagonal() const;
};

struct Book {
    std::string title;
    std::vector<Page> pages;
};

enum class Split { Train, Test };

struct Dataset {
    std::vector<Book> books;
    std::map<std::string, Split> split; // book title -> assignment; empty = unsplit
    std::vector<std::string> load_warnings;

    const Book* book(const std::string& title) const;
    bool in_split(const std::string& book_title, const std::string& selector) const;
};

} // namespace mspk
