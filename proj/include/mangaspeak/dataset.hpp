#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mangaspeak/frame_order.hpp"
#include "mangaspeak/model.hpp"

namespace mspk {

// Manga109-style annotation XML -> Book. Boxes overrunning the page bounds
// are clamped; each clamp appends a warning.
Book load_book(const std::string& xml_path, std::vector<std::string>* warnings = nullptr);
Book parse_book(const std::string& xml_content, const std::string& source_name,
                std::vector<std::string>* warnings = nullptr);

// Load every book under a dataset root. Accepts a single .xml file, a
// directory of .xml files, or a root containing an annotations/ subdirectory.
// Books are loaded in sorted filename order.
Dataset load_dataset(const std::string& root);

// Canonical pair file: JSON Lines, one record per pair:
//   {"book": str, "page": int, "text_id": str, "speaker_ids": [str, ...]}
// Every referenced book/page/text/speaker must resolve; difficulty starts
// Unassigned. A second record for the same text on a page is an error.
void load_pairs(const std::string& jsonl_path, Dataset& dataset);

// Hook for adapting other pair-annotation formats: converts one input line to
// zero or more canonical JSON records (as strings). Registered per format tag.
using PairAdapter = std::function<std::vector<std::string>(const std::string& line)>;
void register_pair_adapter(const std::string& format, PairAdapter adapter);
void load_pairs_with_adapter(const std::string& path, const std::string& format, Dataset& dataset);

// Name-level record used when annotations reference a character identity
// rather than a specific box.
struct NamePair {
    std::string text_id;
    std::string character_name;
};

// Box resolution for name-level annotations: prefer a box of that character in
// the text's frame (nearest centroid among several), else the nearest box
// anywhere on the page. Unmatchable names are skipped and reported.
std::vector<SpeakerPair> resolve_speaker_boxes(const Page& page,
                                               const std::vector<NamePair>& name_pairs,
                                               const FrameAssignment& assignment,
                                               std::vector<std::string>* skipped = nullptr);

// Easy iff at least one speaker box shares the text's assigned frame.
void assign_difficulty(Page& page, const FrameAssignment& assignment);

// Reading order + assignment + difficulty for every page of the dataset.
void assign_all_difficulty(Dataset& dataset,
                           ReadingDirection direction = ReadingDirection::RightToLeft);

struct StatsReport {
    long long books = 0;
    long long pages = 0;          // all pages loaded
    long long annotated_images = 0; // pages carrying at least one pair
    long long page_units = 0;     // 2 per landscape (two-page spread), 1 per portrait
    long long frames = 0;
    long long characters = 0;
    long long texts = 0;
    long long easy = 0;  // speaker->text links in Easy records
    long long hard = 0;
    long long total = 0;
    double pairs_per_page = 0.0; // total / page_units over annotated images
    long long warnings = 0;
};

// Requires difficulty assigned on every pair.
StatsReport dataset_stats(const Dataset& dataset);

std::string stats_to_json(const StatsReport& s);
std::string stats_table(const StatsReport& s);

// Book-granularity split, deterministic in the seed; at least one book lands
// on each side. Fewer than two books is an error.
void split_dataset(Dataset& dataset, double train_fraction, uint64_t seed);

// Canonical XML serialization of a book (inverse of load_book).
std::string book_to_xml(const Book& book);

// Write books/<title>.xml plus pairs.jsonl under out_dir.
void write_dataset(const Dataset& dataset, const std::string& out_dir);
std::string pairs_to_jsonl(const Dataset& dataset);

} // namespace mspk
