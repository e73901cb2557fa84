#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mangaspeak/model.hpp"
#include "mangaspeak/frame_order.hpp"
#include "mangaspeak/predict.hpp"
#include "mangaspeak/rng.hpp"

namespace mspk {

enum class Scenario { EasySameFrame, HardNeighborFrame, Mixed };

const char* to_string(Scenario s);
Scenario scenario_from(const std::string& name);

// Deterministic synthetic page generator. Frames sit on a jittered grid with
// gutters at least twice the cut tolerance, so every page cuts cleanly.
struct SynthConfig {
    uint64_t seed = 0;
    int books = 1;
    int pages_per_book = 8;
    std::pair<int, int> rows{2, 3};
    std::pair<int, int> cols{2, 3};
    std::pair<int, int> chars_per_frame{1, 2};
    std::pair<int, int> texts_per_frame{1, 2};
    Scenario scenario = Scenario::EasySameFrame;
    double mixed_ratio = 0.5; // fraction of easy placements in Mixed
    double page_width = 840.0;
    double page_height = 1180.0; // portrait: one page, not a spread
    double multi_speaker_rate = 0.1; // chance of a two-speaker pair when possible
};

// One page with ground-truth pairs, difficulty already set by construction.
// EasySameFrame puts each speaker in its text's frame. HardNeighborFrame puts
// the speaker in the frame read just after the text's (|delta k| = 1), with a
// lone decoy character inside the text's frame and a nearer same-page
// character two frames away in reading order.
Page gen_page(const SynthConfig& config, const std::string& book_title, int page_index);

Dataset gen_corpus(const SynthConfig& config);

// Brute-force reading order for n <= 8 frames: enumerate every permutation,
// keep those consistent with pairwise precedence on tau-shrunk boxes (strictly
// above first; otherwise, horizontally separated and nearer the reading edge
// first), and pick the one that greedily follows the centroid sort. Errors on
// more than 8 frames or when no consistent permutation exists.
std::vector<std::string> oracle_reading_order(const std::vector<Frame>& frames,
                                              double page_width, double page_height,
                                              ReadingDirection direction =
                                                  ReadingDirection::RightToLeft);

// Brute-force per-text selection: full sort of each text's column, top N.
Prediction oracle_select(const ScoreMatrix& scores,
                         const std::map<std::string, int>& required_count);

// Random cut-admitting layout for order testing: jittered grid, occasional
// merged cells, occasionally a dropped cell; resamples until the pairwise
// precedence digraph is acyclic so the permutation oracle is well defined.
std::vector<Frame> gen_test_layout(uint64_t seed, int max_frames, double page_width,
                                   double page_height);

} // namespace mspk
