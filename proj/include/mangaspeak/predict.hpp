#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mangaspeak/frame_order.hpp"
#include "mangaspeak/model.hpp"

namespace mspk {

enum class Provenance { rule, heuristic, external, weighted };

// Dense relation scores over every (character, text) pair of one page.
// Candidates run character -> text only; texts never speak.
struct ScoreMatrix {
    std::string book;
    int page_index = 0;
    std::vector<std::string> character_ids;
    std::vector<std::string> text_ids;
    std::vector<double> scores; // row-major, |characters| x |texts|
    Provenance provenance = Provenance::rule;

    double at(size_t ci, size_t ti) const { return scores[ci * text_ids.size() + ti]; }
    double& at(size_t ci, size_t ti) { return scores[ci * text_ids.size() + ti]; }
};

struct RankedCandidate {
    std::string character_id;
    double score = 0.0;
};

struct TextPrediction {
    std::vector<RankedCandidate> ranking; // descending score; ties by character id
    bool flagged = false;                 // empty candidate set or truncated request
};

struct Prediction {
    std::map<std::string, TextPrediction> by_text;
};

// Nearest centroid wins; score is the negated distance.
Prediction predict_shortest_distance(const Page& page);

// Characters sharing the text's frame outrank everything else; within a tier,
// nearest centroid first. Tier is encoded in the score as 2*diagonal - d for
// in-frame candidates vs -d outside, which keeps scores strictly ordered.
Prediction predict_frame_distance(const Page& page, const FrameAssignment& assignment);

// Built-in stand-in scorer: g = 1 / (1 + d/diagonal), in (0, 1].
ScoreMatrix heuristic_scores(const Page& page);

// Same scorer over externally detected objects (SGCls/SGDet paths); detections
// with argmax label background are dropped.
struct ExternalDetection {
    std::string id;
    Box box;
    std::array<double, 3> label_probs{1.0, 0.0, 0.0}; // character, text, background
    int argmax_label() const;
};

ScoreMatrix heuristic_scores_over(const std::vector<ExternalDetection>& detections,
                                  const std::string& book, int page_index,
                                  double page_width, double page_height);

// External relation scores, JSON Lines:
//   {"book": str, "page": int, "char": str, "text": str, "score": float}
// Scores outside [0,1] and duplicate (char, text) records are errors.
class ExternalScores {
public:
    struct Record {
        std::string character_id;
        std::string text_id;
        double score;
    };

    // Pairs absent from the file default to 0; *missing counts them.
    ScoreMatrix for_page(const Page& page, long long* missing = nullptr) const;
    ScoreMatrix for_ids(const std::string& book, int page_index,
                        const std::vector<std::string>& character_ids,
                        const std::vector<std::string>& text_ids,
                        long long* missing = nullptr) const;

    std::map<std::pair<std::string, int>, std::vector<Record>> by_page;
};

ExternalScores load_external_scores(const std::string& jsonl_path);

// External detections, JSON Lines:
//   {"book": str, "page": int, "id": str, "bbox": [x0,y0,x1,y1],
//    "probs": [p_char, p_text, p_background]}
// probs must lie in [0,1] and sum to 1 within 1e-6.
class DetectionSet {
public:
    const std::vector<ExternalDetection>* for_page(const std::string& book, int page_index) const;
    const ExternalDetection* find(const std::string& book, int page_index,
                                  const std::string& id) const;

    std::map<std::pair<std::string, int>, std::vector<ExternalDetection>> by_page;
};

DetectionSet load_external_detections(const std::string& jsonl_path);

// Frame-order weighting: every entry is multiplied by 1 / (constant + |k_i - k_j|)
// where k is the reading order of the object's frame.
ScoreMatrix apply_frame_weight(const ScoreMatrix& scores, const FrameAssignment& assignment,
                               double constant = 2.0);

struct Triplet {
    std::string character_id;
    std::string text_id;
    double score = 0.0;
};

// Top K (character, speak, text) candidates by r * P(subject) * P(object);
// label probabilities default to 1 when detections is null. Ties break on
// (character_id, text_id). K beyond the pair count returns every pair.
std::vector<Triplet> top_k_triplets(const ScoreMatrix& scores,
                                    const std::vector<ExternalDetection>* detections, int k);

// Exactly required_count[text] top candidates per text; requests beyond the
// character count return everything and flag the text.
Prediction select_per_text(const ScoreMatrix& scores,
                           const std::map<std::string, int>& required_count);

} // namespace mspk
