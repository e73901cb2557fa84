#pragma once

#include <string>
#include <vector>

#include "mangaspeak/model.hpp"
#include "mangaspeak/predict.hpp"

namespace mspk {

enum class EvalMode { PredCls, SGCls, SGDet };

const char* to_string(EvalMode m);
EvalMode eval_mode_from(const std::string& name);

struct MatchCriteria {
    EvalMode mode = EvalMode::PredCls;
    double iou_threshold = 0.5; // SGDet box matching
};

// One predicted (character, text) edge against one ground-truth speaker link.
// PredCls/SGCls match ids exactly; SGDet matches predicted detection boxes to
// the ground-truth boxes at the IoU threshold with correct labels.
bool match_pair(const std::string& predicted_char_id, const std::string& predicted_text_id,
                const std::string& gt_speaker_id, const std::string& gt_text_id,
                const Page& page, const MatchCriteria& criteria,
                const std::vector<ExternalDetection>* detections);

struct PageTally {
    long long correct_easy = 0;
    long long correct_hard = 0;
    long long gt_easy = 0;
    long long gt_hard = 0;

    long long correct() const { return correct_easy + correct_hard; }
    long long gt() const { return gt_easy + gt_hard; }
};

// Recall of the top-K triplet list against the page's ground truth. Each GT
// link is matched by at most one triplet and vice versa (greedy in score
// order). Pages without ground truth contribute nothing.
PageTally tally_triplets(const Page& page, const std::vector<Triplet>& top_k,
                         const MatchCriteria& criteria,
                         const std::vector<ExternalDetection>* detections);
double recall_at_k(const Page& page, const std::vector<Triplet>& top_k,
                   const MatchCriteria& criteria,
                   const std::vector<ExternalDetection>* detections = nullptr);

// Recall@(#text): the prediction carries exactly N candidates for an
// N-speaker text; texts without a prediction count as missed.
PageTally tally_prediction(const Page& page, const Prediction& prediction,
                           const MatchCriteria& criteria,
                           const std::vector<ExternalDetection>* detections);
double recall_at_num_text(const Page& page, const Prediction& prediction,
                          const MatchCriteria& criteria,
                          const std::vector<ExternalDetection>* detections = nullptr);

struct RecallCell {
    long long correct = 0;
    long long gt_pairs = 0;

    double recall() const { return gt_pairs > 0 ? static_cast<double>(correct) / gt_pairs : 0.0; }
    double percent() const { return 100.0 * recall(); }
};

struct EvalReport {
    std::string predictor;
    std::string mode;
    std::string metric = "recall@#text";
    RecallCell easy;
    RecallCell hard;
    RecallCell total;
    long long pages_evaluated = 0;
    std::vector<std::string> failed_pages; // reported and excluded, run continues
};

enum class PredictorKind {
    ShortestDistance,
    FrameDistance,
    Heuristic,
    HeuristicWeighted,
    External,
    ExternalWeighted,
};

const char* to_string(PredictorKind p);
PredictorKind predictor_from(const std::string& name);

struct EvalOptions {
    PredictorKind predictor = PredictorKind::FrameDistance;
    MatchCriteria criteria;
    std::string split_selector = "all";     // all | train | test
    std::string difficulty_filter = "all";  // all | easy | hard: restricts counted GT pairs
    ReadingDirection direction = ReadingDirection::RightToLeft;
    double weight_constant = 2.0;                // frame-order weight denominator offset
    const ExternalScores* scores = nullptr;      // required by External*
    const DetectionSet* detections = nullptr;    // required by SGDet
};

// Runs the predictor page by page and micro-averages Recall@(#text) per
// difficulty. Requires difficulty assigned. A page where the predictor throws
// is recorded in failed_pages and excluded.
EvalReport evaluate(const Dataset& dataset, const EvalOptions& options);

std::string report_to_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

} // namespace mspk
