#pragma once

#include <optional>
#include <string>

#include "mangaspeak/dataset.hpp"
#include "mangaspeak/eval.hpp"
#include "mangaspeak/synth.hpp"

namespace mspk {

// Run configuration shared by the C API and the CLI; parsed from JSON.
struct RunOptions {
    std::string predictor = "frame"; // shortest|frame|heuristic|heuristic+weight|external|external+weight
    std::string mode = "predcls";    // predcls|sgcls|sgdet
    std::string difficulty = "all";  // all|easy|hard (presentation filter)
    std::string split = "all";       // all|train|test
    uint64_t seed = 0;
    double train_fraction = 0.7;
    bool rtl = true;
    double weight_constant = 2.0;
    double iou_threshold = 0.5;
    std::string scores_path;     // required by external predictors
    std::string detections_path; // required by sgdet

    ReadingDirection direction() const {
        return rtl ? ReadingDirection::RightToLeft : ReadingDirection::LeftToRight;
    }
};

RunOptions parse_run_options(const std::string& options_json);
SynthConfig parse_synth_config(const std::string& config_json);

// Reading order + difficulty labels for every annotated page; split
// assignment when options ask for one. Idempotent.
void prepare_dataset(Dataset& dataset, const RunOptions& options);

// JSON summary of what was loaded (books, pages, element and pair counts).
std::string ingest_report_json(const Dataset& dataset);

// One JSON object per page: {"book", "page", "order": [frame ids],
// "assignments": {object id: k}}.
std::string order_report_jsonl(const Dataset& dataset, const RunOptions& options);

// One JSON object per text: ranked speaker candidates.
std::string predictions_jsonl(const Dataset& dataset, const RunOptions& options, int top_n = 5);

EvalReport run_eval(Dataset& dataset, const RunOptions& options);

std::string render_svg_for(const Dataset& dataset, const RunOptions& options,
                           const std::string& book_title, int page_index);

} // namespace mspk
