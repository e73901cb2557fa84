#include "mangaspeak/eval.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mangaspeak/errors.hpp"

using nlohmann::json;

namespace mspk {

const char* to_string(EvalMode m) {
    switch (m) {
        case EvalMode::PredCls: return "predcls";
        case EvalMode::SGCls: return "sgcls";
        case EvalMode::SGDet: return "sgdet";
    }
    return "?";
}

EvalMode eval_mode_from(const std::string& name) {
    if (name == "predcls" || name.empty()) return EvalMode::PredCls;
    if (name == "sgcls") return EvalMode::SGCls;
    if (name == "sgdet") return EvalMode::SGDet;
    raise(Error::Code::range, "unknown evaluation mode '" + name + "'");
}

const char* to_string(PredictorKind p) {
    switch (p) {
        case PredictorKind::ShortestDistance: return "shortest";
        case PredictorKind::FrameDistance: return "frame";
        case PredictorKind::Heuristic: return "heuristic";
        case PredictorKind::HeuristicWeighted: return "heuristic+weight";
        case PredictorKind::External: return "external";
        case PredictorKind::ExternalWeighted: return "external+weight";
    }
    return "?";
}

PredictorKind predictor_from(const std::string& name) {
    if (name == "shortest") return PredictorKind::ShortestDistance;
    if (name == "frame") return PredictorKind::FrameDistance;
    if (name == "heuristic") return PredictorKind::Heuristic;
    if (name == "heuristic+weight") return PredictorKind::HeuristicWeighted;
    if (name == "external") return PredictorKind::External;
    if (name == "external+weight") return PredictorKind::ExternalWeighted;
    raise(Error::Code::range, "unknown predictor '" + name + "'");
}

bool match_pair(const std::string& predicted_char_id, const std::string& predicted_text_id,
                const std::string& gt_speaker_id, const std::string& gt_text_id,
                const Page& page, const MatchCriteria& criteria,
                const std::vector<ExternalDetection>* detections) {
    if (criteria.mode != EvalMode::SGDet)
        return predicted_char_id == gt_speaker_id && predicted_text_id == gt_text_id;

    // SGDet: predicted ids name detections; all three elements must line up —
    // labels and both boxes at the IoU threshold.
    if (!detections) raise(Error::Code::state, "SGDet matching requires detections");
    const ExternalDetection* pc = nullptr;
    const ExternalDetection* pt = nullptr;
    for (const auto& d : *detections) {
        if (d.id == predicted_char_id) pc = &d;
        if (d.id == predicted_text_id) pt = &d;
    }
    if (!pc || !pt) return false;
    if (pc->argmax_label() != 0 || pt->argmax_label() != 1) return false;
    const CharacterBox* gc = page.character(gt_speaker_id);
    const TextBox* gt = page.text(gt_text_id);
    if (!gc || !gt) return false;
    return iou(pc->box, gc->box) >= criteria.iou_threshold &&
           iou(pt->box, gt->box) >= criteria.iou_threshold;
}

namespace {

struct GtLink {
    const SpeakerPair* pair;
    std::string speaker_id;
    bool matched = false;
};

std::vector<GtLink> gt_links(const Page& page) {
    std::vector<GtLink> links;
    for (const auto& pair : page.pairs)
        for (const auto& sid : pair.speaker_box_ids) links.push_back({&pair, sid, false});
    return links;
}

void count_links(const std::vector<GtLink>& links, PageTally& tally) {
    for (const auto& link : links) {
        const bool easy = link.pair->difficulty == Difficulty::Easy;
        if (link.pair->difficulty == Difficulty::Unassigned)
            raise(Error::Code::state, "evaluation requires difficulty assignment");
        (easy ? tally.gt_easy : tally.gt_hard) += 1;
        if (link.matched) (easy ? tally.correct_easy : tally.correct_hard) += 1;
    }
}

} // namespace

PageTally tally_triplets(const Page& page, const std::vector<Triplet>& top_k,
                         const MatchCriteria& criteria,
                         const std::vector<ExternalDetection>* detections) {
    PageTally tally;
    if (page.pairs.empty()) return tally;
    std::vector<GtLink> links = gt_links(page);
    for (const Triplet& t : top_k) { // descending score: greedy bipartite match
        for (auto& link : links) {
            if (link.matched) continue;
            if (match_pair(t.character_id, t.text_id, link.speaker_id, link.pair->text_id, page,
                           criteria, detections)) {
                link.matched = true;
                break;
            }
        }
    }
    count_links(links, tally);
    return tally;
}

double recall_at_k(const Page& page, const std::vector<Triplet>& top_k,
                   const MatchCriteria& criteria,
                   const std::vector<ExternalDetection>* detections) {
    const PageTally tally = tally_triplets(page, top_k, criteria, detections);
    return tally.gt() > 0 ? static_cast<double>(tally.correct()) / tally.gt() : 0.0;
}

PageTally tally_prediction(const Page& page, const Prediction& prediction,
                           const MatchCriteria& criteria,
                           const std::vector<ExternalDetection>* detections) {
    PageTally tally;
    if (page.pairs.empty()) return tally;
    std::vector<GtLink> links = gt_links(page);

    if (criteria.mode != EvalMode::SGDet) {
        for (const auto& pair : page.pairs) {
            auto it = prediction.by_text.find(pair.text_id);
            if (it == prediction.by_text.end()) continue; // no prediction: missed
            const size_t n = pair.speaker_box_ids.size();
            for (size_t i = 0; i < it->second.ranking.size() && i < n; ++i) {
                const std::string& cid = it->second.ranking[i].character_id;
                for (auto& link : links) {
                    if (link.matched || link.pair != &pair) continue;
                    if (cid == link.speaker_id) {
                        link.matched = true;
                        break;
                    }
                }
            }
        }
    } else {
        // Predicted texts are detections; each consumes the ground-truth text
        // it best overlaps, and candidates are matched by box IoU.
        for (const auto& [pred_text_id, tp] : prediction.by_text) {
            const SpeakerPair* target = nullptr;
            double best = criteria.iou_threshold;
            const ExternalDetection* pt = nullptr;
            if (detections)
                for (const auto& d : *detections)
                    if (d.id == pred_text_id) pt = &d;
            if (!pt) continue;
            for (const auto& pair : page.pairs) {
                const TextBox* gt = page.text(pair.text_id);
                const double overlap = iou(pt->box, gt->box);
                if (overlap >= best) {
                    best = overlap;
                    target = &pair;
                }
            }
            if (!target) continue;
            const size_t n = target->speaker_box_ids.size();
            for (size_t i = 0; i < tp.ranking.size() && i < n; ++i) {
                for (auto& link : links) {
                    if (link.matched || link.pair != target) continue;
                    if (match_pair(tp.ranking[i].character_id, pred_text_id, link.speaker_id,
                                   target->text_id, page, criteria, detections)) {
                        link.matched = true;
                        break;
                    }
                }
            }
        }
    }
    count_links(links, tally);
    return tally;
}

double recall_at_num_text(const Page& page, const Prediction& prediction,
                          const MatchCriteria& criteria,
                          const std::vector<ExternalDetection>* detections) {
    const PageTally tally = tally_prediction(page, prediction, criteria, detections);
    return tally.gt() > 0 ? static_cast<double>(tally.correct()) / tally.gt() : 0.0;
}

namespace {

std::map<std::string, int> required_counts(const Page& page) {
    std::map<std::string, int> required;
    for (const auto& pair : page.pairs) required[pair.text_id] = pair.link_count();
    return required;
}

Prediction truncate_to_required(const Prediction& full, const Page& page) {
    Prediction out;
    for (const auto& pair : page.pairs) {
        auto it = full.by_text.find(pair.text_id);
        if (it == full.by_text.end()) continue;
        TextPrediction tp = it->second;
        const size_t n = pair.speaker_box_ids.size();
        if (tp.ranking.size() > n) tp.ranking.resize(n);
        out.by_text.emplace(pair.text_id, std::move(tp));
    }
    return out;
}

Prediction predict_page(const Page& page, const EvalOptions& opt, const FrameOrder& order,
                        const FrameAssignment& assignment) {
    const std::vector<ExternalDetection>* dets =
        opt.detections ? opt.detections->for_page(page.book_title, page.index) : nullptr;
    const bool over_detections = opt.criteria.mode == EvalMode::SGDet;
    if (over_detections && !dets)
        raise(Error::Code::state, "SGDet evaluation requires detections for " + page.book_title +
                                      " page " + std::to_string(page.index));

    auto build_matrix = [&](bool external) {
        ScoreMatrix m;
        if (over_detections) {
            if (external) {
                ScoreMatrix shape = heuristic_scores_over(*dets, page.book_title, page.index,
                                                          page.width, page.height);
                m = opt.scores->for_ids(page.book_title, page.index, shape.character_ids,
                                        shape.text_ids);
            } else {
                m = heuristic_scores_over(*dets, page.book_title, page.index, page.width,
                                          page.height);
            }
        } else {
            m = external ? opt.scores->for_page(page) : heuristic_scores(page);
        }
        return m;
    };

    auto weighted = [&](ScoreMatrix m) {
        if (!over_detections) return apply_frame_weight(m, assignment, opt.weight_constant);
        // Detections are not in the page assignment; place them by box.
        FrameAssignment det_assignment;
        for (const auto& d : *dets) det_assignment.by_object.emplace(d.id, assign_frame(d.box, order));
        return apply_frame_weight(m, det_assignment, opt.weight_constant);
    };

    auto select = [&](const ScoreMatrix& m) {
        std::map<std::string, int> required;
        if (over_detections) {
            // Detected texts inherit the speaker count of the ground-truth
            // text they overlap best, defaulting to one.
            for (const auto& tid : m.text_ids) {
                const ExternalDetection* pt = nullptr;
                for (const auto& d : *dets)
                    if (d.id == tid) pt = &d;
                int n = 1;
                double best = opt.criteria.iou_threshold;
                for (const auto& pair : page.pairs) {
                    const TextBox* gt = page.text(pair.text_id);
                    const double overlap = pt ? iou(pt->box, gt->box) : 0.0;
                    if (overlap >= best) {
                        best = overlap;
                        n = pair.link_count();
                    }
                }
                required[tid] = n;
            }
        } else {
            required = required_counts(page);
        }
        return select_per_text(m, required);
    };

    switch (opt.predictor) {
        case PredictorKind::ShortestDistance:
            return truncate_to_required(predict_shortest_distance(page), page);
        case PredictorKind::FrameDistance:
            return truncate_to_required(predict_frame_distance(page, assignment), page);
        case PredictorKind::Heuristic:
            return select(build_matrix(false));
        case PredictorKind::HeuristicWeighted:
            return select(weighted(build_matrix(false)));
        case PredictorKind::External:
            if (!opt.scores) raise(Error::Code::state, "external predictor requires a score file");
            return select(build_matrix(true));
        case PredictorKind::ExternalWeighted:
            if (!opt.scores) raise(Error::Code::state, "external predictor requires a score file");
            return select(weighted(build_matrix(true)));
    }
    raise(Error::Code::range, "unhandled predictor");
}

} // namespace

EvalReport evaluate(const Dataset& dataset, const EvalOptions& options) {
    EvalReport report;
    report.predictor = to_string(options.predictor);
    report.mode = to_string(options.criteria.mode);
    for (const Book& book : dataset.books) {
        if (!dataset.in_split(book.title, options.split_selector)) continue;
        for (const Page& page : book.pages) {
            if (page.pairs.empty()) continue; // not an annotated image
            try {
                const FrameOrder order =
                    order_frames(page.frames, page.width, page.height, options.direction);
                const FrameAssignment assignment = assign_objects(page, order);
                const Prediction prediction = predict_page(page, options, order, assignment);
                const std::vector<ExternalDetection>* dets =
                    options.detections ? options.detections->for_page(book.title, page.index)
                                       : nullptr;
                const PageTally tally =
                    tally_prediction(page, prediction, options.criteria, dets);
                if (options.difficulty_filter != "hard") {
                    report.easy.correct += tally.correct_easy;
                    report.easy.gt_pairs += tally.gt_easy;
                }
                if (options.difficulty_filter != "easy") {
                    report.hard.correct += tally.correct_hard;
                    report.hard.gt_pairs += tally.gt_hard;
                }
                ++report.pages_evaluated;
            } catch (const std::exception& e) {
                report.failed_pages.push_back(book.title + " page " + std::to_string(page.index) +
                                              ": " + e.what());
            }
        }
    }
    report.total.correct = report.easy.correct + report.hard.correct;
    report.total.gt_pairs = report.easy.gt_pairs + report.hard.gt_pairs;
    return report;
}

std::string report_to_json(const EvalReport& report) {
    auto cell = [](const RecallCell& c) {
        return json{{"recall", c.recall()},
                    {"percent", c.percent()},
                    {"correct", c.correct},
                    {"gt_pairs", c.gt_pairs}};
    };
    json j{{"predictor", report.predictor}, {"mode", report.mode},
           {"metric", report.metric},      {"easy", cell(report.easy)},
           {"hard", cell(report.hard)},    {"total", cell(report.total)},
           {"pages_evaluated", report.pages_evaluated},
           {"failed_pages", report.failed_pages}};
    return j.dump(2);
}

std::string report_table(const EvalReport& report) {
    char line[256];
    std::string out = "Recall@(#text) for " + report.mode + "\n";
    out += "Method                      Easy     Hard     Total\n";
    std::snprintf(line, sizeof(line), "%-27s %-8.2f %-8.2f %-8.2f\n", report.predictor.c_str(),
                  report.easy.percent(), report.hard.percent(), report.total.percent());
    out += line;
    std::snprintf(line, sizeof(line), "pages=%lld gt_pairs=%lld correct=%lld\n",
                  report.pages_evaluated, report.total.gt_pairs, report.total.correct);
    out += line;
    return out;
}

} // namespace mspk
