#include "mangaspeak/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "mangaspeak/errors.hpp"

using nlohmann::json;

namespace mspk {

namespace {

ScoreMatrix matrix_shell(const Page& page, Provenance prov) {
    ScoreMatrix m;
    m.book = page.book_title;
    m.page_index = page.index;
    for (const auto& c : page.characters) m.character_ids.push_back(c.id);
    for (const auto& t : page.texts) m.text_ids.push_back(t.id);
    m.scores.assign(m.character_ids.size() * m.text_ids.size(), 0.0);
    m.provenance = prov;
    return m;
}

void sort_ranking(std::vector<RankedCandidate>& ranking) {
    std::sort(ranking.begin(), ranking.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.character_id < b.character_id;
              });
}

} // namespace

Prediction predict_shortest_distance(const Page& page) {
    Prediction pred;
    for (const auto& t : page.texts) {
        TextPrediction tp;
        for (const auto& c : page.characters)
            tp.ranking.push_back({c.id, -centroid_distance(c.box, t.box)});
        sort_ranking(tp.ranking);
        tp.flagged = tp.ranking.empty();
        pred.by_text.emplace(t.id, std::move(tp));
    }
    return pred;
}

Prediction predict_frame_distance(const Page& page, const FrameAssignment& assignment) {
    Prediction pred;
    const double bonus = 2.0 * page.diagonal();
    for (const auto& t : page.texts) {
        const std::string& text_frame = assignment.of(t.id).frame_id;
        TextPrediction tp;
        for (const auto& c : page.characters) {
            const double d = centroid_distance(c.box, t.box);
            const bool in_frame = assignment.of(c.id).frame_id == text_frame;
            tp.ranking.push_back({c.id, in_frame ? bonus - d : -d});
        }
        sort_ranking(tp.ranking);
        tp.flagged = tp.ranking.empty();
        pred.by_text.emplace(t.id, std::move(tp));
    }
    return pred;
}

ScoreMatrix heuristic_scores(const Page& page) {
    ScoreMatrix m = matrix_shell(page, Provenance::heuristic);
    const double diag = page.diagonal();
    for (size_t ci = 0; ci < m.character_ids.size(); ++ci) {
        const CharacterBox* c = page.character(m.character_ids[ci]);
        for (size_t ti = 0; ti < m.text_ids.size(); ++ti) {
            const TextBox* t = page.text(m.text_ids[ti]);
            const double d = centroid_distance(c->box, t->box);
            m.at(ci, ti) = 1.0 / (1.0 + (diag > 0.0 ? d / diag : 0.0));
        }
    }
    return m;
}

int ExternalDetection::argmax_label() const {
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (label_probs[i] > label_probs[best]) best = i;
    return best;
}

ScoreMatrix heuristic_scores_over(const std::vector<ExternalDetection>& detections,
                                  const std::string& book, int page_index,
                                  double page_width, double page_height) {
    ScoreMatrix m;
    m.book = book;
    m.page_index = page_index;
    m.provenance = Provenance::heuristic;
    std::vector<const ExternalDetection*> chars, texts;
    for (const auto& d : detections) {
        if (d.argmax_label() == 0) {
            m.character_ids.push_back(d.id);
            chars.push_back(&d);
        } else if (d.argmax_label() == 1) {
            m.text_ids.push_back(d.id);
            texts.push_back(&d);
        }
    }
    m.scores.assign(chars.size() * texts.size(), 0.0);
    const double diag = std::hypot(page_width, page_height);
    for (size_t ci = 0; ci < chars.size(); ++ci)
        for (size_t ti = 0; ti < texts.size(); ++ti) {
            const double d = centroid_distance(chars[ci]->box, texts[ti]->box);
            m.at(ci, ti) = 1.0 / (1.0 + (diag > 0.0 ? d / diag : 0.0));
        }
    return m;
}

ScoreMatrix ExternalScores::for_ids(const std::string& book, int page_index,
                                    const std::vector<std::string>& character_ids,
                                    const std::vector<std::string>& text_ids,
                                    long long* missing) const {
    ScoreMatrix m;
    m.book = book;
    m.page_index = page_index;
    m.character_ids = character_ids;
    m.text_ids = text_ids;
    m.scores.assign(character_ids.size() * text_ids.size(), 0.0);
    m.provenance = Provenance::external;
    std::map<std::string, size_t> crow, tcol;
    for (size_t i = 0; i < character_ids.size(); ++i) crow[character_ids[i]] = i;
    for (size_t i = 0; i < text_ids.size(); ++i) tcol[text_ids[i]] = i;
    std::set<std::pair<size_t, size_t>> filled;
    auto it = by_page.find({book, page_index});
    if (it != by_page.end()) {
        for (const Record& r : it->second) {
            auto ci = crow.find(r.character_id);
            auto ti = tcol.find(r.text_id);
            if (ci == crow.end())
                raise(Error::Code::invalid, "score record references unknown character '" +
                                                r.character_id + "' on " + book + " page " +
                                                std::to_string(page_index));
            if (ti == tcol.end())
                raise(Error::Code::invalid, "score record references unknown text '" + r.text_id +
                                                "' on " + book + " page " +
                                                std::to_string(page_index));
            m.at(ci->second, ti->second) = r.score;
            filled.insert({ci->second, ti->second});
        }
    }
    if (missing)
        *missing += static_cast<long long>(character_ids.size() * text_ids.size() - filled.size());
    return m;
}

ScoreMatrix ExternalScores::for_page(const Page& page, long long* missing) const {
    std::vector<std::string> cids, tids;
    for (const auto& c : page.characters) cids.push_back(c.id);
    for (const auto& t : page.texts) tids.push_back(t.id);
    return for_ids(page.book_title, page.index, cids, tids, missing);
}

ExternalScores load_external_scores(const std::string& jsonl_path) {
    std::ifstream f(jsonl_path);
    if (!f) raise(Error::Code::io, "cannot open " + jsonl_path);
    ExternalScores out;
    std::map<std::pair<std::string, int>, std::set<std::pair<std::string, std::string>>> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = jsonl_path + ":" + std::to_string(line_no);
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object())
            raise(Error::Code::parse, where + ": not a JSON object record");
        for (const char* key : {"book", "page", "char", "text", "score"})
            if (!rec.contains(key))
                raise(Error::Code::parse, where + ": missing field '" + std::string(key) + "'");
        const double score = rec["score"].get<double>();
        if (!(score >= 0.0 && score <= 1.0))
            raise(Error::Code::invalid, where + ": score " + std::to_string(score) +
                                            " outside [0,1] for char '" +
                                            rec["char"].get<std::string>() + "' text '" +
                                            rec["text"].get<std::string>() + "'");
        const std::pair<std::string, int> key{rec["book"].get<std::string>(),
                                              rec["page"].get<int>()};
        const std::pair<std::string, std::string> pair_key{rec["char"].get<std::string>(),
                                                           rec["text"].get<std::string>()};
        if (!seen[key].insert(pair_key).second)
            raise(Error::Code::invalid, where + ": duplicate score record for char '" +
                                            pair_key.first + "' text '" + pair_key.second + "'");
        out.by_page[key].push_back({pair_key.first, pair_key.second, score});
    }
    return out;
}

const std::vector<ExternalDetection>* DetectionSet::for_page(const std::string& book,
                                                             int page_index) const {
    auto it = by_page.find({book, page_index});
    return it == by_page.end() ? nullptr : &it->second;
}

const ExternalDetection* DetectionSet::find(const std::string& book, int page_index,
                                            const std::string& id) const {
    const auto* dets = for_page(book, page_index);
    if (!dets) return nullptr;
    for (const auto& d : *dets)
        if (d.id == id) return &d;
    return nullptr;
}

DetectionSet load_external_detections(const std::string& jsonl_path) {
    std::ifstream f(jsonl_path);
    if (!f) raise(Error::Code::io, "cannot open " + jsonl_path);
    DetectionSet out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = jsonl_path + ":" + std::to_string(line_no);
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object())
            raise(Error::Code::parse, where + ": not a JSON object record");
        for (const char* key : {"book", "page", "id", "bbox", "probs"})
            if (!rec.contains(key))
                raise(Error::Code::parse, where + ": missing field '" + std::string(key) + "'");
        if (!rec["bbox"].is_array() || rec["bbox"].size() != 4)
            raise(Error::Code::parse, where + ": bbox must be [x0,y0,x1,y1]");
        if (!rec["probs"].is_array() || rec["probs"].size() != 3)
            raise(Error::Code::parse, where + ": probs must be [p_char,p_text,p_background]");
        ExternalDetection d;
        d.id = rec["id"].get<std::string>();
        d.box = Box{rec["bbox"][0].get<double>(), rec["bbox"][1].get<double>(),
                    rec["bbox"][2].get<double>(), rec["bbox"][3].get<double>()};
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            d.label_probs[i] = rec["probs"][i].get<double>();
            if (!(d.label_probs[i] >= 0.0 && d.label_probs[i] <= 1.0))
                raise(Error::Code::invalid, where + ": probability outside [0,1]");
            sum += d.label_probs[i];
        }
        if (std::abs(sum - 1.0) > 1e-6)
            raise(Error::Code::invalid, where + ": probabilities sum to " + std::to_string(sum));
        out.by_page[{rec["book"].get<std::string>(), rec["page"].get<int>()}].push_back(d);
    }
    return out;
}

ScoreMatrix apply_frame_weight(const ScoreMatrix& scores, const FrameAssignment& assignment,
                               double constant) {
    ScoreMatrix out = scores;
    out.provenance = Provenance::weighted;
    for (size_t ci = 0; ci < out.character_ids.size(); ++ci) {
        const int k_char = assignment.of(out.character_ids[ci]).k;
        for (size_t ti = 0; ti < out.text_ids.size(); ++ti) {
            const int k_text = assignment.of(out.text_ids[ti]).k;
            out.at(ci, ti) *= 1.0 / (constant + std::abs(k_char - k_text));
        }
    }
    return out;
}

std::vector<Triplet> top_k_triplets(const ScoreMatrix& scores,
                                    const std::vector<ExternalDetection>* detections, int k) {
    if (k < 1) raise(Error::Code::range, "K must be >= 1");
    auto prob = [&](const std::string& id, int label) {
        if (!detections) return 1.0;
        for (const auto& d : *detections)
            if (d.id == id) return d.label_probs[label];
        return 1.0;
    };
    std::vector<Triplet> all;
    all.reserve(scores.character_ids.size() * scores.text_ids.size());
    for (size_t ci = 0; ci < scores.character_ids.size(); ++ci) {
        const double p_char = prob(scores.character_ids[ci], 0);
        for (size_t ti = 0; ti < scores.text_ids.size(); ++ti) {
            const double p_text = prob(scores.text_ids[ti], 1);
            all.push_back(Triplet{scores.character_ids[ci], scores.text_ids[ti],
                                  scores.at(ci, ti) * p_char * p_text});
        }
    }
    std::sort(all.begin(), all.end(), [](const Triplet& a, const Triplet& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.character_id != b.character_id) return a.character_id < b.character_id;
        return a.text_id < b.text_id;
    });
    if (static_cast<size_t>(k) < all.size()) all.resize(static_cast<size_t>(k));
    return all;
}

Prediction select_per_text(const ScoreMatrix& scores,
                           const std::map<std::string, int>& required_count) {
    Prediction pred;
    std::map<std::string, size_t> tcol;
    for (size_t i = 0; i < scores.text_ids.size(); ++i) tcol[scores.text_ids[i]] = i;
    for (const auto& [text_id, n] : required_count) {
        if (n < 1) raise(Error::Code::range, "required count for '" + text_id + "' must be >= 1");
        auto it = tcol.find(text_id);
        if (it == tcol.end())
            raise(Error::Code::invalid, "text '" + text_id + "' not present in score matrix");
        TextPrediction tp;
        for (size_t ci = 0; ci < scores.character_ids.size(); ++ci)
            tp.ranking.push_back({scores.character_ids[ci], scores.at(ci, it->second)});
        sort_ranking(tp.ranking);
        if (static_cast<size_t>(n) < tp.ranking.size()) {
            tp.ranking.resize(static_cast<size_t>(n));
        } else if (static_cast<size_t>(n) > tp.ranking.size()) {
            tp.flagged = true; // fewer characters than requested
        }
        pred.by_text.emplace(text_id, std::move(tp));
    }
    return pred;
}

} // namespace mspk
