#include "mangaspeak/pipeline.hpp"


#include <json.hpp>

#include "mangaspeak/errors.hpp"
#include "mangaspeak/svg.hpp"

using nlohmann::json;

namespace mspk {

namespace {

json parse_object(const std::string& text, const char* what) {
    if (text.empty()) return json::object();
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(Error::Code::parse, std::string(what) + " is not a JSON object");
    return j;
}

template <typename T>
void read_field(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

} // namespace

RunOptions parse_run_options(const std::string& options_json) {
    const json j = parse_object(options_json, "run options");
    RunOptions o;
    read_field(j, "predictor", o.predictor);
    read_field(j, "mode", o.mode);
    read_field(j, "difficulty", o.difficulty);
    read_field(j, "split", o.split);
    read_field(j, "seed", o.seed);
    read_field(j, "train_fraction", o.train_fraction);
    read_field(j, "rtl", o.rtl);
    read_field(j, "weight_constant", o.weight_constant);
    read_field(j, "iou_threshold", o.iou_threshold);
    read_field(j, "scores", o.scores_path);
    read_field(j, "detections", o.detections_path);

    predictor_from(o.predictor); // validate names early
    eval_mode_from(o.mode);
    if (o.difficulty != "all" && o.difficulty != "easy" && o.difficulty != "hard")
        raise(Error::Code::range, "unknown difficulty filter '" + o.difficulty + "'");
    if (o.split != "all" && o.split != "train" && o.split != "test")
        raise(Error::Code::range, "unknown split selector '" + o.split + "'");
    if ((o.predictor == "external" || o.predictor == "external+weight") && o.scores_path.empty())
        raise(Error::Code::state, "external predictor requires a scores path");
    if (o.mode == "sgdet" && o.detections_path.empty())
        raise(Error::Code::state, "SGDet mode requires a detections path");
    return o;
}

SynthConfig parse_synth_config(const std::string& config_json) {
    const json j = parse_object(config_json, "synth config");
    SynthConfig c;
    read_field(j, "seed", c.seed);
    read_field(j, "books", c.books);
    read_field(j, "pages_per_book", c.pages_per_book);
    read_field(j, "mixed_ratio", c.mixed_ratio);
    read_field(j, "page_width", c.page_width);
    read_field(j, "page_height", c.page_height);
    read_field(j, "multi_speaker_rate", c.multi_speaker_rate);
    auto read_range = [&](const char* key, std::pair<int, int>& into) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_array() || v.size() != 2)
            raise(Error::Code::parse, std::string("synth config ") + key + " must be [lo, hi]");
        into = {v[0].get<int>(), v[1].get<int>()};
    };
    read_range("rows", c.rows);
    read_range("cols", c.cols);
    read_range("chars_per_frame", c.chars_per_frame);
    read_range("texts_per_frame", c.texts_per_frame);
    if (j.contains("scenario")) c.scenario = scenario_from(j.at("scenario").get<std::string>());
    if (!(c.mixed_ratio >= 0.0 && c.mixed_ratio <= 1.0))
        raise(Error::Code::range, "mixed_ratio must be in [0,1]");
    return c;
}

void prepare_dataset(Dataset& dataset, const RunOptions& options) {
    assign_all_difficulty(dataset, options.direction());
    if (options.split != "all") split_dataset(dataset, options.train_fraction, options.seed);
}

std::string ingest_report_json(const Dataset& dataset) {
    long long pages = 0, frames = 0, characters = 0, texts = 0, records = 0, links = 0;
    for (const Book& b : dataset.books)
        for (const Page& p : b.pages) {
            ++pages;
            frames += static_cast<long long>(p.frames.size());
            characters += static_cast<long long>(p.characters.size());
            texts += static_cast<long long>(p.texts.size());
            records += static_cast<long long>(p.pairs.size());
            for (const auto& pair : p.pairs) links += pair.link_count();
        }
    json j{{"books", dataset.books.size()}, {"pages", pages},
           {"frames", frames},              {"characters", characters},
           {"texts", texts},                {"pair_records", records},
           {"pair_links", links},           {"warnings", dataset.load_warnings.size()}};
    return j.dump(2);
}

std::string order_report_jsonl(const Dataset& dataset, const RunOptions& options) {
    std::string out;
    for (const Book& book : dataset.books) {
        if (!dataset.in_split(book.title, options.split)) continue;
        for (const Page& page : book.pages) {
            const FrameOrder order =
                order_frames(page.frames, page.width, page.height, options.direction());
            const FrameAssignment assignment = assign_objects(page, order);
            json rec;
            rec["book"] = book.title;
            rec["page"] = page.index;
            json ids = json::array();
            for (const Frame& f : order.ordered) ids.push_back(f.id);
            rec["order"] = ids;
            json assignments = json::object();
            for (const auto& [object_id, slot] : assignment.by_object)
                assignments[object_id] = slot.k;
            rec["assignments"] = assignments;
            out += rec.dump();
            out += '\n';
        }
    }
    return out;
}

namespace {

struct LoadedInputs {
    std::optional<ExternalScores> scores;
    std::optional<DetectionSet> detections;
};

LoadedInputs load_inputs(const RunOptions& options) {
    LoadedInputs in;
    if (!options.scores_path.empty()) in.scores = load_external_scores(options.scores_path);
    if (!options.detections_path.empty())
        in.detections = load_external_detections(options.detections_path);
    return in;
}

EvalOptions to_eval_options(const RunOptions& options, const LoadedInputs& inputs) {
    EvalOptions eo;
    eo.predictor = predictor_from(options.predictor);
    eo.criteria.mode = eval_mode_from(options.mode);
    eo.criteria.iou_threshold = options.iou_threshold;
    eo.split_selector = options.split;
    eo.difficulty_filter = options.difficulty;
    eo.direction = options.direction();
    eo.weight_constant = options.weight_constant;
    if (inputs.scores) eo.scores = &*inputs.scores;
    if (inputs.detections) eo.detections = &*inputs.detections;
    return eo;
}

Prediction full_ranking_for(const Page& page, const RunOptions& options,
                            const LoadedInputs& inputs, const FrameAssignment& assignment) {
    const PredictorKind kind = predictor_from(options.predictor);
    switch (kind) {
        case PredictorKind::ShortestDistance: return predict_shortest_distance(page);
        case PredictorKind::FrameDistance: return predict_frame_distance(page, assignment);
        default: break;
    }
    ScoreMatrix m;
    if (kind == PredictorKind::External || kind == PredictorKind::ExternalWeighted) {
        if (!inputs.scores) raise(Error::Code::state, "external predictor requires a scores path");
        m = inputs.scores->for_page(page);
    } else {
        m = heuristic_scores(page);
    }
    if (kind == PredictorKind::HeuristicWeighted || kind == PredictorKind::ExternalWeighted)
        m = apply_frame_weight(m, assignment, options.weight_constant);
    std::map<std::string, int> want_all;
    for (const auto& t : page.texts)
        want_all[t.id] = std::max<int>(1, static_cast<int>(page.characters.size()));
    return select_per_text(m, want_all);
}

} // namespace

std::string predictions_jsonl(const Dataset& dataset, const RunOptions& options, int top_n) {
    const LoadedInputs inputs = load_inputs(options);
    std::string out;
    for (const Book& book : dataset.books) {
        if (!dataset.in_split(book.title, options.split)) continue;
        for (const Page& page : book.pages) {
            const FrameOrder order =
                order_frames(page.frames, page.width, page.height, options.direction());
            const FrameAssignment assignment = assign_objects(page, order);
            const Prediction pred = full_ranking_for(page, options, inputs, assignment);
            for (const auto& t : page.texts) {
                auto it = pred.by_text.find(t.id);
                if (it == pred.by_text.end()) continue;
                json candidates = json::array();
                const size_t n = std::min<size_t>(it->second.ranking.size(),
                                                  static_cast<size_t>(std::max(1, top_n)));
                for (size_t i = 0; i < n; ++i)
                    candidates.push_back(json{{"char", it->second.ranking[i].character_id},
                                              {"score", it->second.ranking[i].score}});
                json rec{{"book", book.title},
                         {"page", page.index},
                         {"text_id", t.id},
                         {"ranking", candidates}};
                out += rec.dump();
                out += '\n';
            }
        }
    }
    return out;
}

EvalReport run_eval(Dataset& dataset, const RunOptions& options) {
    prepare_dataset(dataset, options);
    const LoadedInputs inputs = load_inputs(options);
    return evaluate(dataset, to_eval_options(options, inputs));
}

std::string render_svg_for(const Dataset& dataset, const RunOptions& options,
                           const std::string& book_title, int page_index) {
    const Book* book = dataset.book(book_title);
    if (!book) raise(Error::Code::range, "unknown book '" + book_title + "'");
    const Page* page = nullptr;
    for (const Page& p : book->pages)
        if (p.index == page_index) page = &p;
    if (!page)
        raise(Error::Code::range, "page " + std::to_string(page_index) + " out of range in '" +
                                      book_title + "'");
    const LoadedInputs inputs = load_inputs(options);
    const FrameOrder order =
        order_frames(page->frames, page->width, page->height, options.direction());
    const FrameAssignment assignment = assign_objects(*page, order);
    const Prediction pred = full_ranking_for(*page, options, inputs, assignment);
    return render_page_svg(*page, order, pred);
}

} // namespace mspk
