#include "mangaspeak/mangaspeak.h"

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mangaspeak/dataset.hpp"
#include "mangaspeak/errors.hpp"
#include "mangaspeak/pipeline.hpp"

using nlohmann::json;

struct mspk_dataset {
    mspk::Dataset ds;
    bool difficulty_ready = false;
};

namespace {

thread_local std::string g_last_error;

mspk_status status_of(const mspk::Error& e) {
    switch (e.code()) {
        case mspk::Error::Code::io: return MSPK_ERR_IO;
        case mspk::Error::Code::parse: return MSPK_ERR_PARSE;
        case mspk::Error::Code::invalid: return MSPK_ERR_INVALID;
        case mspk::Error::Code::range: return MSPK_ERR_RANGE;
        case mspk::Error::Code::state: return MSPK_ERR_STATE;
    }
    return MSPK_ERR_UNKNOWN;
}

template <typename Fn>
mspk_status guarded(Fn&& fn) {
    g_last_error.clear();
    try {
        fn();
        return MSPK_OK;
    } catch (const mspk::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MSPK_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown failure";
        return MSPK_ERR_UNKNOWN;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void require(bool ok, const char* what) {
    if (!ok) mspk::raise(mspk::Error::Code::range, what);
}

void ensure_prepared(mspk_dataset* d, const mspk::RunOptions& options) {
    mspk::prepare_dataset(d->ds, options);
    d->difficulty_ready = true;
}

} // namespace

extern "C" {

const char* mspk_version(void) { return "0.1.0"; }

const char* mspk_status_name(mspk_status status) {
    switch (status) {
        case MSPK_OK: return "ok";
        case MSPK_ERR_IO: return "io";
        case MSPK_ERR_PARSE: return "parse";
        case MSPK_ERR_INVALID: return "invalid";
        case MSPK_ERR_RANGE: return "range";
        case MSPK_ERR_STATE: return "state";
        default: return "unknown";
    }
}

const char* mspk_last_error(void) { return g_last_error.c_str(); }

void mspk_string_free(char* s) { delete[] s; }

mspk_status mspk_dataset_open(const char* path, mspk_dataset** out) {
    return guarded([&] {
        require(path && out, "path and out must be non-null");
        auto d = std::make_unique<mspk_dataset>();
        d->ds = mspk::load_dataset(path);
        *out = d.release();
    });
}

void mspk_dataset_close(mspk_dataset* dataset) { delete dataset; }

mspk_status mspk_dataset_load_pairs(mspk_dataset* dataset, const char* jsonl_path) {
    return guarded([&] {
        require(dataset && jsonl_path, "dataset and path must be non-null");
        mspk::load_pairs(jsonl_path, dataset->ds);
        mspk::assign_all_difficulty(dataset->ds);
        dataset->difficulty_ready = true;
    });
}

mspk_status mspk_dataset_resolve_name_pairs(mspk_dataset* dataset, const char* jsonl_path,
                                            int64_t* skipped) {
    return guarded([&] {
        require(dataset && jsonl_path, "dataset and path must be non-null");
        std::ifstream f(jsonl_path);
        if (!f) mspk::raise(mspk::Error::Code::io, std::string("cannot open ") + jsonl_path);
        // Group name-level records per page, then resolve page by page.
        std::map<std::pair<std::string, int>, std::vector<mspk::NamePair>> grouped;
        std::string line;
        size_t line_no = 0;
        while (std::getline(f, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded() || !rec.is_object())
                mspk::raise(mspk::Error::Code::parse, std::string(jsonl_path) + ":" +
                                                          std::to_string(line_no) +
                                                          ": not a JSON object record");
            for (const char* key : {"book", "page", "text_id", "character_name"})
                if (!rec.contains(key))
                    mspk::raise(mspk::Error::Code::parse,
                                std::string(jsonl_path) + ":" + std::to_string(line_no) +
                                    ": missing field '" + key + "'");
            grouped[{rec["book"].get<std::string>(), rec["page"].get<int>()}].push_back(
                mspk::NamePair{rec["text_id"].get<std::string>(),
                               rec["character_name"].get<std::string>()});
        }
        int64_t total_skipped = 0;
        for (auto& book : dataset->ds.books) {
            for (auto& page : book.pages) {
                auto it = grouped.find({book.title, page.index});
                if (it == grouped.end()) continue;
                const mspk::FrameOrder order =
                    mspk::order_frames(page.frames, page.width, page.height);
                const mspk::FrameAssignment assignment = mspk::assign_objects(page, order);
                std::vector<std::string> skipped_records;
                auto resolved =
                    mspk::resolve_speaker_boxes(page, it->second, assignment, &skipped_records);
                total_skipped += static_cast<int64_t>(skipped_records.size());
                for (auto& pair : resolved)
                    if (!page.pair_for_text(pair.text_id)) page.pairs.push_back(std::move(pair));
                grouped.erase(it);
            }
        }
        for (const auto& [key, records] : grouped)
            total_skipped += static_cast<int64_t>(records.size());
        mspk::assign_all_difficulty(dataset->ds);
        dataset->difficulty_ready = true;
        if (skipped) *skipped = total_skipped;
    });
}

mspk_status mspk_dataset_info(mspk_dataset* dataset, char** json_out) {
    return guarded([&] {
        require(dataset && json_out, "dataset and out must be non-null");
        *json_out = dup_string(mspk::ingest_report_json(dataset->ds));
    });
}

mspk_status mspk_dataset_stats(mspk_dataset* dataset, char** json_out) {
    return guarded([&] {
        require(dataset && json_out, "dataset and out must be non-null");
        if (!dataset->difficulty_ready) {
            mspk::assign_all_difficulty(dataset->ds);
            dataset->difficulty_ready = true;
        }
        *json_out = dup_string(mspk::stats_to_json(mspk::dataset_stats(dataset->ds)));
    });
}

mspk_status mspk_stats_table(const char* stats_json, char** text_out) {
    return guarded([&] {
        require(stats_json && text_out, "stats_json and out must be non-null");
        json j = json::parse(stats_json, nullptr, false);
        if (j.is_discarded()) mspk::raise(mspk::Error::Code::parse, "stats_json is not JSON");
        mspk::StatsReport s;
        s.annotated_images = j.value("annotated_images", 0LL);
        s.texts = j.value("texts", 0LL);
        s.easy = j.at("pairs").value("easy", 0LL);
        s.hard = j.at("pairs").value("hard", 0LL);
        s.total = j.at("pairs").value("total", 0LL);
        s.pairs_per_page = j.value("pairs_per_page", 0.0);
        *text_out = dup_string(mspk::stats_table(s));
    });
}

mspk_status mspk_order_frames(mspk_dataset* dataset, const char* options_json,
                              char** jsonl_out) {
    return guarded([&] {
        require(dataset && jsonl_out, "dataset and out must be non-null");
        const mspk::RunOptions options =
            mspk::parse_run_options(options_json ? options_json : "");
        if (options.split != "all") ensure_prepared(dataset, options);
        *jsonl_out = dup_string(mspk::order_report_jsonl(dataset->ds, options));
    });
}

mspk_status mspk_predict(mspk_dataset* dataset, const char* options_json, int32_t top_n,
                         char** jsonl_out) {
    return guarded([&] {
        require(dataset && jsonl_out, "dataset and out must be non-null");
        const mspk::RunOptions options =
            mspk::parse_run_options(options_json ? options_json : "");
        if (options.split != "all") ensure_prepared(dataset, options);
        *jsonl_out = dup_string(mspk::predictions_jsonl(dataset->ds, options, top_n));
    });
}

mspk_status mspk_evaluate(mspk_dataset* dataset, const char* options_json, char** json_out) {
    return guarded([&] {
        require(dataset && json_out, "dataset and out must be non-null");
        const mspk::RunOptions options =
            mspk::parse_run_options(options_json ? options_json : "");
        mspk::EvalReport report = mspk::run_eval(dataset->ds, options);
        dataset->difficulty_ready = true;
        *json_out = dup_string(mspk::report_to_json(report));
    });
}

mspk_status mspk_report_table(const char* report_json, char** text_out) {
    return guarded([&] {
        require(report_json && text_out, "report_json and out must be non-null");
        json j = json::parse(report_json, nullptr, false);
        if (j.is_discarded()) mspk::raise(mspk::Error::Code::parse, "report_json is not JSON");
        mspk::EvalReport r;
        r.predictor = j.value("predictor", "?");
        r.mode = j.value("mode", "?");
        auto cell = [&](const char* key, mspk::RecallCell& c) {
            if (!j.contains(key)) return;
            c.correct = j[key].value("correct", 0LL);
            c.gt_pairs = j[key].value("gt_pairs", 0LL);
        };
        cell("easy", r.easy);
        cell("hard", r.hard);
        cell("total", r.total);
        r.pages_evaluated = j.value("pages_evaluated", 0LL);
        *text_out = dup_string(mspk::report_table(r));
    });
}

mspk_status mspk_render_svg(mspk_dataset* dataset, const char* options_json, const char* book,
                            int32_t page_index, char** svg_out) {
    return guarded([&] {
        require(dataset && book && svg_out, "dataset, book and out must be non-null");
        const mspk::RunOptions options =
            mspk::parse_run_options(options_json ? options_json : "");
        *svg_out = dup_string(mspk::render_svg_for(dataset->ds, options, book, page_index));
    });
}

mspk_status mspk_page_list(mspk_dataset* dataset, char** jsonl_out) {
    return guarded([&] {
        require(dataset && jsonl_out, "dataset and out must be non-null");
        std::string out;
        for (const auto& book : dataset->ds.books)
            for (const auto& page : book.pages) {
                json rec{{"book", book.title}, {"page", page.index}};
                out += rec.dump();
                out += '\n';
            }
        *jsonl_out = dup_string(out);
    });
}

mspk_status mspk_synth(const char* config_json, mspk_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "out must be non-null");
        auto d = std::make_unique<mspk_dataset>();
        d->ds = mspk::gen_corpus(mspk::parse_synth_config(config_json ? config_json : ""));
        d->difficulty_ready = true; // generator labels difficulty by construction
        *out = d.release();
    });
}

mspk_status mspk_dataset_write(mspk_dataset* dataset, const char* out_dir) {
    return guarded([&] {
        require(dataset && out_dir, "dataset and out_dir must be non-null");
        mspk::write_dataset(dataset->ds, out_dir);
    });
}

} // extern "C"
