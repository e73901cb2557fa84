// mangaspeak CLI: ingest / stats / order / predict / eval / viz / synth over
// Manga109-style annotation datasets. Talks to the library exclusively
// through the C API.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mangaspeak/mangaspeak.h"

using nlohmann::json;

namespace {

struct GlobalFlags {
    std::string dataset;
    std::string pairs;
    std::string name_pairs;
    std::string scores;
    std::string detections;
    std::string predictor;
    std::string mode;
    std::string difficulty;
    std::string split;
    std::optional<uint64_t> seed;
    std::string out;
    std::string config_path;
    bool rtl = false;
    bool ltr = false;
};

[[noreturn]] void die(const std::string& msg, int code = 1) {
    std::cerr << "mangaspeak: " << msg << "\n";
    std::exit(code);
}

void check(mspk_status status) {
    if (status != MSPK_OK)
        die(std::string(mspk_status_name(status)) + ": " + mspk_last_error());
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) die("cannot open config file " + path);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded() || !j.is_object()) die("config file " + path + " is not a JSON object");
    return j;
}

// Flags override the config file; the config file overrides defaults.
json build_options(const GlobalFlags& g) {
    json options = load_config_file(g.config_path);
    if (!g.predictor.empty()) options["predictor"] = g.predictor;
    if (!g.mode.empty()) options["mode"] = g.mode;
    if (!g.difficulty.empty()) options["difficulty"] = g.difficulty;
    if (!g.split.empty()) options["split"] = g.split;
    if (g.seed) options["seed"] = *g.seed;
    if (!g.scores.empty()) options["scores"] = g.scores;
    if (!g.detections.empty()) options["detections"] = g.detections;
    if (g.rtl) options["rtl"] = true;
    if (g.ltr) options["rtl"] = false;
    return options;
}

std::string dataset_root(const GlobalFlags& g, const json& options) {
    if (!g.dataset.empty()) return g.dataset;
    if (options.contains("dataset")) return options["dataset"].get<std::string>();
    if (const char* env = std::getenv("MANGA_DATASET_ROOT"); env && *env) return env;
    die("no dataset given: pass --dataset or set MANGA_DATASET_ROOT", 2);
}

struct DatasetHandle {
    mspk_dataset* ds = nullptr;
    ~DatasetHandle() { mspk_dataset_close(ds); }
};

struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { mspk_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

void open_dataset(const GlobalFlags& g, const json& options, DatasetHandle& handle) {
    check(mspk_dataset_open(dataset_root(g, options).c_str(), &handle.ds));
    if (!g.pairs.empty()) check(mspk_dataset_load_pairs(handle.ds, g.pairs.c_str()));
    if (!g.name_pairs.empty()) {
        int64_t skipped = 0;
        check(mspk_dataset_resolve_name_pairs(handle.ds, g.name_pairs.c_str(), &skipped));
        if (skipped > 0)
            std::cerr << "mangaspeak: " << skipped << " name-level record(s) skipped\n";
    }
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    // Atomic enough for a CLI: write then rename via temp file.
    const std::string tmp = out_path + ".tmp";
    std::ofstream f(tmp, std::ios::binary);
    if (!f) die("cannot write " + tmp);
    f << content;
    f.close();
    if (std::rename(tmp.c_str(), out_path.c_str()) != 0) die("cannot move " + tmp);
}

int cmd_ingest(const GlobalFlags& g) {
    const json options = build_options(g);
    DatasetHandle handle;
    open_dataset(g, options, handle);
    OwnedString info;
    check(mspk_dataset_info(handle.ds, &info.s));
    emit(info.str() + "\n", g.out);
    return 0;
}

int cmd_stats(const GlobalFlags& g) {
    const json options = build_options(g);
    DatasetHandle handle;
    open_dataset(g, options, handle);
    OwnedString stats;
    check(mspk_dataset_stats(handle.ds, &stats.s));
    OwnedString table;
    check(mspk_stats_table(stats.s, &table.s));
    if (!g.out.empty() && g.out != "-") {
        emit(stats.str() + "\n", g.out);
        std::cout << table.str();
    } else {
        std::cout << stats.str() << "\n" << table.str();
    }
    return 0;
}

int cmd_order(const GlobalFlags& g) {
    const json options = build_options(g);
    DatasetHandle handle;
    open_dataset(g, options, handle);
    OwnedString report;
    check(mspk_order_frames(handle.ds, options.dump().c_str(), &report.s));
    emit(report.str(), g.out);
    return 0;
}

int cmd_predict(const GlobalFlags& g, int top_n) {
    const json options = build_options(g);
    DatasetHandle handle;
    open_dataset(g, options, handle);
    OwnedString report;
    check(mspk_predict(handle.ds, options.dump().c_str(), top_n, &report.s));
    emit(report.str(), g.out);
    return 0;
}

int cmd_eval(const GlobalFlags& g) {
    const json options = build_options(g);
    DatasetHandle handle;
    open_dataset(g, options, handle);
    OwnedString report;
    check(mspk_evaluate(handle.ds, options.dump().c_str(), &report.s));
    OwnedString table;
    check(mspk_report_table(report.s, &table.s));
    if (!g.out.empty() && g.out != "-") {
        emit(report.str() + "\n", g.out);
        std::cout << table.str();
    } else {
        std::cout << report.str() << "\n" << table.str();
    }
    return 0;
}

int cmd_viz(const GlobalFlags& g, const std::string& selector) {
    const json options = build_options(g);
    DatasetHandle handle;
    open_dataset(g, options, handle);
    OwnedString pages;
    check(mspk_page_list(handle.ds, &pages.s));

    std::string out_dir = g.out.empty() ? "." : g.out;
    std::istringstream lines(pages.str());
    std::string line;
    int rendered = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const json rec = json::parse(line);
        const std::string book = rec["book"].get<std::string>();
        const int page = rec["page"].get<int>();
        const std::string label = book + "/" + std::to_string(page);
        if (selector != "all" && !selector.empty()) {
            if (selector.find('/') != std::string::npos) {
                if (label != selector) continue;
            } else if (std::to_string(page) != selector) {
                continue;
            }
        }
        OwnedString svg;
        check(mspk_render_svg(handle.ds, options.dump().c_str(), book.c_str(), page, &svg.s));
        const std::string path =
            out_dir + "/" + book + "_p" + std::to_string(page) + ".svg";
        emit(svg.str(), path);
        ++rendered;
    }
    if (rendered == 0) die("page selector '" + selector + "' matched nothing", 2);
    std::cerr << "mangaspeak: wrote " << rendered << " SVG file(s) to " << out_dir << "\n";
    return 0;
}

int cmd_synth(const GlobalFlags& g, const std::string& scenario, int books, int pages) {
    json config = load_config_file(g.config_path);
    if (g.seed) config["seed"] = *g.seed;
    if (!scenario.empty()) config["scenario"] = scenario;
    if (books > 0) config["books"] = books;
    if (pages > 0) config["pages_per_book"] = pages;
    DatasetHandle handle;
    check(mspk_synth(config.dump().c_str(), &handle.ds));
    const std::string out_dir = g.out.empty() ? "synth_out" : g.out;
    check(mspk_dataset_write(handle.ds, out_dir.c_str()));
    OwnedString stats;
    check(mspk_dataset_stats(handle.ds, &stats.s));
    emit(stats.str() + "\n", out_dir + "/gen_report.json");
    std::cerr << "mangaspeak: wrote synthetic corpus to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"speaker attribution toolkit for Manga109-style annotations"};
    app.require_subcommand(1);
    GlobalFlags g;

    auto add_common = [&](CLI::App* cmd, bool needs_dataset) {
        if (needs_dataset) {
            cmd->add_option("--dataset", g.dataset,
                            "dataset root (default: $MANGA_DATASET_ROOT)");
            cmd->add_option("--pairs", g.pairs, "canonical pair annotations (JSON Lines)");
            cmd->add_option("--name-pairs", g.name_pairs,
                            "name-level pair annotations to resolve to boxes");
        }
        cmd->add_option("--scores", g.scores, "external relation scores (JSON Lines)");
        cmd->add_option("--detections", g.detections, "external detections (JSON Lines)");
        cmd->add_option("--predictor", g.predictor,
                        "shortest|frame|heuristic|heuristic+weight|external|external+weight");
        cmd->add_option("--mode", g.mode, "predcls|sgcls|sgdet");
        cmd->add_option("--difficulty", g.difficulty, "all|easy|hard");
        cmd->add_option("--split", g.split, "all|train|test");
        cmd->add_option("--seed", g.seed, "seed for splits and synthesis");
        cmd->add_option("--out", g.out, "output file or directory ('-' = stdout)");
        cmd->add_option("--config", g.config_path, "JSON config file (flags override it)");
        cmd->add_flag("--rtl", g.rtl, "right-to-left reading order (default)");
        cmd->add_flag("--ltr", g.ltr, "left-to-right reading order");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "load annotations and report counts");
    add_common(ingest, true);
    CLI::App* stats = app.add_subcommand("stats", "dataset statistics (JSON + table)");
    add_common(stats, true);
    CLI::App* order = app.add_subcommand("order", "frame reading order per page (JSON Lines)");
    add_common(order, true);
    CLI::App* predict = app.add_subcommand("predict", "speaker predictions (JSON Lines)");
    int top_n = 5;
    predict->add_option("--top", top_n, "candidates per text");
    add_common(predict, true);
    CLI::App* eval = app.add_subcommand("eval", "Recall@(#text) per difficulty");
    add_common(eval, true);
    CLI::App* viz = app.add_subcommand("viz", "SVG overlays with prediction lines");
    std::string selector = "all";
    viz->add_option("selector", selector, "'all', a page index, or BOOK/INDEX");
    add_common(viz, true);
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    std::string scenario;
    int synth_books = 0, synth_pages = 0;
    synth->add_option("--scenario", scenario, "easy|hard|mixed");
    synth->add_option("--books", synth_books, "number of books");
    synth->add_option("--pages-per-book", synth_pages, "pages per book");
    add_common(synth, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(g);
        if (stats->parsed()) return cmd_stats(g);
        if (order->parsed()) return cmd_order(g);
        if (predict->parsed()) return cmd_predict(g, top_n);
        if (eval->parsed()) return cmd_eval(g);
        if (viz->parsed()) return cmd_viz(g, selector);
        if (synth->parsed()) return cmd_synth(g, scenario, synth_books, synth_pages);
    } catch (const std::exception& e) {
        die(e.what());
    }
    return 0;
}
