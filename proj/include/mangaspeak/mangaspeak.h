/* C interface to the mangaspeak shared library.
 *
 * All objects are opaque handles; every function that can fail returns an
 * mspk_status and leaves a message retrievable through mspk_last_error()
 * (thread-local, valid until the next mangaspeak call on that thread).
 * Strings returned through char** are heap-allocated; release them with
 * mspk_string_free().
 */
#ifndef MANGASPEAK_H
#define MANGASPEAK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mspk_dataset mspk_dataset;

typedef enum mspk_status {
    MSPK_OK = 0,
    MSPK_ERR_IO = 1,      /* file missing / unreadable / unwritable */
    MSPK_ERR_PARSE = 2,   /* malformed XML or JSON */
    MSPK_ERR_INVALID = 3, /* bad value, broken reference, violated invariant */
    MSPK_ERR_RANGE = 4,   /* argument outside the supported domain */
    MSPK_ERR_STATE = 5,   /* operation called before its prerequisites */
    MSPK_ERR_UNKNOWN = 6
} mspk_status;

const char* mspk_version(void);
const char* mspk_status_name(mspk_status status);
const char* mspk_last_error(void);
void mspk_string_free(char* s);

/* Dataset lifecycle. `path` may be a single annotation .xml file, a directory
 * of them, or a root with an annotations/ (or books/) subdirectory. */
mspk_status mspk_dataset_open(const char* path, mspk_dataset** out);
void mspk_dataset_close(mspk_dataset* dataset);

/* Attach canonical pair annotations (JSON Lines:
 * {"book", "page", "text_id", "speaker_ids": [...]}) and label difficulty. */
mspk_status mspk_dataset_load_pairs(mspk_dataset* dataset, const char* jsonl_path);

/* Name-level records ({"book", "page", "text_id", "character_name"}) resolved
 * to boxes: same-frame box preferred, else nearest. Returns the number of
 * unresolvable records through *skipped (may be NULL). */
mspk_status mspk_dataset_resolve_name_pairs(mspk_dataset* dataset, const char* jsonl_path,
                                            int64_t* skipped);

/* Reports. options_json keys (all optional):
 *   predictor: "shortest"|"frame"|"heuristic"|"heuristic+weight"|
 *              "external"|"external+weight"
 *   mode: "predcls"|"sgcls"|"sgdet"   difficulty: "all"|"easy"|"hard"
 *   split: "all"|"train"|"test"       seed, train_fraction, rtl,
 *   weight_constant, iou_threshold, scores, detections */
mspk_status mspk_dataset_info(mspk_dataset* dataset, char** json_out);
mspk_status mspk_dataset_stats(mspk_dataset* dataset, char** json_out);
mspk_status mspk_stats_table(const char* stats_json, char** text_out);

mspk_status mspk_order_frames(mspk_dataset* dataset, const char* options_json,
                              char** jsonl_out);
mspk_status mspk_predict(mspk_dataset* dataset, const char* options_json, int32_t top_n,
                         char** jsonl_out);
mspk_status mspk_evaluate(mspk_dataset* dataset, const char* options_json, char** json_out);
mspk_status mspk_report_table(const char* report_json, char** text_out);
mspk_status mspk_render_svg(mspk_dataset* dataset, const char* options_json, const char* book,
                            int32_t page_index, char** svg_out);

/* List of {"book", "page"} JSON records, one line per page (for iterating). */
mspk_status mspk_page_list(mspk_dataset* dataset, char** jsonl_out);

/* Synthetic corpus. config_json keys: seed, books, pages_per_book, rows,
 * cols, chars_per_frame, texts_per_frame (all [lo,hi]), scenario
 * ("easy"|"hard"|"mixed"), mixed_ratio, page_width, page_height. */
mspk_status mspk_synth(const char* config_json, mspk_dataset** out);

/* Write books/<title>.xml plus pairs.jsonl under out_dir. */
mspk_status mspk_dataset_write(mspk_dataset* dataset, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MANGASPEAK_H */
