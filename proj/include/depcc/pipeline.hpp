#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace depcc {

// Every default here is visible in dump_config; the config file uses
// "key = value" lines ('#' comments, "input" repeatable).
struct PipelineConfig {
    std::vector<std::string> inputs;  // WARC files, or prior-stage artifacts
    std::string out_dir = "out";
    std::string stages = "extract,dedup,annotate,collapse";
    std::string lang = "en";  // empty keeps every language

    std::string profiles_dir;  // empty means the bundled profiles
    double langid_threshold = 0.45;  // calibrated on held-out paragraphs
    double max_link_density = 0.33;
    std::uint64_t min_block_words = 5;

    std::uint64_t hamming_threshold = 3;

    std::string annotator = "naive";  // naive | external | passthrough
    std::string annotator_command;    // argv, whitespace-separated
    std::uint64_t annotator_timeout_ms = 60000;
    std::uint64_t max_sentence_tokens = 50;

    bool collapse_prep = true;
    bool collapse_conj = true;

    std::uint64_t work_unit_bytes = 100ull << 20;
    std::uint64_t shard_bytes = 150ull << 20;
    std::uint64_t workers = 1;  // env DEPCC_WORKERS overrides
    double max_failed_fraction = 0.01;

    std::uint64_t wpf = 1000;
    std::uint64_t fpw = 1000;
    std::string prune_order = "column_then_row";
};

PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::string& path);
void apply_config_override(PipelineConfig& config, std::string_view key,
                           std::string_view value);
std::string dump_config(const PipelineConfig& config);

struct RunReport {
    // Deterministic counters, keyed stage.metric; worker count never
    // changes them. Written to report.tsv.
    std::map<std::string, std::uint64_t> counts;
    // Wall-clock per unit and min/median/max per stage; timings.tsv only.
    std::vector<std::string> timing_lines;
    std::vector<std::string> diagnostics;
    std::uint64_t failed_units = 0;
    std::uint64_t total_units = 0;
    bool failed = false;  // failure fraction exceeded the configured bound

    std::string report_tsv() const;
    std::string timings_tsv() const;
};

RunReport run_pipeline(const PipelineConfig& config);

struct CorpusStats {
    std::uint64_t documents = 0;
    std::uint64_t sentences = 0;
    std::uint64_t tokens = 0;
    std::uint64_t distinct_lemmas = 0;
    std::map<std::string, std::uint64_t> entity_spans;  // type -> B- count

    std::string tsv() const;
};

CorpusStats corpus_stats(const std::vector<std::string>& shard_paths);

}  // namespace depcc
