#include "depcc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "depcc/annotate.hpp"
#include "depcc/collapse.hpp"
#include "depcc/common.hpp"
#include "depcc/dedup.hpp"
#include "depcc/dt_model.hpp"
#include "depcc/langid.hpp"
#include "depcc/search_index.hpp"
#include "depcc/text_extract.hpp"
#include "depcc/warc.hpp"

namespace depcc {

namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected a boolean, got '" + std::string(v) + "'");
}

std::uint64_t parse_u64(std::string_view v) {
    return std::stoull(std::string(v));
}

// One work item processed by the pool; failures quarantine the item.
struct ItemOutcome {
    bool ok = true;
    std::string error;
    long long millis = 0;
};

// Ordered parallel map: results land by index, so worker count can never
// reorder anything downstream.
std::vector<ItemOutcome> run_items(std::size_t n, std::size_t workers,
                                   const std::function<void(std::size_t)>& fn) {
    std::vector<ItemOutcome> outcomes(n);
    if (n == 0) return outcomes;
    workers = std::max<std::size_t>(1, std::min(workers, n));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            auto start = std::chrono::steady_clock::now();
            try {
                fn(i);
            } catch (const std::exception& e) {
                outcomes[i].ok = false;
                outcomes[i].error = e.what();
            }
            outcomes[i].millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now() - start)
                                     .count();
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    return outcomes;
}

void record_timings(RunReport& report, const std::string& stage,
                    const std::vector<ItemOutcome>& outcomes) {
    std::vector<long long> times;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        report.timing_lines.push_back(stage + "\tunit:" + std::to_string(i) + "\t" +
                                      std::to_string(outcomes[i].millis));
        times.push_back(outcomes[i].millis);
    }
    if (times.empty()) return;
    std::sort(times.begin(), times.end());
    report.timing_lines.push_back(stage + "\tmin\t" + std::to_string(times.front()));
    report.timing_lines.push_back(stage + "\tmedian\t" +
                                  std::to_string(times[times.size() / 2]));
    report.timing_lines.push_back(stage + "\tmax\t" + std::to_string(times.back()));
}

void tally_failures(RunReport& report, const std::string& stage,
                    const std::vector<ItemOutcome>& outcomes) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        ++report.total_units;
        if (!outcomes[i].ok) {
            ++report.failed_units;
            report.diagnostics.push_back(stage + " unit " + std::to_string(i) +
                                         " failed: " + outcomes[i].error);
        }
    }
}

// Consecutive input files grouped up to the unit byte budget.
std::vector<std::vector<std::string>> make_work_units(const std::vector<std::string>& files,
                                                      std::uint64_t unit_bytes) {
    std::vector<std::vector<std::string>> units;
    std::vector<std::string> current;
    std::uint64_t current_bytes = 0;
    for (const std::string& file : files) {
        std::uint64_t size = 0;
        std::error_code ec;
        size = fs::file_size(file, ec);
        if (ec) size = 0;
        if (!current.empty() && current_bytes + size > unit_bytes) {
            units.push_back(std::move(current));
            current.clear();
            current_bytes = 0;
        }
        current.push_back(file);
        current_bytes += size;
    }
    if (!current.empty()) units.push_back(std::move(current));
    return units;
}

std::vector<std::string> split_stages(std::string_view stages) {
    std::vector<std::string> out;
    for (std::string_view s : split(stages, ',')) {
        std::string_view t = trim(s);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::unique_ptr<Annotator> make_annotator(const PipelineConfig& config) {
    if (config.annotator == "naive") return std::make_unique<NaiveAnnotator>();
    if (config.annotator == "passthrough") return std::make_unique<PassthroughAnnotator>();
    if (config.annotator == "external") {
        ExternalAnnotatorConfig ext;
        for (std::string_view arg : split_ws(config.annotator_command)) {
            ext.command.emplace_back(arg);
        }
        ext.timeout = std::chrono::milliseconds(config.annotator_timeout_ms);
        return std::make_unique<ExternalAnnotator>(std::move(ext));
    }
    throw std::invalid_argument("unknown annotator '" + config.annotator + "'");
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
    PipelineConfig config;
    std::size_t lineno = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " lacks '='");
        }
        apply_config_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

PipelineConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

void apply_config_override(PipelineConfig& config, std::string_view key,
                           std::string_view value) {
    const std::string v(value);
    if (key == "input") config.inputs.push_back(v);
    else if (key == "out_dir") config.out_dir = v;
    else if (key == "stages") config.stages = v;
    else if (key == "lang") config.lang = v;
    else if (key == "profiles_dir") config.profiles_dir = v;
    else if (key == "langid_threshold") config.langid_threshold = std::stod(v);
    else if (key == "max_link_density") config.max_link_density = std::stod(v);
    else if (key == "min_block_words") config.min_block_words = parse_u64(v);
    else if (key == "hamming_threshold") config.hamming_threshold = parse_u64(v);
    else if (key == "annotator") config.annotator = v;
    else if (key == "annotator_command") config.annotator_command = v;
    else if (key == "annotator_timeout_ms") config.annotator_timeout_ms = parse_u64(v);
    else if (key == "max_sentence_tokens") config.max_sentence_tokens = parse_u64(v);
    else if (key == "collapse_prep") config.collapse_prep = parse_bool(v);
    else if (key == "collapse_conj") config.collapse_conj = parse_bool(v);
    else if (key == "work_unit_bytes") config.work_unit_bytes = parse_u64(v);
    else if (key == "shard_bytes") config.shard_bytes = parse_u64(v);
    else if (key == "workers") config.workers = parse_u64(v);
    else if (key == "max_failed_fraction") config.max_failed_fraction = std::stod(v);
    else if (key == "wpf") config.wpf = parse_u64(v);
    else if (key == "fpw") config.fpw = parse_u64(v);
    else if (key == "prune_order") config.prune_order = v;
    else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

std::string dump_config(const PipelineConfig& c) {
    std::string out;
    for (const std::string& input : c.inputs) out += "input = " + input + "\n";
    out += "out_dir = " + c.out_dir + "\n";
    out += "stages = " + c.stages + "\n";
    out += "lang = " + c.lang + "\n";
    out += "profiles_dir = " + c.profiles_dir + "\n";
    out += "langid_threshold = " + format_double(c.langid_threshold) + "\n";
    out += "max_link_density = " + format_double(c.max_link_density) + "\n";
    out += "min_block_words = " + std::to_string(c.min_block_words) + "\n";
    out += "hamming_threshold = " + std::to_string(c.hamming_threshold) + "\n";
    out += "annotator = " + c.annotator + "\n";
    out += "annotator_command = " + c.annotator_command + "\n";
    out += "annotator_timeout_ms = " + std::to_string(c.annotator_timeout_ms) + "\n";
    out += "max_sentence_tokens = " + std::to_string(c.max_sentence_tokens) + "\n";
    out += "collapse_prep = " + std::string(c.collapse_prep ? "true" : "false") + "\n";
    out += "collapse_conj = " + std::string(c.collapse_conj ? "true" : "false") + "\n";
    out += "work_unit_bytes = " + std::to_string(c.work_unit_bytes) + "\n";
    out += "shard_bytes = " + std::to_string(c.shard_bytes) + "\n";
    out += "workers = " + std::to_string(c.workers) + "\n";
    out += "max_failed_fraction = " + format_double(c.max_failed_fraction) + "\n";
    out += "wpf = " + std::to_string(c.wpf) + "\n";
    out += "fpw = " + std::to_string(c.fpw) + "\n";
    out += "prune_order = " + c.prune_order + "\n";
    return out;
}

std::string RunReport::report_tsv() const {
    std::string out;
    for (const auto& [key, value] : counts) {
        out += key;
        out.push_back('\t');
        out += std::to_string(value);
        out.push_back('\n');
    }
    return out;
}

std::string RunReport::timings_tsv() const {
    std::string out;
    for (const std::string& line : timing_lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

RunReport run_pipeline(const PipelineConfig& base_config) {
    PipelineConfig config = base_config;
    if (const char* env = std::getenv("DEPCC_WORKERS")) {
        config.workers = std::stoull(env);
    }
    if (config.workers < 1) config.workers = 1;

    RunReport report;
    const std::vector<std::string> stages = split_stages(config.stages);
    auto stage_enabled = [&stages](std::string_view name) {
        return std::find(stages.begin(), stages.end(), name) != stages.end();
    };
    for (const std::string& stage : stages) {
        static const std::set<std::string> known = {"extract", "dedup",   "annotate",
                                                    "collapse", "model", "index"};
        if (!known.count(stage)) {
            throw std::invalid_argument("unknown pipeline stage '" + stage + "'");
        }
    }

    fs::create_directories(config.out_dir);
    const std::string profiles =
        config.profiles_dir.empty() ? default_profile_dir() : config.profiles_dir;

    std::vector<Document> docs;
    bool have_docs = false;

    if (stage_enabled("extract")) {
        LanguageIdentifier identifier = LanguageIdentifier::from_directory(profiles);
        identifier.set_threshold(config.langid_threshold);
        BoilerplateConfig boiler;
        boiler.max_link_density = config.max_link_density;
        boiler.min_words = config.min_block_words;

        const auto units = make_work_units(config.inputs, config.work_unit_bytes);
        std::vector<std::vector<Document>> unit_docs(units.size());
        std::atomic<std::uint64_t> responses{0};
        std::atomic<std::uint64_t> dropped_language{0};
        std::atomic<std::uint64_t> dropped_empty{0};

        auto outcomes = run_items(units.size(), config.workers, [&](std::size_t u) {
            std::vector<Document>& out = unit_docs[u];
            for (const std::string& path : units[u]) {
                std::ifstream in(path, std::ios::binary);
                if (!in) throw IoFailure("cannot open " + path);
                std::vector<WarcRecord> records = read_warc(in, path);
                for (const WarcRecord& record : filter_responses(records)) {
                    ++responses;
                    Document doc;
                    doc.url = record.target_uri;
                    doc.source = record.source_archive;
                    doc.fetch_date = record.date;
                    std::string_view body = http_body(record.payload);
                    std::optional<std::string> charset;
                    if (auto ct = http_content_type(record.payload)) {
                        charset = charset_param(*ct);
                    } else if (auto param = charset_param(record.content_type)) {
                        charset = param;
                    }
                    doc.text = remove_boilerplate(extract_blocks(body, charset), boiler);
                    if (doc.text.empty()) {
                        ++dropped_empty;
                        continue;
                    }
                    doc.language = identifier.detect(doc.text).language;
                    if (!config.lang.empty() && doc.language != config.lang) {
                        ++dropped_language;
                        continue;
                    }
                    out.push_back(std::move(doc));
                }
            }
        });
        record_timings(report, "extract", outcomes);
        tally_failures(report, "extract", outcomes);
        for (std::size_t u = 0; u < units.size(); ++u) {
            if (!outcomes[u].ok) continue;
            for (Document& doc : unit_docs[u]) docs.push_back(std::move(doc));
        }
        have_docs = true;

        report.counts["extract.input_files"] = config.inputs.size();
        report.counts["extract.work_units"] = units.size();
        report.counts["extract.html_responses"] = responses.load();
        report.counts["extract.dropped_empty"] = dropped_empty.load();
        report.counts["extract.dropped_language"] = dropped_language.load();
        report.counts["extract.documents"] = docs.size();
        save_documents(docs, config.out_dir + "/documents.tsv");
    }

    if (stage_enabled("dedup")) {
        if (!have_docs) {
            docs = load_documents(config.out_dir + "/documents.tsv");
            have_docs = true;
        }
        auto start = std::chrono::steady_clock::now();
        DedupResult result = dedup_stream(std::move(docs),
                                          static_cast<int>(config.hamming_threshold));
        report.timing_lines.push_back(
            "dedup\tglobal\t" +
            std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count()));
        docs = std::move(result.kept);

        std::uint64_t exact = 0;
        std::uint64_t near = 0;
        for (const DropRecord& d : result.dropped) {
            if (d.reason == "exact") ++exact;
            else ++near;
        }
        report.counts["dedup.kept"] = docs.size();
        report.counts["dedup.dropped_exact"] = exact;
        report.counts["dedup.dropped_near"] = near;

        fs::create_directories(config.out_dir + "/dedup");
        save_documents(docs, config.out_dir + "/dedup/documents.tsv");
        save_drop_log(result.dropped, config.out_dir + "/dedup/drop_log.tsv");
        std::vector<Fingerprint> fps;
        fps.reserve(docs.size());
        for (const Document& doc : docs) fps.push_back(fingerprint(doc));
        save_fingerprints(fps, config.out_dir + "/dedup/fingerprints.tsv");
    }

    std::vector<ConllDocument> annotated;
    bool have_annotated = false;

    if (stage_enabled("annotate")) {
        if (!have_docs) {
            docs = load_documents(config.out_dir + "/dedup/documents.tsv");
            have_docs = true;
        }
        if (config.annotator != "naive" && config.annotator != "external" &&
            config.annotator != "passthrough") {
            throw std::invalid_argument("unknown annotator '" + config.annotator + "'");
        }
        AnnotateConfig annotate_config;
        annotate_config.max_sentence_tokens = config.max_sentence_tokens;

        std::vector<ConllDocument> results(docs.size());
        std::vector<std::unique_ptr<Annotator>> annotators(
            std::max<std::size_t>(1, config.workers));
        std::atomic<std::size_t> annotator_slot{0};
        thread_local Annotator* local_annotator;
        auto outcomes = run_items(docs.size(), config.workers, [&](std::size_t i) {
            if (local_annotator == nullptr) {
                std::size_t slot = annotator_slot.fetch_add(1);
                annotators.at(slot) = make_annotator(config);
                local_annotator = annotators[slot].get();
            }
            results[i] = annotate_document(docs[i], *local_annotator, annotate_config);
        });
        local_annotator = nullptr;
        record_timings(report, "annotate", outcomes);
        tally_failures(report, "annotate", outcomes);

        std::uint64_t sentences = 0;
        std::uint64_t tokens = 0;
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (!outcomes[i].ok) continue;
            for (const Sentence& s : results[i].sentences) {
                ++sentences;
                tokens += s.tokens.size();
            }
            annotated.push_back(std::move(results[i]));
        }
        have_annotated = true;
        report.counts["annotate.documents"] = annotated.size();
        report.counts["annotate.sentences"] = sentences;
        report.counts["annotate.tokens"] = tokens;

        fs::create_directories(config.out_dir + "/annotated");
        conll::write_shards(annotated, config.out_dir + "/annotated", config.shard_bytes);
    }

    if (stage_enabled("collapse")) {
        if (!have_annotated) {
            for (const std::string& shard :
                 conll::resolve_shards({config.out_dir + "/annotated"})) {
                for (ConllDocument& doc : conll::read_shard(shard)) {
                    annotated.push_back(std::move(doc));
                }
            }
            have_annotated = true;
        }
        CollapseRules rules;
        rules.prep = config.collapse_prep;
        rules.conj = config.collapse_conj;
        std::vector<ConllDocument> collapsed(annotated.size());
        auto outcomes = run_items(annotated.size(), config.workers, [&](std::size_t i) {
            collapsed[i] = collapse_document(annotated[i], rules);
        });
        record_timings(report, "collapse", outcomes);
        tally_failures(report, "collapse", outcomes);

        std::vector<ConllDocument> kept;
        for (std::size_t i = 0; i < collapsed.size(); ++i) {
            if (outcomes[i].ok) kept.push_back(std::move(collapsed[i]));
        }
        annotated = std::move(kept);

        std::uint64_t sentences = 0;
        for (const ConllDocument& doc : annotated) sentences += doc.sentences.size();
        report.counts["collapse.documents"] = annotated.size();
        report.counts["collapse.sentences"] = sentences;

        fs::create_directories(config.out_dir + "/collapsed");
        conll::write_shards(annotated, config.out_dir + "/collapsed", config.shard_bytes);
    }

    if (stage_enabled("model")) {
        std::vector<ConllDocument> corpus;
        if (have_annotated) {
            corpus = std::move(annotated);
        } else {
            for (const std::string& shard :
                 conll::resolve_shards({config.out_dir + "/collapsed"})) {
                for (ConllDocument& doc : conll::read_shard(shard)) {
                    corpus.push_back(std::move(doc));
                }
            }
        }
        auto start = std::chrono::steady_clock::now();
        std::vector<TermFeatureMatrix> partials(corpus.size());
        auto outcomes = run_items(corpus.size(), config.workers, [&](std::size_t i) {
            partials[i] = count(extract_features(corpus[i]));
        });
        TermFeatureMatrix counts;
        for (std::size_t i = 0; i < partials.size(); ++i) {
            if (outcomes[i].ok) counts.merge(partials[i]);
        }
        tally_failures(report, "model", outcomes);

        PruningConfig prune_config{static_cast<std::size_t>(config.wpf),
                                   static_cast<std::size_t>(config.fpw)};
        PruneOrder order = config.prune_order == "row_then_column"
                               ? PruneOrder::row_then_column
                               : PruneOrder::column_then_row;
        TermFeatureMatrix model =
            unit_normalize(prune(weight_lmi(std::move(counts)), prune_config, order));
        report.timing_lines.push_back(
            "model\tglobal\t" +
            std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count()));

        report.counts["model.words"] = model.word_count();
        report.counts["model.features"] = model.feature_count();
        report.counts["model.nonzeros"] = model.nonzero_count();
        fs::create_directories(config.out_dir + "/model");
        save_matrix(model, config.out_dir + "/model/model.tsv");
    }

    if (stage_enabled("index")) {
        auto start = std::chrono::steady_clock::now();
        fs::create_directories(config.out_dir + "/index");
        IndexBuildResult built = build_index(
            conll::resolve_shards({config.out_dir + "/collapsed"}),
            config.out_dir + "/index");
        report.timing_lines.push_back(
            "index\tglobal\t" +
            std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count()));
        report.counts["index.sentences"] = built.sentence_count;
        report.counts["index.terms"] = built.term_count;
    }

    report.counts["run.total_units"] = report.total_units;
    report.counts["run.failed_units"] = report.failed_units;
    report.failed =
        report.total_units > 0 &&
        static_cast<double>(report.failed_units) >
            config.max_failed_fraction * static_cast<double>(report.total_units);

    write_file(config.out_dir + "/report.tsv", report.report_tsv());
    write_file(config.out_dir + "/timings.tsv", report.timings_tsv());
    return report;
}

std::string CorpusStats::tsv() const {
    std::string out;
    out += "documents\t" + std::to_string(documents) + "\n";
    out += "sentences\t" + std::to_string(sentences) + "\n";
    out += "tokens\t" + std::to_string(tokens) + "\n";
    out += "distinct_lemmas\t" + std::to_string(distinct_lemmas) + "\n";
    std::uint64_t total = 0;
    for (const auto& [type, count] : entity_spans) total += count;
    out += "entity_spans\t" + std::to_string(total) + "\n";
    for (const auto& [type, count] : entity_spans) {
        out += "entity_spans." + type + "\t" + std::to_string(count) + "\n";
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<std::string>& shard_paths) {
    CorpusStats stats;
    std::set<std::string> lemmas;
    for (const std::string& path : shard_paths) {
        for (const ConllDocument& doc : conll::read_shard(path)) {
            ++stats.documents;
            for (const Sentence& sentence : doc.sentences) {
                ++stats.sentences;
                stats.tokens += sentence.tokens.size();
                for (const Token& t : sentence.tokens) {
                    if (t.lemma != "_") lemmas.insert(t.lemma);
                    if (t.ner.size() > 2 && t.ner[0] == 'B' && t.ner[1] == '-') {
                        ++stats.entity_spans[t.ner.substr(2)];
                    }
                }
            }
        }
    }
    stats.distinct_lemmas = lemmas.size();
    return stats;
}

}  // namespace depcc
