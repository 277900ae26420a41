#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "depcc/common.hpp"
#include "depcc/conll.hpp"
#include "depcc/dt_model.hpp"
#include "depcc/pipeline.hpp"
#include "depcc/sample_corpus.hpp"
#include "depcc/search_index.hpp"
#include "depcc/sim_eval.hpp"

namespace {

using namespace depcc;

struct StageOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::vector<std::string> inputs;
    std::string out_dir;
    std::string stages;
    std::uint64_t workers = 0;
    bool dump = false;
};

void add_stage_options(CLI::App* cmd, StageOpts& opts, bool with_inputs) {
    cmd->add_option("--config", opts.config_path, "Config file with key = value lines");
    cmd->add_option("--set", opts.sets, "Override one config key")->type_name("KEY=VALUE");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--workers", opts.workers, "Worker thread count");
    cmd->add_flag("--dump-config", opts.dump, "Print the effective config and exit");
    if (with_inputs) cmd->add_option("inputs", opts.inputs, "Input files");
}

PipelineConfig build_config(const StageOpts& opts, const std::string& forced_stages) {
    PipelineConfig config;
    if (!opts.config_path.empty()) config = load_config(opts.config_path);
    for (const std::string& kv : opts.sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
        }
        std::string_view view(kv);
        apply_config_override(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    }
    for (const std::string& input : opts.inputs) config.inputs.push_back(input);
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    if (opts.workers > 0) config.workers = opts.workers;
    if (!opts.stages.empty()) config.stages = opts.stages;
    if (!forced_stages.empty()) config.stages = forced_stages;
    return config;
}

int run_stages(const StageOpts& opts, const std::string& forced_stages) {
    PipelineConfig config = build_config(opts, forced_stages);
    if (opts.dump) {
        std::fputs(dump_config(config).c_str(), stdout);
        return 0;
    }
    RunReport report = run_pipeline(config);
    std::fputs(report.report_tsv().c_str(), stdout);
    for (const std::string& line : report.diagnostics) {
        std::fprintf(stderr, "%s\n", line.c_str());
    }
    return report.failed ? 2 : 0;
}

struct BuildDtOpts {
    std::vector<std::string> shards;
    std::string out;
    std::uint64_t wpf = 1000;
    std::uint64_t fpw = 1000;
    std::string prune_order = "column_then_row";
    std::string stage = "unit";
};

int run_build_dt(const BuildDtOpts& opts) {
    TermFeatureMatrix matrix;
    for (const std::string& shard : conll::resolve_shards(opts.shards)) {
        for (const ConllDocument& doc : conll::read_shard(shard)) {
            for (const auto& [word, feature] : extract_features(doc)) {
                matrix.add(word, feature);
            }
        }
    }
    MatrixStage target = matrix_stage_from_string(opts.stage);
    PruneOrder order = opts.prune_order == "row_then_column"
                           ? PruneOrder::row_then_column
                           : PruneOrder::column_then_row;
    if (opts.prune_order != "row_then_column" && opts.prune_order != "column_then_row") {
        throw std::invalid_argument("unknown prune order '" + opts.prune_order + "'");
    }
    if (target >= MatrixStage::lmi) matrix = weight_lmi(std::move(matrix));
    if (target >= MatrixStage::pruned) {
        PruningConfig bounds{static_cast<std::size_t>(opts.wpf),
                             static_cast<std::size_t>(opts.fpw)};
        matrix = prune(std::move(matrix), bounds, order);
    }
    if (target >= MatrixStage::unit) matrix = unit_normalize(std::move(matrix));
    save_matrix(matrix, opts.out);
    std::printf("words\t%zu\nfeatures\t%zu\nnonzeros\t%zu\n", matrix.word_count(),
                matrix.feature_count(), matrix.nonzero_count());
    return 0;
}

struct EvalOpts {
    std::string model;
    std::vector<std::string> datasets;
    std::string oov = "score_zero";
    bool tsv = false;
};

int run_eval_sim(const EvalOpts& opts) {
    TermFeatureMatrix model = load_matrix(opts.model);
    std::vector<SimilarityDataset> datasets;
    for (const std::string& spec : opts.datasets) {
        std::size_t colon = spec.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("--dataset expects FORMAT:PATH, got '" + spec + "'");
        }
        std::string format = spec.substr(0, colon);
        std::string path = spec.substr(colon + 1);
        if (format == "simverb") {
            datasets.push_back(load_dataset(path, DatasetFormat::simverb));
        } else if (format == "simlex") {
            datasets.push_back(load_dataset(path, DatasetFormat::simlex));
        } else {
            throw std::invalid_argument("unknown dataset format '" + format + "'");
        }
    }
    OovPolicy policy;
    if (opts.oov == "score_zero") policy = OovPolicy::score_zero;
    else if (opts.oov == "exclude") policy = OovPolicy::exclude;
    else throw std::invalid_argument("unknown --oov policy '" + opts.oov + "'");

    EvalReport report = evaluate(model, datasets, policy);
    std::fputs((opts.tsv ? report.tsv() : report.table()).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Web-crawl corpus construction and syntactic distributional models"};
    app.require_subcommand(1);

    StageOpts extract_opts, dedup_opts, annotate_opts, collapse_opts, pipeline_opts;
    add_stage_options(app.add_subcommand("extract", "WARC crawls to clean text documents"),
                      extract_opts, true);
    add_stage_options(app.add_subcommand("dedup", "Drop exact and near duplicates"),
                      dedup_opts, false);
    add_stage_options(app.add_subcommand("annotate", "Tokenize, parse and tag documents"),
                      annotate_opts, false);
    add_stage_options(app.add_subcommand("collapse", "Fill DEPS with collapsed edges"),
                      collapse_opts, false);
    CLI::App* pipeline_cmd =
        app.add_subcommand("pipeline", "Run the configured stage list end to end");
    add_stage_options(pipeline_cmd, pipeline_opts, true);
    pipeline_cmd->add_option("--stages", pipeline_opts.stages,
                             "Comma-separated stage list");

    BuildDtOpts dt_opts;
    CLI::App* dt_cmd =
        app.add_subcommand("build-dt", "Build the LMI-weighted distributional model");
    dt_cmd->add_option("--shards", dt_opts.shards, "Collapsed shard files or directories")
        ->required();
    dt_cmd->add_option("--out", dt_opts.out, "Model output path")->required();
    dt_cmd->add_option("--wpf", dt_opts.wpf, "Words kept per feature");
    dt_cmd->add_option("--fpw", dt_opts.fpw, "Features kept per word");
    dt_cmd->add_option("--prune-order", dt_opts.prune_order,
                       "column_then_row or row_then_column");
    dt_cmd->add_option("--stage", dt_opts.stage,
                       "Stop after counts, lmi, pruned or unit");

    EvalOpts eval_opts;
    CLI::App* eval_cmd =
        app.add_subcommand("eval-sim", "Score a model against similarity benchmarks");
    eval_cmd->add_option("--model", eval_opts.model, "Saved model path")->required();
    eval_cmd->add_option("--dataset", eval_opts.datasets, "Dataset as FORMAT:PATH")
        ->required();
    eval_cmd->add_option("--oov", eval_opts.oov, "score_zero or exclude");
    eval_cmd->add_flag("--tsv", eval_opts.tsv, "Emit TSV instead of the aligned table");

    std::vector<std::string> index_shards;
    std::string index_out;
    CLI::App* index_cmd = app.add_subcommand("index", "Build the inverted sentence index");
    index_cmd->add_option("--shards", index_shards, "Shard files or directories")
        ->required();
    index_cmd->add_option("--out", index_out, "Index directory")->required();

    std::string search_dir, search_query;
    std::uint64_t search_limit = 0;
    CLI::App* search_cmd = app.add_subcommand("search", "Query an index");
    search_cmd->add_option("--index", search_dir, "Index directory")->required();
    search_cmd->add_option("--query", search_query, "field:value terms, implicit AND")
        ->required();
    search_cmd->add_option("--limit", search_limit, "Stop after this many hits (0 = all)");

    std::vector<std::string> stats_paths;
    CLI::App* stats_cmd = app.add_subcommand("stats", "Corpus statistics over shards");
    stats_cmd->add_option("shards", stats_paths, "Shard files or directories");

    SampleConfig sample_config;
    std::string sample_out;
    CLI::App* sample_cmd = app.add_subcommand(
        "make-sample", "Generate the deterministic sample corpus and benchmarks");
    sample_cmd->add_option("--out", sample_out, "Output directory")->required();
    sample_cmd->add_option("--seed", sample_config.seed, "Generator seed");
    sample_cmd->add_option("--target-tokens", sample_config.target_tokens,
                           "Stop once this many tokens are written");
    sample_cmd->add_option("--shard-bytes", sample_config.shard_bytes,
                           "Uncompressed shard rotation size");
    sample_cmd->add_option("--sentences-per-doc", sample_config.sentences_per_doc,
                           "Sentences per generated document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("extract")) return run_stages(extract_opts, "extract");
        if (app.got_subcommand("dedup")) return run_stages(dedup_opts, "dedup");
        if (app.got_subcommand("annotate")) return run_stages(annotate_opts, "annotate");
        if (app.got_subcommand("collapse")) return run_stages(collapse_opts, "collapse");
        if (app.got_subcommand("pipeline")) return run_stages(pipeline_opts, "");
        if (app.got_subcommand("build-dt")) return run_build_dt(dt_opts);
        if (app.got_subcommand("eval-sim")) return run_eval_sim(eval_opts);
        if (app.got_subcommand("index")) {
            IndexBuildResult built =
                build_index(conll::resolve_shards(index_shards), index_out);
            std::printf("sentences\t%llu\nterms\t%llu\n",
                        static_cast<unsigned long long>(built.sentence_count),
                        static_cast<unsigned long long>(built.term_count));
            return 0;
        }
        if (app.got_subcommand("search")) {
            Index index = Index::open(search_dir);
            std::vector<SearchResult> hits = index.query(search_query);
            std::size_t shown = 0;
            for (const SearchResult& hit : hits) {
                if (search_limit > 0 && shown == search_limit) break;
                std::printf("%s\t%s\n", hit.sent_id.c_str(), hit.text.c_str());
                ++shown;
            }
            std::fprintf(stderr, "%zu sentences matched\n", hits.size());
            return 0;
        }
        if (app.got_subcommand("stats")) {
            CorpusStats stats = corpus_stats(conll::resolve_shards(stats_paths));
            std::fputs(stats.tsv().c_str(), stdout);
            return 0;
        }
        if (app.got_subcommand("make-sample")) {
            SampleCorpus sample = make_sample_corpus(sample_out, sample_config);
            std::printf("documents\t%llu\nsentences\t%llu\ntokens\t%llu\nshards\t%zu\n",
                        static_cast<unsigned long long>(sample.documents),
                        static_cast<unsigned long long>(sample.sentences),
                        static_cast<unsigned long long>(sample.tokens),
                        sample.shard_paths.size());
            std::printf("simverb\t%s\nsimlex\t%s\n", sample.simverb_path.c_str(),
                        sample.simlex_path.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
