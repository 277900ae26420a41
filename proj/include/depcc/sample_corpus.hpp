#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace depcc {

struct SampleConfig {
    std::uint64_t seed = 42;
    std::uint64_t target_tokens = 1000000;
    std::uint64_t shard_bytes = 16ull << 20;  // uncompressed, pre-rotation
    std::uint64_t sentences_per_doc = 40;
};

struct SampleCorpus {
    std::vector<std::string> shard_paths;
    std::string simverb_path;
    std::string simlex_path;
    std::uint64_t documents = 0;
    std::uint64_t sentences = 0;
    std::uint64_t tokens = 0;
};

// Deterministic pre-parsed corpus: verbs come in synonym clusters with
// shared argument preferences, so distributional vectors recover the
// clusters; the bundled verb-pair files grade pairs by cluster relatedness.
// Writes corpus/part-*.conll.gz plus datasets/sample-simverb.tsv (5 columns
// + dev/test tag) and datasets/sample-simlex.tsv (SimLex layout, verb rows
// mixed with noun rows).
SampleCorpus make_sample_corpus(const std::string& out_dir,
                                const SampleConfig& config = {});

}  // namespace depcc
