#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "depcc/text_extract.hpp"

namespace depcc {

struct Fingerprint {
    std::uint64_t exact_hash = 0;
    std::uint64_t simhash = 0;
    std::string doc_id;
    std::size_t text_length = 0;  // words in the normalized text
};

// FNV-1a 64 over the normalized text (lowercased, whitespace collapsed, trimmed).
std::uint64_t exact_hash(std::string_view text);

// 64-bit SimHash over word unigrams + bigrams of the normalized text.
// Bit b is 1 iff the signed vote sum at b is positive; no features -> 0.
std::uint64_t simhash(std::string_view text);

int hamming(std::uint64_t a, std::uint64_t b);

Fingerprint fingerprint(const Document& doc);

struct DropRecord {
    std::string doc_id;
    std::string reason;  // "exact" or "near"
    std::string kept_doc_id;
};

struct DedupResult {
    std::vector<Document> kept;       // in stable input order
    std::vector<DropRecord> dropped;
};

// Exact pass keeps the first of each exact_hash; near pass keeps the doc
// with more words among simhash neighbors (ties: smaller url). A longer
// late arrival evicts previously kept neighbors.
DedupResult dedup_stream(std::vector<Document> docs, int hamming_threshold = 3);

// TSV "doc_id<TAB>reason<TAB>kept_doc_id".
void save_drop_log(const std::vector<DropRecord>& drops, const std::string& path);
std::vector<DropRecord> load_drop_log(const std::string& path);

// TSV "exact_hash<TAB>simhash<TAB>doc_id<TAB>length" for cross-shard merging.
void save_fingerprints(const std::vector<Fingerprint>& fps, const std::string& path);
std::vector<Fingerprint> load_fingerprints(const std::string& path);

}  // namespace depcc
