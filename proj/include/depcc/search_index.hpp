#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depcc/conll.hpp"

namespace depcc {

class UnknownField : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorruptIndex : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Index terms of one sentence, sorted and unique: form:<form>, lemma:<lemma>,
// ner:<Type>, dep:<deprel> (basic and enhanced), dep:<rel>_<head lemma> from
// the DEPS column, domain:<host of url>.
std::vector<std::string> sentence_terms(const Sentence& sentence, std::string_view url);

std::string url_host(std::string_view url);

struct IndexBuildResult {
    std::string manifest_path;
    std::uint64_t sentence_count = 0;
    std::uint64_t term_count = 0;
};

// On-disk layout in out_dir: manifest.tsv (shard paths + FNV-1a checksums of
// every file), terms.tsv (term, postings offset, count; sorted), postings.bin
// (magic + delta-varint ordinal lists), sentences.bin (magic + fixed 12-byte
// records: u32 shard id, u64 byte offset of the sentence block in the
// decompressed shard). Same shards produce byte-identical files.
IndexBuildResult build_index(const std::vector<std::string>& shard_paths,
                             const std::string& out_dir);

struct SearchResult {
    std::uint64_t ordinal = 0;
    std::string sent_id;
    std::string url;
    std::string text;
    std::vector<std::string> matched_terms;
};

class Index {
public:
    // Verifies index file checksums against the manifest.
    static Index open(const std::string& dir);
    ~Index();
    Index(Index&&) noexcept;
    Index& operator=(Index&&) noexcept;

    // expr is whitespace-separated field:value terms, implicit AND. Results
    // come back in ordinal order, hydrated from the shard at their offset.
    std::vector<SearchResult> query(std::string_view expr) const;

    std::uint64_t sentence_count() const;
    std::uint64_t term_count() const;

private:
    Index();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace depcc
