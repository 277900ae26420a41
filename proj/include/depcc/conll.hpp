#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace depcc {

// One row of the 10-column token format. Ids are 0-based within the
// sentence and the root token's head is its own id.
struct Token {
    std::uint32_t id = 0;
    std::string form;
    std::string lemma;
    std::string upostag = "_";
    std::string xpostag = "_";
    std::string feats = "_";
    std::uint32_t head = 0;
    std::string deprel = "_";
    std::string deps = "_";
    std::string ner = "O";

    bool operator==(const Token&) const = default;
};

struct Sentence {
    std::string sent_id;  // document url + "#" + running index
    std::string text;     // original sentence string
    std::vector<Token> tokens;

    bool operator==(const Sentence&) const = default;
};

struct ConllDocument {
    std::string url;
    std::string source;  // archive provenance, emitted as the "s3" header
    std::vector<Sentence> sentences;
    std::vector<std::string> comments;  // unknown "#" lines preserved by parse

    bool operator==(const ConllDocument&) const = default;
};

class InvalidDocument : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace conll {

// Throws InvalidDocument naming the failing field.
void validate(const ConllDocument& doc);

std::string serialize(const ConllDocument& doc);
std::string serialize(const Sentence& sentence);

std::vector<ConllDocument> parse(std::string_view text);

// Gzip-compressed part-<05d>.conll.gz files; a document never splits
// across shards. Returns the shard paths in write order.
std::vector<std::string> write_shards(const std::vector<ConllDocument>& docs,
                                      const std::string& out_dir,
                                      std::uint64_t target_shard_bytes);

// Streaming variant of write_shards for corpora too large to hold at once.
class ShardWriter {
public:
    ShardWriter(std::string out_dir, std::uint64_t target_shard_bytes);
    ~ShardWriter();
    ShardWriter(const ShardWriter&) = delete;
    ShardWriter& operator=(const ShardWriter&) = delete;

    void add(const ConllDocument& doc);
    std::vector<std::string> finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Reads one shard, .gz or plain, into documents.
std::vector<ConllDocument> read_shard(const std::string& path);

// Expands a mix of shard files and directories into a sorted list of
// shard paths (directories contribute their *.conll.gz / *.conll files).
std::vector<std::string> resolve_shards(const std::vector<std::string>& paths);

}  // namespace conll

}  // namespace depcc
