#include "depcc/search_index.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <unordered_map>

#include "depcc/common.hpp"
#include "depcc/gzip.hpp"

namespace depcc {

namespace {

constexpr std::string_view kPostingsMagic = "DCIDX001";
constexpr std::string_view kSentencesMagic = "DCSNT001";
constexpr std::size_t kSentenceRecordSize = 12;

const std::set<std::string, std::less<>>& known_fields() {
    static const std::set<std::string, std::less<>> fields = {"form", "lemma", "ner",
                                                              "dep", "domain"};
    return fields;
}

std::string checksum_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    }
    return v;
}

std::uint64_t get_u64(std::string_view in, std::size_t pos) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    }
    return v;
}

struct SentenceRecord {
    std::uint32_t shard = 0;
    std::uint64_t offset = 0;
};

struct ShardEntry {
    std::string path;
    std::string checksum;
};

// The sentence block from a "# sent_id" line to the following blank line.
std::string_view sentence_block(std::string_view shard_bytes, std::uint64_t offset) {
    if (offset >= shard_bytes.size()) {
        throw CorruptIndex("sentence offset beyond shard end");
    }
    std::string_view rest = shard_bytes.substr(offset);
    std::size_t end = rest.find("\n\n");
    return end == std::string_view::npos ? rest : rest.substr(0, end + 1);
}

Sentence parse_block(std::string_view block, std::string_view url) {
    std::string synthetic = "# newdoc url = ";
    synthetic += url;
    synthetic += "\n# newdoc s3 = _\n";
    synthetic += block;
    synthetic += "\n";
    std::vector<ConllDocument> docs = conll::parse(synthetic);
    if (docs.size() != 1 || docs[0].sentences.size() != 1) {
        throw CorruptIndex("sentence block did not parse as one sentence");
    }
    return std::move(docs[0].sentences[0]);
}

std::string_view url_of_sent_id(std::string_view sent_id) {
    std::size_t hash = sent_id.rfind('#');
    return hash == std::string_view::npos ? sent_id : sent_id.substr(0, hash);
}

}  // namespace

std::string url_host(std::string_view url) {
    std::size_t scheme = url.find("://");
    std::string_view rest = scheme == std::string_view::npos ? url : url.substr(scheme + 3);
    std::size_t end = rest.find_first_of("/:?#");
    if (end != std::string_view::npos) rest = rest.substr(0, end);
    return to_lower_ascii(rest);
}

std::vector<std::string> sentence_terms(const Sentence& sentence, std::string_view url) {
    std::set<std::string> terms;
    const std::string host = url_host(url);
    if (!host.empty()) terms.insert("domain:" + host);
    for (const Token& t : sentence.tokens) {
        terms.insert("form:" + t.form);
        if (t.lemma != "_") terms.insert("lemma:" + t.lemma);
        if (t.ner.size() > 2 && (t.ner[0] == 'B' || t.ner[0] == 'I') && t.ner[1] == '-') {
            terms.insert("ner:" + t.ner.substr(2));
        }
        if (t.deprel != "_") terms.insert("dep:" + t.deprel);
        if (t.deps != "_") {
            std::size_t colon = t.deps.find(':');
            if (colon != std::string::npos) {
                std::string rel = t.deps.substr(colon + 1);
                std::uint64_t head = 0;
                bool numeric = colon > 0;
                for (char c : t.deps.substr(0, colon)) {
                    if (c < '0' || c > '9') {
                        numeric = false;
                        break;
                    }
                    head = head * 10 + static_cast<std::uint64_t>(c - '0');
                }
                if (numeric && !rel.empty() && head < sentence.tokens.size()) {
                    terms.insert("dep:" + rel);
                    terms.insert("dep:" + rel + "_" + sentence.tokens[head].lemma);
                }
            }
        }
    }
    return {terms.begin(), terms.end()};
}

IndexBuildResult build_index(const std::vector<std::string>& shard_paths,
                             const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::map<std::string, std::vector<std::uint64_t>> postings;
    std::string sentences_bin(kSentencesMagic);
    std::vector<ShardEntry> shards;
    std::uint64_t ordinal = 0;

    for (std::uint32_t shard_id = 0; shard_id < shard_paths.size(); ++shard_id) {
        const std::string& path = shard_paths[shard_id];
        const std::string file_bytes = read_file(path);
        shards.push_back({path, checksum_hex(file_bytes)});
        const std::string bytes =
            looks_gzip(file_bytes) ? gzip_decompress(file_bytes) : file_bytes;

        std::vector<std::uint64_t> offsets;
        std::size_t pos = 0;
        while (pos < bytes.size()) {
            std::size_t eol = bytes.find('\n', pos);
            std::string_view line(bytes.data() + pos,
                                  (eol == std::string::npos ? bytes.size() : eol) - pos);
            if (line.rfind("# sent_id = ", 0) == 0) offsets.push_back(pos);
            pos = eol == std::string::npos ? bytes.size() : eol + 1;
        }

        std::vector<ConllDocument> docs;
        try {
            docs = conll::parse(bytes);
        } catch (const ParseError& e) {
            throw ParseError(e.line(), "in shard " + path + ": " + e.what());
        }

        std::size_t k = 0;
        for (const ConllDocument& doc : docs) {
            for (const Sentence& sentence : doc.sentences) {
                for (const std::string& term : sentence_terms(sentence, doc.url)) {
                    postings[term].push_back(ordinal);
                }
                put_u32(sentences_bin, shard_id);
                put_u64(sentences_bin, offsets.at(k));
                ++k;
                ++ordinal;
            }
        }
    }

    std::string postings_bin(kPostingsMagic);
    std::string terms_tsv;
    for (const auto& [term, ordinals] : postings) {
        terms_tsv += term;
        terms_tsv.push_back('\t');
        terms_tsv += std::to_string(postings_bin.size() - kPostingsMagic.size());
        terms_tsv.push_back('\t');
        terms_tsv += std::to_string(ordinals.size());
        terms_tsv.push_back('\n');
        std::uint64_t prev = 0;
        for (std::size_t i = 0; i < ordinals.size(); ++i) {
            put_varint(postings_bin, i == 0 ? ordinals[0] : ordinals[i] - prev);
            prev = ordinals[i];
        }
    }

    write_file(out_dir + "/terms.tsv", terms_tsv);
    write_file(out_dir + "/postings.bin", postings_bin);
    write_file(out_dir + "/sentences.bin", sentences_bin);

    std::string manifest;
    for (std::size_t i = 0; i < shards.size(); ++i) {
        manifest += "shard\t" + std::to_string(i) + "\t" + shards[i].path + "\t" +
                    shards[i].checksum + "\n";
    }
    manifest += "file\tterms.tsv\t" + checksum_hex(terms_tsv) + "\n";
    manifest += "file\tpostings.bin\t" + checksum_hex(postings_bin) + "\n";
    manifest += "file\tsentences.bin\t" + checksum_hex(sentences_bin) + "\n";
    write_file(out_dir + "/manifest.tsv", manifest);

    IndexBuildResult result;
    result.manifest_path = out_dir + "/manifest.tsv";
    result.sentence_count = ordinal;
    result.term_count = postings.size();
    return result;
}

struct Index::Impl {
    std::string dir;
    std::vector<ShardEntry> shards;
    std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>> terms;
    std::string postings;
    std::vector<SentenceRecord> records;

    mutable std::mutex cache_mutex;
    mutable std::unordered_map<std::uint32_t, std::string> shard_cache;

    std::vector<std::uint64_t> posting_list(const std::string& term) const {
        auto it = terms.find(term);
        if (it == terms.end()) return {};
        const auto [offset, count] = it->second;
        std::vector<std::uint64_t> ordinals;
        ordinals.reserve(count);
        std::size_t pos = kPostingsMagic.size() + offset;
        std::uint64_t current = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
            current += get_varint(postings, pos);
            ordinals.push_back(current);
        }
        return ordinals;
    }

    // Decompressed shard bytes, checksum-verified on first touch.
    const std::string& shard_bytes(std::uint32_t shard_id) const {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = shard_cache.find(shard_id);
        if (it != shard_cache.end()) return it->second;
        if (shard_id >= shards.size()) throw CorruptIndex("shard id out of range");
        const ShardEntry& entry = shards[shard_id];
        std::string raw = read_file(entry.path);
        if (checksum_hex(raw) != entry.checksum) {
            throw CorruptIndex("checksum mismatch for shard " + entry.path);
        }
        std::string bytes = looks_gzip(raw) ? gzip_decompress(raw) : std::move(raw);
        return shard_cache.emplace(shard_id, std::move(bytes)).first->second;
    }
};

Index::Index() : impl_(std::make_unique<Impl>()) {}
Index::~Index() = default;
Index::Index(Index&&) noexcept = default;
Index& Index::operator=(Index&&) noexcept = default;

Index Index::open(const std::string& dir) {
    Index index;
    Impl& impl = *index.impl_;
    impl.dir = dir;

    std::unordered_map<std::string, std::string> file_sums;
    const std::string manifest = read_file(dir + "/manifest.tsv");
    for (std::string_view line : split(manifest, '\n')) {
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols[0] == "shard") {
            if (cols.size() != 4) throw CorruptIndex("malformed shard manifest line");
            std::size_t id = std::stoull(std::string(cols[1]));
            if (id != impl.shards.size()) throw CorruptIndex("shard ids not sequential");
            impl.shards.push_back({std::string(cols[2]), std::string(cols[3])});
        } else if (cols[0] == "file") {
            if (cols.size() != 3) throw CorruptIndex("malformed file manifest line");
            file_sums[std::string(cols[1])] = std::string(cols[2]);
        } else {
            throw CorruptIndex("unknown manifest record type");
        }
    }

    auto load_checked = [&](const std::string& name) {
        std::string bytes = read_file(dir + "/" + name);
        auto it = file_sums.find(name);
        if (it == file_sums.end() || checksum_hex(bytes) != it->second) {
            throw CorruptIndex("checksum mismatch for " + name);
        }
        return bytes;
    };

    const std::string terms_tsv = load_checked("terms.tsv");
    impl.postings = load_checked("postings.bin");
    const std::string sentences_bin = load_checked("sentences.bin");

    if (impl.postings.substr(0, kPostingsMagic.size()) != kPostingsMagic) {
        throw CorruptIndex("bad postings magic");
    }
    if (sentences_bin.substr(0, kSentencesMagic.size()) != kSentencesMagic) {
        throw CorruptIndex("bad sentences magic");
    }
    if ((sentences_bin.size() - kSentencesMagic.size()) % kSentenceRecordSize != 0) {
        throw CorruptIndex("sentence table size not a record multiple");
    }
    for (std::size_t pos = kSentencesMagic.size(); pos < sentences_bin.size();
         pos += kSentenceRecordSize) {
        impl.records.push_back({get_u32(sentences_bin, pos), get_u64(sentences_bin, pos + 4)});
    }

    for (std::string_view line : split(terms_tsv, '\n')) {
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 3) throw CorruptIndex("malformed terms line");
        impl.terms[std::string(cols[0])] = {std::stoull(std::string(cols[1])),
                                            std::stoull(std::string(cols[2]))};
    }
    return index;
}

std::uint64_t Index::sentence_count() const { return impl_->records.size(); }
std::uint64_t Index::term_count() const { return impl_->terms.size(); }

std::vector<SearchResult> Index::query(std::string_view expr) const {
    std::vector<std::string> query_terms;
    for (std::string_view raw : split_ws(expr)) {
        std::size_t colon = raw.find(':');
        if (colon == std::string_view::npos) {
            throw UnknownField("term '" + std::string(raw) + "' lacks a field prefix");
        }
        std::string_view field = raw.substr(0, colon);
        if (!known_fields().count(field)) {
            throw UnknownField("unknown field '" + std::string(field) + "'");
        }
        query_terms.emplace_back(raw);
    }
    if (query_terms.empty()) {
        throw std::invalid_argument("query expression is empty");
    }

    std::vector<std::uint64_t> hits = impl_->posting_list(query_terms[0]);
    for (std::size_t i = 1; i < query_terms.size() && !hits.empty(); ++i) {
        std::vector<std::uint64_t> next = impl_->posting_list(query_terms[i]);
        std::vector<std::uint64_t> merged;
        std::set_intersection(hits.begin(), hits.end(), next.begin(), next.end(),
                              std::back_inserter(merged));
        hits = std::move(merged);
    }

    std::vector<SearchResult> results;
    results.reserve(hits.size());
    for (std::uint64_t ordinal : hits) {
        if (ordinal >= impl_->records.size()) {
            throw CorruptIndex("posting ordinal beyond sentence table");
        }
        const SentenceRecord& record = impl_->records[ordinal];
        const std::string& bytes = impl_->shard_bytes(record.shard);
        std::string_view block = sentence_block(bytes, record.offset);
        std::string_view sent_id_line = block.substr(0, block.find('\n'));
        std::string_view sent_id = sent_id_line.size() > 12 ? sent_id_line.substr(12) : "";
        Sentence sentence = parse_block(block, url_of_sent_id(sent_id));

        SearchResult result;
        result.ordinal = ordinal;
        result.sent_id = sentence.sent_id;
        result.url = std::string(url_of_sent_id(sentence.sent_id));
        result.text = sentence.text;
        result.matched_terms = query_terms;
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace depcc
