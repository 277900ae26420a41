#include "depcc/dedup.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

#include "depcc/common.hpp"

namespace depcc {

namespace {

std::string sanitize_field(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

struct Entry {
    Document doc;
    Fingerprint fp;
    bool alive = true;
};

std::uint16_t band(std::uint64_t h, int i) {
    return static_cast<std::uint16_t>(h >> (16 * i));
}

// True when the incumbent survives against the challenger.
bool incumbent_wins(const Fingerprint& incumbent, const Fingerprint& challenger) {
    if (incumbent.text_length != challenger.text_length) {
        return incumbent.text_length > challenger.text_length;
    }
    return incumbent.doc_id <= challenger.doc_id;
}

}  // namespace

std::uint64_t exact_hash(std::string_view text) {
    return fnv1a64(normalize_text(text));
}

std::uint64_t simhash(std::string_view text) {
    const std::string normalized = normalize_text(text);
    const std::vector<std::string_view> words = split_ws(normalized);
    if (words.empty()) return 0;

    int votes[64] = {};
    auto vote = [&votes](std::uint64_t h) {
        for (int b = 0; b < 64; ++b) votes[b] += (h >> b) & 1 ? 1 : -1;
    };
    for (const std::string_view& w : words) vote(fnv1a64(w));
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        std::string bigram(words[i]);
        bigram.push_back(' ');
        bigram += words[i + 1];
        vote(fnv1a64(bigram));
    }

    std::uint64_t result = 0;
    for (int b = 0; b < 64; ++b) {
        if (votes[b] > 0) result |= std::uint64_t{1} << b;
    }
    return result;
}

int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

Fingerprint fingerprint(const Document& doc) {
    Fingerprint fp;
    fp.exact_hash = exact_hash(doc.text);
    fp.simhash = simhash(doc.text);
    fp.doc_id = doc.url;
    fp.text_length = split_ws(normalize_text(doc.text)).size();
    return fp;
}

DedupResult dedup_stream(std::vector<Document> docs, int hamming_threshold) {
    if (hamming_threshold < 0 || hamming_threshold > 16) {
        throw std::invalid_argument("hamming_threshold out of [0, 16]");
    }

    DedupResult result;
    std::vector<Entry> entries;
    entries.reserve(docs.size());
    std::unordered_map<std::uint64_t, std::size_t> by_exact;
    // Four 16-bit bands. Any pair within Hamming distance 3 shares a band;
    // wider thresholds fall back to scanning every live entry.
    std::unordered_map<std::uint32_t, std::vector<std::size_t>> buckets;
    const bool bands_suffice = hamming_threshold <= 3;

    for (Document& doc : docs) {
        Fingerprint fp = fingerprint(doc);

        auto [exact_it, fresh] = by_exact.try_emplace(fp.exact_hash, entries.size());
        if (!fresh) {
            result.dropped.push_back(
                {fp.doc_id, "exact", entries[exact_it->second].fp.doc_id});
            continue;
        }

        std::vector<std::size_t> candidates;
        if (bands_suffice) {
            for (int i = 0; i < 4; ++i) {
                std::uint32_t key = (static_cast<std::uint32_t>(i) << 16) | band(fp.simhash, i);
                auto it = buckets.find(key);
                if (it == buckets.end()) continue;
                for (std::size_t idx : it->second) {
                    if (entries[idx].alive) candidates.push_back(idx);
                }
            }
            std::sort(candidates.begin(), candidates.end());
            candidates.erase(std::unique(candidates.begin(), candidates.end()),
                             candidates.end());
        } else {
            for (std::size_t idx = 0; idx < entries.size(); ++idx) {
                if (entries[idx].alive) candidates.push_back(idx);
            }
        }

        std::vector<std::size_t> neighbors;
        for (std::size_t idx : candidates) {
            if (hamming(entries[idx].fp.simhash, fp.simhash) <= hamming_threshold) {
                neighbors.push_back(idx);
            }
        }

        bool defeated = false;
        for (std::size_t idx : neighbors) {
            if (incumbent_wins(entries[idx].fp, fp)) {
                result.dropped.push_back({fp.doc_id, "near", entries[idx].fp.doc_id});
                by_exact.erase(fp.exact_hash);
                defeated = true;
                break;
            }
        }
        if (defeated) continue;

        for (std::size_t idx : neighbors) {
            entries[idx].alive = false;
            by_exact.erase(entries[idx].fp.exact_hash);
            result.dropped.push_back({entries[idx].fp.doc_id, "near", fp.doc_id});
        }

        std::size_t self = entries.size();
        for (int i = 0; i < 4; ++i) {
            std::uint32_t key = (static_cast<std::uint32_t>(i) << 16) | band(fp.simhash, i);
            buckets[key].push_back(self);
        }
        entries.push_back({std::move(doc), std::move(fp), true});
    }

    for (Entry& e : entries) {
        if (e.alive) result.kept.push_back(std::move(e.doc));
    }
    return result;
}

void save_drop_log(const std::vector<DropRecord>& drops, const std::string& path) {
    std::string out;
    for (const DropRecord& d : drops) {
        out += sanitize_field(d.doc_id);
        out.push_back('\t');
        out += d.reason;
        out.push_back('\t');
        out += sanitize_field(d.kept_doc_id);
        out.push_back('\n');
    }
    write_file(path, out);
}

std::vector<DropRecord> load_drop_log(const std::string& path) {
    std::vector<DropRecord> drops;
    const std::string content = read_file(path);
    for (std::string_view line : split(content, '\n')) {
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 3) throw IoFailure("malformed drop log line in " + path);
        drops.push_back({std::string(cols[0]), std::string(cols[1]), std::string(cols[2])});
    }
    return drops;
}

void save_fingerprints(const std::vector<Fingerprint>& fps, const std::string& path) {
    std::string out;
    for (const Fingerprint& fp : fps) {
        out += std::to_string(fp.exact_hash);
        out.push_back('\t');
        out += std::to_string(fp.simhash);
        out.push_back('\t');
        out += sanitize_field(fp.doc_id);
        out.push_back('\t');
        out += std::to_string(fp.text_length);
        out.push_back('\n');
    }
    write_file(path, out);
}

std::vector<Fingerprint> load_fingerprints(const std::string& path) {
    std::vector<Fingerprint> fps;
    const std::string content = read_file(path);
    for (std::string_view line : split(content, '\n')) {
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 4) throw IoFailure("malformed fingerprint line in " + path);
        Fingerprint fp;
        fp.exact_hash = std::stoull(std::string(cols[0]));
        fp.simhash = std::stoull(std::string(cols[1]));
        fp.doc_id = std::string(cols[2]);
        fp.text_length = std::stoull(std::string(cols[3]));
        fps.push_back(std::move(fp));
    }
    return fps;
}

}  // namespace depcc
