#include "depcc/conll.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "depcc/common.hpp"
#include "depcc/gzip.hpp"

namespace depcc::conll {

namespace fs = std::filesystem;

namespace {

// The format reserves tab and newline for framing.
std::string sanitize_field(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

bool parse_u32(std::string_view s, std::uint32_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool valid_ner_tag(std::string_view tag) {
    if (tag == "O") return true;
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') return false;
    for (char c : tag.substr(2)) {
        if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) return false;
    }
    return true;
}

}  // namespace

void validate(const ConllDocument& doc) {
    if (doc.url.empty()) throw InvalidDocument("url: empty");
    long long last_suffix = -1;
    for (const Sentence& sentence : doc.sentences) {
        const std::string where = "sentence " + sentence.sent_id;
        std::size_t hash = sentence.sent_id.rfind('#');
        if (hash == std::string::npos) throw InvalidDocument(where + ": sent_id lacks '#'");
        std::uint32_t suffix = 0;
        if (!parse_u32(std::string_view(sentence.sent_id).substr(hash + 1), suffix)) {
            throw InvalidDocument(where + ": sent_id suffix not numeric");
        }
        if (static_cast<long long>(suffix) <= last_suffix) {
            throw InvalidDocument(where + ": sent_id suffix not strictly increasing");
        }
        last_suffix = suffix;

        const std::size_t n = sentence.tokens.size();
        std::size_t roots = 0;
        bool parsed = false;
        bool prev_outside = true;
        for (std::size_t i = 0; i < n; ++i) {
            const Token& t = sentence.tokens[i];
            if (t.id != i) throw InvalidDocument(where + ": id: not consecutive at " + std::to_string(i));
            if (t.head >= n) throw InvalidDocument(where + ": head: out of range at " + std::to_string(i));
            if (!valid_ner_tag(t.ner)) throw InvalidDocument(where + ": ner: bad tag at " + std::to_string(i));
            if (t.ner[0] == 'I' && prev_outside) {
                throw InvalidDocument(where + ": ner: I- tag after O or sentence start at " +
                                      std::to_string(i));
            }
            prev_outside = t.ner == "O";
            if (t.deprel != "_") parsed = true;
            if (t.deprel == "ROOT") {
                ++roots;
                if (t.head != t.id) throw InvalidDocument(where + ": head: root must point to itself");
            }
        }
        if (parsed && roots != 1) {
            throw InvalidDocument(where + ": deprel: parsed sentence needs exactly one ROOT");
        }
    }
}

std::string serialize(const Sentence& sentence) {
    std::string out;
    out += "# sent_id = " + sanitize_field(sentence.sent_id) + "\n";
    out += "# text = " + sanitize_field(sentence.text) + "\n";
    for (const Token& t : sentence.tokens) {
        out += std::to_string(t.id);
        out += '\t';
        out += sanitize_field(t.form);
        out += '\t';
        out += sanitize_field(t.lemma);
        out += '\t';
        out += sanitize_field(t.upostag);
        out += '\t';
        out += sanitize_field(t.xpostag);
        out += '\t';
        out += sanitize_field(t.feats);
        out += '\t';
        out += std::to_string(t.head);
        out += '\t';
        out += sanitize_field(t.deprel);
        out += '\t';
        out += sanitize_field(t.deps);
        out += '\t';
        out += sanitize_field(t.ner);
        out += '\n';
    }
    out += '\n';
    return out;
}

std::string serialize(const ConllDocument& doc) {
    validate(doc);
    std::string out;
    out += "# newdoc url = " + sanitize_field(doc.url) + "\n";
    out += "# newdoc s3 = " + sanitize_field(doc.source) + "\n";
    for (const std::string& comment : doc.comments) {
        out += sanitize_field(comment) + "\n";
    }
    for (const Sentence& sentence : doc.sentences) {
        out += serialize(sentence);
    }
    return out;
}

std::vector<ConllDocument> parse(std::string_view text) {
    std::vector<ConllDocument> docs;
    ConllDocument* doc = nullptr;
    Sentence current;
    bool in_sentence = false;
    std::size_t line_no = 0;

    auto flush_sentence = [&]() {
        if (!in_sentence) return;
        if (doc == nullptr) throw ParseError(line_no, "sentence outside a document");
        for (const Token& t : current.tokens) {
            if (t.head >= current.tokens.size()) {
                throw ParseError(line_no, "head out of range in sentence " + current.sent_id);
            }
        }
        doc->sentences.push_back(std::move(current));
        current = Sentence{};
        in_sentence = false;
    };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        if (pos == text.size()) break;
        std::size_t eol = text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos) ? text.substr(pos)
                                                                : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (line.empty()) {
            flush_sentence();
            continue;
        }
        if (line[0] == '#') {
            if (line.rfind("# newdoc url = ", 0) == 0) {
                flush_sentence();
                docs.emplace_back();
                doc = &docs.back();
                doc->url = std::string(line.substr(15));
            } else if (line.rfind("# newdoc s3 = ", 0) == 0) {
                if (doc == nullptr) throw ParseError(line_no, "s3 header before newdoc url");
                doc->source = std::string(line.substr(14));
            } else if (line.rfind("# sent_id = ", 0) == 0) {
                flush_sentence();
                if (doc == nullptr) throw ParseError(line_no, "sent_id before newdoc url");
                in_sentence = true;
                current.sent_id = std::string(line.substr(12));
            } else if (line.rfind("# text = ", 0) == 0) {
                if (!in_sentence) throw ParseError(line_no, "text header outside a sentence");
                current.text = std::string(line.substr(9));
            } else {
                if (doc == nullptr) throw ParseError(line_no, "comment before newdoc url");
                doc->comments.push_back(std::string(line));
            }
            continue;
        }

        // Token row.
        if (!in_sentence) throw ParseError(line_no, "token row outside a sentence");
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 10) {
            throw ParseError(line_no, "expected 10 columns, got " + std::to_string(cols.size()));
        }
        Token t;
        if (!parse_u32(cols[0], t.id)) throw ParseError(line_no, "non-integer id");
        if (t.id != current.tokens.size()) throw ParseError(line_no, "id sequence gap");
        t.form = std::string(cols[1]);
        t.lemma = std::string(cols[2]);
        t.upostag = std::string(cols[3]);
        t.xpostag = std::string(cols[4]);
        t.feats = std::string(cols[5]);
        if (!parse_u32(cols[6], t.head)) throw ParseError(line_no, "non-integer head");
        t.deprel = std::string(cols[7]);
        t.deps = std::string(cols[8]);
        t.ner = std::string(cols[9]);
        current.tokens.push_back(std::move(t));
    }
    flush_sentence();
    return docs;
}

struct ShardWriter::Impl {
    std::string out_dir;
    std::uint64_t target_bytes = 0;
    std::vector<std::string> paths;
    std::ofstream out;
    std::unique_ptr<GzipWriter> gz;
    std::uint64_t shard_bytes = 0;
    bool finished = false;

    void open_next() {
        char name[32];
        std::snprintf(name, sizeof(name), "part-%05zu.conll.gz", paths.size());
        fs::path path = fs::path(out_dir) / name;
        out.open(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot create " + path.string());
        gz = std::make_unique<GzipWriter>(out);
        shard_bytes = 0;
        paths.push_back(path.string());
    }

    void close_current() {
        if (!gz) return;
        gz->finish();
        gz.reset();
        out.close();
        if (!out) throw IoFailure("write failed: " + paths.back());
        out.clear();
    }
};

ShardWriter::ShardWriter(std::string out_dir, std::uint64_t target_shard_bytes)
    : impl_(std::make_unique<Impl>()) {
    fs::create_directories(out_dir);
    impl_->out_dir = std::move(out_dir);
    impl_->target_bytes = target_shard_bytes;
}

ShardWriter::~ShardWriter() {
    if (impl_ && !impl_->finished) {
        try {
            impl_->close_current();
        } catch (...) {
        }
    }
}

void ShardWriter::add(const ConllDocument& doc) {
    std::string block = serialize(doc);
    Impl& impl = *impl_;
    if (impl.gz && impl.shard_bytes > 0 &&
        impl.shard_bytes + block.size() > impl.target_bytes) {
        impl.close_current();
    }
    if (!impl.gz) impl.open_next();
    impl.gz->write(block);
    impl.shard_bytes += block.size();
}

std::vector<std::string> ShardWriter::finish() {
    impl_->close_current();
    impl_->finished = true;
    return impl_->paths;
}

std::vector<std::string> write_shards(const std::vector<ConllDocument>& docs,
                                      const std::string& out_dir,
                                      std::uint64_t target_shard_bytes) {
    ShardWriter writer(out_dir, target_shard_bytes);
    for (const ConllDocument& doc : docs) writer.add(doc);
    return writer.finish();
}

std::vector<ConllDocument> read_shard(const std::string& path) {
    std::string raw = read_file(path);
    if (looks_gzip(raw)) raw = gzip_decompress(raw);
    return parse(raw);
}

std::vector<std::string> resolve_shards(const std::vector<std::string>& paths) {
    std::vector<std::string> out;
    for (const std::string& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> inside;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (!entry.is_regular_file()) continue;
                std::string name = entry.path().filename().string();
                if (name.ends_with(".conll.gz") || name.ends_with(".conll")) {
                    inside.push_back(entry.path().string());
                }
            }
            std::sort(inside.begin(), inside.end());
            out.insert(out.end(), inside.begin(), inside.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace depcc::conll
