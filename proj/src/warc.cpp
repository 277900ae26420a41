#include "depcc/warc.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>

#include "depcc/common.hpp"
#include "depcc/gzip.hpp"

namespace depcc {

namespace {

// Resync scans past a malformed record give up after this many bytes.
constexpr std::uint64_t kResyncLimit = 16ull << 20;

class ByteSource {
public:
    virtual ~ByteSource() = default;
    virtual std::size_t read(char* buf, std::size_t n) = 0;
};

class RawSource : public ByteSource {
public:
    explicit RawSource(std::istream& in) : in_(in) {}
    std::size_t read(char* buf, std::size_t n) override {
        in_.read(buf, static_cast<std::streamsize>(n));
        return static_cast<std::size_t>(in_.gcount());
    }

private:
    std::istream& in_;
};

class GzipSource : public ByteSource {
public:
    explicit GzipSource(std::istream& in) : reader_(in) {}
    std::size_t read(char* buf, std::size_t n) override { return reader_.read(buf, n); }

private:
    InflatingReader reader_;
};

std::string lower_header(std::string_view s) { return to_lower_ascii(trim(s)); }

}  // namespace

std::string_view to_string(WarcRecordType type) {
    switch (type) {
        case WarcRecordType::response: return "response";
        case WarcRecordType::request: return "request";
        case WarcRecordType::metadata: return "metadata";
        case WarcRecordType::warcinfo: return "warcinfo";
        case WarcRecordType::other: break;
    }
    return "other";
}

WarcRecordType warc_type_from_string(std::string_view name) {
    std::string n = to_lower_ascii(name);
    if (n == "response") return WarcRecordType::response;
    if (n == "request") return WarcRecordType::request;
    if (n == "metadata") return WarcRecordType::metadata;
    if (n == "warcinfo") return WarcRecordType::warcinfo;
    return WarcRecordType::other;
}

struct WarcReader::Impl {
    std::unique_ptr<ByteSource> source;
    std::string source_archive;
    std::string buffer;
    std::size_t buffer_pos = 0;
    std::uint64_t consumed = 0;  // bytes handed out of the logical stream
    bool eof = false;
    bool first_record = true;

    std::uint64_t offset() const { return consumed; }

    bool fill() {
        if (eof) return false;
        char chunk[1 << 16];
        std::size_t got = source->read(chunk, sizeof(chunk));
        if (got == 0) {
            eof = true;
            return false;
        }
        buffer.erase(0, buffer_pos);
        buffer_pos = 0;
        buffer.append(chunk, got);
        return true;
    }

    // One line without its terminator; nullopt at end of stream.
    std::optional<std::string> read_line() {
        while (true) {
            std::size_t nl = buffer.find('\n', buffer_pos);
            if (nl != std::string::npos) {
                std::string line = buffer.substr(buffer_pos, nl - buffer_pos);
                consumed += nl - buffer_pos + 1;
                buffer_pos = nl + 1;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (!fill()) {
                if (buffer_pos >= buffer.size()) return std::nullopt;
                std::string line = buffer.substr(buffer_pos);
                consumed += buffer.size() - buffer_pos;
                buffer_pos = buffer.size();
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
        }
    }

    // Reads exactly n bytes unless the stream ends first.
    std::string read_exact(std::size_t n) {
        std::string out;
        out.reserve(std::min<std::size_t>(n, 1 << 20));
        while (out.size() < n) {
            if (buffer_pos >= buffer.size() && !fill()) break;
            std::size_t take = std::min(n - out.size(), buffer.size() - buffer_pos);
            out.append(buffer, buffer_pos, take);
            buffer_pos += take;
            consumed += take;
        }
        return out;
    }
};

WarcReader::WarcReader(std::istream& in, std::string source_archive)
    : impl_(std::make_unique<Impl>()) {
    impl_->source_archive = std::move(source_archive);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    std::streamsize got = in.gcount();
    for (std::streamsize i = got; i > 0; --i) in.putback(magic[i - 1]);
    if (got == 2 && looks_gzip(std::string_view(magic, 2))) {
        impl_->source = std::make_unique<GzipSource>(in);
    } else {
        impl_->source = std::make_unique<RawSource>(in);
    }
}

WarcReader::~WarcReader() = default;

std::optional<WarcRecord> WarcReader::next() {
    Impl& s = *impl_;
    while (true) {
        // Skip the blank separators between records.
        std::optional<std::string> line;
        std::uint64_t record_offset;
        try {
            do {
                record_offset = s.offset();
                line = s.read_line();
            } while (line && trim(*line).empty());
        } catch (const GzipError& e) {
            throw StreamCorrupt("offset " + std::to_string(s.offset()) + ": " + e.what());
        }
        if (!line) return std::nullopt;

        if (!line->starts_with("WARC/")) {
            if (s.first_record) {
                throw NotWarc("first record lacks a WARC version line: " + *line);
            }
            diagnostics_.push_back("offset " + std::to_string(record_offset) +
                                   ": expected version line, resyncing");
            std::uint64_t scanned = 0;
            try {
                while (line && !line->starts_with("WARC/")) {
                    scanned += line->size() + 1;
                    if (scanned > kResyncLimit) {
                        throw StreamCorrupt("offset " + std::to_string(s.offset()) +
                                            ": framing lost, no version line found");
                    }
                    record_offset = s.offset();
                    line = s.read_line();
                }
            } catch (const GzipError& e) {
                throw StreamCorrupt("offset " + std::to_string(s.offset()) + ": " + e.what());
            }
            if (!line) return std::nullopt;
        }
        s.first_record = false;

        // Record headers up to the blank line.
        std::map<std::string, std::string> headers;
        bool header_ok = true;
        try {
            while (true) {
                std::optional<std::string> h = s.read_line();
                if (!h) {
                    header_ok = false;
                    break;
                }
                if (trim(*h).empty()) break;
                std::size_t colon = h->find(':');
                if (colon == std::string::npos) {
                    diagnostics_.push_back("offset " + std::to_string(record_offset) +
                                           ": ignoring malformed header line");
                    continue;
                }
                headers[lower_header(h->substr(0, colon))] =
                    std::string(trim(std::string_view(*h).substr(colon + 1)));
            }
        } catch (const GzipError& e) {
            throw StreamCorrupt("offset " + std::to_string(s.offset()) + ": " + e.what());
        }
        if (!header_ok) {
            diagnostics_.push_back("offset " + std::to_string(record_offset) +
                                   ": stream ended inside record headers");
            return std::nullopt;
        }

        auto cl = headers.find("content-length");
        std::uint64_t length = 0;
        bool length_ok = false;
        if (cl != headers.end()) {
            auto [ptr, ec] = std::from_chars(cl->second.data(),
                                             cl->second.data() + cl->second.size(), length);
            length_ok = ec == std::errc{} && ptr == cl->second.data() + cl->second.size();
        }
        if (!length_ok) {
            diagnostics_.push_back("offset " + std::to_string(record_offset) +
                                   ": missing or bad Content-Length, record skipped");
            continue;  // resync via the version-line scan above
        }

        std::string payload;
        try {
            payload = s.read_exact(length);
        } catch (const GzipError& e) {
            throw StreamCorrupt("offset " + std::to_string(s.offset()) + ": " + e.what());
        }
        if (payload.size() < length) {
            diagnostics_.push_back("offset " + std::to_string(record_offset) +
                                   ": payload truncated (declared " + std::to_string(length) +
                                   ", got " + std::to_string(payload.size()) +
                                   "), record skipped");
            continue;
        }

        WarcRecord record;
        record.record_type = warc_type_from_string(headers.count("warc-type") ? headers["warc-type"] : "");
        record.target_uri = headers.count("warc-target-uri") ? headers["warc-target-uri"] : "";
        if (record.target_uri.size() >= 2 && record.target_uri.front() == '<' &&
            record.target_uri.back() == '>') {
            record.target_uri = record.target_uri.substr(1, record.target_uri.size() - 2);
        }
        record.date = headers.count("warc-date") ? headers["warc-date"] : "";
        record.content_type = headers.count("content-type") ? headers["content-type"] : "";
        record.payload = std::move(payload);
        record.source_archive = s.source_archive;
        record.record_offset = record_offset;

        if (record.record_type == WarcRecordType::response) {
            if (record.target_uri.empty()) {
                diagnostics_.push_back("offset " + std::to_string(record_offset) +
                                       ": response record without target URI, skipped");
                continue;
            }
            if (auto ct = http_content_type(record.payload)) record.content_type = *ct;
        }
        return record;
    }
}

std::vector<WarcRecord> read_warc(std::istream& in, const std::string& source_archive,
                                  std::vector<std::string>* diagnostics) {
    WarcReader reader(in, source_archive);
    std::vector<WarcRecord> records;
    while (auto record = reader.next()) records.push_back(std::move(*record));
    if (diagnostics) *diagnostics = reader.diagnostics();
    return records;
}

std::string serialize_record(const WarcRecord& record) {
    std::string out = "WARC/1.0\r\n";
    out += "WARC-Type: " + std::string(to_string(record.record_type)) + "\r\n";
    if (!record.target_uri.empty()) out += "WARC-Target-URI: " + record.target_uri + "\r\n";
    if (!record.date.empty()) out += "WARC-Date: " + record.date + "\r\n";
    if (!record.content_type.empty()) out += "Content-Type: " + record.content_type + "\r\n";
    out += "Content-Length: " + std::to_string(record.payload.size()) + "\r\n";
    out += "\r\n";
    out += record.payload;
    out += "\r\n\r\n";
    return out;
}

bool is_html_response(const WarcRecord& record) {
    if (record.record_type != WarcRecordType::response) return false;
    std::string ct = to_lower_ascii(record.content_type);
    return ct.starts_with("text/html") || ct.starts_with("application/xhtml+xml");
}

std::vector<WarcRecord> filter_responses(const std::vector<WarcRecord>& records) {
    std::vector<WarcRecord> out;
    for (const WarcRecord& r : records) {
        if (is_html_response(r)) out.push_back(r);
    }
    return out;
}

std::optional<std::string> http_content_type(std::string_view payload) {
    if (!payload.starts_with("HTTP/")) return std::nullopt;
    std::size_t pos = 0;
    while (pos < payload.size()) {
        std::size_t eol = payload.find('\n', pos);
        std::string_view line = payload.substr(pos, eol == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) break;  // end of headers
        std::size_t colon = line.find(':');
        if (colon != std::string_view::npos &&
            to_lower_ascii(trim(line.substr(0, colon))) == "content-type") {
            return std::string(trim(line.substr(colon + 1)));
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return std::nullopt;
}

std::string_view http_body(std::string_view payload) {
    if (!payload.starts_with("HTTP/")) return payload;
    std::size_t crlf = payload.find("\r\n\r\n");
    if (crlf != std::string_view::npos) return payload.substr(crlf + 4);
    std::size_t lf = payload.find("\n\n");
    if (lf != std::string_view::npos) return payload.substr(lf + 2);
    return std::string_view{};
}

std::optional<std::string> charset_param(std::string_view content_type) {
    std::string lower = to_lower_ascii(content_type);
    std::size_t pos = lower.find("charset=");
    if (pos == std::string::npos) return std::nullopt;
    std::size_t start = pos + 8;
    std::size_t end = start;
    while (end < lower.size() && lower[end] != ';' && !is_ascii_space(lower[end]) &&
           lower[end] != '"') {
        ++end;
    }
    if (start < lower.size() && lower[start] == '"') {
        ++start;
        end = lower.find('"', start);
        if (end == std::string::npos) end = lower.size();
    }
    if (end <= start) return std::nullopt;
    return lower.substr(start, end - start);
}

}  // namespace depcc
