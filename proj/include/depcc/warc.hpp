#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace depcc {

enum class WarcRecordType { response, request, metadata, warcinfo, other };

std::string_view to_string(WarcRecordType type);
WarcRecordType warc_type_from_string(std::string_view name);

struct WarcRecord {
    WarcRecordType record_type = WarcRecordType::other;
    std::string target_uri;
    std::string date;  // WARC-Date, ISO 8601 UTC
    std::string content_type;
    std::string payload;  // full record payload, HTTP headers included
    std::string source_archive;
    std::uint64_t record_offset = 0;  // offset in the uncompressed record stream
};

// First record lacks a WARC version line.
class NotWarc : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unrecoverable framing loss; message carries the offset.
class StreamCorrupt : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Streams records from a WARC file, plain or gzip-member-compressed
// (detected by magic bytes). Malformed records are skipped with a
// diagnostic; the reader resynchronizes on the next version line.
class WarcReader {
public:
    WarcReader(std::istream& in, std::string source_archive);
    ~WarcReader();
    WarcReader(const WarcReader&) = delete;
    WarcReader& operator=(const WarcReader&) = delete;

    std::optional<WarcRecord> next();

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::vector<std::string> diagnostics_;
};

std::vector<WarcRecord> read_warc(std::istream& in, const std::string& source_archive,
                                  std::vector<std::string>* diagnostics = nullptr);

std::string serialize_record(const WarcRecord& record);

// Retains response records with an HTML-bearing content type.
std::vector<WarcRecord> filter_responses(const std::vector<WarcRecord>& records);
bool is_html_response(const WarcRecord& record);

// HTTP message helpers for response payloads.
std::optional<std::string> http_content_type(std::string_view payload);
std::string_view http_body(std::string_view payload);
std::optional<std::string> charset_param(std::string_view content_type);

}  // namespace depcc
