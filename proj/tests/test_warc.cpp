#include "depcc/warc.hpp"

#include <sstream>

#include "depcc/gzip.hpp"
#include "doctest.h"
#include "fixture_crawl.hpp"

using namespace depcc;

namespace {

std::vector<WarcRecord> read_string(const std::string& bytes,
                                    std::vector<std::string>* diagnostics = nullptr) {
    std::istringstream in(bytes);
    return read_warc(in, "test.warc", diagnostics);
}

}  // namespace

TEST_CASE("serialize and read round-trips every record") {
    std::vector<std::string> diagnostics;
    std::vector<WarcRecord> got = read_string(fixtures::crawl_warc_bytes(false), &diagnostics);

    REQUIRE(got.size() == 13);
    CHECK(diagnostics.empty());
    CHECK(got[0].record_type == WarcRecordType::warcinfo);
    CHECK(got[1].record_type == WarcRecordType::request);
    CHECK(got[12].record_type == WarcRecordType::response);
    CHECK(got[12].content_type == "text/plain");

    const std::vector<WarcRecord>& want = fixtures::crawl_records();
    for (std::size_t i = 0; i < want.size(); ++i) {
        const WarcRecord& r = got[i + 2];
        CAPTURE(i);
        CHECK(r.record_type == WarcRecordType::response);
        CHECK(r.target_uri == want[i].target_uri);
        CHECK(r.date == want[i].date);
        CHECK(r.payload == want[i].payload);
        CHECK(r.source_archive == "test.warc");
        // Responses report the HTTP payload's content type, not the WARC header's.
        CHECK(r.content_type == *http_content_type(r.payload));
    }
}

TEST_CASE("record offsets locate each record in the uncompressed stream") {
    const std::string bytes = fixtures::crawl_warc_bytes(false);
    std::vector<WarcRecord> got = read_string(bytes);
    REQUIRE(got.size() == 13);
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (i > 0) CHECK(got[i].record_offset > prev);
        prev = got[i].record_offset;
        CHECK(bytes.compare(got[i].record_offset, 8, "WARC/1.0") == 0);
    }
}

TEST_CASE("gzip-member archives read identically to plain ones") {
    const std::string compressed = fixtures::crawl_warc_bytes(true);
    REQUIRE(looks_gzip(compressed));
    std::vector<WarcRecord> plain = read_string(fixtures::crawl_warc_bytes(false));
    std::vector<WarcRecord> gz = read_string(compressed);

    REQUIRE(gz.size() == plain.size());
    for (std::size_t i = 0; i < gz.size(); ++i) {
        CHECK(gz[i].record_type == plain[i].record_type);
        CHECK(gz[i].target_uri == plain[i].target_uri);
        CHECK(gz[i].payload == plain[i].payload);
        CHECK(gz[i].record_offset == plain[i].record_offset);
    }
}

TEST_CASE("html response filter keeps only html-bearing responses") {
    std::vector<WarcRecord> all = read_string(fixtures::crawl_warc_bytes(false));
    std::vector<WarcRecord> responses = filter_responses(all);
    REQUIRE(responses.size() == 10);  // drops warcinfo, request, text/plain response
    for (const WarcRecord& r : responses) CHECK(r.record_type == WarcRecordType::response);
    CHECK(responses[0].target_uri == "http://en.example.org/garden");
    CHECK(responses[9].target_uri == "http://mirror.example.net/garden-copy");
}

TEST_CASE("is_html_response checks type and content type") {
    WarcRecord r;
    r.record_type = WarcRecordType::response;
    r.content_type = "text/html";
    CHECK(is_html_response(r));
    r.content_type = "text/html; charset=utf-8";
    CHECK(is_html_response(r));
    r.content_type = "TEXT/HTML; Charset=UTF-8";
    CHECK(is_html_response(r));
    r.content_type = "application/xhtml+xml";
    CHECK(is_html_response(r));
    r.content_type = "text/plain";
    CHECK(!is_html_response(r));
    r.content_type = "text/html";
    r.record_type = WarcRecordType::request;
    CHECK(!is_html_response(r));
}

TEST_CASE("malformed records are skipped and reading resumes") {
    const std::vector<WarcRecord>& docs = fixtures::crawl_records();
    std::string bytes = serialize_record(docs[0]);

    SUBCASE("junk between records") {
        bytes += "this is not a record\r\nneither is this\r\n\r\n";
        bytes += serialize_record(docs[1]);
    }
    SUBCASE("unparseable content length") {
        bytes += "WARC/1.0\r\nWARC-Type: metadata\r\nContent-Length: many\r\n\r\n";
        bytes += serialize_record(docs[1]);
    }
    SUBCASE("missing content length") {
        bytes += "WARC/1.0\r\nWARC-Type: metadata\r\n\r\n";
        bytes += serialize_record(docs[1]);
    }
    SUBCASE("response without target uri") {
        WarcRecord anon = docs[0];
        anon.target_uri.clear();
        bytes += serialize_record(anon);
        bytes += serialize_record(docs[1]);
    }

    std::vector<std::string> diagnostics;
    std::vector<WarcRecord> got = read_string(bytes, &diagnostics);
    REQUIRE(got.size() == 2);
    CHECK(got[0].target_uri == docs[0].target_uri);
    CHECK(got[1].target_uri == docs[1].target_uri);
    CHECK(!diagnostics.empty());
}

TEST_CASE("truncated trailing record is reported, earlier records survive") {
    const std::vector<WarcRecord>& docs = fixtures::crawl_records();
    std::string bytes = serialize_record(docs[0]);
    std::string tail = serialize_record(docs[1]);
    bytes += tail.substr(0, tail.size() / 2);

    std::vector<std::string> diagnostics;
    std::vector<WarcRecord> got = read_string(bytes, &diagnostics);
    REQUIRE(got.size() == 1);
    CHECK(got[0].target_uri == docs[0].target_uri);
    REQUIRE(!diagnostics.empty());
    CHECK(diagnostics.back().find("truncated") != std::string::npos);
}

TEST_CASE("stream that never was a warc throws NotWarc") {
    CHECK_THROWS_AS(read_string("HTTP/1.1 200 OK\r\n\r\nhello"), NotWarc);
}

TEST_CASE("framing loss beyond the resync window throws StreamCorrupt") {
    std::string bytes = serialize_record(fixtures::crawl_records()[0]);
    bytes += std::string(17u << 20, 'x');  // one endless junk line, no version mark
    CHECK_THROWS_AS(read_string(bytes), StreamCorrupt);
}

TEST_CASE("corrupt gzip member throws StreamCorrupt") {
    std::string a = gzip_compress(serialize_record(fixtures::crawl_records()[0]));
    std::string b = gzip_compress(serialize_record(fixtures::crawl_records()[1]));
    std::string bytes = a + b.substr(0, b.size() - 6);  // chop the member trailer

    std::istringstream in(bytes);
    WarcReader reader(in, "test.warc");
    CHECK(reader.next().has_value());
    CHECK_THROWS_AS(
        {
            while (reader.next()) {
            }
        },
        StreamCorrupt);
}

TEST_CASE("http helpers pull apart response payloads") {
    const std::string payload =
        "HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=ISO-8859-1\r\n"
        "Server: x\r\n\r\n<html>body</html>";
    CHECK(*http_content_type(payload) == "text/html; charset=ISO-8859-1");
    CHECK(http_body(payload) == "<html>body</html>");

    CHECK(!http_content_type("<html>no http here</html>").has_value());
    CHECK(http_body("<html>no http here</html>") == "<html>no http here</html>");
    CHECK(http_body("HTTP/1.0 200 OK\nContent-Type: text/html\n\nlf only") == "lf only");
}

TEST_CASE("charset parameter parses quoted, cased and missing forms") {
    CHECK(*charset_param("text/html; charset=UTF-8") == "utf-8");
    CHECK(*charset_param("text/html; charset=\"Windows-1252\"") == "windows-1252");
    CHECK(*charset_param("text/html;charset=iso-8859-1; boundary=x") == "iso-8859-1");
    CHECK(!charset_param("text/html").has_value());
    CHECK(!charset_param("text/html; charset=").has_value());
}
