#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace depcc {

class GzipError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool looks_gzip(std::string_view head) {
    return head.size() >= 2 && static_cast<unsigned char>(head[0]) == 0x1f &&
           static_cast<unsigned char>(head[1]) == 0x8b;
}

std::string gzip_compress(std::string_view data);

// Inflates every concatenated gzip member in the buffer.
std::string gzip_decompress(std::string_view data);

// Pull-based inflater over an istream; transparently crosses member
// boundaries, so a file of per-record members reads as one byte stream.
class InflatingReader {
public:
    explicit InflatingReader(std::istream& in);
    ~InflatingReader();
    InflatingReader(const InflatingReader&) = delete;
    InflatingReader& operator=(const InflatingReader&) = delete;

    // Returns bytes read; 0 means clean end of stream. Throws GzipError.
    std::size_t read(char* buf, std::size_t n);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Writes one gzip member with a fixed header (no timestamp), so repeated
// runs over identical input produce identical bytes.
class GzipWriter {
public:
    explicit GzipWriter(std::ostream& out);
    ~GzipWriter();
    GzipWriter(const GzipWriter&) = delete;
    GzipWriter& operator=(const GzipWriter&) = delete;

    void write(std::string_view data);
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace depcc
