#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace depcc {

// 64-bit FNV-1a over raw bytes. The one hash used for fingerprints,
// feature votes and file checksums, so stored values are stable across runs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);

// Lowercase (ASCII), collapse whitespace runs to single spaces, trim.
std::string normalize_text(std::string_view s);

// Decodes the UTF-8 sequence at pos and advances it. Invalid bytes decode
// to U+FFFD and advance by one.
char32_t decode_utf8(std::string_view s, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

void put_varint(std::string& out, std::uint64_t v);
std::uint64_t get_varint(std::string_view in, std::size_t& pos);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace depcc
