#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace depcc {

// A cleaned text document flowing from extraction into dedup.
struct Document {
    std::string url;
    std::string source;  // archive provenance for the output "s3" header
    std::string text;    // tag-free, entities decoded, paragraphs newline-separated
    std::string language = "und";
    std::string fetch_date;
};

// One rendering block with the fraction of its characters inside links.
struct TextBlock {
    std::string text;
    double link_density = 0.0;
};

// Decodes payload bytes to UTF-8. Charset resolution order: declared,
// then meta tag, then UTF-8 with replacement of invalid sequences.
std::string decode_payload(std::string_view payload,
                           const std::optional<std::string>& declared_charset);

std::vector<TextBlock> extract_blocks(std::string_view payload,
                                      const std::optional<std::string>& declared_charset = {});

// All blocks joined by newlines, no boilerplate filtering.
std::string strip_html(std::string_view payload,
                       const std::optional<std::string>& declared_charset = {});

struct BoilerplateConfig {
    double max_link_density = 0.33;
    std::size_t min_words = 5;
};

// Drops menu-like blocks (too heavily linked or too short), keeps the rest.
std::string remove_boilerplate(const std::vector<TextBlock>& blocks,
                               const BoilerplateConfig& config = {});

// TSV columns url, source, language, fetch_date, text with backslash
// escapes for tab/newline/return, so documents survive the round trip.
void save_documents(const std::vector<Document>& docs, const std::string& path);
std::vector<Document> load_documents(const std::string& path);

}  // namespace depcc
