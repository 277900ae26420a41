#include "depcc/text_extract.hpp"

#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "depcc/common.hpp"

namespace depcc {

namespace {

// Windows-1252 printable range 0x80..0x9F; 0 marks undefined slots.
constexpr std::array<char16_t, 32> kCp1252 = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

enum class Charset { utf8, latin1, cp1252 };

Charset charset_from_name(std::string_view name) {
    std::string n = to_lower_ascii(name);
    if (n == "iso-8859-1" || n == "latin1" || n == "latin-1" || n == "iso8859-1") {
        return Charset::latin1;
    }
    if (n == "windows-1252" || n == "cp1252") return Charset::cp1252;
    return Charset::utf8;  // utf-8, us-ascii, anything unknown
}

std::string decode_single_byte(std::string_view payload, Charset cs) {
    std::string out;
    out.reserve(payload.size());
    for (unsigned char c : payload) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (cs == Charset::cp1252 && c < 0xA0) {
            char16_t cp = kCp1252[c - 0x80];
            append_utf8(out, cp ? cp : 0xFFFD);
        } else {
            append_utf8(out, c);
        }
    }
    return out;
}

std::string validate_utf8(std::string_view payload) {
    std::string out;
    out.reserve(payload.size());
    std::size_t pos = 0;
    while (pos < payload.size()) {
        append_utf8(out, decode_utf8(payload, pos));
    }
    return out;
}

// Looks for a charset= declaration in the head of the raw bytes.
std::optional<std::string> meta_charset(std::string_view payload) {
    std::string head = to_lower_ascii(payload.substr(0, std::min<std::size_t>(payload.size(), 2048)));
    std::size_t pos = head.find("charset");
    while (pos != std::string::npos) {
        std::size_t i = pos + 7;
        while (i < head.size() && (is_ascii_space(head[i]))) ++i;
        if (i < head.size() && head[i] == '=') {
            ++i;
            while (i < head.size() && (is_ascii_space(head[i]) || head[i] == '"' || head[i] == '\'')) ++i;
            std::size_t start = i;
            while (i < head.size() && (std::isalnum(static_cast<unsigned char>(head[i])) ||
                                       head[i] == '-' || head[i] == '_')) {
                ++i;
            }
            if (i > start) return head.substr(start, i - start);
        }
        pos = head.find("charset", pos + 7);
    }
    return std::nullopt;
}

const std::unordered_map<std::string, char32_t>& named_entities() {
    static const std::unordered_map<std::string, char32_t> table = {
        {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
        {"apos", '\''},    {"nbsp", ' '},     {"mdash", 0x2014}, {"ndash", 0x2013},
        {"hellip", 0x2026},{"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C},
        {"rdquo", 0x201D}, {"copy", 0x00A9},  {"reg", 0x00AE},   {"trade", 0x2122},
        {"deg", 0x00B0},   {"plusmn", 0x00B1},{"times", 0x00D7}, {"divide", 0x00F7},
        {"laquo", 0x00AB}, {"raquo", 0x00BB}, {"middot", 0x00B7},{"bull", 0x2022},
        {"sect", 0x00A7},  {"para", 0x00B6},  {"eacute", 0x00E9},{"egrave", 0x00E8},
        {"agrave", 0x00E0},{"uuml", 0x00FC},  {"ouml", 0x00F6},  {"auml", 0x00E4},
        {"szlig", 0x00DF}, {"ccedil", 0x00E7},{"ntilde", 0x00F1},{"euro", 0x20AC},
        {"pound", 0x00A3}, {"cent", 0x00A2},  {"yen", 0x00A5}};
    return table;
}

// Decodes the entity starting after '&'; returns codepoint and length
// consumed including the ';', or nullopt to keep the '&' literal.
std::optional<std::pair<char32_t, std::size_t>> decode_entity(std::string_view rest) {
    std::size_t semi = rest.find(';');
    if (semi == std::string_view::npos || semi == 0 || semi > 10) return std::nullopt;
    std::string_view name = rest.substr(0, semi);
    if (name[0] == '#') {
        char32_t cp = 0;
        bool ok = false;
        if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
            for (char c : name.substr(2)) {
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else return std::nullopt;
                cp = cp * 16 + d;
                ok = true;
            }
        } else {
            for (char c : name.substr(1)) {
                if (c < '0' || c > '9') return std::nullopt;
                cp = cp * 10 + (c - '0');
                ok = true;
            }
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
        return std::make_pair(cp, semi + 1);
    }
    auto it = named_entities().find(std::string(name));
    if (it == named_entities().end()) return std::nullopt;
    return std::make_pair(it->second, semi + 1);
}

const std::unordered_set<std::string>& block_tags() {
    static const std::unordered_set<std::string> tags = {
        "address", "article", "aside", "blockquote", "body", "br", "caption", "dd",
        "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer", "form",
        "h1", "h2", "h3", "h4", "h5", "h6", "head", "header", "hr", "html", "iframe",
        "li", "main", "menu", "meta", "nav", "ol", "option", "p", "pre", "section",
        "select", "table", "tbody", "td", "tfoot", "th", "thead", "title", "tr", "ul"};
    return tags;
}

const std::unordered_set<std::string>& drop_tags() {
    static const std::unordered_set<std::string> tags = {"script", "style", "noscript",
                                                         "template"};
    return tags;
}

struct BlockBuilder {
    std::vector<TextBlock> blocks;
    std::string text;
    std::size_t linked = 0;
    std::size_t total = 0;
    bool pending_space = false;

    void put(char32_t cp, bool in_link) {
        if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
            cp == '\v' || cp == 0x00A0) {
            pending_space = !text.empty();
            return;
        }
        if (pending_space) {
            text.push_back(' ');
            ++total;
            if (in_link) ++linked;  // collapsed space inside an anchor stays linked
            pending_space = false;
        }
        append_utf8(text, cp);
        ++total;
        if (in_link) ++linked;
    }

    void flush() {
        if (!text.empty()) {
            TextBlock block;
            block.text = std::move(text);
            block.link_density = total > 0 ? static_cast<double>(linked) / total : 0.0;
            blocks.push_back(std::move(block));
        }
        text.clear();
        linked = 0;
        total = 0;
        pending_space = false;
    }
};

// Finds the end of a tag, honoring quoted attribute values.
std::size_t find_tag_end(std::string_view html, std::size_t pos) {
    char quote = 0;
    while (pos < html.size()) {
        char c = html[pos];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return pos;
        }
        ++pos;
    }
    return std::string_view::npos;
}

std::string tag_name_at(std::string_view html, std::size_t pos) {
    std::string name;
    while (pos < html.size()) {
        char c = html[pos];
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) name.push_back(c);
        else if (c >= 'A' && c <= 'Z') name.push_back(static_cast<char>(c - 'A' + 'a'));
        else break;
        ++pos;
    }
    return name;
}

// Case-insensitive search for "</name" from pos.
std::size_t find_close_tag(std::string_view html, std::size_t pos, const std::string& name) {
    const std::string needle = "</" + name;
    while (pos + needle.size() <= html.size()) {
        std::size_t lt = html.find("</", pos);
        if (lt == std::string_view::npos) return std::string_view::npos;
        if (to_lower_ascii(html.substr(lt + 2, name.size())) == name) return lt;
        pos = lt + 2;
    }
    return std::string_view::npos;
}

}  // namespace

std::string decode_payload(std::string_view payload,
                           const std::optional<std::string>& declared_charset) {
    std::optional<std::string> name = declared_charset;
    if (!name) name = meta_charset(payload);
    Charset cs = name ? charset_from_name(*name) : Charset::utf8;
    if (cs == Charset::utf8) return validate_utf8(payload);
    return decode_single_byte(payload, cs);
}

std::vector<TextBlock> extract_blocks(std::string_view payload,
                                      const std::optional<std::string>& declared_charset) {
    const std::string html = decode_payload(payload, declared_charset);
    BlockBuilder builder;
    int link_depth = 0;
    std::size_t pos = 0;
    const std::string_view view(html);

    while (pos < view.size()) {
        char c = view[pos];
        if (c == '<') {
            if (view.substr(pos, 4) == "<!--") {
                std::size_t end = view.find("-->", pos + 4);
                pos = end == std::string_view::npos ? view.size() : end + 3;
                continue;
            }
            if (view.substr(pos, 9) == "<![CDATA[") {
                std::size_t end = view.find("]]>", pos + 9);
                pos = end == std::string_view::npos ? view.size() : end + 3;
                continue;
            }
            if (pos + 1 < view.size() && view[pos + 1] == '!') {  // doctype etc.
                std::size_t end = view.find('>', pos);
                pos = end == std::string_view::npos ? view.size() : end + 1;
                continue;
            }
            bool closing = pos + 1 < view.size() && view[pos + 1] == '/';
            std::string name = tag_name_at(view, pos + (closing ? 2 : 1));
            if (name.empty()) {  // stray '<', keep it as text
                builder.put('<', link_depth > 0);
                ++pos;
                continue;
            }
            std::size_t end = find_tag_end(view, pos);
            pos = end == std::string_view::npos ? view.size() : end + 1;
            if (!closing && drop_tags().count(name)) {
                std::size_t close = find_close_tag(view, pos, name);
                if (close == std::string_view::npos) {
                    pos = view.size();
                } else {
                    std::size_t close_end = find_tag_end(view, close);
                    pos = close_end == std::string_view::npos ? view.size() : close_end + 1;
                }
                continue;
            }
            if (name == "a") {
                if (closing) {
                    if (link_depth > 0) --link_depth;
                } else {
                    ++link_depth;
                }
            }
            if (block_tags().count(name)) builder.flush();
            continue;
        }
        if (c == '&') {
            if (auto entity = decode_entity(view.substr(pos + 1))) {
                builder.put(entity->first, link_depth > 0);
                pos += 1 + entity->second;
                continue;
            }
        }
        std::size_t at = pos;
        builder.put(decode_utf8(view, pos), link_depth > 0);
        if (pos == at) ++pos;  // safety against a stuck decoder
    }
    builder.flush();
    return builder.blocks;
}

std::string strip_html(std::string_view payload,
                       const std::optional<std::string>& declared_charset) {
    std::vector<TextBlock> blocks = extract_blocks(payload, declared_charset);
    std::string out;
    for (const TextBlock& block : blocks) {
        if (!out.empty()) out.push_back('\n');
        out += block.text;
    }
    return out;
}

std::string remove_boilerplate(const std::vector<TextBlock>& blocks,
                               const BoilerplateConfig& config) {
    std::string out;
    for (const TextBlock& block : blocks) {
        if (block.link_density > config.max_link_density) continue;
        if (split_ws(block.text).size() < config.min_words) continue;
        if (!out.empty()) out.push_back('\n');
        out += block.text;
    }
    return out;
}

namespace {

std::string escape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_field(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out.push_back(s[i]);
            continue;
        }
        ++i;
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: out.push_back(s[i]);
        }
    }
    return out;
}

}  // namespace

void save_documents(const std::vector<Document>& docs, const std::string& path) {
    std::string out;
    for (const Document& doc : docs) {
        out += escape_field(doc.url);
        out.push_back('\t');
        out += escape_field(doc.source);
        out.push_back('\t');
        out += escape_field(doc.language);
        out.push_back('\t');
        out += escape_field(doc.fetch_date);
        out.push_back('\t');
        out += escape_field(doc.text);
        out.push_back('\n');
    }
    write_file(path, out);
}

std::vector<Document> load_documents(const std::string& path) {
    std::vector<Document> docs;
    std::size_t lineno = 0;
    const std::string content = read_file(path);
    for (std::string_view line : split(content, '\n')) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 5) {
            throw IoFailure("expected 5 columns at " + path + ":" + std::to_string(lineno));
        }
        Document doc;
        doc.url = unescape_field(cols[0]);
        doc.source = unescape_field(cols[1]);
        doc.language = unescape_field(cols[2]);
        doc.fetch_date = unescape_field(cols[3]);
        doc.text = unescape_field(cols[4]);
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace depcc
