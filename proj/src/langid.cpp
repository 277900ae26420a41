#include "depcc/langid.hpp"

#include <algorithm>
#include <filesystem>
#include <mutex>

#include "depcc/common.hpp"

namespace depcc {

namespace {

bool is_letter(char32_t cp) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
    // Latin-1 supplement through Latin Extended-B letters.
    if (cp >= 0x00C0 && cp <= 0x024F) return cp != 0x00D7 && cp != 0x00F7;
    return false;
}

char32_t lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
    return cp;
}

// Words as runs of letters, lowercased, '_'-padded. "the" -> "_the_".
std::vector<std::string> padded_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current = "_";
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = decode_utf8(text, pos);
        if (is_letter(cp)) {
            append_utf8(current, lower(cp));
        } else if (current.size() > 1) {
            current.push_back('_');
            words.push_back(std::move(current));
            current = "_";
        }
    }
    if (current.size() > 1) {
        current.push_back('_');
        words.push_back(std::move(current));
    }
    return words;
}

// Codepoint-aligned n-grams of length 1..3 from one padded word.
void collect_ngrams(const std::string& word,
                    std::unordered_map<std::string, std::size_t>& counts) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if ((static_cast<unsigned char>(word[i]) & 0xC0) != 0x80) starts.push_back(i);
    }
    starts.push_back(word.size());
    const std::size_t n_cp = starts.size() - 1;
    for (std::size_t len = 1; len <= 3; ++len) {
        if (n_cp < len) break;
        for (std::size_t i = 0; i + len <= n_cp; ++i) {
            counts[word.substr(starts[i], starts[i + len] - starts[i])]++;
        }
    }
}

std::size_t alphabetic_count(std::string_view text) {
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (is_letter(decode_utf8(text, pos))) ++n;
    }
    return n;
}

}  // namespace

LanguageProfile build_profile(std::string_view text, std::string code,
                              std::size_t max_ngrams) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const std::string& word : padded_words(text)) collect_ngrams(word, counts);

    std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ordered.size() > max_ngrams) ordered.resize(max_ngrams);

    LanguageProfile profile;
    profile.code = std::move(code);
    profile.ngrams.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        profile.rank[ordered[i].first] = i;
        profile.ngrams.push_back(std::move(ordered[i].first));
    }
    return profile;
}

void save_profile(const LanguageProfile& profile, const std::string& path) {
    std::string out;
    for (std::size_t i = 0; i < profile.ngrams.size(); ++i) {
        out += std::to_string(i);
        out.push_back('\t');
        out += profile.ngrams[i];
        out.push_back('\n');
    }
    write_file(path, out);
}

LanguageProfile load_profile(const std::string& path) {
    LanguageProfile profile;
    profile.code = std::filesystem::path(path).stem().string();
    const std::string content = read_file(path);
    for (std::string_view line : split(content, '\n')) {
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw IoFailure("malformed profile line in " + path);
        }
        std::string ngram(line.substr(tab + 1));
        profile.rank[ngram] = profile.ngrams.size();
        profile.ngrams.push_back(std::move(ngram));
    }
    return profile;
}

void LanguageIdentifier::add(LanguageProfile profile) {
    profiles_.push_back(std::move(profile));
}

LanguageIdentifier LanguageIdentifier::from_directory(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".profile") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    LanguageIdentifier id;
    for (const std::string& path : paths) id.add(load_profile(path));
    return id;
}

LanguageGuess LanguageIdentifier::detect(std::string_view text) const {
    if (profiles_.empty() || alphabetic_count(text) < 20) return {};

    std::unordered_map<std::string, std::size_t> counts;
    for (const std::string& word : padded_words(text)) collect_ngrams(word, counts);
    LanguageProfile doc;
    {
        std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (ordered.size() > kProfileSize) ordered.resize(kProfileSize);
        for (auto& [ngram, count] : ordered) doc.ngrams.push_back(std::move(ngram));
    }
    if (doc.ngrams.empty()) return {};

    const double worst = static_cast<double>(doc.ngrams.size()) * kProfileSize;
    LanguageGuess best;
    for (const LanguageProfile& profile : profiles_) {
        std::size_t distance = 0;
        for (std::size_t i = 0; i < doc.ngrams.size(); ++i) {
            auto it = profile.rank.find(doc.ngrams[i]);
            if (it == profile.rank.end()) {
                distance += kProfileSize;
            } else {
                distance += i > it->second ? i - it->second : it->second - i;
            }
        }
        double confidence = 1.0 - static_cast<double>(distance) / worst;
        if (confidence > best.confidence ||
            (confidence == best.confidence && best.language == "und")) {
            best.language = profile.code;
            best.confidence = confidence;
        }
    }
    if (best.confidence < threshold_) return {};
    return best;
}

std::string default_profile_dir() {
#ifdef DEPCC_PROFILE_DIR
    return DEPCC_PROFILE_DIR;
#else
    return "data/profiles";
#endif
}

LanguageGuess detect_language(std::string_view text) {
    static std::once_flag once;
    static LanguageIdentifier identifier;
    std::call_once(once, [] {
        identifier = LanguageIdentifier::from_directory(default_profile_dir());
    });
    return identifier.detect(text);
}

}  // namespace depcc
