#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace depcc {

inline constexpr std::size_t kProfileSize = 300;

// Rank-ordered character n-gram profile, most frequent first.
struct LanguageProfile {
    std::string code;
    std::vector<std::string> ngrams;                     // index = rank
    std::unordered_map<std::string, std::size_t> rank;  // ngram -> rank
};

// Character 1..3-grams over '_'-padded words, lowercased; rank ties break
// toward the lexicographically smaller n-gram so profiles are reproducible.
LanguageProfile build_profile(std::string_view text, std::string code,
                              std::size_t max_ngrams = kProfileSize);

// Profile files are "rank<TAB>ngram" lines in rank order.
void save_profile(const LanguageProfile& profile, const std::string& path);
LanguageProfile load_profile(const std::string& path);

struct LanguageGuess {
    std::string language = "und";
    double confidence = 0.0;
};

class LanguageIdentifier {
public:
    void add(LanguageProfile profile);

    // Loads every *.profile in dir; the filename stem is the language code.
    static LanguageIdentifier from_directory(const std::string& dir);

    // Nearest profile by rank-order distance. Returns ("und", 0) when the
    // text has fewer than 20 alphabetic characters or no profile clears the
    // confidence threshold.
    LanguageGuess detect(std::string_view text) const;

    double threshold() const { return threshold_; }
    void set_threshold(double t) { threshold_ = t; }
    std::size_t size() const { return profiles_.size(); }

private:
    std::vector<LanguageProfile> profiles_;
    double threshold_ = 0.45;
};

// Profiles shipped with the source tree; config may point elsewhere.
std::string default_profile_dir();

// Convenience wrapper over a lazily loaded identifier for the default dir.
LanguageGuess detect_language(std::string_view text);

}  // namespace depcc
