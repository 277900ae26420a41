#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "depcc/dt_model.hpp"

namespace depcc {

enum class DatasetFormat { simverb, simlex };
enum class SplitTag { dev, test, all };

std::string_view to_string(SplitTag split);

struct ScoredPair {
    std::string word1;
    std::string word2;
    double gold = 0.0;
    SplitTag split = SplitTag::all;
};

struct SimilarityDataset {
    std::string name;
    std::vector<ScoredPair> pairs;
    bool has_splits() const;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// simverb: "word1 TAB word2 TAB POS TAB score TAB relation" with an optional
// sixth column tagging the split (dev or test; the published release ships
// the splits as separate files, so a missing tag means "all").
// simlex: published 10-column layout with a header row; keeps POS "V" rows.
SimilarityDataset load_dataset(const std::string& path, DatasetFormat format);

// Pearson correlation of average ranks; ties get the mean of their rank
// range. Throws DegenerateInput when either side is constant or n < 2.
double spearman(const std::vector<double>& gold, const std::vector<double>& predicted);

enum class OovPolicy { score_zero, exclude };

struct SplitReport {
    std::string dataset;
    std::string split;
    std::size_t pairs = 0;
    double coverage = 0.0;                // fraction with both words in vocab
    std::optional<double> spearman;       // nullopt when degenerate
};

struct EvalReport {
    std::vector<SplitReport> rows;
    std::string table() const;  // aligned, human-oriented
    std::string tsv() const;    // dataset, split, pairs, coverage, spearman
};

EvalReport evaluate(const TermFeatureMatrix& model,
                    const std::vector<SimilarityDataset>& datasets,
                    OovPolicy policy = OovPolicy::score_zero);

}  // namespace depcc
