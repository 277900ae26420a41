#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "depcc/conll.hpp"

namespace depcc {

enum class MatrixStage { counts, lmi, pruned, unit };

std::string_view to_string(MatrixStage stage);
MatrixStage matrix_stage_from_string(std::string_view name);

struct PruningConfig {
    std::size_t wpf = 1000;  // column bound: words kept per feature
    std::size_t fpw = 1000;  // row bound: features kept per word
};

enum class PruneOrder { column_then_row, row_then_column };

// Sparse word-by-feature matrix with explicit lifecycle stage. Marginals and
// N are fixed at the counts stage and carried through later stages.
class TermFeatureMatrix {
public:
    MatrixStage stage() const { return stage_; }
    double total() const { return total_; }
    std::size_t word_count() const { return words_.size(); }
    std::size_t feature_count() const { return features_.size(); }
    std::size_t nonzero_count() const;

    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::string>& features() const { return features_; }

    std::optional<std::size_t> word_index(std::string_view word) const;
    std::optional<std::size_t> feature_index(std::string_view feature) const;
    double word_marginal(std::size_t w) const { return word_marginals_[w]; }
    double feature_marginal(std::size_t f) const { return feature_marginals_[f]; }

    double cell(std::string_view word, std::string_view feature) const;

    // Row cells as (feature string, value), sorted by feature string.
    std::vector<std::pair<std::string, double>> row(std::string_view word) const;

    // Counts-stage mutation; marginals and N track the added mass.
    void add(std::string_view word, std::string_view feature, double count = 1.0);

    // Cell-wise addition of two counts-stage matrices.
    void merge(const TermFeatureMatrix& other);

    friend TermFeatureMatrix weight_lmi(TermFeatureMatrix m);
    friend TermFeatureMatrix prune(TermFeatureMatrix m, const PruningConfig& cfg,
                                   PruneOrder order);
    friend TermFeatureMatrix unit_normalize(TermFeatureMatrix m);
    friend std::optional<double> similarity(const TermFeatureMatrix& m,
                                            std::string_view w1, std::string_view w2);
    friend void save_matrix(const TermFeatureMatrix& m, const std::string& path);
    friend TermFeatureMatrix load_matrix(const std::string& path);

private:
    std::size_t intern_word(std::string_view word);
    std::size_t intern_feature(std::string_view feature);

    MatrixStage stage_ = MatrixStage::counts;
    double total_ = 0.0;
    std::vector<std::string> words_;
    std::vector<std::string> features_;
    std::unordered_map<std::string, std::size_t> word_ids_;
    std::unordered_map<std::string, std::size_t> feature_ids_;
    std::vector<double> word_marginals_;
    std::vector<double> feature_marginals_;
    std::vector<std::unordered_map<std::size_t, double>> rows_;
};

// Emits, per enhanced edge g -rel-> d, the pair (lemma(d), "rel(lemma(g),@)")
// and the pair (lemma(g), "rel(@,lemma(d))"), lemmas lowercased. Tokens with
// deps "_" only appear as the other endpoint; punct edges are skipped.
std::vector<std::pair<std::string, std::string>> extract_features(const ConllDocument& doc);

TermFeatureMatrix count(const std::vector<std::pair<std::string, std::string>>& pairs);

// value = c * log2(c*N / (row_marginal * col_marginal)); non-positive cells drop.
TermFeatureMatrix weight_lmi(TermFeatureMatrix m);

// Column pass keeps the wpf largest values per feature, then the row pass
// keeps the fpw largest per word; ties keep the lexicographically smaller
// word/feature string. The pass order is configurable but defaults pinned.
TermFeatureMatrix prune(TermFeatureMatrix m, const PruningConfig& cfg,
                        PruneOrder order = PruneOrder::column_then_row);

TermFeatureMatrix unit_normalize(TermFeatureMatrix m);

// Dot product of two unit rows; nullopt when either word is out of vocab.
std::optional<double> similarity(const TermFeatureMatrix& m, std::string_view w1,
                                 std::string_view w2);

// TSV "word<TAB>feature<TAB>value" sorted by (word, feature), with a
// "<path>.meta" sidecar recording stage and N. Doubles survive round-trip.
void save_matrix(const TermFeatureMatrix& m, const std::string& path);
TermFeatureMatrix load_matrix(const std::string& path);

}  // namespace depcc
