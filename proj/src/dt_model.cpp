#include "depcc/dt_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "depcc/common.hpp"

namespace depcc {

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_stage(const TermFeatureMatrix& m, MatrixStage expected, const char* op) {
    if (m.stage() != expected) {
        throw std::logic_error(std::string(op) + " requires stage " +
                               std::string(to_string(expected)) + ", matrix is " +
                               std::string(to_string(m.stage())));
    }
}

}  // namespace

std::string_view to_string(MatrixStage stage) {
    switch (stage) {
        case MatrixStage::counts: return "counts";
        case MatrixStage::lmi: return "lmi";
        case MatrixStage::pruned: return "pruned";
        case MatrixStage::unit: return "unit";
    }
    return "counts";
}

MatrixStage matrix_stage_from_string(std::string_view name) {
    if (name == "counts") return MatrixStage::counts;
    if (name == "lmi") return MatrixStage::lmi;
    if (name == "pruned") return MatrixStage::pruned;
    if (name == "unit") return MatrixStage::unit;
    throw std::invalid_argument("unknown matrix stage: " + std::string(name));
}

std::size_t TermFeatureMatrix::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) n += row.size();
    return n;
}

std::optional<std::size_t> TermFeatureMatrix::word_index(std::string_view word) const {
    auto it = word_ids_.find(std::string(word));
    if (it == word_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> TermFeatureMatrix::feature_index(std::string_view feature) const {
    auto it = feature_ids_.find(std::string(feature));
    if (it == feature_ids_.end()) return std::nullopt;
    return it->second;
}

double TermFeatureMatrix::cell(std::string_view word, std::string_view feature) const {
    auto w = word_index(word);
    auto f = feature_index(feature);
    if (!w || !f) return 0.0;
    auto it = rows_[*w].find(*f);
    return it == rows_[*w].end() ? 0.0 : it->second;
}

std::vector<std::pair<std::string, double>> TermFeatureMatrix::row(
    std::string_view word) const {
    std::vector<std::pair<std::string, double>> out;
    auto w = word_index(word);
    if (!w) return out;
    for (const auto& [f, v] : rows_[*w]) out.emplace_back(features_[f], v);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t TermFeatureMatrix::intern_word(std::string_view word) {
    auto [it, fresh] = word_ids_.try_emplace(std::string(word), words_.size());
    if (fresh) {
        words_.emplace_back(word);
        word_marginals_.push_back(0.0);
        rows_.emplace_back();
    }
    return it->second;
}

std::size_t TermFeatureMatrix::intern_feature(std::string_view feature) {
    auto [it, fresh] = feature_ids_.try_emplace(std::string(feature), features_.size());
    if (fresh) {
        features_.emplace_back(feature);
        feature_marginals_.push_back(0.0);
    }
    return it->second;
}

void TermFeatureMatrix::add(std::string_view word, std::string_view feature,
                            double count) {
    require_stage(*this, MatrixStage::counts, "add");
    std::size_t w = intern_word(word);
    std::size_t f = intern_feature(feature);
    rows_[w][f] += count;
    word_marginals_[w] += count;
    feature_marginals_[f] += count;
    total_ += count;
}

void TermFeatureMatrix::merge(const TermFeatureMatrix& other) {
    require_stage(*this, MatrixStage::counts, "merge");
    require_stage(other, MatrixStage::counts, "merge");
    for (std::size_t w = 0; w < other.rows_.size(); ++w) {
        for (const auto& [f, v] : other.rows_[w]) {
            add(other.words_[w], other.features_[f], v);
        }
    }
}

std::vector<std::pair<std::string, std::string>> extract_features(
    const ConllDocument& doc) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const Sentence& sentence : doc.sentences) {
        for (const Token& token : sentence.tokens) {
            if (token.deps == "_") continue;
            std::size_t colon = token.deps.find(':');
            if (colon == std::string::npos) continue;
            std::size_t head = 0;
            try {
                head = std::stoull(token.deps.substr(0, colon));
            } catch (const std::exception&) {
                continue;
            }
            if (head >= sentence.tokens.size()) continue;
            std::string rel = token.deps.substr(colon + 1);
            if (rel.empty() || rel == "punct") continue;
            std::string dep_lemma = to_lower_ascii(token.lemma);
            std::string gov_lemma = to_lower_ascii(sentence.tokens[head].lemma);
            pairs.emplace_back(dep_lemma, rel + "(" + gov_lemma + ",@)");
            pairs.emplace_back(gov_lemma, rel + "(@," + dep_lemma + ")");
        }
    }
    return pairs;
}

TermFeatureMatrix count(const std::vector<std::pair<std::string, std::string>>& pairs) {
    TermFeatureMatrix m;
    for (const auto& [word, feature] : pairs) m.add(word, feature);
    return m;
}

TermFeatureMatrix weight_lmi(TermFeatureMatrix m) {
    require_stage(m, MatrixStage::counts, "weight_lmi");
    for (std::size_t w = 0; w < m.rows_.size(); ++w) {
        auto& row = m.rows_[w];
        for (auto it = row.begin(); it != row.end();) {
            const double c = it->second;
            const double denom = m.word_marginals_[w] * m.feature_marginals_[it->first];
            const double lmi = c * std::log2(c * m.total_ / denom);
            if (lmi > 0.0) {
                it->second = lmi;
                ++it;
            } else {
                it = row.erase(it);
            }
        }
    }
    m.stage_ = MatrixStage::lmi;
    return m;
}

TermFeatureMatrix prune(TermFeatureMatrix m, const PruningConfig& cfg, PruneOrder order) {
    require_stage(m, MatrixStage::lmi, "prune");
    if (cfg.wpf < 1 || cfg.fpw < 1) throw std::invalid_argument("wpf and fpw must be >= 1");

    // Keeps the `keep` largest entries; ties keep the smaller label.
    auto top = [](std::vector<std::pair<std::size_t, double>>& entries,
                  const std::vector<std::string>& labels, std::size_t keep) {
        std::sort(entries.begin(), entries.end(),
                  [&labels](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return labels[a.first] < labels[b.first];
                  });
        if (entries.size() > keep) entries.resize(keep);
    };

    auto column_pass = [&] {
        std::vector<std::vector<std::pair<std::size_t, double>>> columns(
            m.features_.size());
        for (std::size_t w = 0; w < m.rows_.size(); ++w) {
            for (const auto& [f, v] : m.rows_[w]) columns[f].emplace_back(w, v);
        }
        for (auto& row : m.rows_) row.clear();
        for (std::size_t f = 0; f < columns.size(); ++f) {
            top(columns[f], m.words_, cfg.wpf);
            for (const auto& [w, v] : columns[f]) m.rows_[w].emplace(f, v);
        }
    };

    auto row_pass = [&] {
        for (auto& row : m.rows_) {
            std::vector<std::pair<std::size_t, double>> entries(row.begin(), row.end());
            top(entries, m.features_, cfg.fpw);
            row.clear();
            row.insert(entries.begin(), entries.end());
        }
    };

    if (order == PruneOrder::column_then_row) {
        column_pass();
        row_pass();
    } else {
        row_pass();
        column_pass();
    }
    m.stage_ = MatrixStage::pruned;
    return m;
}

TermFeatureMatrix unit_normalize(TermFeatureMatrix m) {
    require_stage(m, MatrixStage::pruned, "unit_normalize");
    for (auto& row : m.rows_) {
        double sum = 0.0;
        for (const auto& [f, v] : row) sum += v * v;
        if (sum <= 0.0) continue;
        const double norm = std::sqrt(sum);
        for (auto& [f, v] : row) v /= norm;
    }
    m.stage_ = MatrixStage::unit;
    return m;
}

std::optional<double> similarity(const TermFeatureMatrix& m, std::string_view w1,
                                 std::string_view w2) {
    auto a = m.word_index(w1);
    auto b = m.word_index(w2);
    if (!a || !b) return std::nullopt;
    const auto& row_a = m.rows_[*a];
    const auto& row_b = m.rows_[*b];
    const auto& small = row_a.size() <= row_b.size() ? row_a : row_b;
    const auto& large = row_a.size() <= row_b.size() ? row_b : row_a;
    double dot = 0.0;
    for (const auto& [f, v] : small) {
        auto it = large.find(f);
        if (it != large.end()) dot += v * it->second;
    }
    return dot;
}

void save_matrix(const TermFeatureMatrix& m, const std::string& path) {
    std::vector<std::size_t> word_order(m.words_.size());
    for (std::size_t i = 0; i < word_order.size(); ++i) word_order[i] = i;
    std::sort(word_order.begin(), word_order.end(), [&m](std::size_t a, std::size_t b) {
        return m.words_[a] < m.words_[b];
    });

    std::string out;
    for (std::size_t w : word_order) {
        std::vector<std::pair<std::size_t, double>> cells(m.rows_[w].begin(),
                                                          m.rows_[w].end());
        std::sort(cells.begin(), cells.end(), [&m](const auto& a, const auto& b) {
            return m.features_[a.first] < m.features_[b.first];
        });
        for (const auto& [f, v] : cells) {
            out += m.words_[w];
            out.push_back('\t');
            out += m.features_[f];
            out.push_back('\t');
            out += format_value(v);
            out.push_back('\n');
        }
    }
    write_file(path, out);

    std::string meta;
    meta += "stage\t" + std::string(to_string(m.stage_)) + "\n";
    meta += "total\t" + format_value(m.total_) + "\n";
    write_file(path + ".meta", meta);
}

TermFeatureMatrix load_matrix(const std::string& path) {
    TermFeatureMatrix m;
    MatrixStage stage = MatrixStage::counts;
    double total = 0.0;
    bool have_stage = false;
    const std::string meta = read_file(path + ".meta");
    for (std::string_view line : split(meta, '\n')) {
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 2) throw IoFailure("malformed matrix meta line in " + path);
        if (cols[0] == "stage") {
            stage = matrix_stage_from_string(cols[1]);
            have_stage = true;
        } else if (cols[0] == "total") {
            total = std::stod(std::string(cols[1]));
        }
    }
    if (!have_stage) throw IoFailure("matrix meta missing stage: " + path);

    const std::string content = read_file(path);
    for (std::string_view line : split(content, '\n')) {
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (cols.size() != 3) throw IoFailure("malformed matrix line in " + path);
        double v = std::stod(std::string(cols[2]));
        std::size_t w = m.intern_word(cols[0]);
        std::size_t f = m.intern_feature(cols[1]);
        m.rows_[w][f] = v;
        if (stage == MatrixStage::counts) {
            m.word_marginals_[w] += v;
            m.feature_marginals_[f] += v;
            m.total_ += v;
        }
    }
    m.stage_ = stage;
    if (stage != MatrixStage::counts) m.total_ = total;

    if (stage == MatrixStage::unit) {
        for (const auto& row : m.rows_) {
            double sum = 0.0;
            for (const auto& [f, v] : row) sum += v * v;
            if (!row.empty() && std::abs(std::sqrt(sum) - 1.0) > 1e-9) {
                throw IoFailure("unit-stage matrix row norm violated in " + path);
            }
        }
    }
    return m;
}

}  // namespace depcc
