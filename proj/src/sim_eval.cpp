#include "depcc/sim_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>

#include "depcc/common.hpp"

namespace depcc {

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&values](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

bool constant(const std::vector<double>& v) {
    for (double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

SplitTag split_from_string(std::string_view s, const std::string& path) {
    if (s == "dev") return SplitTag::dev;
    if (s == "test") return SplitTag::test;
    if (s == "all") return SplitTag::all;
    throw FormatError("unknown split tag '" + std::string(s) + "' in " + path);
}

double parse_score(std::string_view field, const std::string& path) {
    try {
        std::size_t used = 0;
        std::string s(field);
        double v = std::stod(s, &used);
        if (used != s.size()) throw FormatError("trailing junk in score in " + path);
        return v;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception&) {
        throw FormatError("unparsable score '" + std::string(field) + "' in " + path);
    }
}

std::string pair_key(const ScoredPair& p) {
    const std::string& a = p.word1 <= p.word2 ? p.word1 : p.word2;
    const std::string& b = p.word1 <= p.word2 ? p.word2 : p.word1;
    return a + "\t" + b + "\t" + std::string(to_string(p.split));
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string_view to_string(SplitTag split) {
    switch (split) {
        case SplitTag::dev: return "dev";
        case SplitTag::test: return "test";
        case SplitTag::all: return "all";
    }
    return "all";
}

bool SimilarityDataset::has_splits() const {
    for (const ScoredPair& p : pairs) {
        if (p.split != SplitTag::all) return true;
    }
    return false;
}

SimilarityDataset load_dataset(const std::string& path, DatasetFormat format) {
    SimilarityDataset dataset;
    dataset.name = std::filesystem::path(path).stem().string();

    const std::string content = read_file(path);
    std::size_t lineno = 0;
    for (std::string_view line : split(content, '\n')) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> cols = split(line, '\t');
        if (format == DatasetFormat::simlex) {
            if (lineno == 1 && cols.size() > 1 && cols[0] == "word1") continue;  // header
            if (cols.size() < 4) {
                throw FormatError("expected >= 4 columns at " + path + ":" +
                                  std::to_string(lineno));
            }
            if (cols[2] != "V") continue;
            ScoredPair p;
            p.word1 = std::string(cols[0]);
            p.word2 = std::string(cols[1]);
            p.gold = parse_score(cols[3], path);
            p.split = SplitTag::all;
            dataset.pairs.push_back(std::move(p));
        } else {
            if (cols.size() != 5 && cols.size() != 6) {
                throw FormatError("expected 5 or 6 columns at " + path + ":" +
                                  std::to_string(lineno));
            }
            ScoredPair p;
            p.word1 = std::string(cols[0]);
            p.word2 = std::string(cols[1]);
            p.gold = parse_score(cols[3], path);
            p.split = cols.size() == 6 ? split_from_string(cols[5], path) : SplitTag::all;
            dataset.pairs.push_back(std::move(p));
        }
        const ScoredPair& p = dataset.pairs.back();
        if (p.gold < 0.0 || p.gold > 10.0) {
            throw FormatError("score out of the 0-10 scale at " + path + ":" +
                              std::to_string(lineno));
        }
    }
    if (dataset.pairs.empty()) {
        throw FormatError("no usable pairs in " + path);
    }

    std::set<std::string> seen;
    for (const ScoredPair& p : dataset.pairs) {
        if (!seen.insert(pair_key(p)).second) {
            throw FormatError("duplicate pair " + p.word1 + "/" + p.word2 + " in " + path);
        }
    }
    return dataset;
}

double spearman(const std::vector<double>& gold, const std::vector<double>& predicted) {
    if (gold.size() != predicted.size()) {
        throw std::invalid_argument("spearman inputs differ in length");
    }
    if (gold.size() < 2) throw DegenerateInput("spearman needs at least 2 pairs");
    if (constant(gold)) throw DegenerateInput("all gold values identical");
    if (constant(predicted)) throw DegenerateInput("all predicted values identical");
    return pearson(average_ranks(gold), average_ranks(predicted));
}

EvalReport evaluate(const TermFeatureMatrix& model,
                    const std::vector<SimilarityDataset>& datasets, OovPolicy policy) {
    if (model.stage() != MatrixStage::unit) {
        throw std::invalid_argument("evaluate needs a unit-stage model, got stage '" +
                                    std::string(to_string(model.stage())) + "'");
    }
    EvalReport report;
    for (const SimilarityDataset& dataset : datasets) {
        std::vector<SplitTag> splits = {SplitTag::all};
        if (dataset.has_splits()) {
            splits.push_back(SplitTag::dev);
            splits.push_back(SplitTag::test);
        }
        for (SplitTag split : splits) {
            SplitReport row;
            row.dataset = dataset.name;
            row.split = std::string(to_string(split));

            std::vector<double> gold;
            std::vector<double> predicted;
            std::size_t covered = 0;
            std::size_t total = 0;
            for (const ScoredPair& p : dataset.pairs) {
                if (split != SplitTag::all && p.split != split) continue;
                ++total;
                std::optional<double> sim = similarity(model, p.word1, p.word2);
                if (sim) ++covered;
                if (!sim && policy == OovPolicy::exclude) continue;
                gold.push_back(p.gold);
                predicted.push_back(sim.value_or(0.0));
            }
            row.pairs = total;
            row.coverage = total > 0 ? static_cast<double>(covered) / total : 0.0;
            try {
                row.spearman = spearman(gold, predicted);
            } catch (const DegenerateInput&) {
                row.spearman = std::nullopt;
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string EvalReport::table() const {
    std::vector<std::array<std::string, 5>> cells;
    cells.push_back({"dataset", "split", "pairs", "coverage", "spearman"});
    for (const SplitReport& row : rows) {
        cells.push_back({row.dataset, row.split, std::to_string(row.pairs),
                         format_fixed(row.coverage, 3),
                         row.spearman ? format_fixed(*row.spearman, 4) : "degenerate"});
    }
    std::array<std::size_t, 5> widths = {};
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < 5; ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < 5; ++i) {
            out += row[i];
            if (i + 1 < 5) out.append(widths[i] - row[i].size() + 2, ' ');
        }
        out.push_back('\n');
    }
    return out;
}

std::string EvalReport::tsv() const {
    std::string out = "dataset\tsplit\tpairs\tcoverage\tspearman\n";
    for (const SplitReport& row : rows) {
        out += row.dataset;
        out.push_back('\t');
        out += row.split;
        out.push_back('\t');
        out += std::to_string(row.pairs);
        out.push_back('\t');
        out += format_fixed(row.coverage, 6);
        out.push_back('\t');
        out += row.spearman ? format_fixed(*row.spearman, 6) : "NA";
        out.push_back('\n');
    }
    return out;
}

}  // namespace depcc
