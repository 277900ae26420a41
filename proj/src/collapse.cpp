#include "depcc/collapse.hpp"

#include <vector>

#include "depcc/common.hpp"

namespace depcc {

namespace {

std::string edge(std::uint32_t head, std::string_view rel) {
    return std::to_string(head) + ":" + std::string(rel);
}

// The cc token naming a conjunction: nearest one before the conjunct,
// else the first cc dependent of the governor.
int find_cc(const std::vector<Token>& tokens, std::uint32_t governor, std::uint32_t conjunct) {
    int before = -1;
    int first = -1;
    for (const Token& t : tokens) {
        if (t.deprel != "cc" || t.head != governor || t.id == governor) continue;
        if (first < 0) first = static_cast<int>(t.id);
        if (t.id < conjunct) before = static_cast<int>(t.id);
    }
    return before >= 0 ? before : first;
}

}  // namespace

Sentence collapse_sentence(const Sentence& sentence, const CollapseRules& rules) {
    Sentence out = sentence;
    const std::size_t n = out.tokens.size();
    std::vector<std::string> deps(n);
    std::vector<bool> consumed(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const Token& t = out.tokens[i];
        if (t.deprel == "_") {
            deps[i] = "_";
            continue;
        }
        deps[i] = edge(t.head, t.deprel);

        if (rules.prep && t.deprel == "pobj" && t.head != t.id) {
            const Token& prep = out.tokens[t.head];
            if (prep.deprel == "prep") {
                deps[i] = edge(prep.head, "prep_" + to_lower_ascii(prep.lemma));
                consumed[prep.id] = true;
            }
        }
        if (rules.conj && t.deprel == "conj" && t.head != t.id) {
            int cc = find_cc(out.tokens, t.head, t.id);
            if (cc >= 0) {
                deps[i] = edge(t.head, "conj_" + to_lower_ascii(out.tokens[cc].lemma));
                consumed[cc] = true;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        out.tokens[i].deps = consumed[i] ? "_" : deps[i];
    }
    return out;
}

ConllDocument collapse_document(const ConllDocument& doc, const CollapseRules& rules) {
    ConllDocument out = doc;
    for (Sentence& sentence : out.sentences) {
        sentence = collapse_sentence(sentence, rules);
    }
    return out;
}

}  // namespace depcc
