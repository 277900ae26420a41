#pragma once

#include "depcc/conll.hpp"

namespace depcc {

// Rule set for the DEPS column. Rules are data; both are on by default.
struct CollapseRules {
    bool prep = true;
    bool conj = true;
};

// Fills the DEPS column from the basic HEAD/DEPREL columns. The basic
// columns are never modified; re-running over the same basic columns
// always yields the same DEPS.
Sentence collapse_sentence(const Sentence& sentence, const CollapseRules& rules = {});

ConllDocument collapse_document(const ConllDocument& doc, const CollapseRules& rules = {});

}  // namespace depcc
