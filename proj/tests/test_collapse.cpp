#include "depcc/collapse.hpp"

#include "doctest.h"

using namespace depcc;

namespace {

Token token(std::uint32_t id, std::string form, std::string lemma, std::uint32_t head,
            std::string deprel) {
    Token t;
    t.id = id;
    t.form = std::move(form);
    t.lemma = std::move(lemma);
    t.head = head;
    t.deprel = std::move(deprel);
    return t;
}

// "The museum was established in York ."
Sentence prep_sentence() {
    Sentence s;
    s.sent_id = "http://x/doc#0";
    s.text = "The museum was established in York.";
    s.tokens = {token(0, "The", "the", 1, "det"),
                token(1, "museum", "museum", 3, "nsubjpass"),
                token(2, "was", "be", 3, "auxpass"),
                token(3, "established", "establish", 3, "ROOT"),
                token(4, "in", "in", 3, "prep"),
                token(5, "York", "york", 4, "pobj"),
                token(6, ".", ".", 3, "punct")};
    return s;
}

// "Alice and Bob run ."
Sentence conj_sentence() {
    Sentence s;
    s.sent_id = "http://x/doc#0";
    s.text = "Alice and Bob run.";
    s.tokens = {token(0, "Alice", "alice", 3, "nsubj"),
                token(1, "and", "and", 0, "cc"),
                token(2, "Bob", "bob", 0, "conj"),
                token(3, "run", "run", 3, "ROOT"),
                token(4, ".", ".", 3, "punct")};
    return s;
}

}  // namespace

TEST_CASE("prepositions collapse into the dependent's edge") {
    Sentence out = collapse_sentence(prep_sentence());
    CHECK(out.tokens[0].deps == "1:det");
    CHECK(out.tokens[3].deps == "3:ROOT");
    CHECK(out.tokens[4].deps == "_");          // the preposition is consumed
    CHECK(out.tokens[5].deps == "3:prep_in");  // pobj re-attached to the governor
    CHECK(out.tokens[6].deps == "3:punct");
}

TEST_CASE("conjunctions collapse into the conjunct's edge") {
    Sentence out = collapse_sentence(conj_sentence());
    CHECK(out.tokens[0].deps == "3:nsubj");
    CHECK(out.tokens[1].deps == "_");           // the cc token is consumed
    CHECK(out.tokens[2].deps == "0:conj_and");  // conjunct names its conjunction
}

TEST_CASE("preposition lemma is lowercased in the collapsed label") {
    Sentence s = prep_sentence();
    s.tokens[4].lemma = "In";
    CHECK(collapse_sentence(s).tokens[5].deps == "3:prep_in");
}

TEST_CASE("the nearest preceding cc names the conjunction") {
    // "Alice or Bob and Carol run." with both conjuncts on token 0.
    Sentence s;
    s.sent_id = "http://x/doc#0";
    s.tokens = {token(0, "Alice", "alice", 5, "nsubj"),
                token(1, "or", "or", 0, "cc"),
                token(2, "Bob", "bob", 0, "conj"),
                token(3, "and", "and", 0, "cc"),
                token(4, "Carol", "carol", 0, "conj"),
                token(5, "run", "run", 5, "ROOT")};
    Sentence out = collapse_sentence(s);
    CHECK(out.tokens[2].deps == "0:conj_or");
    CHECK(out.tokens[4].deps == "0:conj_and");
    CHECK(out.tokens[1].deps == "_");
    CHECK(out.tokens[3].deps == "_");
}

TEST_CASE("a conjunct before its only cc still collapses") {
    // Parser quirk: cc attached after the conjunct it introduces.
    Sentence s;
    s.sent_id = "http://x/doc#0";
    s.tokens = {token(0, "Bob", "bob", 2, "conj"),
                token(1, "and", "and", 2, "cc"),
                token(2, "Alice", "alice", 2, "ROOT")};
    CHECK(collapse_sentence(s).tokens[0].deps == "2:conj_and");
}

TEST_CASE("conjunct with no cc keeps its basic edge") {
    Sentence s = conj_sentence();
    s.tokens[1].deprel = "punct";  // no cc left
    Sentence out = collapse_sentence(s);
    CHECK(out.tokens[2].deps == "0:conj");
}

TEST_CASE("pobj under a non-prep head keeps its basic edge") {
    Sentence s = prep_sentence();
    s.tokens[4].deprel = "advmod";
    Sentence out = collapse_sentence(s);
    CHECK(out.tokens[5].deps == "4:pobj");
    CHECK(out.tokens[4].deps == "3:advmod");
}

TEST_CASE("unparsed tokens stay unparsed") {
    Sentence s = prep_sentence();
    for (Token& t : s.tokens) t.deprel = "_";
    Sentence out = collapse_sentence(s);
    for (const Token& t : out.tokens) CHECK(t.deps == "_");
}

TEST_CASE("rules can be disabled independently") {
    CollapseRules no_prep;
    no_prep.prep = false;
    Sentence out = collapse_sentence(prep_sentence(), no_prep);
    CHECK(out.tokens[5].deps == "4:pobj");
    CHECK(out.tokens[4].deps == "3:prep");

    CollapseRules no_conj;
    no_conj.conj = false;
    out = collapse_sentence(conj_sentence(), no_conj);
    CHECK(out.tokens[2].deps == "0:conj");
    CHECK(out.tokens[1].deps == "0:cc");
}

TEST_CASE("collapsing is idempotent and leaves basic columns alone") {
    Sentence original = prep_sentence();
    Sentence once = collapse_sentence(original);
    Sentence twice = collapse_sentence(once);
    CHECK(once == twice);
    for (std::size_t i = 0; i < original.tokens.size(); ++i) {
        CHECK(once.tokens[i].head == original.tokens[i].head);
        CHECK(once.tokens[i].deprel == original.tokens[i].deprel);
        CHECK(once.tokens[i].form == original.tokens[i].form);
    }
}

TEST_CASE("collapse_document maps over every sentence") {
    ConllDocument doc;
    doc.url = "http://x/doc";
    doc.sentences = {prep_sentence(), conj_sentence()};
    doc.sentences[1].sent_id = "http://x/doc#1";
    ConllDocument out = collapse_document(doc);
    CHECK(out.url == doc.url);
    REQUIRE(out.sentences.size() == 2);
    CHECK(out.sentences[0].tokens[5].deps == "3:prep_in");
    CHECK(out.sentences[1].tokens[2].deps == "0:conj_and");
}
