#include "depcc/search_index.hpp"

#include <stdexcept>

#include "depcc/collapse.hpp"
#include "depcc/common.hpp"
#include "doctest.h"
#include "temp_dir.hpp"

using namespace depcc;
using fixtures::TempDir;

namespace {

Token token(std::uint32_t id, std::string form, std::string lemma, std::uint32_t head,
            std::string deprel, std::string ner = "O") {
    Token t;
    t.id = id;
    t.form = std::move(form);
    t.lemma = std::move(lemma);
    t.head = head;
    t.deprel = std::move(deprel);
    t.ner = std::move(ner);
    return t;
}

Sentence museum_sentence(const std::string& url) {
    Sentence s;
    s.sent_id = url + "#0";
    s.text = "The museum was established in York.";
    s.tokens = {token(0, "The", "the", 1, "det"),
                token(1, "museum", "museum", 3, "nsubjpass"),
                token(2, "was", "be", 3, "auxpass"),
                token(3, "established", "establish", 3, "ROOT"),
                token(4, "in", "in", 3, "prep"),
                token(5, "York", "york", 4, "pobj", "B-Location"),
                token(6, ".", ".", 3, "punct")};
    return collapse_sentence(s);
}

Sentence closed_sentence(const std::string& url) {
    Sentence s;
    s.sent_id = url + "#1";
    s.text = "It closed.";
    s.tokens = {token(0, "It", "it", 1, "nsubj"),
                token(1, "closed", "close", 1, "ROOT"),
                token(2, ".", ".", 1, "punct")};
    return collapse_sentence(s);
}

Sentence conj_sentence(const std::string& url) {
    Sentence s;
    s.sent_id = url + "#0";
    s.text = "Alice and Bob run.";
    s.tokens = {token(0, "Alice", "alice", 3, "nsubj", "B-Person"),
                token(1, "and", "and", 0, "cc"),
                token(2, "Bob", "bob", 0, "conj", "B-Person"),
                token(3, "run", "run", 3, "ROOT"),
                token(4, ".", ".", 3, "punct")};
    return collapse_sentence(s);
}

// Two documents over two shards; three sentences, ordinals 0..2.
std::vector<std::string> build_corpus(const std::string& dir) {
    ConllDocument a;
    a.url = "http://en.example.org/a";
    a.source = "s3://bucket/a.warc.gz";
    a.sentences = {museum_sentence(a.url), closed_sentence(a.url)};

    ConllDocument b;
    b.url = "http://de.example.org/b";
    b.source = "s3://bucket/b.warc.gz";
    b.sentences = {conj_sentence(b.url)};

    return conll::write_shards({a, b}, dir, 1);  // one document per shard
}

}  // namespace

TEST_CASE("url_host strips scheme, path, port and case") {
    CHECK(url_host("http://en.example.org/path?q=1") == "en.example.org");
    CHECK(url_host("https://Example.COM:8080/x") == "example.com");
    CHECK(url_host("example.net/path") == "example.net");
    CHECK(url_host("http://host#frag") == "host");
    CHECK(url_host("") == "");
}

TEST_CASE("sentence terms cover every queryable field, sorted and unique") {
    std::vector<std::string> terms =
        sentence_terms(museum_sentence("http://x/doc"), "http://x/doc");
    const std::vector<std::string> expected = {
        "dep:ROOT",           "dep:ROOT_establish",
        "dep:auxpass",        "dep:auxpass_establish",
        "dep:det",            "dep:det_museum",
        "dep:nsubjpass",      "dep:nsubjpass_establish",
        "dep:pobj",           "dep:prep",
        "dep:prep_in",        "dep:prep_in_establish",
        "dep:punct",          "dep:punct_establish",
        "domain:x",
        "form:.",             "form:The",
        "form:York",          "form:established",
        "form:in",            "form:museum",
        "form:was",
        "lemma:.",            "lemma:be",
        "lemma:establish",    "lemma:in",
        "lemma:museum",       "lemma:the",
        "lemma:york",
        "ner:Location"};
    CHECK(terms == expected);
}

TEST_CASE("index builds, reopens and answers conjunctive queries") {
    TempDir dir;
    std::vector<std::string> shards = build_corpus(dir / "shards");
    REQUIRE(shards.size() == 2);

    IndexBuildResult built = build_index(shards, dir / "index");
    CHECK(built.sentence_count == 3);
    CHECK(built.term_count > 0);

    Index index = Index::open(dir / "index");
    CHECK(index.sentence_count() == 3);
    CHECK(index.term_count() == built.term_count);

    std::vector<SearchResult> hits = index.query("lemma:museum");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].ordinal == 0);
    CHECK(hits[0].sent_id == "http://en.example.org/a#0");
    CHECK(hits[0].url == "http://en.example.org/a");
    CHECK(hits[0].text == "The museum was established in York.");
    CHECK(hits[0].matched_terms == std::vector<std::string>{"lemma:museum"});

    hits = index.query("domain:en.example.org");
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].ordinal == 0);
    CHECK(hits[1].ordinal == 1);
    CHECK(hits[1].text == "It closed.");

    hits = index.query("ner:Person form:Alice");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].ordinal == 2);
    CHECK(hits[0].url == "http://de.example.org/b");
    CHECK(hits[0].matched_terms ==
          std::vector<std::string>{"ner:Person", "form:Alice"});

    CHECK(index.query("dep:conj_and").size() == 1);
    CHECK(index.query("dep:prep_in lemma:york").size() == 1);
    CHECK(index.query("lemma:museum dep:conj_and").empty());  // AND across shards
    CHECK(index.query("lemma:unseen").empty());
}

TEST_CASE("queries demand known field prefixes") {
    TempDir dir;
    build_index(build_corpus(dir / "shards"), dir / "index");
    Index index = Index::open(dir / "index");

    CHECK_THROWS_AS(index.query("bareword"), UnknownField);
    CHECK_THROWS_AS(index.query("pos:NN"), UnknownField);
    CHECK_THROWS_AS(index.query(""), std::invalid_argument);
    CHECK_THROWS_AS(index.query("   "), std::invalid_argument);
}

TEST_CASE("identical shards build byte-identical indexes") {
    TempDir dir;
    std::vector<std::string> shards = build_corpus(dir / "shards");
    build_index(shards, dir / "one");
    build_index(shards, dir / "two");

    for (const char* name : {"manifest.tsv", "terms.tsv", "postings.bin", "sentences.bin"}) {
        CAPTURE(name);
        CHECK(read_file((dir / "one") + "/" + name) == read_file((dir / "two") + "/" + name));
    }
}

TEST_CASE("tampering is caught") {
    TempDir dir;
    std::vector<std::string> shards = build_corpus(dir / "shards");
    build_index(shards, dir / "index");

    SUBCASE("flipped byte in postings fails open") {
        std::string bytes = read_file((dir / "index") + "/postings.bin");
        bytes[bytes.size() / 2] ^= 0x01;
        write_file((dir / "index") + "/postings.bin", bytes);
        CHECK_THROWS_AS(Index::open(dir / "index"), CorruptIndex);
    }
    SUBCASE("truncated sentence table fails open") {
        std::string bytes = read_file((dir / "index") + "/sentences.bin");
        bytes.resize(bytes.size() - 5);
        write_file((dir / "index") + "/sentences.bin", bytes);
        CHECK_THROWS_AS(Index::open(dir / "index"), CorruptIndex);
    }
    SUBCASE("unknown manifest record type fails open") {
        std::string manifest = read_file((dir / "index") + "/manifest.tsv");
        write_file((dir / "index") + "/manifest.tsv", manifest + "weird\t0\tx\n");
        CHECK_THROWS_AS(Index::open(dir / "index"), CorruptIndex);
    }
    SUBCASE("shard modified after indexing fails hydration") {
        std::string bytes = read_file(shards[0]);
        bytes.push_back('\0');
        write_file(shards[0], bytes);
        Index index = Index::open(dir / "index");  // index files untouched
        CHECK_THROWS_AS(index.query("lemma:museum"), CorruptIndex);
    }
}

TEST_CASE("unparsed sentences still index forms and lemmas") {
    Sentence s;
    s.sent_id = "http://x/p#0";
    s.text = "Rex barked";
    s.tokens = {token(0, "Rex", "rex", 0, "_"), token(1, "barked", "bark", 1, "_")};
    std::vector<std::string> terms = sentence_terms(s, "http://x/p");
    CHECK(terms == std::vector<std::string>{"domain:x", "form:Rex", "form:barked",
                                            "lemma:bark", "lemma:rex"});
}
