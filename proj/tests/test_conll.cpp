#include "depcc/conll.hpp"

#include <filesystem>

#include "depcc/common.hpp"
#include "depcc/gzip.hpp"
#include "doctest.h"
#include "temp_dir.hpp"

using namespace depcc;
using fixtures::TempDir;

namespace {

Token token(std::uint32_t id, std::string form, std::uint32_t head, std::string deprel,
            std::string deps = "_", std::string ner = "O") {
    Token t;
    t.id = id;
    t.form = form;
    t.lemma = to_lower_ascii(form);
    t.head = head;
    t.deprel = std::move(deprel);
    t.deps = std::move(deps);
    t.ner = std::move(ner);
    return t;
}

// A two-sentence parsed document exercising every header and column.
ConllDocument sample_doc(const std::string& url = "http://x/doc") {
    ConllDocument doc;
    doc.url = url;
    doc.source = "s3://bucket/segment/file.warc.gz";
    Sentence a;
    a.sent_id = url + "#0";
    a.text = "Rex barked.";
    a.tokens = {token(0, "Rex", 1, "nsubj", "1:nsubj", "B-Person"),
                token(1, "barked", 1, "ROOT", "1:ROOT"),
                token(2, ".", 1, "punct", "1:punct")};
    Sentence b;
    b.sent_id = url + "#2";
    b.text = "It slept.";
    b.tokens = {token(0, "It", 1, "nsubj", "1:nsubj"),
                token(1, "slept", 1, "ROOT", "1:ROOT"),
                token(2, ".", 1, "punct", "1:punct")};
    doc.sentences = {std::move(a), std::move(b)};
    return doc;
}

std::string golden_path() { return std::string(DEPCC_FIXTURE_DIR) + "/table2_golden.conll"; }

}  // namespace

TEST_CASE("golden document round-trips byte for byte") {
    const std::string golden = read_file(golden_path());
    std::vector<ConllDocument> docs = conll::parse(golden);
    REQUIRE(docs.size() == 1);
    const ConllDocument& doc = docs[0];

    CHECK(doc.url ==
          "http://www.poweredbyosteons.org/2012/01/brief-history-of-bioarchaeological.html");
    CHECK(doc.source.starts_with("s3://aws-publicdatasets/common-crawl/"));
    REQUIRE(doc.sentences.size() == 1);
    const Sentence& s = doc.sentences[0];
    CHECK(s.sent_id.ends_with("#60"));
    REQUIRE(s.tokens.size() == 14);
    CHECK(s.tokens[1].ner == "B-Organization");
    CHECK(s.tokens[5].deps == "2:prep_of");
    CHECK(s.tokens[7].deprel == "ROOT");
    CHECK(s.tokens[7].head == 7);

    CHECK_NOTHROW(conll::validate(doc));
    CHECK(conll::serialize(doc) == golden);
}

TEST_CASE("documents survive a serialize and parse round trip") {
    ConllDocument doc = sample_doc();
    doc.comments = {"# crawl batch = 7"};
    std::vector<ConllDocument> back = conll::parse(conll::serialize(doc));
    REQUIRE(back.size() == 1);
    CHECK(back[0] == doc);

    ConllDocument second = sample_doc("http://x/other");
    std::string both = conll::serialize(doc) + conll::serialize(second);
    back = conll::parse(both);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == doc);
    CHECK(back[1] == second);
}

TEST_CASE("serialize flattens control characters inside fields") {
    ConllDocument doc = sample_doc();
    doc.sentences[0].text = "tabs\tand\nnewlines";
    doc.sentences[0].tokens[0].form = "Re\tx";
    std::string text = conll::serialize(doc);
    CHECK(text.find("tabs and newlines") != std::string::npos);
    CHECK(text.find("Re x\t") != std::string::npos);
}

TEST_CASE("parse rejects structural errors with line numbers") {
    CHECK_THROWS_AS(conll::parse("0\tx\tx\t_\t_\t_\t0\tROOT\t_\tO\n"), ParseError);
    CHECK_THROWS_AS(conll::parse("# newdoc s3 = s3://x\n"), ParseError);
    CHECK_THROWS_AS(conll::parse("# sent_id = u#0\n"), ParseError);
    CHECK_THROWS_AS(conll::parse("# text = orphan\n"), ParseError);
    CHECK_THROWS_AS(conll::parse("# stray comment\n"), ParseError);

    const std::string head =
        "# newdoc url = http://x/doc\n# newdoc s3 = s3://x\n# sent_id = http://x/doc#0\n"
        "# text = t\n";
    CHECK_THROWS_AS(conll::parse(head + "0\tx\tx\t_\t_\t_\t0\tROOT\t_\n"), ParseError);
    CHECK_THROWS_AS(conll::parse(head + "zero\tx\tx\t_\t_\t_\t0\tROOT\t_\tO\n"), ParseError);
    CHECK_THROWS_AS(conll::parse(head + "1\tx\tx\t_\t_\t_\t0\tROOT\t_\tO\n"), ParseError);
    CHECK_THROWS_AS(conll::parse(head + "0\tx\tx\t_\t_\t_\tnine\tROOT\t_\tO\n"), ParseError);
    CHECK_THROWS_AS(conll::parse(head + "0\tx\tx\t_\t_\t_\t5\tROOT\t_\tO\n\n"), ParseError);

    try {
        conll::parse(head + "0\tx\tx\t_\t_\t_\t0\tROOT\t_\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(std::string(e.what()).find("10 columns") != std::string::npos);
    }
}

TEST_CASE("validate rejects field violations") {
    auto check_throws = [](ConllDocument doc, const char* needle) {
        CAPTURE(needle);
        try {
            conll::validate(doc);
            FAIL_CHECK("expected InvalidDocument");
        } catch (const InvalidDocument& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    ConllDocument doc = sample_doc();
    doc.url.clear();
    check_throws(doc, "url");

    doc = sample_doc();
    doc.sentences[0].sent_id = "no-hash";
    check_throws(doc, "sent_id lacks");

    doc = sample_doc();
    doc.sentences[0].sent_id = "http://x/doc#zero";
    check_throws(doc, "not numeric");

    doc = sample_doc();
    doc.sentences[1].sent_id = "http://x/doc#0";
    check_throws(doc, "strictly increasing");

    doc = sample_doc();
    doc.sentences[0].tokens[1].id = 5;
    check_throws(doc, "not consecutive");

    doc = sample_doc();
    doc.sentences[0].tokens[0].head = 9;
    check_throws(doc, "head: out of range");

    for (const char* tag : {"B_Person", "I-", "X-Person", "B-Per son", ""}) {
        doc = sample_doc();
        doc.sentences[0].tokens[0].ner = tag;
        check_throws(doc, "ner: bad tag");
    }

    doc = sample_doc();
    doc.sentences[0].tokens[0].ner = "I-Person";
    check_throws(doc, "I- tag after O or sentence start");

    doc = sample_doc();
    doc.sentences[0].tokens[1].ner = "O";
    doc.sentences[0].tokens[2].ner = "I-Person";
    check_throws(doc, "I- tag after O or sentence start");

    doc = sample_doc();
    doc.sentences[0].tokens[1].head = 0;
    check_throws(doc, "root must point to itself");

    doc = sample_doc();
    doc.sentences[0].tokens[2].deprel = "ROOT";
    doc.sentences[0].tokens[2].head = 2;
    check_throws(doc, "exactly one ROOT");

    doc = sample_doc();
    doc.sentences[0].tokens[1].deprel = "dep";
    check_throws(doc, "exactly one ROOT");
}

TEST_CASE("validate allows continued spans and unparsed sentences") {
    ConllDocument doc = sample_doc();
    doc.sentences[0].tokens[0].ner = "B-Person";
    doc.sentences[0].tokens[1].ner = "I-Person";
    CHECK_NOTHROW(conll::validate(doc));

    // No deprel set anywhere: the ROOT requirement does not apply.
    doc = sample_doc();
    for (Sentence& s : doc.sentences) {
        for (Token& t : s.tokens) t.deprel = "_";
    }
    CHECK_NOTHROW(conll::validate(doc));
}

TEST_CASE("shards rotate at the size target without splitting documents") {
    TempDir dir;
    std::vector<ConllDocument> docs = {sample_doc("http://x/1"), sample_doc("http://x/2"),
                                       sample_doc("http://x/3")};
    const std::uint64_t block = conll::serialize(docs[0]).size();

    std::vector<std::string> shards = conll::write_shards(docs, dir / "shards", block + 10);
    REQUIRE(shards.size() == 3);
    CHECK(shards[0].ends_with("part-00000.conll.gz"));
    CHECK(shards[2].ends_with("part-00002.conll.gz"));

    std::vector<ConllDocument> back;
    for (const std::string& shard : shards) {
        for (ConllDocument& doc : conll::read_shard(shard)) back.push_back(std::move(doc));
    }
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < docs.size(); ++i) CHECK(back[i] == docs[i]);

    std::vector<std::string> one = conll::write_shards(docs, dir / "one", 1 << 30);
    CHECK(one.size() == 1);
    CHECK(conll::read_shard(one[0]).size() == 3);
}

TEST_CASE("streaming writer and batch writer emit identical bytes") {
    TempDir dir;
    std::vector<ConllDocument> docs = {sample_doc("http://x/1"), sample_doc("http://x/2"),
                                       sample_doc("http://x/3")};

    std::vector<std::string> batch = conll::write_shards(docs, dir / "batch", 400);
    conll::ShardWriter writer(dir / "stream", 400);
    for (const ConllDocument& doc : docs) writer.add(doc);
    std::vector<std::string> stream = writer.finish();

    REQUIRE(batch.size() == stream.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        CHECK(read_file(batch[i]) == read_file(stream[i]));
    }

    // Same input twice gives the same bytes: the gzip header is fixed.
    std::vector<std::string> again = conll::write_shards(docs, dir / "again", 400);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        CHECK(read_file(batch[i]) == read_file(again[i]));
    }
}

TEST_CASE("read_shard accepts plain files and rejects missing ones") {
    TempDir dir;
    ConllDocument doc = sample_doc();
    const std::string plain = dir / "part-00000.conll";
    write_file(plain, conll::serialize(doc));
    std::vector<ConllDocument> back = conll::read_shard(plain);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == doc);

    CHECK_THROWS_AS(conll::read_shard(dir / "absent.conll.gz"), IoFailure);
}

TEST_CASE("resolve_shards expands directories in sorted order") {
    TempDir dir;
    std::vector<ConllDocument> docs = {sample_doc("http://x/1"), sample_doc("http://x/2"),
                                       sample_doc("http://x/3")};
    std::vector<std::string> shards =
        conll::write_shards(docs, dir / "shards", conll::serialize(docs[0]).size() + 10);
    REQUIRE(shards.size() == 3);
    write_file((dir / "shards") + "/notes.txt", "ignored\n");

    std::vector<std::string> resolved = conll::resolve_shards({dir / "shards"});
    CHECK(resolved == shards);

    resolved = conll::resolve_shards({shards[2], shards[0]});
    CHECK(resolved == std::vector<std::string>{shards[2], shards[0]});
}
