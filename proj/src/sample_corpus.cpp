#include "depcc/sample_corpus.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "depcc/collapse.hpp"
#include "depcc/common.hpp"
#include "depcc/conll.hpp"

namespace depcc {

namespace {

constexpr std::size_t kVerbClusterSize = 4;
const std::vector<std::vector<const char*>>& verb_clusters() {
    static const std::vector<std::vector<const char*>> clusters = {
        {"run", "sprint", "dash", "race"},
        {"walk", "stroll", "wander", "amble"},
        {"eat", "devour", "consume", "munch"},
        {"drink", "sip", "gulp", "swallow"},
        {"see", "observe", "watch", "view"},
        {"say", "state", "declare", "announce"},
        {"build", "construct", "assemble", "erect"},
        {"break", "shatter", "smash", "crack"},
        {"carry", "haul", "lug", "transport"},
        {"throw", "toss", "hurl", "fling"},
        {"grab", "seize", "snatch", "clutch"},
        {"clean", "scrub", "wash", "wipe"},
        {"teach", "instruct", "educate", "tutor"},
        {"learn", "study", "memorize", "absorb"},
        {"buy", "purchase", "acquire", "procure"},
        {"sell", "vend", "peddle", "auction"},
        {"repair", "fix", "mend", "restore"},
        {"cut", "slice", "chop", "carve"},
        {"open", "unlock", "unseal", "unfasten"},
        {"close", "shut", "seal", "fasten"},
        {"love", "adore", "cherish", "treasure"},
        {"hate", "despise", "loathe", "detest"},
        {"begin", "start", "commence", "initiate"},
        {"finish", "complete", "conclude", "finalize"},
        {"push", "shove", "press", "nudge"},
        {"pull", "drag", "tug", "yank"},
        {"jump", "leap", "hop", "vault"},
        {"paint", "sketch", "draw", "illustrate"},
        {"guard", "protect", "defend", "shield"},
        {"find", "locate", "discover", "uncover"},
    };
    return clusters;
}

const std::vector<std::vector<const char*>>& noun_clusters() {
    static const std::vector<std::vector<const char*>> clusters = {
        {"dog", "puppy", "hound", "terrier", "beagle", "bulldog"},
        {"cat", "kitten", "tiger", "lion", "leopard", "panther"},
        {"bird", "sparrow", "falcon", "pigeon", "crow", "owl"},
        {"shark", "whale", "dolphin", "seal", "otter", "turtle"},
        {"car", "truck", "van", "bus", "tractor", "wagon"},
        {"hammer", "wrench", "drill", "saw", "chisel", "screwdriver"},
        {"apple", "carrot", "melon", "pumpkin", "biscuit", "noodle"},
        {"cup", "mug", "glass", "bottle", "flask", "jug"},
        {"table", "chair", "bench", "stool", "cabinet", "desk"},
        {"house", "barn", "cottage", "tower", "castle", "cabin"},
        {"book", "novel", "journal", "magazine", "pamphlet", "manual"},
        {"shirt", "jacket", "coat", "sweater", "glove", "sock"},
        {"guitar", "violin", "piano", "drum", "flute", "trumpet"},
        {"tree", "bush", "fern", "flower", "vine", "shrub"},
        {"farmer", "baker", "miner", "carpenter", "plumber", "tailor"},
        {"student", "teacher", "professor", "scientist", "scholar", "librarian"},
        {"boy", "girl", "toddler", "teenager", "twin", "cousin"},
        {"coin", "token", "voucher", "ticket", "receipt", "invoice"},
        {"engine", "motor", "turbine", "generator", "compressor", "pump"},
        {"box", "crate", "basket", "bucket", "barrel", "carton"},
        {"road", "street", "avenue", "lane", "highway", "trail"},
        {"river", "lake", "pond", "stream", "canal", "harbor"},
        {"rock", "stone", "boulder", "pebble", "cliff", "ridge"},
        {"wire", "nail", "screw", "bolt", "hinge", "bracket"},
        {"letter", "note", "memo", "report", "essay", "poem"},
        {"ball", "puzzle", "kite", "marble", "domino", "checker"},
        {"cloud", "star", "comet", "meteor", "planet", "moon"},
        {"cow", "horse", "goat", "pig", "donkey", "rooster"},
        {"ant", "bee", "beetle", "moth", "cricket", "spider"},
        {"printer", "monitor", "keyboard", "folder", "stapler", "binder"},
    };
    return clusters;
}

const std::vector<const char*>& person_names() {
    static const std::vector<const char*> names = {
        "Alice", "Bob",   "Carol", "David", "Emma",  "Frank", "Grace",
        "Henry", "Irene", "Jack",  "Karen", "Leo",   "Maria", "Nathan",
        "Olivia", "Peter", "Rachel", "Simon", "Tina", "Victor"};
    return names;
}

const std::vector<const char*>& city_names() {
    static const std::vector<const char*> names = {
        "Paris",  "London", "Berlin", "Madrid", "Rome",   "Vienna",
        "Lisbon", "Dublin", "Oslo",   "Prague", "Athens", "Warsaw"};
    return names;
}

const std::vector<std::pair<const char*, const char*>>& org_names() {
    static const std::vector<std::pair<const char*, const char*>> names = {
        {"Acme", "Corporation"},   {"Global", "Industries"},
        {"Northern", "University"}, {"Pacific", "Institute"},
        {"Royal", "Society"},       {"Central", "Bank"}};
    return names;
}

const std::vector<const char*>& adverbs() {
    static const std::vector<const char*> words = {"quickly", "slowly",  "carefully",
                                                   "eagerly", "quietly", "boldly"};
    return words;
}

// Deterministic across standard libraries, unlike the std distributions.
std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

struct Lexicon {
    std::vector<std::string> verbs;             // flattened cluster order
    std::vector<std::size_t> verb_cluster;      // verb index -> cluster
    std::vector<std::string> nouns;
    std::vector<std::size_t> noun_cluster;

    Lexicon() {
        for (std::size_t c = 0; c < verb_clusters().size(); ++c) {
            for (const char* v : verb_clusters()[c]) {
                verbs.emplace_back(v);
                verb_cluster.push_back(c);
            }
        }
        for (std::size_t c = 0; c < noun_clusters().size(); ++c) {
            for (const char* n : noun_clusters()[c]) {
                nouns.emplace_back(n);
                noun_cluster.push_back(c);
            }
        }
    }

    // Argument preferences shared by every verb in a cluster.
    std::size_t subj_cluster(std::size_t vc, std::size_t k) const {
        return (vc * 2 + k) % noun_clusters().size();
    }
    std::size_t obj_cluster(std::size_t vc, std::size_t k) const {
        return (vc * 2 + 7 + k) % noun_clusters().size();
    }
};

Token make_token(std::uint32_t id, std::string form, std::string lemma,
                 std::string tag, std::uint32_t head, std::string deprel,
                 std::string ner = "O") {
    Token t;
    t.id = id;
    t.form = std::move(form);
    t.lemma = std::move(lemma);
    t.upostag = tag;
    t.xpostag = std::move(tag);
    t.head = head;
    t.deprel = std::move(deprel);
    t.ner = std::move(ner);
    return t;
}

std::string plural(const std::string& noun) { return noun + "s"; }

// Space-joined forms except punctuation attaches to the previous token.
std::string detokenize(const std::vector<Token>& tokens) {
    std::string text;
    for (const Token& t : tokens) {
        if (!text.empty() && t.form != "." && t.form != ",") text.push_back(' ');
        text += t.form;
    }
    return text;
}

class SentenceFactory {
public:
    SentenceFactory(const Lexicon& lex, std::mt19937_64& rng) : lex_(lex), rng_(rng) {}

    std::vector<Token> make(std::size_t verb_index) {
        const std::size_t vc = lex_.verb_cluster[verb_index];
        const std::string& verb = lex_.verbs[verb_index];
        switch (pick(rng_, 6)) {
            case 0: return transitive(verb, vc);
            case 1: return with_place(verb, vc);
            case 2: return conjoined_people(verb, vc);
            case 3: return owner_subject(verb, vc);
            case 4: return for_org(verb, vc);
            default: return with_adverb(verb, vc);
        }
    }

private:
    const Lexicon& lex_;
    std::mt19937_64& rng_;

    std::string pick_noun(std::size_t cluster) {
        const auto& members = noun_clusters()[cluster];
        return members[pick(rng_, members.size())];
    }

    // Preferred cluster three times out of four, anything otherwise.
    std::size_t subj_cluster(std::size_t vc) {
        if (pick(rng_, 4) == 0) return pick(rng_, noun_clusters().size());
        return lex_.subj_cluster(vc, pick(rng_, 2));
    }
    std::size_t obj_cluster(std::size_t vc) {
        if (pick(rng_, 4) == 0) return pick(rng_, noun_clusters().size());
        return lex_.obj_cluster(vc, pick(rng_, 2));
    }

    std::vector<Token> transitive(const std::string& verb, std::size_t vc) {
        std::string subj = pick_noun(subj_cluster(vc));
        std::string obj = pick_noun(obj_cluster(vc));
        return {make_token(0, "The", "the", "DT", 1, "det"),
                make_token(1, plural(subj), subj, "NNS", 2, "nsubj"),
                make_token(2, verb, verb, "VBP", 2, "ROOT"),
                make_token(3, "the", "the", "DT", 4, "det"),
                make_token(4, obj, obj, "NN", 2, "dobj"),
                make_token(5, ".", ".", ".", 2, "punct")};
    }

    std::vector<Token> with_place(const std::string& verb, std::size_t vc) {
        std::string subj = pick_noun(subj_cluster(vc));
        std::string obj = pick_noun(obj_cluster(vc));
        std::string city = city_names()[pick(rng_, city_names().size())];
        return {make_token(0, "The", "the", "DT", 1, "det"),
                make_token(1, plural(subj), subj, "NNS", 2, "nsubj"),
                make_token(2, verb, verb, "VBP", 2, "ROOT"),
                make_token(3, "the", "the", "DT", 4, "det"),
                make_token(4, obj, obj, "NN", 2, "dobj"),
                make_token(5, "in", "in", "IN", 2, "prep"),
                make_token(6, city, city, "NNP", 5, "pobj", "B-Location"),
                make_token(7, ".", ".", ".", 2, "punct")};
    }

    std::vector<Token> conjoined_people(const std::string& verb, std::size_t vc) {
        std::size_t a = pick(rng_, person_names().size());
        std::size_t b = pick(rng_, person_names().size() - 1);
        if (b >= a) ++b;
        std::string obj = pick_noun(obj_cluster(vc));
        return {make_token(0, person_names()[a], person_names()[a], "NNP", 3, "nsubj",
                           "B-Person"),
                make_token(1, "and", "and", "CC", 0, "cc"),
                make_token(2, person_names()[b], person_names()[b], "NNP", 0, "conj",
                           "B-Person"),
                make_token(3, verb, verb, "VBP", 3, "ROOT"),
                make_token(4, "the", "the", "DT", 5, "det"),
                make_token(5, obj, obj, "NN", 3, "dobj"),
                make_token(6, ".", ".", ".", 3, "punct")};
    }

    std::vector<Token> owner_subject(const std::string& verb, std::size_t vc) {
        std::string subj = pick_noun(subj_cluster(vc));
        std::string owner = pick_noun(pick(rng_, noun_clusters().size()));
        std::string obj = pick_noun(obj_cluster(vc));
        return {make_token(0, "The", "the", "DT", 1, "det"),
                make_token(1, plural(subj), subj, "NNS", 5, "nsubj"),
                make_token(2, "of", "of", "IN", 1, "prep"),
                make_token(3, "the", "the", "DT", 4, "det"),
                make_token(4, owner, owner, "NN", 2, "pobj"),
                make_token(5, verb, verb, "VBP", 5, "ROOT"),
                make_token(6, "the", "the", "DT", 7, "det"),
                make_token(7, obj, obj, "NN", 5, "dobj"),
                make_token(8, ".", ".", ".", 5, "punct")};
    }

    std::vector<Token> for_org(const std::string& verb, std::size_t vc) {
        std::string subj = pick_noun(subj_cluster(vc));
        std::string obj = pick_noun(obj_cluster(vc));
        auto [org1, org2] = org_names()[pick(rng_, org_names().size())];
        return {make_token(0, "The", "the", "DT", 1, "det"),
                make_token(1, plural(subj), subj, "NNS", 2, "nsubj"),
                make_token(2, verb, verb, "VBP", 2, "ROOT"),
                make_token(3, "the", "the", "DT", 4, "det"),
                make_token(4, obj, obj, "NN", 2, "dobj"),
                make_token(5, "for", "for", "IN", 2, "prep"),
                make_token(6, org1, org1, "NNP", 7, "nn", "B-Organization"),
                make_token(7, org2, org2, "NNP", 5, "pobj", "I-Organization"),
                make_token(8, ".", ".", ".", 2, "punct")};
    }

    std::vector<Token> with_adverb(const std::string& verb, std::size_t vc) {
        std::string subj = pick_noun(subj_cluster(vc));
        std::string obj = pick_noun(obj_cluster(vc));
        std::string adv = adverbs()[pick(rng_, adverbs().size())];
        return {make_token(0, "The", "the", "DT", 1, "det"),
                make_token(1, plural(subj), subj, "NNS", 2, "nsubj"),
                make_token(2, verb, verb, "VBP", 2, "ROOT"),
                make_token(3, "the", "the", "DT", 4, "det"),
                make_token(4, obj, obj, "NN", 2, "dobj"),
                make_token(5, adv, adv, "RB", 2, "advmod"),
                make_token(6, ".", ".", ".", 2, "punct")};
    }
};

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

double jitter(std::mt19937_64& rng, double range) {
    return range * static_cast<double>(rng() % 1000) / 1000.0;
}

// Verb pairs graded by cluster relatedness: synonyms high, verbs with
// overlapping argument preferences medium, the rest low.
std::string build_simverb(const Lexicon& lex, std::mt19937_64& rng) {
    struct Row {
        std::string w1, w2, relation;
        double score;
    };
    std::vector<Row> rows;
    for (std::size_t c = 0; c < verb_clusters().size(); ++c) {
        const auto& members = verb_clusters()[c];
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                rows.push_back({members[i], members[j], "SYNONYMS",
                                std::min(10.0, 7.5 + jitter(rng, 2.5))});
            }
        }
    }
    std::set<std::string> seen;
    while (rows.size() < 420) {
        std::size_t a = pick(rng, lex.verbs.size());
        std::size_t b = pick(rng, lex.verbs.size());
        std::size_t ca = lex.verb_cluster[a];
        std::size_t cb = lex.verb_cluster[b];
        if (ca == cb) continue;
        const std::string& w1 = lex.verbs[std::min(a, b)];
        const std::string& w2 = lex.verbs[std::max(a, b)];
        if (!seen.insert(w1 + "\t" + w2).second) continue;
        bool related = lex.subj_cluster(ca, 0) == lex.subj_cluster(cb, 0) ||
                       lex.obj_cluster(ca, 0) == lex.obj_cluster(cb, 0) ||
                       lex.obj_cluster(ca, 1) == lex.obj_cluster(cb, 1);
        if (related) {
            rows.push_back({w1, w2, "COHYPONYMS", 3.0 + jitter(rng, 2.0)});
        } else {
            rows.push_back({w1, w2, "NONE", 0.5 + jitter(rng, 1.5)});
        }
    }

    std::string out;
    for (const Row& row : rows) {
        const char* split = pick(rng, 4) == 0 ? "test" : "dev";
        out += row.w1 + "\t" + row.w2 + "\tV\t" + format_score(row.score) + "\t" +
               row.relation + "\t" + split + "\n";
    }
    return out;
}

// SimLex-like file: header, 10 columns, verb rows mixed with noun rows.
std::string build_simlex(const Lexicon& lex, std::mt19937_64& rng) {
    std::string out =
        "word1\tword2\tPOS\tSimLex999\tconc(w1)\tconc(w2)\tconcQ\tAssoc(USF)\t"
        "SimAssoc333\tSD(SimLex)\n";
    std::set<std::string> seen;
    std::size_t verb_rows = 0;
    while (verb_rows < 100) {
        std::size_t a = pick(rng, lex.verbs.size());
        std::size_t b = pick(rng, lex.verbs.size());
        if (a == b) continue;
        const std::string& w1 = lex.verbs[std::min(a, b)];
        const std::string& w2 = lex.verbs[std::max(a, b)];
        if (!seen.insert(w1 + "\t" + w2).second) continue;
        double score = lex.verb_cluster[a] == lex.verb_cluster[b]
                           ? 7.0 + jitter(rng, 3.0)
                           : jitter(rng, 4.0);
        out += w1 + "\t" + w2 + "\tV\t" + format_score(score) +
               "\t3.5\t3.5\t2\t0.1\t0\t1.0\n";
        ++verb_rows;
    }
    std::size_t noun_rows = 0;
    while (noun_rows < 80) {
        std::size_t a = pick(rng, lex.nouns.size());
        std::size_t b = pick(rng, lex.nouns.size());
        if (a == b) continue;
        const std::string& w1 = lex.nouns[std::min(a, b)];
        const std::string& w2 = lex.nouns[std::max(a, b)];
        if (!seen.insert(w1 + "\t" + w2).second) continue;
        double score = lex.noun_cluster[a] == lex.noun_cluster[b]
                           ? 7.0 + jitter(rng, 3.0)
                           : jitter(rng, 4.0);
        out += w1 + "\t" + w2 + "\tN\t" + format_score(score) +
               "\t4.0\t4.0\t3\t0.2\t0\t0.9\n";
        ++noun_rows;
    }
    return out;
}

}  // namespace

SampleCorpus make_sample_corpus(const std::string& out_dir, const SampleConfig& config) {
    namespace fs = std::filesystem;
    const Lexicon lex;
    std::mt19937_64 rng(config.seed);
    SentenceFactory factory(lex, rng);

    SampleCorpus result;
    conll::ShardWriter writer(out_dir + "/corpus", config.shard_bytes);
    std::uint64_t tokens = 0;
    std::size_t doc_index = 0;
    while (tokens < config.target_tokens) {
        ConllDocument doc;
        doc.url = "http://sample.test/doc/" + std::to_string(doc_index);
        doc.source = "sample-corpus";
        for (std::uint64_t s = 0; s < config.sentences_per_doc; ++s) {
            // Round-robin over verbs so every verb gets near-equal support.
            std::size_t verb_index =
                (doc_index * config.sentences_per_doc + s) % lex.verbs.size();
            Sentence sentence;
            sentence.sent_id = doc.url + "#" + std::to_string(s);
            sentence.tokens = factory.make(verb_index);
            sentence.text = detokenize(sentence.tokens);
            tokens += sentence.tokens.size();
            ++result.sentences;
            doc.sentences.push_back(std::move(sentence));
        }
        writer.add(collapse_document(doc));
        ++result.documents;
        ++doc_index;
    }
    result.shard_paths = writer.finish();
    result.tokens = tokens;

    fs::create_directories(out_dir + "/datasets");
    result.simverb_path = out_dir + "/datasets/sample-simverb.tsv";
    result.simlex_path = out_dir + "/datasets/sample-simlex.tsv";
    write_file(result.simverb_path, build_simverb(lex, rng));
    write_file(result.simlex_path, build_simlex(lex, rng));
    return result;
}

}  // namespace depcc
