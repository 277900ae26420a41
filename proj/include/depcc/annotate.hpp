#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depcc/conll.hpp"
#include "depcc/text_extract.hpp"

namespace depcc {

// Whitespace split with leading/trailing .,;:!?()"' detached as their own
// tokens. Interior punctuation (decimals, hyphens) stays attached.
std::vector<std::string> tokenize(std::string_view text);

// Splits after [.!?] when whitespace plus an uppercase letter follows, or at
// end of text; a blank line is always a boundary.
std::vector<std::string> split_sentences(std::string_view text);

struct FilterResult {
    std::vector<Sentence> kept;
    std::size_t dropped = 0;
};

// Drops sentences with more than max_tokens tokens, preserving order.
FilterResult filter_long_sentences(std::vector<Sentence> sentences,
                                   std::size_t max_tokens = 50);

class AnnotatorFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AnnotatorTimeout : public AnnotatorFailure {
public:
    using AnnotatorFailure::AnnotatorFailure;
};

struct AnnotateConfig {
    std::size_t max_sentence_tokens = 50;
};

// Splits, tokenizes, filters, then hands each sentence to the subclass.
class Annotator {
public:
    virtual ~Annotator() = default;
    virtual ConllDocument process(const Document& doc, const AnnotateConfig& config = {});

protected:
    // Sentence arrives with ids and forms set and every other column at its
    // unparsed default (head = own id, deprel "_", ner "O").
    virtual void annotate_sentence(Sentence& sentence) = 0;
};

// lemma = lowercased form, tags stay "_", no parse, ner all O.
class NaiveAnnotator : public Annotator {
protected:
    void annotate_sentence(Sentence& sentence) override;
};

// Treats doc.text as an already-serialized CoNLL document.
class PassthroughAnnotator : public Annotator {
public:
    ConllDocument process(const Document& doc, const AnnotateConfig& config = {}) override;

protected:
    void annotate_sentence(Sentence& sentence) override;
};

struct ExternalAnnotatorConfig {
    std::vector<std::string> command;  // argv; command[0] resolved via PATH
    std::chrono::milliseconds timeout{60000};  // per sentence
};

// Line protocol over the child's standard streams: one "id<TAB>form" line
// per token plus a blank line out; full 10-column rows plus a blank line
// back. A row-count mismatch or malformed row is an AnnotatorFailure; a
// timeout kills the child and the next call respawns it.
class ExternalAnnotator : public Annotator {
public:
    explicit ExternalAnnotator(ExternalAnnotatorConfig config);
    ~ExternalAnnotator() override;
    ExternalAnnotator(const ExternalAnnotator&) = delete;
    ExternalAnnotator& operator=(const ExternalAnnotator&) = delete;

protected:
    void annotate_sentence(Sentence& sentence) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ConllDocument annotate_document(const Document& doc, Annotator& annotator,
                                const AnnotateConfig& config = {});

}  // namespace depcc
