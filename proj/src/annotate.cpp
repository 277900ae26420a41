#include "depcc/annotate.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "depcc/common.hpp"

namespace depcc {

namespace {

bool is_detachable(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
           c == '(' || c == ')' || c == '"' || c == '\'';
}

bool is_upper_letter(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return true;
    return cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for (std::string_view chunk : split_ws(text)) {
        std::size_t begin = 0;
        while (begin < chunk.size() && is_detachable(chunk[begin])) {
            tokens.emplace_back(1, chunk[begin]);
            ++begin;
        }
        std::size_t end = chunk.size();
        std::vector<char> trailing;
        while (end > begin && is_detachable(chunk[end - 1])) {
            trailing.push_back(chunk[end - 1]);
            --end;
        }
        if (end > begin) tokens.emplace_back(chunk.substr(begin, end - begin));
        for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) {
            tokens.emplace_back(1, *it);
        }
    }
    return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::string current;
    auto flush = [&] {
        std::string_view trimmed = trim(current);
        if (!trimmed.empty()) sentences.emplace_back(trimmed);
        current.clear();
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        // A blank line separates paragraphs and always ends a sentence.
        if (text[pos] == '\n') {
            std::size_t look = pos + 1;
            while (look < text.size() && (text[look] == ' ' || text[look] == '\t' ||
                                          text[look] == '\r')) {
                ++look;
            }
            if (look < text.size() && text[look] == '\n') {
                flush();
                pos = look + 1;
                continue;
            }
        }
        char c = text[pos];
        current.push_back(c);
        ++pos;
        if (c != '.' && c != '!' && c != '?') continue;

        std::size_t look = pos;
        bool saw_space = false;
        while (look < text.size() && is_ascii_space(text[look])) {
            saw_space = true;
            ++look;
        }
        if (look >= text.size()) {
            flush();
            pos = look;
        } else if (saw_space) {
            std::size_t peek = look;
            if (is_upper_letter(decode_utf8(text, peek))) {
                flush();
                pos = look;
            }
        }
    }
    flush();
    return sentences;
}

FilterResult filter_long_sentences(std::vector<Sentence> sentences,
                                   std::size_t max_tokens) {
    FilterResult result;
    for (Sentence& s : sentences) {
        if (s.tokens.size() > max_tokens) {
            ++result.dropped;
        } else {
            result.kept.push_back(std::move(s));
        }
    }
    return result;
}

ConllDocument Annotator::process(const Document& doc, const AnnotateConfig& config) {
    ConllDocument out;
    out.url = doc.url;
    out.source = doc.source;

    std::vector<Sentence> sentences;
    std::size_t index = 0;
    for (const std::string& sentence_text : split_sentences(doc.text)) {
        std::vector<std::string> forms = tokenize(sentence_text);
        std::size_t n = index++;  // dropped sentences leave gaps in sent_id
        if (forms.empty()) continue;
        Sentence s;
        s.sent_id = doc.url + "#" + std::to_string(n);
        s.text = sentence_text;
        s.tokens.reserve(forms.size());
        for (std::size_t i = 0; i < forms.size(); ++i) {
            Token t;
            t.id = i;
            t.form = std::move(forms[i]);
            t.lemma = "_";
            t.head = i;
            s.tokens.push_back(std::move(t));
        }
        sentences.push_back(std::move(s));
    }

    FilterResult filtered = filter_long_sentences(std::move(sentences),
                                                  config.max_sentence_tokens);
    for (Sentence& s : filtered.kept) {
        annotate_sentence(s);
        out.sentences.push_back(std::move(s));
    }
    return out;
}

void NaiveAnnotator::annotate_sentence(Sentence& sentence) {
    for (Token& t : sentence.tokens) {
        t.lemma = to_lower_ascii(t.form);
        t.upostag = "_";
        t.xpostag = "_";
        t.head = t.id;
        t.deprel = "_";
        t.deps = "_";
        t.ner = "O";
    }
}

ConllDocument PassthroughAnnotator::process(const Document& doc,
                                            const AnnotateConfig&) {
    std::vector<ConllDocument> parsed;
    try {
        parsed = conll::parse(doc.text);
    } catch (const ParseError& e) {
        throw AnnotatorFailure(std::string("passthrough input is not CoNLL: ") + e.what());
    }
    if (parsed.empty()) {
        ConllDocument empty;
        empty.url = doc.url;
        empty.source = doc.source;
        return empty;
    }
    if (parsed.size() > 1) {
        throw AnnotatorFailure("passthrough input holds more than one document");
    }
    return std::move(parsed.front());
}

void PassthroughAnnotator::annotate_sentence(Sentence&) {}

struct ExternalAnnotator::Impl {
    ExternalAnnotatorConfig config;
    pid_t pid = -1;
    int to_child = -1;
    int from_child = -1;
    std::string buffer;

    explicit Impl(ExternalAnnotatorConfig cfg) : config(std::move(cfg)) {
        if (config.command.empty()) {
            throw AnnotatorFailure("external annotator command is empty");
        }
        ::signal(SIGPIPE, SIG_IGN);
    }

    ~Impl() { shutdown(); }

    void shutdown() {
        if (to_child >= 0) ::close(to_child);
        if (from_child >= 0) ::close(from_child);
        to_child = from_child = -1;
        buffer.clear();
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            int status = 0;
            ::waitpid(pid, &status, 0);
            pid = -1;
        }
    }

    void spawn() {
        int in_pipe[2];
        int out_pipe[2];
        if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
            throw AnnotatorFailure("pipe failed for external annotator");
        }
        pid = ::fork();
        if (pid < 0) throw AnnotatorFailure("fork failed for external annotator");
        if (pid == 0) {
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            ::close(out_pipe[0]);
            ::close(out_pipe[1]);
            std::vector<char*> argv;
            for (const std::string& arg : config.command) {
                argv.push_back(const_cast<char*>(arg.c_str()));
            }
            argv.push_back(nullptr);
            ::execvp(argv[0], argv.data());
            ::_exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        to_child = in_pipe[1];
        from_child = out_pipe[0];
        buffer.clear();
    }

    void ensure_running() {
        if (pid <= 0) spawn();
    }

    void send(std::string_view data) {
        std::size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::write(to_child, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                shutdown();
                throw AnnotatorFailure(std::string("write to annotator failed: ") +
                                       std::strerror(errno));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    // One line without the trailing newline, or nullopt past the deadline.
    std::string read_line(std::chrono::steady_clock::time_point deadline) {
        for (;;) {
            std::size_t nl = buffer.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            auto now = std::chrono::steady_clock::now();
            if (now >= deadline) {
                shutdown();
                throw AnnotatorTimeout("external annotator exceeded sentence timeout");
            }
            auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
            struct pollfd pfd = {from_child, POLLIN, 0};
            int rc = ::poll(&pfd, 1, static_cast<int>(wait.count()) + 1);
            if (rc < 0) {
                if (errno == EINTR) continue;
                shutdown();
                throw AnnotatorFailure("poll on annotator failed");
            }
            if (rc == 0) {
                shutdown();
                throw AnnotatorTimeout("external annotator exceeded sentence timeout");
            }
            char chunk[4096];
            ssize_t n = ::read(from_child, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                shutdown();
                throw AnnotatorFailure("read from annotator failed");
            }
            if (n == 0) {
                shutdown();
                throw AnnotatorFailure("external annotator exited mid-reply");
            }
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }
};

ExternalAnnotator::ExternalAnnotator(ExternalAnnotatorConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

ExternalAnnotator::~ExternalAnnotator() = default;

void ExternalAnnotator::annotate_sentence(Sentence& sentence) {
    impl_->ensure_running();

    std::string request;
    for (const Token& t : sentence.tokens) {
        request += std::to_string(t.id);
        request.push_back('\t');
        request += t.form;
        request.push_back('\n');
    }
    request.push_back('\n');
    impl_->send(request);

    auto deadline = std::chrono::steady_clock::now() + impl_->config.timeout;
    std::vector<std::string> rows;
    for (;;) {
        std::string line = impl_->read_line(deadline);
        if (line.empty()) break;
        rows.push_back(std::move(line));
    }
    if (rows.size() != sentence.tokens.size()) {
        impl_->shutdown();
        throw AnnotatorFailure("annotator reply has " + std::to_string(rows.size()) +
                               " rows for " + std::to_string(sentence.tokens.size()) +
                               " tokens");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string_view> cols = split(rows[i], '\t');
        if (cols.size() != 10) {
            impl_->shutdown();
            throw AnnotatorFailure("annotator row has " + std::to_string(cols.size()) +
                                   " columns");
        }
        Token& t = sentence.tokens[i];
        std::size_t id = 0;
        std::size_t head = 0;
        try {
            id = std::stoull(std::string(cols[0]));
            head = std::stoull(std::string(cols[6]));
        } catch (const std::exception&) {
            impl_->shutdown();
            throw AnnotatorFailure("annotator row has non-numeric id or head");
        }
        if (id != t.id || head >= sentence.tokens.size()) {
            impl_->shutdown();
            throw AnnotatorFailure("annotator row ids do not match the request");
        }
        t.form = std::string(cols[1]);
        t.lemma = std::string(cols[2]);
        t.upostag = std::string(cols[3]);
        t.xpostag = std::string(cols[4]);
        t.feats = std::string(cols[5]);
        t.head = head;
        t.deprel = std::string(cols[7]);
        t.deps = std::string(cols[8]);
        t.ner = std::string(cols[9]);
    }
}

ConllDocument annotate_document(const Document& doc, Annotator& annotator,
                                const AnnotateConfig& config) {
    return annotator.process(doc, config);
}

}  // namespace depcc
