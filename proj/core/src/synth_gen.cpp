#include "korpus/synth_gen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "korpus/hash.hpp"
#include "korpus/utf8.hpp"

namespace korpus {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kSlot = "{document}";

constexpr std::string_view kRephraseBody =
    R"TPL(Geben Sie mir für den folgenden Absatz eine vielfältige Umformulierung in hochwertiger deutscher Sprache, im Stil von Wikipedia.
Beginne deine Antwort mit 'Umformulierung:'.

Text:

{document}

Umformulierung:
)TPL";

constexpr std::string_view kSummariseBody =
    R"TPL(Ihre Aufgabe ist es, den bereitgestellten Text gemäß diesen Anweisungen zu lesen und umzuformulieren:

- Versuchen Sie, eine komprimierte, aber genaue und informative Version des Originaltextes zu erstellen, keine vereinfachte Zusammenfassung.

- Erfassen und bewahren Sie die entscheidenden Informationen, Schlüsselkonzepte, wichtigen Werte und sachlichen Details im Originaltext auf und machen Sie ihn gleichzeitig lesbarer und zugänglicher.

- Behalten Sie Fachbegriffe, Fachvokabular und komplexe Konzepte bei.

- Bewahren Sie Beispiele, Erklärungen zu Denkschritten und unterstützende Beweise auf, um die Tiefe und den Kontext des Textes zu erhalten.

- Fügen Sie nur Informationen hinzu, die im Originaltext vorhanden sind. Fügen Sie keine neuen oder unbegründeten Behauptungen hinzu.

- Schreiben Sie im Klartext

Beginne deine Antwort mit 'Umformulierte Version:'.

Text:

{document}

Umformulierte Version:
)TPL";

constexpr std::string_view kWikiStyleBody =
    R"TPL(Ihre Aufgabe ist es, einen neuen Text zu Wissen aus dem bereitgestellten Text zu verfassen, indem Sie diesen Anweisungen folgen:

- Schreibe den Text als Passagen mit leicht verständlichen und qualitativ hochwertigen deutsche Sätzen um, wie sie in Lehrbüchern und Wikipedia stehen.

- Konzentrieren Sie sich auf inhaltliche Disziplinen wie Geisteswissenschaften, Sozialwissenschaften, Naturwissenschaften, Technik, Ingenieurwesen, Mathematik, Recht und Recht, Wirtschaft, Management, Kunst, Bildung, Agrarwissenschaften, Politik und Geschichte.

- Ignorieren Sie Inhalte, die keine nützlichen Fakten oder Kenntnisse enthalten.

- Bewahren Sie Beispiele, Erklärungen von Denkprozessen und unterstützende Beweise auf, um die Tiefe und den Kontext des Textes zu erhalten.

- Fügen Sie keine Details hinzu oder ändern Sie sie. Wiederholen Sie nur, was bereits im Text steht.

- Schreiben Sie im Klartext.

- Fügen Sie keine Titel, Untertitel, Notizen oder Kommentare hinzu.

Nacheinander wird der Nutzer nun Texte bereitstellen, verfolge dann die Anweisungen und schreibe den neuen Text.

Beginne deine Antwort mit 'Neuer Text:'.

Text:

{document}

Neuer Text:
)TPL";

constexpr std::string_view kQaPairsBody =
    R"TPL(Lesen Sie den bereitgestellten Text, und stellen Sie allgemeine Fragen. Befolgen Sie die folgenden Anweisungen sorgfältig:

1. Die Fragen sollen auch ohne den Text als Allgemeinwissen beantwortet werden können.

2. Wenn das nicht möglich ist, formuliere zunächst einen kurzen Kontext, oder antworte lediglich 'nicht möglich'.

3. Stellen Sie möglichst diverse Fragen zu unterschiedlichen sachlichen Informationen, wichtigem Wissen oder konkreten Details im Text.

4. Beantworten Sie die Fragen direkt und in kurzer prägnanter Sprache.

5. Stellen Sie Fragen in den folgenden verschiedenen Kategorien: Ja/Nein, Multiple-Choice mit mehreren Optionen zur Auswahl, Vergleichs- und Offener Fragen.

6. Stellen Sie 8 Fragen mit Antworten, zwei zu jeder der beschriebenen Kategorien.

7. Beginne mit 'Fragen-Antwort-Paare:'.

Text:

{document}

Fragen-Antwort-Paare:
)TPL";

constexpr std::string_view kListsBody =
    R"TPL(Überprüfen Sie den Text, und extrahieren Sie die wichtigsten Informationen auf Deutsch. Befolgen Sie diese Anweisungen:

- Lesen Sie den obigen Text sorgfältig durch und erstellen Sie eine prägnante und organisierte Liste mit sachlichen Informationen, konkreten Details, Schlüsselkonzepten sowie wichtigen Zahlen und Statistiken, die aus dem Text entnommen sind.

- Stellen Sie sicher, dass jeder Punkt klar und spezifisch ist und durch den Originaltext gestützt wird.

- Stellen Sie sicher, dass der extrahierte Text informationsdicht und leichter zu erlernen ist.

- Fügen Sie keine Titel oder Überschriften hinzu.
Beginne deine Antwort mit 'Liste:'.

Text:

{document}

Liste:
)TPL";

void validate_template(const PromptTemplate& tmpl) {
    if (tmpl.id.empty()) throw std::invalid_argument("template id is empty");
    if (tmpl.expected_marker.empty())
        throw std::invalid_argument("template '" + tmpl.id + "' has an empty marker");
    auto first = tmpl.body.find(kSlot);
    if (first == std::string::npos)
        throw std::invalid_argument("template '" + tmpl.id + "' is missing the {document} slot");
    if (tmpl.body.find(kSlot, first + kSlot.size()) != std::string::npos)
        throw std::invalid_argument("template '" + tmpl.id + "' has more than one {document} slot");
}

bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v';
}

bool is_sentence_end_cp(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'…';
}

std::string_view trim_view(std::string_view s) {
    size_t b = 0;
    while (b < s.size() && is_space_cp(static_cast<unsigned char>(s[b]))) ++b;
    size_t e = s.size();
    while (e > b && is_space_cp(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Meta-prefixes the generator tends to prepend despite the marker instruction.
const std::vector<std::string>& meta_prefixes() {
    static const std::vector<std::string> prefixes = {
        "Hier ist die umformulierte Version:",
        "Hier ist die Umformulierung:",
        "Hier ist der neue Text:",
        "Hier ist die Liste:",
        "Hier sind die Fragen-Antwort-Paare:",
        "Gerne, hier ist die umformulierte Version:",
        "Here's the rephrased version:",
        "Here is the rephrased version:",
        "Here's the rewritten text:",
        "Here is the list:",
        "Sure, here's the rephrased version:",
    };
    return prefixes;
}

struct Task {
    size_t doc_index = 0;
    std::string doc_id;
    size_t chunk_index = 0;
    std::string chunk;
    size_t template_index = 0;
};

struct TaskOutcome {
    std::optional<SynthRecord> record;
    std::optional<DeadLetter> dead_letter;
    size_t retries = 0;
    bool dropped_empty = false;
    bool dropped_echo = false;
};

std::vector<size_t> pick_template_indices(const SynthOptions& options, const std::string& doc_id) {
    std::vector<size_t> indices(options.templates.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    if (options.sample_k == 0 || options.sample_k >= indices.size()) return indices;

    std::mt19937_64 rng(options.sample_seed ^ hash64(doc_id));
    for (size_t i = 0; i < options.sample_k; ++i) {
        size_t j = i + static_cast<size_t>(rng() % (indices.size() - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(options.sample_k);
    std::sort(indices.begin(), indices.end());
    return indices;
}

ordered_json record_to_json(const SynthRecord& rec) {
    ordered_json j = ordered_json::object();
    j["source_doc_id"] = rec.source_doc_id;
    j["chunk_index"] = rec.chunk_index;
    j["template_id"] = rec.template_id;
    j["raw_response"] = rec.raw_response;
    j["text"] = rec.text;
    j["model_tag"] = rec.model_tag;
    return j;
}

}  // namespace

const std::vector<PromptTemplate>& builtin_templates() {
    static const std::vector<PromptTemplate> templates = [] {
        std::vector<PromptTemplate> out = {
            {"rephrase", std::string(kRephraseBody), "Umformulierung:"},
            {"summarise", std::string(kSummariseBody), "Umformulierte Version:"},
            {"wiki_style", std::string(kWikiStyleBody), "Neuer Text:"},
            {"qa_pairs", std::string(kQaPairsBody), "Fragen-Antwort-Paare:"},
            {"lists", std::string(kListsBody), "Liste:"},
        };
        for (const auto& tmpl : out) validate_template(tmpl);
        return out;
    }();
    return templates;
}

const PromptTemplate& builtin_template(std::string_view id) {
    for (const auto& tmpl : builtin_templates()) {
        if (tmpl.id == id) return tmpl;
    }
    throw std::invalid_argument("unknown template id: " + std::string(id));
}

PromptTemplate load_template_file(const std::string& id, const std::string& path,
                                  const std::string& expected_marker) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open template file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate tmpl{id, buf.str(), expected_marker};
    validate_template(tmpl);
    return tmpl;
}

std::vector<std::string> chunk_text(std::string_view text, size_t max_chars) {
    if (max_chars < 200) throw std::invalid_argument("max_chars must be at least 200");

    std::u32string cps;
    std::vector<size_t> starts;  // byte offset of each code point, plus end sentinel
    for (size_t i = 0; i < text.size();) {
        starts.push_back(i);
        cps.push_back(utf8::decode_one(text, i));
    }
    starts.push_back(text.size());
    const size_t n = cps.size();

    std::vector<std::string> chunks;
    size_t ci = 0;
    while (ci < n) {
        if (n - ci <= max_chars) {
            chunks.emplace_back(text.substr(starts[ci]));
            break;
        }
        const size_t window_end = ci + max_chars;
        size_t split = 0;

        // A chunk ending in a blank line keeps whole paragraphs together.
        for (size_t p = window_end; p > ci + 1 && split == 0; --p) {
            if (cps[p - 1] == U'\n' && cps[p - 2] == U'\n') split = p;
        }
        // Next best: end of a sentence, with its trailing whitespace.
        for (size_t p = window_end; p > ci + 1 && split == 0; --p) {
            if (!is_space_cp(cps[p - 1])) continue;
            size_t q = p - 1;
            while (q > ci && is_space_cp(cps[q])) --q;
            if (is_sentence_end_cp(cps[q])) split = p;
        }
        // Then any word gap; a single over-long word is split mid-word.
        for (size_t p = window_end; p > ci && split == 0; --p) {
            if (is_space_cp(cps[p - 1])) split = p;
        }
        if (split == 0) split = window_end;

        chunks.emplace_back(text.substr(starts[ci], starts[split] - starts[ci]));
        ci = split;
    }
    return chunks;
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view chunk) {
    validate_template(tmpl);
    std::string out = tmpl.body;
    out.replace(out.find(kSlot), kSlot.size(), chunk);
    return out;
}

struct HttpChatClient::Impl {
    httplib::Client client;
    std::string model;
    std::string token;

    Impl(const std::string& base_url, std::string model_name, std::optional<std::string> tok,
         int timeout_seconds)
        : client(base_url), model(std::move(model_name)) {
        if (tok) {
            token = *tok;
        } else if (const char* env = std::getenv("KORPUS_LLM_TOKEN")) {
            token = env;
        }
        client.set_connection_timeout(timeout_seconds, 0);
        client.set_read_timeout(timeout_seconds, 0);
        client.set_write_timeout(timeout_seconds, 0);
    }
};

HttpChatClient::HttpChatClient(std::string base_url, std::string model,
                               std::optional<std::string> token, int timeout_seconds)
    : impl_(std::make_unique<Impl>(base_url, std::move(model), std::move(token),
                                   timeout_seconds)) {}

HttpChatClient::~HttpChatClient() = default;

ChatResult HttpChatClient::complete(const ChatRequest& request) {
    ordered_json body = ordered_json::object();
    body["model"] = request.model.empty() ? impl_->model : request.model;
    body["messages"] = ordered_json::array();
    for (const auto& msg : request.messages) {
        body["messages"].push_back({{"role", msg.role}, {"content", msg.content}});
    }
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    body["max_tokens"] = request.max_tokens;

    httplib::Headers headers;
    if (!impl_->token.empty()) headers.emplace("Authorization", "Bearer " + impl_->token);

    ChatResult result;
    auto res = impl_->client.Post("/v1/chat/completions", headers, body.dump(),
                                  "application/json");
    if (!res) {
        result.transient = true;
        result.error = "network error: " + httplib::to_string(res.error());
        return result;
    }
    result.status = res->status;
    if (res->status < 200 || res->status >= 300) {
        result.transient = res->status == 408 || res->status == 429 || res->status >= 500;
        result.error = "http status " + std::to_string(res->status);
        return result;
    }
    try {
        auto j = ordered_json::parse(res->body);
        result.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
        result.ok = true;
    } catch (const std::exception& e) {
        result.error = std::string("malformed response: ") + e.what();
    }
    return result;
}

PostprocessResult postprocess(std::string_view raw_response, const PromptTemplate& tmpl,
                              std::string_view chunk, std::string_view prompt) {
    const std::string chunk_trimmed(trim_view(chunk));
    std::string_view s = trim_view(raw_response);

    auto strip_prefix = [&](std::string_view prefix) {
        if (prefix.empty() || s.size() < prefix.size()) return false;
        if (s.substr(0, prefix.size()) != prefix) return false;
        s = trim_view(s.substr(prefix.size()));
        return true;
    };

    strip_prefix(trim_view(prompt));
    if (s != chunk_trimmed) strip_prefix(chunk_trimmed);

    bool stripped = true;
    while (stripped) {
        stripped = strip_prefix(tmpl.expected_marker);
        for (const auto& prefix : meta_prefixes()) stripped = strip_prefix(prefix) || stripped;
    }

    PostprocessResult out;
    out.text = std::string(s);
    if (out.text.empty()) {
        out.drop_reason = "empty-after-postprocess";
    } else if (out.text == chunk_trimmed) {
        out.drop_reason = "echo";
    }
    return out;
}

SynthResult generate(const std::vector<Document>& docs, ChatClient& client,
                     const SynthOptions& options) {
    if (options.templates.empty()) throw std::invalid_argument("no templates given");
    if (options.templates.size() > 5)
        throw std::invalid_argument("at most five templates per run");
    for (const auto& tmpl : options.templates) validate_template(tmpl);
    if (options.retry.max_attempts < 1)
        throw std::invalid_argument("retry.max_attempts must be at least 1");

    std::vector<Task> tasks;
    for (size_t d = 0; d < docs.size(); ++d) {
        auto chunks = chunk_text(docs[d].text, options.max_chars);
        auto template_indices = pick_template_indices(options, docs[d].id);
        for (size_t c = 0; c < chunks.size(); ++c) {
            for (size_t t : template_indices) {
                tasks.push_back({d, docs[d].id, c, chunks[c], t});
            }
        }
    }

    std::vector<TaskOutcome> outcomes(tasks.size());
    std::atomic<size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            const PromptTemplate& tmpl = options.templates[task.template_index];
            const std::string prompt = render_prompt(tmpl, task.chunk);

            ChatRequest request;
            request.messages.push_back({"user", prompt});
            request.temperature = options.temperature;
            request.top_p = options.top_p;
            request.max_tokens = options.max_tokens;
            request.model = options.model_tag;

            TaskOutcome& outcome = outcomes[i];
            ChatResult result;
            int attempt = 0;
            double backoff = options.retry.initial_backoff_ms;
            for (;;) {
                ++attempt;
                result = client.complete(request);
                if (result.ok || !result.transient || attempt >= options.retry.max_attempts) break;
                ++outcome.retries;
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(static_cast<long>(backoff)));
                backoff *= options.retry.backoff_multiplier;
            }

            if (!result.ok) {
                outcome.dead_letter =
                    DeadLetter{task.doc_id, task.chunk_index, tmpl.id, result.error, attempt};
                continue;
            }
            auto post = postprocess(result.content, tmpl, task.chunk, prompt);
            if (!post.drop_reason.empty()) {
                outcome.dropped_empty = post.drop_reason == "empty-after-postprocess";
                outcome.dropped_echo = post.drop_reason == "echo";
                outcome.dead_letter =
                    DeadLetter{task.doc_id, task.chunk_index, tmpl.id, post.drop_reason, attempt};
                continue;
            }
            outcome.record = SynthRecord{task.doc_id,     task.chunk_index, tmpl.id,
                                         result.content,  post.text,        options.model_tag};
        }
    };

    size_t workers = std::min(options.concurrency == 0 ? 1 : options.concurrency, tasks.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SynthResult result;
    for (auto& outcome : outcomes) {
        result.retries += outcome.retries;
        if (outcome.dropped_empty) ++result.dropped_empty;
        if (outcome.dropped_echo) ++result.dropped_echo;
        if (outcome.record) result.records.push_back(std::move(*outcome.record));
        if (outcome.dead_letter) result.dead_letters.push_back(std::move(*outcome.dead_letter));
    }
    return result;
}

void write_synth_records(const std::string& path, const std::vector<SynthRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

std::vector<SynthRecord> read_synth_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<SynthRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = ordered_json::parse(line);
        SynthRecord rec;
        rec.source_doc_id = j.at("source_doc_id").get<std::string>();
        rec.chunk_index = j.at("chunk_index").get<size_t>();
        rec.template_id = j.at("template_id").get<std::string>();
        rec.raw_response = j.at("raw_response").get<std::string>();
        rec.text = j.at("text").get<std::string>();
        rec.model_tag = j.at("model_tag").get<std::string>();
        records.push_back(std::move(rec));
    }
    return records;
}

void write_dead_letters(const std::string& path, const std::vector<DeadLetter>& letters) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& letter : letters) {
        ordered_json j = ordered_json::object();
        j["source_doc_id"] = letter.source_doc_id;
        j["chunk_index"] = letter.chunk_index;
        j["template_id"] = letter.template_id;
        j["reason"] = letter.reason;
        j["attempts"] = letter.attempts;
        out << j.dump() << '\n';
    }
}

}  // namespace korpus
