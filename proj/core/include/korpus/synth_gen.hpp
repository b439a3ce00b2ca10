#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "korpus/document.hpp"

namespace korpus {

struct PromptTemplate {
    std::string id;
    std::string body;             // contains exactly one {document} slot
    std::string expected_marker;  // mandated answer prefix, e.g. "Umformulierung:"
};

// The five built-in generation templates: rephrase, summarise, wiki_style,
// qa_pairs, lists. The same bodies ship as data/templates/<id>.txt.
const std::vector<PromptTemplate>& builtin_templates();
const PromptTemplate& builtin_template(std::string_view id);

// Loads a body from file and validates the single {document} slot.
PromptTemplate load_template_file(const std::string& id, const std::string& path,
                                  const std::string& expected_marker);

// Splits at the largest separator that fits: paragraph break, then sentence
// end, then word gap; a single over-long word is hard-split. Lengths are in
// code points; concatenating the chunks reproduces the input byte-for-byte.
// max_chars below 200 throws std::invalid_argument.
std::vector<std::string> chunk_text(std::string_view text, size_t max_chars = 8000);

// Verbatim substitution of the chunk into the {document} slot.
std::string render_prompt(const PromptTemplate& tmpl, std::string_view chunk);

// Chat-completion client contract. The HTTP implementation speaks the usual
// JSON shape (model/messages/temperature/top_p/max_tokens -> choices[0]
// .message.content); a scripted fake implements the same interface in tests.
struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    double top_p = 0.9;
    int max_tokens = 2048;
    std::string model;
};

struct ChatResult {
    bool ok = false;
    int status = 0;        // HTTP status when available
    bool transient = false;  // retryable failure (timeout, 429, 5xx)
    std::string content;
    std::string error;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatResult complete(const ChatRequest& request) = 0;
};

// POSTs to <base_url>/v1/chat/completions. The bearer token comes from the
// KORPUS_LLM_TOKEN environment variable unless set explicitly.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(std::string base_url, std::string model = "default",
                            std::optional<std::string> token = std::nullopt,
                            int timeout_seconds = 60);
    ~HttpChatClient() override;
    ChatResult complete(const ChatRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RetryPolicy {
    int max_attempts = 3;
    int initial_backoff_ms = 200;
    double backoff_multiplier = 2.0;
};

struct SynthRecord {
    std::string source_doc_id;
    size_t chunk_index = 0;
    std::string template_id;
    std::string raw_response;
    std::string text;  // post-processed
    std::string model_tag;
};

struct DeadLetter {
    std::string source_doc_id;
    size_t chunk_index = 0;
    std::string template_id;
    std::string reason;
    int attempts = 0;
};

struct PostprocessResult {
    std::string text;
    std::string drop_reason;  // empty = keep; "echo" | "empty-after-postprocess"
};

// Strips the template's marker, known meta-prefixes ("Hier ist die
// umformulierte Version:", English variants, …) and verbatim echoes of the
// prompt or input chunk from the front of the response.
PostprocessResult postprocess(std::string_view raw_response, const PromptTemplate& tmpl,
                              std::string_view chunk, std::string_view prompt = {});

struct SynthOptions {
    std::vector<PromptTemplate> templates;  // at most the five built-ins
    size_t max_chars = 8000;
    size_t concurrency = 16;
    RetryPolicy retry;
    std::string model_tag = "default";
    // 0 = apply every template to every document; k>0 = deterministic
    // per-document sample of k templates.
    size_t sample_k = 0;
    uint64_t sample_seed = 42;
    double temperature = 0.7;
    double top_p = 0.9;
    int max_tokens = 2048;
};

struct SynthResult {
    std::vector<SynthRecord> records;       // ordered by (doc, chunk, template)
    std::vector<DeadLetter> dead_letters;
    size_t retries = 0;
    size_t dropped_empty = 0;
    size_t dropped_echo = 0;
};

// One request per (chunk, template), fanned out over a bounded worker pool;
// transient failures retry with exponential backoff and exhausted or
// permanent failures land in dead_letters. Output order is deterministic.
SynthResult generate(const std::vector<Document>& docs, ChatClient& client,
                     const SynthOptions& options);

void write_synth_records(const std::string& path, const std::vector<SynthRecord>& records);
std::vector<SynthRecord> read_synth_records(const std::string& path);
void write_dead_letters(const std::string& path, const std::vector<DeadLetter>& letters);

}  // namespace korpus
