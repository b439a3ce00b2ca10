#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "korpus/document.hpp"

// Streaming corpus ingestion and serialization. JSONL is the canonical
// inter-stage format: one document object per line, UTF-8, fields
// id/url/text/language/source_tag/annotations (raw_html is carried base64
// encoded when present). Readers hold one record in memory at a time.

namespace korpus {

enum class CorpusFormat { jsonl, wet };

CorpusFormat parse_corpus_format(const std::string& name);

class CorpusReader {
  public:
    virtual ~CorpusReader() = default;

    // Next document in file order, or nullopt at end of stream.
    virtual std::optional<Document> next() = 0;

    // Records skipped because they could not be parsed.
    virtual std::uint64_t malformed_count() const = 0;
};

// Reads canonical JSONL. Documents without an id get `<file-stem>:<line-index>`.
std::unique_ptr<CorpusReader> open_jsonl(const std::filesystem::path& file, std::string source_tag = "");

// Reads WET conversion records (plain or gzip). Non-conversion records are
// skipped silently; structurally broken records count as malformed.
std::unique_ptr<CorpusReader> open_wet(const std::filesystem::path& file, std::string source_tag = "");

// Opens a file or every matching file under a directory (sorted by name).
std::unique_ptr<CorpusReader> open_corpus(const std::filesystem::path& source, CorpusFormat format,
                                          std::string source_tag = "");

nlohmann::ordered_json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::ordered_json& j);

// Streaming JSONL writer. Creates `<sink>.partial` while the file is open and
// removes it on a clean close; IO failures throw with the marker left behind.
class JsonlWriter {
  public:
    explicit JsonlWriter(const std::filesystem::path& sink);
    ~JsonlWriter();

    JsonlWriter(const JsonlWriter&) = delete;
    JsonlWriter& operator=(const JsonlWriter&) = delete;

    void write(const Document& doc);
    // Flushes, removes the partial marker and closes the file.
    void close();

    const StageStats& stats() const { return stats_; }

  private:
    std::filesystem::path sink_;
    std::filesystem::path marker_;
    std::ofstream out_;
    StageStats stats_;
    bool closed_ = false;
};

// Drains `docs` into `sink`; returns the stage stats of the write.
StageStats write_corpus(CorpusReader& docs, const std::filesystem::path& sink);

std::string base64_encode(std::string_view data);
std::optional<std::string> base64_decode(std::string_view data);

}  // namespace korpus
