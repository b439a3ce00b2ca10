#include "korpus/corpus_io.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <stdexcept>

#include <zlib.h>

#include "korpus/utf8.hpp"

namespace korpus {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

CorpusFormat parse_corpus_format(const std::string& name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "wet") return CorpusFormat::wet;
    throw std::runtime_error("unknown corpus format: " + name + " (expected jsonl or wet)");
}

namespace {

std::string file_stem(const fs::path& p) {
    std::string name = p.filename().string();
    for (const char* ext : {".gz", ".jsonl", ".wet", ".warc"}) {
        if (name.size() > std::strlen(ext) && name.ends_with(ext)) {
            name.resize(name.size() - std::strlen(ext));
        }
    }
    return name;
}

// Line source that transparently inflates gzip (including the multi-member
// files Common Crawl ships). Returns lines without the trailing newline.
class LineSource {
  public:
    explicit LineSource(const fs::path& file) : in_(file, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open input file: " + file.string());
        unsigned char magic[2] = {0, 0};
        in_.read(reinterpret_cast<char*>(magic), 2);
        gzipped_ = in_.gcount() == 2 && magic[0] == 0x1F && magic[1] == 0x8B;
        in_.clear();
        in_.seekg(0);
        if (gzipped_) {
            std::memset(&strm_, 0, sizeof(strm_));
            if (inflateInit2(&strm_, 15 + 32) != Z_OK) throw std::runtime_error("inflateInit failed");
            zlib_open_ = true;
        }
    }

    ~LineSource() {
        if (zlib_open_) inflateEnd(&strm_);
    }

    bool getline(std::string& line) {
        line.clear();
        while (true) {
            const auto nl = buffer_.find('\n', scan_pos_);
            if (nl != std::string::npos) {
                line.assign(buffer_, scan_pos_, nl - scan_pos_);
                scan_pos_ = nl + 1;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
            if (!fill()) {
                if (scan_pos_ < buffer_.size()) {
                    line.assign(buffer_, scan_pos_, buffer_.size() - scan_pos_);
                    scan_pos_ = buffer_.size();
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    return true;
                }
                return false;
            }
        }
    }

    // Reads exactly n decompressed bytes (or fewer at EOF) into out.
    std::size_t read_exact(std::string& out, std::size_t n) {
        out.clear();
        while (out.size() < n) {
            const std::size_t avail = buffer_.size() - scan_pos_;
            if (avail == 0) {
                if (!fill()) break;
                continue;
            }
            const std::size_t take = std::min(avail, n - out.size());
            out.append(buffer_, scan_pos_, take);
            scan_pos_ += take;
        }
        return out.size();
    }

  private:
    bool fill() {
        if (scan_pos_ > 0) {
            buffer_.erase(0, scan_pos_);
            scan_pos_ = 0;
        }
        char raw[1 << 16];
        in_.read(raw, sizeof(raw));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (got == 0) return false;
        if (!gzipped_) {
            buffer_.append(raw, got);
            return true;
        }
        strm_.next_in = reinterpret_cast<Bytef*>(raw);
        strm_.avail_in = static_cast<uInt>(got);
        char chunk[1 << 16];
        while (strm_.avail_in > 0) {
            strm_.next_out = reinterpret_cast<Bytef*>(chunk);
            strm_.avail_out = sizeof(chunk);
            const int rc = inflate(&strm_, Z_NO_FLUSH);
            if (rc != Z_OK && rc != Z_STREAM_END) throw std::runtime_error("gzip inflate error");
            buffer_.append(chunk, sizeof(chunk) - strm_.avail_out);
            if (rc == Z_STREAM_END) {
                // Multi-member gzip: restart for the next member.
                if (inflateReset2(&strm_, 15 + 32) != Z_OK) throw std::runtime_error("inflateReset failed");
            }
        }
        return true;
    }

    std::ifstream in_;
    bool gzipped_ = false;
    bool zlib_open_ = false;
    z_stream strm_{};
    std::string buffer_;
    std::size_t scan_pos_ = 0;
};

class JsonlReader final : public CorpusReader {
  public:
    JsonlReader(const fs::path& file, std::string source_tag)
        : source_(file), stem_(file_stem(file)), tag_(std::move(source_tag)) {}

    std::optional<Document> next() override {
        std::string line;
        while (source_.getline(line)) {
            const std::uint64_t index = line_index_++;
            if (line.empty()) continue;
            try {
                auto j = ordered_json::parse(line);
                Document doc = document_from_json(j);
                if (doc.id.empty()) doc.id = stem_ + ":" + std::to_string(index);
                if (doc.source_tag.empty()) doc.source_tag = tag_;
                return doc;
            } catch (const std::exception&) {
                ++malformed_;
            }
        }
        return std::nullopt;
    }

    std::uint64_t malformed_count() const override { return malformed_; }

  private:
    LineSource source_;
    std::string stem_;
    std::string tag_;
    std::uint64_t line_index_ = 0;
    std::uint64_t malformed_ = 0;
};

// WET: WARC records whose header block is CRLF-delimited key/value lines,
// followed by Content-Length payload bytes. Only `WARC-Type: conversion`
// records carry extracted page text.
class WetReader final : public CorpusReader {
  public:
    WetReader(const fs::path& file, std::string source_tag)
        : source_(file), stem_(file_stem(file)), tag_(std::move(source_tag)) {}

    std::optional<Document> next() override {
        std::string line;
        while (true) {
            if (!pending_version_.has_value()) {
                bool found = false;
                while (source_.getline(line)) {
                    if (line.rfind("WARC/", 0) == 0) {
                        pending_version_ = line;
                        found = true;
                        break;
                    }
                    if (!line.empty()) ++stray_lines_;
                }
                if (!found) return std::nullopt;
            }
            pending_version_.reset();
            const std::uint64_t index = record_index_++;

            std::string warc_type;
            std::string target_uri;
            long long content_length = -1;
            bool header_ok = true;
            while (source_.getline(line)) {
                if (line.empty()) break;
                const auto colon = line.find(':');
                if (colon == std::string::npos) {
                    header_ok = false;
                    continue;
                }
                std::string key = line.substr(0, colon);
                std::string value = line.substr(colon + 1);
                while (!value.empty() && value.front() == ' ') value.erase(0, 1);
                if (key == "WARC-Type") {
                    warc_type = value;
                } else if (key == "WARC-Target-URI") {
                    target_uri = value;
                } else if (key == "Content-Length") {
                    try {
                        content_length = std::stoll(value);
                    } catch (const std::exception&) {
                        header_ok = false;
                    }
                }
            }
            if (!header_ok || content_length < 0) {
                ++malformed_;
                continue;  // resync on the next WARC/ line
            }

            std::string body;
            if (source_.read_exact(body, static_cast<std::size_t>(content_length)) !=
                static_cast<std::size_t>(content_length)) {
                ++malformed_;
                return std::nullopt;  // truncated file
            }

            if (warc_type != "conversion") continue;

            Document doc;
            doc.id = stem_ + ":" + std::to_string(index);
            if (!target_uri.empty()) doc.url = target_uri;
            // WET bodies are UTF-8 by convention; decode lossily to keep the
            // invariant that Document.text is valid UTF-8.
            doc.text = utf8::encode(utf8::decode_lossy(body));
            doc.source_tag = tag_;
            return doc;
        }
    }

    std::uint64_t malformed_count() const override { return malformed_; }

  private:
    LineSource source_;
    std::string stem_;
    std::string tag_;
    std::optional<std::string> pending_version_;
    std::uint64_t record_index_ = 0;
    std::uint64_t malformed_ = 0;
    std::uint64_t stray_lines_ = 0;
};

// Chains readers over a sorted list of files.
class MultiFileReader final : public CorpusReader {
  public:
    MultiFileReader(std::vector<fs::path> files, CorpusFormat format, std::string tag)
        : files_(std::move(files)), format_(format), tag_(std::move(tag)) {}

    std::optional<Document> next() override {
        while (true) {
            if (!current_) {
                if (file_idx_ >= files_.size()) return std::nullopt;
                const auto& f = files_[file_idx_++];
                current_ = format_ == CorpusFormat::jsonl ? open_jsonl(f, tag_) : open_wet(f, tag_);
            }
            if (auto doc = current_->next()) return doc;
            malformed_ += current_->malformed_count();
            current_.reset();
        }
    }

    std::uint64_t malformed_count() const override {
        return malformed_ + (current_ ? current_->malformed_count() : 0);
    }

  private:
    std::vector<fs::path> files_;
    CorpusFormat format_;
    std::string tag_;
    std::size_t file_idx_ = 0;
    std::unique_ptr<CorpusReader> current_;
    std::uint64_t malformed_ = 0;
};

bool matches_format(const fs::path& p, CorpusFormat format) {
    const std::string name = p.filename().string();
    if (format == CorpusFormat::jsonl) return name.ends_with(".jsonl") || name.ends_with(".jsonl.gz");
    return name.ends_with(".wet") || name.ends_with(".wet.gz") || name.ends_with(".warc.wet.gz");
}

}  // namespace

std::unique_ptr<CorpusReader> open_jsonl(const fs::path& file, std::string source_tag) {
    return std::make_unique<JsonlReader>(file, std::move(source_tag));
}

std::unique_ptr<CorpusReader> open_wet(const fs::path& file, std::string source_tag) {
    return std::make_unique<WetReader>(file, std::move(source_tag));
}

std::unique_ptr<CorpusReader> open_corpus(const fs::path& source, CorpusFormat format, std::string source_tag) {
    if (!fs::exists(source)) throw std::runtime_error("corpus source does not exist: " + source.string());
    if (fs::is_directory(source)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(source)) {
            if (entry.is_regular_file() && matches_format(entry.path(), format)) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        return std::make_unique<MultiFileReader>(std::move(files), format, std::move(source_tag));
    }
    return format == CorpusFormat::jsonl ? open_jsonl(source, std::move(source_tag))
                                         : open_wet(source, std::move(source_tag));
}

ordered_json document_to_json(const Document& doc) {
    ordered_json j = ordered_json::object();
    j["id"] = doc.id;
    if (doc.url) j["url"] = *doc.url;
    j["text"] = doc.text;
    if (doc.language) j["language"] = *doc.language;
    j["source_tag"] = doc.source_tag;
    j["annotations"] = doc.annotations;
    if (doc.raw_html) j["raw_html"] = base64_encode(*doc.raw_html);
    return j;
}

Document document_from_json(const ordered_json& j) {
    if (!j.is_object()) throw std::runtime_error("document record is not an object");
    Document doc;
    if (j.contains("id") && j["id"].is_string()) doc.id = j["id"].get<std::string>();
    if (j.contains("url") && j["url"].is_string()) doc.url = j["url"].get<std::string>();
    if (j.contains("text")) {
        if (!j["text"].is_string()) throw std::runtime_error("text field must be a string");
        doc.text = j["text"].get<std::string>();
    }
    if (j.contains("language") && j["language"].is_string()) doc.language = j["language"].get<std::string>();
    if (j.contains("source_tag") && j["source_tag"].is_string()) doc.source_tag = j["source_tag"].get<std::string>();
    if (j.contains("annotations") && j["annotations"].is_object()) doc.annotations = j["annotations"];
    if (j.contains("raw_html") && j["raw_html"].is_string()) {
        auto bytes = base64_decode(j["raw_html"].get<std::string>());
        if (!bytes) throw std::runtime_error("raw_html is not valid base64");
        doc.raw_html = std::move(*bytes);
    }
    return doc;
}

JsonlWriter::JsonlWriter(const fs::path& sink) : sink_(sink), marker_(sink.string() + ".partial") {
    if (sink.has_parent_path()) fs::create_directories(sink.parent_path());
    std::ofstream marker(marker_);
    out_.open(sink, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open sink for writing: " + sink.string());
    stats_.stage_name = "write";
}

JsonlWriter::~JsonlWriter() {
    if (!closed_) {
        // Destruction without close() leaves the .partial marker in place.
        out_.flush();
    }
}

void JsonlWriter::write(const Document& doc) {
    const std::string line = document_to_json(doc).dump();
    out_ << line << '\n';
    if (!out_) throw std::runtime_error("write failed (disk full?): " + sink_.string());
    ++stats_.docs_in;
    ++stats_.docs_out;
    stats_.bytes_in += doc.text.size();
    stats_.bytes_out += doc.text.size();
}

void JsonlWriter::close() {
    if (closed_) return;
    out_.flush();
    if (!out_) throw std::runtime_error("flush failed: " + sink_.string());
    out_.close();
    std::error_code ec;
    fs::remove(marker_, ec);
    closed_ = true;
}

StageStats write_corpus(CorpusReader& docs, const fs::path& sink) {
    JsonlWriter writer(sink);
    while (auto doc = docs.next()) writer.write(*doc);
    writer.close();
    return writer.stats();
}

namespace {
constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::string_view data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        const std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                                (static_cast<unsigned char>(data[i + 1]) << 8) |
                                static_cast<unsigned char>(data[i + 2]);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
        i += 3;
    }
    const std::size_t rest = data.size() - i;
    if (rest == 1) {
        const std::uint32_t v = static_cast<unsigned char>(data[i]) << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.append("==");
    } else if (rest == 2) {
        const std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                                (static_cast<unsigned char>(data[i + 1]) << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::optional<std::string> base64_decode(std::string_view data) {
    static const auto table = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kB64Alphabet[i])] = i;
        return t;
    }();
    std::string out;
    out.reserve(data.size() / 4 * 3);
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : data) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = table[static_cast<unsigned char>(c)];
        if (v < 0) return std::nullopt;
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

}  // namespace korpus
