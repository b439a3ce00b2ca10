#include <doctest.h>

#include <random>
#include <zlib.h>

#include "korpus/corpus_io.hpp"
#include "korpus/utf8.hpp"
#include "support/tempdir.hpp"

using namespace korpus;
using korpus::test::TempDir;
using korpus::test::read_file;

namespace {

std::string gzip_compress(const std::string& data) {
    z_stream strm{};
    REQUIRE(deflateInit2(&strm, Z_BEST_SPEED, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) == Z_OK);
    std::string out;
    out.resize(deflateBound(&strm, data.size()));
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    strm.avail_in = static_cast<uInt>(data.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    REQUIRE(deflate(&strm, Z_FINISH) == Z_STREAM_END);
    out.resize(out.size() - strm.avail_out);
    deflateEnd(&strm);
    return out;
}

std::string wet_record(const std::string& type, const std::string& uri, const std::string& body) {
    std::string header = "WARC/1.0\r\nWARC-Type: " + type + "\r\n";
    if (!uri.empty()) header += "WARC-Target-URI: " + uri + "\r\n";
    header += "Content-Length: " + std::to_string(body.size()) + "\r\n\r\n";
    return header + body + "\r\n\r\n";
}

}  // namespace

TEST_CASE("jsonl reader yields one document per valid line") {
    TempDir tmp;
    const auto path = tmp.write_file(
        "in.jsonl",
        R"({"id":"a","text":"eins","source_tag":"t","annotations":{}})"
        "\n"
        R"({"id":"b","text":"zwei","source_tag":"t","annotations":{}})"
        "\n"
        R"({"id":"c","text":"drei","source_tag":"t","annotations":{}})"
        "\n");
    auto reader = open_jsonl(path);
    int count = 0;
    while (auto doc = reader->next()) ++count;
    CHECK(count == 3);
    CHECK(reader->malformed_count() == 0);
}

TEST_CASE("malformed lines are skipped and counted") {
    TempDir tmp;
    const auto path = tmp.write_file("in.jsonl",
                                     R"({"id":"a","text":"eins"})"
                                     "\nnot json at all\n"
                                     R"({"id":"b","text":"zwei"})"
                                     "\n");
    auto reader = open_jsonl(path);
    std::vector<std::string> ids;
    while (auto doc = reader->next()) ids.push_back(doc->id);
    CHECK(ids == std::vector<std::string>{"a", "b"});
    CHECK(reader->malformed_count() == 1);
}

TEST_CASE("documents without ids get file stem and line index") {
    TempDir tmp;
    const auto path = tmp.write_file("dump42.jsonl", R"({"text":"x"})"
                                                     "\n"
                                                     R"({"text":"y"})"
                                                     "\n");
    auto reader = open_jsonl(path);
    CHECK(reader->next()->id == "dump42:0");
    CHECK(reader->next()->id == "dump42:1");
}

TEST_CASE("document json round trip preserves every field") {
    Document doc;
    doc.id = "2024-38:17";
    doc.url = "https://example.de/pfad?x=1";
    doc.raw_html = std::string("<p>\x01\xFFraw bytes</p>");
    doc.text = "Erste Zeile\nZweite Zeile \U0001F600 äöü";
    doc.language = "de";
    doc.source_tag = "2024-38";
    doc.annotations["filter"] = {{"keep", true}};

    const auto j = document_to_json(doc);
    const Document back = document_from_json(j);
    CHECK(back == doc);
}

TEST_CASE("writer then reader round trips a corpus and counts stats") {
    TempDir tmp;
    const auto sink = tmp.file("out.jsonl");
    std::vector<Document> docs;
    for (int i = 0; i < 5; ++i) {
        Document d;
        d.id = "d" + std::to_string(i);
        d.text = "Inhalt Nummer " + std::to_string(i);
        d.source_tag = "fixture";
        docs.push_back(d);
    }
    {
        JsonlWriter writer(sink);
        for (const auto& d : docs) writer.write(d);
        CHECK(std::filesystem::exists(sink.string() + ".partial"));
        writer.close();
    }
    CHECK_FALSE(std::filesystem::exists(sink.string() + ".partial"));

    auto reader = open_jsonl(sink);
    std::vector<Document> back;
    while (auto doc = reader->next()) back.push_back(*doc);
    CHECK(back == docs);
}

TEST_CASE("round trip of random unicode documents") {
    TempDir tmp;
    std::mt19937 rng(7);
    std::vector<Document> docs;
    const std::u32string alphabet = U"ab äüß\n\t\U0001F600€\"\\{}:";
    for (int i = 0; i < 50; ++i) {
        std::u32string text;
        const int len = static_cast<int>(rng() % 200);
        for (int k = 0; k < len; ++k) text.push_back(alphabet[rng() % alphabet.size()]);
        Document d;
        d.id = "r" + std::to_string(i);
        d.text = utf8::encode(text);
        d.source_tag = "rand";
        docs.push_back(d);
    }
    const auto sink = tmp.file("rand.jsonl");
    {
        JsonlWriter writer(sink);
        for (const auto& d : docs) writer.write(d);
        writer.close();
    }
    auto reader = open_jsonl(sink);
    for (const auto& want : docs) {
        auto got = reader->next();
        REQUIRE(got.has_value());
        CHECK(*got == want);
    }
    CHECK_FALSE(reader->next().has_value());
}

TEST_CASE("stage stats add across shards") {
    StageStats a{"filter", 10, 8, 1000, 800};
    StageStats b{"filter", 5, 2, 500, 200};
    const StageStats sum = a + b;
    CHECK(sum.docs_in == 15);
    CHECK(sum.docs_out == 10);
    CHECK(sum.bytes_in == 1500);
    CHECK(sum.bytes_out == 1000);
}

TEST_CASE("wet reader parses conversion records only") {
    TempDir tmp;
    std::string wet;
    wet += wet_record("warcinfo", "", "software: test\r\n");
    wet += wet_record("conversion", "https://example.de/seite", "Hallo Welt.\nZweite Zeile.");
    wet += wet_record("metadata", "https://example.de/seite", "irrelevant");
    wet += wet_record("conversion", "https://example.de/andere", "Anderer Inhalt");
    const auto path = tmp.write_file("crawl.wet", wet);

    auto reader = open_wet(path, "2024-38");
    auto first = reader->next();
    REQUIRE(first.has_value());
    CHECK(first->url == "https://example.de/seite");
    CHECK(first->text == "Hallo Welt.\nZweite Zeile.");
    CHECK(first->source_tag == "2024-38");
    CHECK(first->id == "crawl:1");

    auto second = reader->next();
    REQUIRE(second.has_value());
    CHECK(second->url == "https://example.de/andere");
    CHECK_FALSE(reader->next().has_value());
    CHECK(reader->malformed_count() == 0);
}

TEST_CASE("gzipped wet files including multi-member are readable") {
    TempDir tmp;
    const std::string member1 = gzip_compress(wet_record("conversion", "https://a.de/", "Inhalt A"));
    const std::string member2 = gzip_compress(wet_record("conversion", "https://b.de/", "Inhalt B"));
    const auto path = tmp.write_file("multi.wet.gz", member1 + member2);

    auto reader = open_wet(path);
    auto first = reader->next();
    REQUIRE(first.has_value());
    CHECK(first->text == "Inhalt A");
    auto second = reader->next();
    REQUIRE(second.has_value());
    CHECK(second->text == "Inhalt B");
    CHECK_FALSE(reader->next().has_value());
}

TEST_CASE("wet body with exotic payload lengths survives") {
    TempDir tmp;
    // Body containing CRLF pairs and a stray WARC/ line; Content-Length wins.
    const std::string body = "Zeile 1\r\n\r\nWARC/1.0 sieht aus wie ein Header\nEnde";
    const auto path = tmp.write_file("tricky.wet", wet_record("conversion", "https://c.de/", body));
    auto reader = open_wet(path);
    auto doc = reader->next();
    REQUIRE(doc.has_value());
    CHECK(doc->text == body);
    CHECK_FALSE(reader->next().has_value());
}

TEST_CASE("directory ingestion reads files in sorted order") {
    TempDir tmp;
    tmp.write_file("b.jsonl", R"({"id":"from-b","text":"x"})"
                              "\n");
    tmp.write_file("a.jsonl", R"({"id":"from-a","text":"x"})"
                              "\n");
    tmp.write_file("ignore.txt", "not a corpus file\n");
    auto reader = open_corpus(tmp.path(), CorpusFormat::jsonl);
    std::vector<std::string> ids;
    while (auto doc = reader->next()) ids.push_back(doc->id);
    CHECK(ids == std::vector<std::string>{"from-a", "from-b"});
}

TEST_CASE("base64 round trips binary data") {
    std::string all;
    for (int i = 0; i < 256; ++i) all.push_back(static_cast<char>(i));
    for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{3}, all.size()}) {
        const std::string part = all.substr(0, len);
        const auto decoded = base64_decode(base64_encode(part));
        REQUIRE(decoded.has_value());
        CHECK(*decoded == part);
    }
    CHECK_FALSE(base64_decode("not base64!!").has_value());
}

TEST_CASE("write_corpus reports stage stats") {
    TempDir tmp;
    const auto in = tmp.write_file("in.jsonl", R"({"id":"a","text":"zehn zeichen"})"
                                               "\n");
    const auto out = tmp.file("out.jsonl");
    auto reader = open_jsonl(in);
    const auto stats = write_corpus(*reader, out);
    CHECK(stats.docs_in == 1);
    CHECK(stats.docs_out == 1);
    CHECK(stats.bytes_out > 0);
}
