#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace korpus {

// One web document flowing through the pipeline. `annotations` maps a stage
// name to whatever record that stage attached (JSON object per stage).
struct Document {
    std::string id;
    std::optional<std::string> url;
    std::optional<std::string> raw_html;  // raw bytes, may be non-UTF-8
    std::string text;
    std::optional<std::string> language;
    std::string source_tag;
    nlohmann::ordered_json annotations = nlohmann::ordered_json::object();

    friend bool operator==(const Document&, const Document&) = default;
};

// Per-stage accounting in the style of a pipeline yield table. Merging is
// fieldwise addition, so shard stats can be combined in any order.
struct StageStats {
    std::string stage_name;
    std::uint64_t docs_in = 0;
    std::uint64_t docs_out = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;

    StageStats& operator+=(const StageStats& other) {
        docs_in += other.docs_in;
        docs_out += other.docs_out;
        bytes_in += other.bytes_in;
        bytes_out += other.bytes_out;
        return *this;
    }

    friend StageStats operator+(StageStats a, const StageStats& b) { return a += b; }
    friend bool operator==(const StageStats&, const StageStats&) = default;
};

// Keep/reject verdict of a single filter applied to a single document.
// `measured` records the value each rule computed, keyed by rule id; on
// rejection, `reason` names the violated rule and measured[reason] holds the
// offending value.
struct FilterOutcome {
    bool keep = true;
    std::string reason;
    std::map<std::string, double> measured;

    static FilterOutcome kept() { return FilterOutcome{}; }

    static FilterOutcome rejected(std::string why) {
        FilterOutcome out;
        out.keep = false;
        out.reason = std::move(why);
        return out;
    }

    static FilterOutcome rejected(std::string why, double value) {
        FilterOutcome out;
        out.keep = false;
        out.measured[why] = value;
        out.reason = std::move(why);
        return out;
    }
};

}  // namespace korpus
