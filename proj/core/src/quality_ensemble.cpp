#include "korpus/quality_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace korpus {

namespace {

// The judge scaffold, including its quirks (the stray "{" before the
// language block and the grade wording), ships exactly as deployed.
constexpr const char* kJudgeSystem =
    "Deine Aufgabe ist es zu bewerten, wie gut die deutsche Sprachqualität eines deutschen "
    "Textauszugs ist.\n"
    "\n"
    "Gebe deine Bewertung in folgendem JSON-Format:\n"
    "{\n"
    "    \"content_criticism\": str (Falls es Schwächen der Antwort im Bezug auf Inhalt gibt, "
    "zum Beispiel plötzlicher Themenwechsel, unklarer Sinn, oder fehlende Informationen, nenne "
    "und belege sie anhand von Beispielen.),\n"
    "\n"
    "    \"content_grade\": number (Eine Zahl zwischen 1 und 5, wobei 5 die beste und 1 die "
    "schlechteste Bewertung ist:\n"
    "    5: Sehr kohärent und informativ, sehr hohe Qualität.\n"
    "    4: Kohärent und informativ.\n"
    "    3: Kleine Schächen im Inhalt, aber der Sinn kann erfasst werden.\n"
    "    2: Begrenzte Relevanz oder Genauigkeit, der Sinn kann nicht ganz erfasst werden.\n"
    "    1: Völlig inkonsistent oder unsinnig.\n"
    "),\n"
    "{\n"
    "    \"language_criticism\": str (Falls es Schwächen der Antwort im Bezug auf Sprache gibt, "
    "zum Beispiel Mischung verschiedener Sprachen, Schimpfwörter, unübliche Wortwahl, nenne und "
    "belege sie anhand von Beispielen.),\n"
    "\n"
    "    \"language_grade\": number (Eine Zahl zwischen 1 und 5, wobei 5 die beste und 1 die "
    "schlechteste Bewertung ist:\n"
    "    5: Sehr förmliche, objektive deutsche Sprache.\n"
    "    4: Wenige, vernachlässigbare Sprachfehler.\n"
    "    3: Es gibt sprachliche Schwächen, aber der Sinn kann gut erfasst werden.\n"
    "    2: Stark umgangssprachlich/Sprachmischung.\n"
    "    1: Grobe Sprachmischung, Schimpfwörter oder schlechte Wortwahl, der Sinn kann nicht "
    "ganz erfasst werden.\n"
    "),\n"
    "    \"orthography_criticism\": str (Falls es Schwächen der Antwort im Bezug auf Grammatik "
    "und Rechtschreibung oder Tippfehler gibt, nenne und belege sie anhand von Beispielen. Dazu "
    "gehören Worte, die getrennt geschrieben wurden obwohl sie zusammengeschrieben werden "
    "sollten, falsche Verbbeugung und falsche Deklination, etc.),\n"
    "\n"
    "    \"orthography_grade\": number (Eine Zahl zwischen 1 und 5, wobei 5 die beste und 1 die "
    "schlechteste Bewertung ist:\n"
    "    5: Keine Fehler.\n"
    "    4: wenige unbedeutende Fehler.\n"
    "    3: einige unbedeutende Fehler.\n"
    "    2: ein paar grobe Fehler, aber die Antwort ist verständlich.\n"
    "    1: so viele Fehler, dass die Antwort unverständlich ist.\n"
    "),\n";

// Extracts the first balanced top-level JSON object, honoring strings and
// escapes. Returns empty view when none closes.
std::string_view balanced_object(std::string_view s, size_t from) {
    const size_t open = s.find('{', from);
    if (open == std::string_view::npos) return {};
    int depth = 0;
    bool in_string = false;
    for (size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
        } else if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return s.substr(open, i - open + 1);
        }
    }
    return {};
}

std::optional<int> coerce_grade(const nlohmann::json& value) {
    if (value.is_number_integer()) return value.get<int>();
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (d == std::floor(d)) return static_cast<int>(d);
        return std::nullopt;
    }
    if (value.is_string()) {
        try {
            size_t used = 0;
            const int v = std::stoi(value.get<std::string>(), &used);
            if (used == value.get<std::string>().size()) return v;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

std::optional<JudgeVerdict> verdict_from_json(const nlohmann::json& j, std::string* error) {
    JudgeVerdict verdict;
    const auto grade = [&](const char* field, int& slot) {
        if (!j.contains(field)) {
            if (error) *error = std::string("judge-parse: missing ") + field;
            return false;
        }
        const auto value = coerce_grade(j.at(field));
        if (!value.has_value() || *value < 1 || *value > 5) {
            if (error) *error = std::string("judge-parse: bad ") + field;
            return false;
        }
        slot = *value;
        return true;
    };
    if (!grade("content_grade", verdict.content_grade)) return std::nullopt;
    if (!grade("language_grade", verdict.language_grade)) return std::nullopt;
    if (!grade("orthography_grade", verdict.orthography_grade)) return std::nullopt;
    const auto text_field = [&](const char* field, std::string& slot) {
        if (j.contains(field) && j.at(field).is_string()) slot = j.at(field).get<std::string>();
    };
    text_field("content_criticism", verdict.content_criticism);
    text_field("language_criticism", verdict.language_criticism);
    text_field("orthography_criticism", verdict.orthography_criticism);
    return verdict;
}

template <typename T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& value) {
    if (value.has_value()) j[key] = *value;
}

}  // namespace

JudgePrompt build_judge_prompt_parts(const Document& doc) {
    JudgePrompt prompt;
    prompt.system = kJudgeSystem;
    prompt.user = "Textauszug:\n" + doc.text;
    prompt.assistant_primer = "Bewertungs-JSON:\n\n{";
    return prompt;
}

std::string build_judge_prompt(const Document& doc) {
    const JudgePrompt parts = build_judge_prompt_parts(doc);
    return "SYSTEM: " + parts.system + "\nUSER: " + parts.user +
           "\n\nASSISTANT: " + parts.assistant_primer;
}

std::optional<JudgeVerdict> parse_judge_response(std::string_view raw, std::string* error) {
    std::string last_error = "judge-parse: no JSON object found";
    // Pass 1: every balanced object in the raw response.
    for (size_t from = 0; from < raw.size();) {
        const std::string_view candidate = balanced_object(raw, from);
        if (candidate.empty()) break;
        nlohmann::json j = nlohmann::json::parse(candidate, nullptr, false);
        if (j.is_object()) {
            std::string why;
            if (auto verdict = verdict_from_json(j, &why); verdict.has_value()) return verdict;
            last_error = why;
        }
        from = static_cast<size_t>(candidate.data() - raw.data()) + 1;
    }
    // Pass 2: the response continues the primer's "{".
    {
        std::string primed = "{";
        primed += raw;
        const std::string_view candidate = balanced_object(primed, 0);
        if (!candidate.empty()) {
            nlohmann::json j = nlohmann::json::parse(candidate, nullptr, false);
            if (j.is_object()) {
                std::string why;
                if (auto verdict = verdict_from_json(j, &why); verdict.has_value()) return verdict;
                last_error = why;
            }
        }
    }
    if (error) *error = last_error;
    return std::nullopt;
}

int edu_score(const JudgeVerdict& verdict) {
    return std::min({verdict.content_grade, verdict.language_grade, verdict.orthography_grade});
}

double instr_percentile_threshold(const std::vector<double>& probs, double percentile) {
    if (probs.size() < 20) {
        throw std::runtime_error(
            "need at least 20 probability values for a stable percentile threshold; "
            "score more documents first");
    }
    if (percentile <= 0.0 || percentile > 1.0) throw std::invalid_argument("bad percentile");
    std::vector<double> sorted = probs;
    std::sort(sorted.begin(), sorted.end());
    size_t rank = static_cast<size_t>(
        std::ceil(percentile * static_cast<double>(sorted.size())));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

void write_thresholds(const std::string& path, const QualityThresholds& thresholds) {
    nlohmann::ordered_json j;
    j["instr_bert"] = thresholds.instr_bert;
    j["instr_ft"] = thresholds.instr_ft;
    j["percentile"] = thresholds.percentile;
    j["sample_count"] = thresholds.sample_count;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write thresholds: " + path);
    out << j.dump(2) << '\n';
    if (!out.flush()) throw std::runtime_error("failed writing thresholds: " + path);
}

QualityThresholds read_thresholds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open thresholds: " + path);
    nlohmann::json j;
    in >> j;
    QualityThresholds t;
    t.instr_bert = j.at("instr_bert").get<double>();
    t.instr_ft = j.at("instr_ft").get<double>();
    t.percentile = j.value("percentile", 0.85);
    t.sample_count = j.value("sample_count", size_t{0});
    return t;
}

int overall_points(const QualityScorecard& card, const QualityThresholds& thresholds) {
    int points = 0;
    if (card.edu_bert_score.has_value() && *card.edu_bert_score == 5) points += 3;
    if (card.edu_ft_conf.has_value() && *card.edu_ft_conf > 0.99) points += 2;
    if (card.grammar_bert_label.has_value() && *card.grammar_bert_label == "high") points += 3;
    if (card.grammar_ft_conf.has_value() && *card.grammar_ft_conf > 0.99) points += 2;
    if (card.instr_bert_prob.has_value() && *card.instr_bert_prob >= thresholds.instr_bert) {
        points += 6;
    }
    if (card.instr_ft_prob.has_value() && *card.instr_ft_prob >= thresholds.instr_ft) points += 4;
    return points;
}

std::string bucketize(int points) {
    if (points >= 12) return "high";
    if (points >= 9) return "medium-high";
    if (points >= 5) return "medium";
    if (points >= 3) return "medium-low";
    return "low";
}

int bucket_rank(const std::string& bucket) {
    if (bucket == "low") return 0;
    if (bucket == "medium-low") return 1;
    if (bucket == "medium") return 2;
    if (bucket == "medium-high") return 3;
    if (bucket == "high") return 4;
    return -1;
}

void finalize_scorecard(QualityScorecard& card, const QualityThresholds& thresholds) {
    card.overall_points = overall_points(card, thresholds);
    card.bucket = bucketize(card.overall_points);
}

void write_scorecards(const std::string& path, const std::vector<QualityScorecard>& cards) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write scorecards: " + path);
    for (const auto& card : cards) {
        nlohmann::ordered_json j;
        j["doc_id"] = card.doc_id;
        put_optional(j, "edu_bert_score", card.edu_bert_score);
        put_optional(j, "edu_ft_conf", card.edu_ft_conf);
        put_optional(j, "grammar_bert_label", card.grammar_bert_label);
        put_optional(j, "grammar_ft_conf", card.grammar_ft_conf);
        put_optional(j, "instr_bert_prob", card.instr_bert_prob);
        put_optional(j, "instr_ft_prob", card.instr_ft_prob);
        j["overall_points"] = card.overall_points;
        j["bucket"] = card.bucket;
        out << j.dump() << '\n';
    }
    if (!out.flush()) throw std::runtime_error("failed writing scorecards: " + path);
}

std::vector<QualityScorecard> read_scorecards(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scorecards: " + path);
    std::vector<QualityScorecard> cards;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        QualityScorecard card;
        card.doc_id = j.at("doc_id").get<std::string>();
        if (j.contains("edu_bert_score")) card.edu_bert_score = j["edu_bert_score"].get<int>();
        if (j.contains("edu_ft_conf")) card.edu_ft_conf = j["edu_ft_conf"].get<double>();
        if (j.contains("grammar_bert_label")) {
            card.grammar_bert_label = j["grammar_bert_label"].get<std::string>();
        }
        if (j.contains("grammar_ft_conf")) card.grammar_ft_conf = j["grammar_ft_conf"].get<double>();
        if (j.contains("instr_bert_prob")) card.instr_bert_prob = j["instr_bert_prob"].get<double>();
        if (j.contains("instr_ft_prob")) card.instr_ft_prob = j["instr_ft_prob"].get<double>();
        card.overall_points = j.value("overall_points", 0);
        card.bucket = j.value("bucket", "");
        cards.push_back(std::move(card));
    }
    return cards;
}

}  // namespace korpus
