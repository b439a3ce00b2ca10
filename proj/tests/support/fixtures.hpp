#pragma once

#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "korpus/document.hpp"
#include "korpus/lang_id.hpp"

namespace korpus::test {

// Linearly separable two-class corpus: each class draws from its own
// disjoint vocabulary.
inline std::vector<korpus::LabeledText> separable_corpus(size_t per_label, uint64_t seed = 11,
                                                         int words_per_doc = 20) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 99);
    std::vector<korpus::LabeledText> data;
    data.reserve(per_label * 2);
    for (const std::string label : {"high", "low"}) {
        const std::string stem = label == "high" ? "bildung" : "laerm";
        for (size_t d = 0; d < per_label; ++d) {
            std::string text;
            for (int w = 0; w < words_per_doc; ++w) {
                if (!text.empty()) text += ' ';
                text += stem + std::to_string(pick(rng));
            }
            data.push_back({std::move(text), label});
        }
    }
    return data;
}

inline const std::vector<std::string>& german_pool() {
    static const std::vector<std::string> pool = {
        "haus", "stadt", "wasser", "berg", "landschaft", "leben", "zeitreise", "jahrbuch",
        "mensch", "arbeit", "schule", "buch", "straße", "garten", "himmel", "freund",
        "familie", "musik", "sprache", "woche", "monat", "abend", "morgen", "nacht",
        "licht", "farbe", "wald", "fluss", "brücke", "markt", "platz", "reise",
        "wetter", "sommer", "winter", "blume", "vogel", "fisch", "stein", "feld",
        "dorf", "turm", "tür", "fenster", "tisch", "stuhl", "küche", "keller",
        "dach", "mauer", "weg", "pfad", "wiese", "bach", "see", "meer",
        "insel", "küste", "hafen", "schiff", "zug", "wagen", "rad", "brot",
        "käse", "wein", "apfel", "birne", "kirsche", "nuss", "honig", "milch",
        "zucker", "salz", "pfeffer", "suppe", "kuchen", "teller", "messer", "gabel",
        "ampel", "bahnhof", "bibliothek", "brief", "denkmal", "ecke", "eingang", "fabrik",
        "gasse", "gebirge", "gewitter", "glocke", "graben", "grenze", "hügel", "kanal",
        "kapelle", "klippe", "kloster", "krone", "lampe", "laterne", "mühle", "nebel",
        "ofen", "quelle", "rathaus", "regal", "schatten", "schlüssel", "schnee", "spiegel",
        "sprung", "stern", "sturm", "tal", "teich", "ufer", "uhr", "wolke"};
    return pool;
}

inline const std::vector<std::string>& english_pool() {
    static const std::vector<std::string> pool = {
        "house", "city", "water", "mountain", "landscape", "life", "journey", "yearbook",
        "person", "work", "school", "book", "street", "garden", "sky", "friend",
        "family", "music", "language", "week", "month", "evening", "morning", "night",
        "light", "colour", "forest", "river", "bridge", "market", "square", "travel",
        "weather", "summer", "winter", "flower", "bird", "fish", "stone", "field",
        "village", "tower", "door", "window", "table", "chair", "kitchen", "cellar",
        "roof", "wall", "way", "path", "meadow", "brook", "lake", "sea",
        "island", "coast", "harbour", "ship", "train", "carriage", "wheel", "bread",
        "cheese", "wine", "apple", "pear", "cherry", "nut", "honey", "milk",
        "sugar", "salt", "pepper", "soup", "cake", "plate", "knife", "fork",
        "signal", "station", "library", "letter", "monument", "corner", "entrance", "factory",
        "alley", "highland", "thunder", "bell", "ditch", "border", "hill", "canal",
        "chapel", "cliff", "abbey", "crown", "lamp", "lantern", "mill", "fog",
        "oven", "spring", "townhall", "shelf", "shadow", "key", "snow", "mirror",
        "jump", "star", "storm", "valley", "pond", "shore", "clock", "cloud"};
    return pool;
}

inline const std::vector<std::string>& french_pool() {
    static const std::vector<std::string> pool = {
        "maison", "ville", "eau", "montagne", "paysage", "vie", "voyage", "annuaire",
        "personne", "travail", "école", "livre", "rue", "jardin", "ciel", "ami",
        "famille", "musique", "langue", "semaine", "mois", "soir", "matin", "nuit",
        "lumière", "couleur", "forêt", "rivière", "pont", "marché", "place", "trajet",
        "temps", "été", "hiver", "fleur", "oiseau", "poisson", "pierre", "champ",
        "hameau", "tour", "porte", "fenêtre", "table", "chaise", "cuisine", "cave",
        "toit", "mur", "chemin", "sentier", "pré", "ruisseau", "lac", "mer",
        "île", "côte", "port", "bateau", "locomotive", "voiture", "roue", "pain",
        "fromage", "vin", "pomme", "poire", "cerise", "noix", "miel", "lait",
        "sucre", "sel", "poivre", "soupe", "gâteau", "assiette", "couteau", "fourchette",
        "feu", "gare", "bibliothèque", "lettre", "monument", "coin", "entrée", "usine",
        "ruelle", "colline", "orage", "cloche", "fossé", "frontière", "butte", "écluse",
        "chapelle", "falaise", "abbaye", "couronne", "lampe", "lanterne", "moulin", "brume",
        "four", "source", "mairie", "étagère", "ombre", "clé", "neige", "miroir",
        "saut", "étoile", "tempête", "vallée", "étang", "rivage", "horloge", "nuage"};
    return pool;
}

// Small labeled de/en corpus covering both pools, enough to train a clean
// toy language identifier.
inline std::vector<korpus::LabeledText> toy_bilingual_corpus() {
    const std::vector<std::string> de_stops = {"der", "und", "die", "in", "von"};
    const std::vector<std::string> en_stops = {"the", "and", "of", "in", "to"};
    std::vector<korpus::LabeledText> corpus;
    for (int lang = 0; lang < 2; ++lang) {
        const auto& pool = lang ? english_pool() : german_pool();
        const auto& stops = lang ? en_stops : de_stops;
        for (size_t s = 0; s < 40; ++s) {
            std::string text = stops[s % stops.size()];
            for (size_t j = 0; j < 8; ++j) {
                text += ' ';
                text += pool[(s * 8 + j) % pool.size()];
            }
            corpus.push_back({std::move(text), lang ? "en" : "de"});
        }
    }
    return corpus;
}

// Three-language corpus with `per_language` sentences each, phrased so the
// sampling varies with the sentence index. Good for held-out splits.
inline std::vector<korpus::LabeledText> toy_trilingual_corpus(size_t per_language = 60) {
    const std::vector<std::vector<std::string>> stops = {
        {"der", "und", "die", "in", "von"},
        {"the", "and", "of", "in", "to"},
        {"le", "et", "la", "dans", "de"}};
    const std::vector<std::string> labels = {"de", "en", "fr"};
    std::vector<korpus::LabeledText> corpus;
    for (size_t lang = 0; lang < labels.size(); ++lang) {
        const auto& pool = lang == 0 ? german_pool() : lang == 1 ? english_pool() : french_pool();
        for (size_t s = 0; s < per_language; ++s) {
            std::string text = stops[lang][s % stops[lang].size()];
            for (size_t j = 0; j < 10; ++j) {
                text += ' ';
                text += pool[(s * 7 + j * 3) % pool.size()];
            }
            corpus.push_back({std::move(text), labels[lang]});
        }
    }
    return corpus;
}

// 12-words-per-line layout with a blank line every four lines.
inline std::string render_words(const std::vector<std::string>& words) {
    std::string text;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i > 0) {
            if (i % 48 == 0) text += "\n\n";
            else if (i % 12 == 0) text += '\n';
            else text += ' ';
        }
        text += words[i];
    }
    return text;
}

// A stopword pair followed by distinct pool words (no repeats), so every
// heuristic rule passes by construction. count must stay within pool+2.
inline std::vector<std::string> sample_words(std::mt19937_64& rng,
                                             const std::vector<std::string>& pool,
                                             const std::vector<std::string>& stops,
                                             size_t count) {
    std::vector<size_t> order(pool.size());
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng() % (i + 1)]);
    }
    std::vector<std::string> words = stops;
    for (size_t i = 0; words.size() < count; ++i) words.push_back(pool[order[i]]);
    return words;
}

inline std::vector<std::string> german_words(std::mt19937_64& rng, size_t count) {
    return sample_words(rng, german_pool(), {"der", "und"}, count);
}

inline std::vector<std::string> english_words(std::mt19937_64& rng, size_t count) {
    return sample_words(rng, english_pool(), {"the", "and"}, count);
}

// Mixed corpus in 12-document blocks: six clean German documents, one
// English, one without stopwords, one dominated by a repeated line, one on a
// blocked host, one exact copy and one near copy (single word changed).
struct PipelineFixture {
    std::vector<korpus::Document> docs;
    std::vector<std::string> good_ids;
    std::vector<std::string> foreign_ids;
    std::vector<std::string> stopfree_ids;
    std::vector<std::string> repetitive_ids;
    std::vector<std::string> url_blocked_ids;
    std::vector<std::string> exact_dup_ids;
    std::vector<std::string> near_dup_ids;
};

inline PipelineFixture pipeline_corpus(size_t blocks, uint64_t seed = 5) {
    PipelineFixture fx;
    std::mt19937_64 rng(seed);
    size_t ordinal = 0;
    auto next_id = [&] {
        char buf[16];
        std::snprintf(buf, sizeof buf, "doc-%05zu", ordinal++);
        return std::string(buf);
    };

    for (size_t b = 0; b < blocks; ++b) {
        const std::string tag = (b % 2) ? "dump-b" : "dump-a";
        std::vector<std::string> exact_src, near_src;
        for (int cls = 0; cls < 12; ++cls) {
            korpus::Document doc;
            doc.id = next_id();
            doc.source_tag = tag;
            doc.url = "https://ressort.beispiel.de/artikel/" + doc.id;
            switch (cls) {
                case 0:
                    exact_src = german_words(rng, 60);
                    doc.text = render_words(exact_src);
                    fx.good_ids.push_back(doc.id);
                    break;
                case 1:
                    near_src = german_words(rng, 90);
                    doc.text = render_words(near_src);
                    fx.good_ids.push_back(doc.id);
                    break;
                case 2:
                case 4:
                case 5:
                    doc.text = render_words(german_words(rng, 60));
                    fx.good_ids.push_back(doc.id);
                    break;
                case 3:
                    doc.text = render_words(german_words(rng, 60));
                    doc.url.reset();
                    fx.good_ids.push_back(doc.id);
                    break;
                case 6:
                    doc.text = render_words(english_words(rng, 60));
                    fx.foreign_ids.push_back(doc.id);
                    break;
                case 7:
                    doc.text = render_words(sample_words(rng, german_pool(), {}, 60));
                    fx.stopfree_ids.push_back(doc.id);
                    break;
                case 8: {
                    std::string line;
                    for (int w = 0; w < 8; ++w) {
                        if (w) line += ' ';
                        line += german_pool()[w];
                    }
                    for (int l = 0; l < 10; ++l) {
                        if (l) doc.text += '\n';
                        doc.text += line;
                    }
                    fx.repetitive_ids.push_back(doc.id);
                    break;
                }
                case 9:
                    doc.text = render_words(german_words(rng, 60));
                    doc.url = "https://ads.spamnetz.de/banner/" + doc.id;
                    fx.url_blocked_ids.push_back(doc.id);
                    break;
                case 10:
                    doc.text = render_words(exact_src);
                    fx.exact_dup_ids.push_back(doc.id);
                    break;
                case 11: {
                    std::vector<std::string> changed = near_src;
                    changed[30] = "abweichung";
                    doc.text = render_words(changed);
                    fx.near_dup_ids.push_back(doc.id);
                    break;
                }
            }
            fx.docs.push_back(std::move(doc));
        }
    }
    return fx;
}

}  // namespace korpus::test
