#include "topiclens/stopwords.hpp"

#include <array>

namespace topiclens::stopwords {

namespace {

constexpr std::array<std::string_view, 178> kSpanish = {
    "a",        "al",       "algo",     "algunas",  "algunos",  "ante",     "antes",    "como",
    "con",      "contra",   "cual",     "cuando",   "de",       "del",      "desde",    "donde",
    "durante",  "e",        "el",       "ella",     "ellas",    "ellos",    "en",       "entre",
    "era",      "erais",    "eran",     "eras",     "eres",     "es",       "esa",      "esas",
    "ese",      "eso",      "esos",     "esta",     "estaba",   "estaban",  "estado",   "estamos",
    "estar",    "estas",    "este",     "esto",     "estos",    "estoy",    "está",     "están",
    "fue",      "fueron",   "fui",      "ha",       "habéis",   "haber",    "había",    "habían",
    "han",      "has",      "hasta",    "hay",      "he",       "hemos",    "la",       "las",
    "le",       "les",      "lo",       "los",      "me",       "mi",       "mis",      "mucho",
    "muchos",   "muy",      "más",      "mí",       "nada",     "ni",       "no",       "nos",
    "nosotras", "nosotros", "nuestra",  "nuestras", "nuestro",  "nuestros", "o",        "os",
    "otra",     "otras",    "otro",     "otros",    "para",     "pero",     "poco",     "por",
    "porque",   "que",      "quien",    "quienes",  "qué",      "se",       "sea",      "sean",
    "ser",      "será",     "serán",    "si",       "siendo",   "sin",      "sobre",    "sois",
    "somos",    "son",      "soy",      "su",       "sus",      "suya",     "suyas",    "suyo",
    "suyos",    "sí",       "también",  "tanto",    "te",       "tenemos",  "tener",    "tengo",
    "ti",       "tiene",    "tienen",   "todo",     "todos",    "tu",       "tus",      "tuya",
    "tuyas",    "tuyo",     "tuyos",    "tú",       "un",       "una",      "uno",      "unos",
    "vosotras", "vosotros", "vuestra",  "vuestras", "vuestro",  "vuestros", "y",        "ya",
    "yo",       "él",       "éramos",   "cada",     "dicha",    "dicho",    "dichos",   "dichas",
    "mismo",    "misma",    "mismos",   "mismas",   "así",      "bien",     "sino",     "tal",
    "tales",    "toda",     "todas",    "según",    "cuyo",     "cuya",     "cuyos",    "cuyas",
    "aquel",    "aquella",
};

constexpr std::array<std::string_view, 120> kEnglish = {
    "a",       "about",  "above",   "after",   "again",  "against", "all",    "am",      "an",
    "and",     "any",    "are",     "as",      "at",     "be",      "because", "been",   "before",
    "being",   "below",  "between", "both",    "but",    "by",      "can",    "could",   "did",
    "do",      "does",   "doing",   "down",    "during", "each",    "few",    "for",     "from",
    "further", "had",    "has",     "have",    "having", "he",      "her",    "here",    "hers",
    "herself", "him",    "himself", "his",     "how",    "i",       "if",     "in",      "into",
    "is",      "it",     "its",     "itself",  "just",   "me",      "more",   "most",    "my",
    "myself",  "no",     "nor",     "not",     "now",    "of",      "off",    "on",      "once",
    "only",    "or",     "other",   "our",     "ours",   "out",     "over",   "own",     "same",
    "she",     "should", "so",      "some",    "such",   "than",    "that",   "the",     "their",
    "theirs",  "them",   "then",    "there",   "these",  "they",    "this",   "those",   "through",
    "to",      "too",    "under",   "until",   "up",     "very",    "was",    "we",      "were",
    "what",    "when",   "where",   "which",   "while",  "who",     "whom",   "why",     "will",
    "with",    "would",  "you",
};

}  // namespace

std::span<const std::string_view> spanish() { return kSpanish; }
std::span<const std::string_view> english() { return kEnglish; }

}  // namespace topiclens::stopwords
