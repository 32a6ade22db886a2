#include "ksr/descriptions.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ksr/errors.hpp"

namespace ksr {

const std::unordered_set<std::string>& DescriptionCorpus::default_stopwords() {
    static const std::unordered_set<std::string> kStopwords = {
        "a",    "an",    "and",   "are",  "as",    "at",    "be",    "been",
        "but",  "by",    "for",   "from", "had",   "has",   "have",  "he",
        "her",  "his",   "in",    "is",   "it",    "its",   "not",   "of",
        "on",   "or",    "she",   "that", "the",   "their", "them",  "they",
        "this", "to",    "was",   "were", "which", "who",   "will",  "with",
        "also", "after", "about", "into", "over",  "its",   "such",  "than",
        "then", "there", "these", "when", "where", "while", "would", "can"};
    return kStopwords;
}

std::vector<std::string> DescriptionCorpus::tokenize(
    const std::string& text, const std::unordered_set<std::string>& stopwords) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2 && stopwords.count(cur) == 0) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return out;
}

std::unordered_set<std::string> DescriptionCorpus::load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) words.insert(line);
    }
    return words;
}

DescriptionCorpus DescriptionCorpus::load(const std::string& path, const Vocabulary& vocab,
                                          const std::unordered_set<std::string>& stopwords) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open description file: " + path);
    DescriptionCorpus corpus;
    corpus.words_.resize(vocab.num_entities());
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string symbol = line.substr(0, tab);
        if (!vocab.has_entity(symbol)) {
            ++corpus.skipped_unknown_;
            continue;
        }
        int e = vocab.entity_id(symbol);
        auto tokens = tokenize(line.substr(tab + 1), stopwords);
        // keep distinct tokens; the word-category table counts presence
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        if (tokens.empty()) continue;
        corpus.words_[e] = std::move(tokens);
        ++corpus.num_described_;
        for (const auto& w : corpus.words_[e]) ++corpus.df_[w];
    }
    return corpus;
}

}  // namespace ksr
