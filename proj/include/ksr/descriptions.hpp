#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ksr/vocabulary.hpp"

namespace ksr {

// Tokenized entity descriptions. Words are lowercased, split on
// non-alphanumeric boundaries, with stopwords and 1-char tokens dropped.
class DescriptionCorpus {
public:
    // words[e] holds the distinct tokens of entity e's description (empty when
    // the entity has no line in the file).
    const std::vector<std::vector<std::string>>& words() const { return words_; }
    const std::vector<std::string>& words_of(int entity) const { return words_.at(entity); }

    // document frequency over described entities
    const std::unordered_map<std::string, int>& document_frequency() const { return df_; }

    int num_described() const { return num_described_; }
    int skipped_unknown() const { return skipped_unknown_; }

    static DescriptionCorpus load(const std::string& path, const Vocabulary& vocab,
                                  const std::unordered_set<std::string>& stopwords);

    static const std::unordered_set<std::string>& default_stopwords();

    static std::vector<std::string> tokenize(const std::string& text,
                                             const std::unordered_set<std::string>& stopwords);

    static std::unordered_set<std::string> load_stopwords(const std::string& path);

private:
    std::vector<std::vector<std::string>> words_;
    std::unordered_map<std::string, int> df_;
    int num_described_ = 0;
    int skipped_unknown_ = 0;
};

}  // namespace ksr
