#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ksr/descriptions.hpp"
#include "ksr/model.hpp"

namespace ksr {

// Joint counts of description words with inferred feature categories:
// counts(j, i, c) = #{ e : w_j in D_e  and  S_{e,i} = c }.
class WordCategoryTable {
public:
    WordCategoryTable(int n, int d, double epsilon) : n_(n), d_(d), epsilon_(epsilon) {}

    int n() const { return n_; }
    int d() const { return d_; }
    double epsilon() const { return epsilon_; }

    int num_words() const { return static_cast<int>(words_.size()); }
    const std::vector<std::string>& words() const { return words_; }
    const std::string& word(int j) const { return words_.at(j); }
    int word_index(const std::string& w) const {
        auto it = word_to_index_.find(w);
        return it == word_to_index_.end() ? -1 : it->second;
    }
    int document_frequency(int j) const { return df_.at(j); }

    int count(int j, int i, int c) const {
        return counts_[(static_cast<std::size_t>(j) * n_ + i) * d_ + c];
    }

    // Smoothed conditional P(z_i = c | w_j).
    double conditional(int j, int i, int c) const {
        double denom = 0.0;
        for (int cc = 0; cc < d_; ++cc) denom += count(j, i, cc);
        return (count(j, i, c) + epsilon_) / (denom + epsilon_ * d_);
    }

    int add_word(const std::string& w, int df) {
        int j = static_cast<int>(words_.size());
        word_to_index_.emplace(w, j);
        words_.push_back(w);
        df_.push_back(df);
        counts_.resize(counts_.size() + static_cast<std::size_t>(n_) * d_, 0);
        return j;
    }

    void bump(int j, int i, int c) {
        ++counts_[(static_cast<std::size_t>(j) * n_ + i) * d_ + c];
    }

private:
    int n_, d_;
    double epsilon_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> word_to_index_;
    std::vector<int> df_;
    std::vector<int> counts_;
};

struct FeatureCorrelation {
    std::vector<std::vector<double>> matrix;  // n x n, cosine-normalized co-occurrence
    std::vector<int> designated;              // designated category per feature
    std::vector<int> empty_features;          // features with zero designated hits
};

struct SentenceCode {
    std::vector<std::vector<double>> rows;  // n rows of d probabilities
    bool degenerate = false;                // no in-vocabulary words
};

struct RankedEntity {
    int entity = 0;
    double similarity = 0.0;
};

WordCategoryTable build_word_category_table(const KsrModel& m, const DescriptionCorpus& corpus,
                                            int min_df = 5, double epsilon = 1.0);

// Top-k words for (feature, category), ranked by the smoothed conditional,
// ties by document frequency then lexicographically.
std::vector<std::string> significant_words(const WordCategoryTable& t, int feature, int category,
                                           int k);

// Least globally frequent category per feature over the given codes.
std::vector<int> default_designated_categories(const std::vector<SemanticCode>& codes, int n,
                                               int d);

FeatureCorrelation feature_correlation(const std::vector<SemanticCode>& codes,
                                       const std::vector<int>& designated);

SentenceCode sentence_code(const std::vector<std::string>& words, const WordCategoryTable& t);

std::vector<RankedEntity> retrieve_entities(const std::vector<std::string>& words,
                                            const KsrModel& m, const WordCategoryTable& t,
                                            int k);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ksr
