#include "ksr/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksr/errors.hpp"
#include "ksr/evaluator.hpp"

namespace ksr {

WordCategoryTable build_word_category_table(const KsrModel& m, const DescriptionCorpus& corpus,
                                            int min_df, double epsilon) {
    if (corpus.num_described() == 0) throw ConfigError("description corpus is empty");
    WordCategoryTable table(m.config().n, m.config().d, epsilon);
    for (const auto& [w, df] : corpus.document_frequency())
        if (df >= min_df) table.add_word(w, df);

    int n = m.config().n;
    for (std::size_t e = 0; e < corpus.words().size(); ++e) {
        const auto& words = corpus.words()[e];
        if (words.empty()) continue;
        SemanticCode code = infer_entity_code(m, static_cast<int>(e));
        for (const auto& w : words) {
            int j = table.word_index(w);
            if (j < 0) continue;
            for (int i = 0; i < n; ++i) table.bump(j, i, code.categories[i]);
        }
    }
    return table;
}

std::vector<std::string> significant_words(const WordCategoryTable& t, int feature, int category,
                                           int k) {
    struct Scored {
        double score;
        int df;
        int j;
    };
    std::vector<Scored> scored;
    scored.reserve(t.num_words());
    for (int j = 0; j < t.num_words(); ++j)
        scored.push_back({t.conditional(j, feature, category), t.document_frequency(j), j});
    std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.df != b.df) return a.df > b.df;
        return t.word(a.j) < t.word(b.j);
    });
    if (k > static_cast<int>(scored.size())) k = static_cast<int>(scored.size());
    std::vector<std::string> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.push_back(t.word(scored[i].j));
    return out;
}

std::vector<int> default_designated_categories(const std::vector<SemanticCode>& codes, int n,
                                               int d) {
    std::vector<int> designated(n, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<int> freq(d, 0);
        for (const auto& code : codes) ++freq[code.categories[i]];
        int best = 0;
        for (int c = 1; c < d; ++c)
            if (freq[c] < freq[best]) best = c;
        designated[i] = best;
    }
    return designated;
}

FeatureCorrelation feature_correlation(const std::vector<SemanticCode>& codes,
                                       const std::vector<int>& designated) {
    int n = static_cast<int>(designated.size());
    std::vector<std::vector<long long>> raw(n, std::vector<long long>(n, 0));
    for (const auto& code : codes) {
        for (int i = 0; i < n; ++i) {
            if (code.categories[i] != designated[i]) continue;
            for (int j = 0; j < n; ++j)
                if (code.categories[j] == designated[j]) ++raw[i][j];
        }
    }
    FeatureCorrelation corr;
    corr.designated = designated;
    corr.matrix.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        if (raw[i][i] == 0) corr.empty_features.push_back(i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double denom = std::sqrt(static_cast<double>(raw[i][i]) * raw[j][j]);
            corr.matrix[i][j] = denom > 0.0 ? raw[i][j] / denom : 0.0;
        }
    return corr;
}

SentenceCode sentence_code(const std::vector<std::string>& words, const WordCategoryTable& t) {
    int n = t.n();
    int d = t.d();
    SentenceCode code;
    code.rows.assign(n, std::vector<double>(d, 1.0 / d));

    std::vector<int> in_vocab;
    for (const auto& w : words) {
        int j = t.word_index(w);
        if (j >= 0) in_vocab.push_back(j);
    }
    if (in_vocab.empty()) {
        code.degenerate = true;
        return code;
    }

    for (int i = 0; i < n; ++i) {
        std::vector<double> logp(d, 0.0);
        for (int j : in_vocab)
            for (int c = 0; c < d; ++c) logp[c] += std::log(t.conditional(j, i, c));
        double mx = *std::max_element(logp.begin(), logp.end());
        double sum = 0.0;
        for (int c = 0; c < d; ++c) sum += (code.rows[i][c] = std::exp(logp[c] - mx));
        for (int c = 0; c < d; ++c) code.rows[i][c] /= sum;
    }
    return code;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<RankedEntity> retrieve_entities(const std::vector<std::string>& words,
                                            const KsrModel& m, const WordCategoryTable& t,
                                            int k) {
    if (k <= 0) return {};
    SentenceCode code = sentence_code(words, t);
    if (code.degenerate) return {};

    std::vector<double> srep;
    srep.reserve(static_cast<std::size_t>(t.n()) * t.d());
    for (const auto& row : code.rows) srep.insert(srep.end(), row.begin(), row.end());

    std::vector<RankedEntity> ranked(m.num_entities());
    for (int e = 0; e < m.num_entities(); ++e)
        ranked[e] = {e, cosine_similarity(srep, entity_features(m, e))};
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedEntity& a, const RankedEntity& b) {
        return a.similarity > b.similarity;
    });
    if (k < static_cast<int>(ranked.size())) ranked.resize(k);
    return ranked;
}

}  // namespace ksr
