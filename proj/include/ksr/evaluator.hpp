#pragma once

#include <map>
#include <random>
#include <vector>

#include "ksr/model.hpp"
#include "ksr/triples.hpp"

namespace ksr {

struct RelationMetrics {
    int queries = 0;
    double mrr_head_filtered = 0.0;
    double mrr_tail_filtered = 0.0;
    double hits10_raw = 0.0;
    double hits10_filtered = 0.0;
};

struct LinkPredictionReport {
    double mrr_head_filtered = 0.0;
    double mrr_tail_filtered = 0.0;
    double hits10_raw = 0.0;       // averaged over head and tail queries
    double hits10_filtered = 0.0;
    std::map<int, RelationMetrics> per_relation;
};

struct ClassificationReport {
    std::map<double, double> accuracy_at;  // training fraction -> mean accuracy
    int skipped_types = 0;                 // types with < 2 training examples, summed over trials
};

enum class Hole { Head, Tail };

// Rank of the true entity among all E completions; pessimistic ties
// (a tie counts as ranking above the truth). Filtered mode drops
// candidates other than the truth whose triple is in the known set.
int rank_entities(const KsrModel& m, const Triple& truth, Hole hole, bool filtered,
                  const TripleStore& store);

LinkPredictionReport link_prediction(const KsrModel& m, const TripleStore& store,
                                     int workers = 1);

// Same protocol restricted to an arbitrary query set (used for validation).
LinkPredictionReport link_prediction_on(const KsrModel& m, const std::vector<Triple>& queries,
                                        const TripleStore& store, int workers = 1);

// Multi-label entity sets: labels[e] lists the type ids of entity e
// (empty = unlabeled). One-vs-rest logistic regression over the flattened
// softmaxed category tables; accuracy is the micro-averaged rate of the
// argmax type landing in the true label set.
double entity_classification(const KsrModel& m, const std::vector<std::vector<int>>& labels,
                             int num_types, double fraction, int trials, std::mt19937_64& rng,
                             int* skipped_types = nullptr);

ClassificationReport classification_report(const KsrModel& m,
                                           const std::vector<std::vector<int>>& labels,
                                           int num_types, const std::vector<double>& fractions,
                                           int trials, std::mt19937_64& rng);

// Flattened softmaxed category distributions of one entity (length n*d).
std::vector<double> entity_features(const KsrModel& m, int entity);

}  // namespace ksr
