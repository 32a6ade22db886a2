#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ksr/vocabulary.hpp"

namespace ksr {

struct Triple {
    int head = 0;
    int relation = 0;
    int tail = 0;

    bool operator==(const Triple&) const = default;
};

// Packs a triple into one key; fields are limited to 2^21 which covers
// FB15K-scale vocabularies with room to spare.
inline std::uint64_t triple_key(const Triple& t) {
    return (static_cast<std::uint64_t>(t.head) << 42) |
           (static_cast<std::uint64_t>(t.relation) << 21) |
           static_cast<std::uint64_t>(t.tail);
}

// Per-relation mean tails-per-head / heads-per-tail, driving the Bernoulli
// head-vs-tail corruption choice.
struct RelationStats {
    double tph = 1.0;
    double hpt = 1.0;
};

using CorruptionStats = std::unordered_map<int, RelationStats>;

CorruptionStats compute_corruption_stats(const std::vector<Triple>& train);

// Immutable after construction; shareable across workers.
class TripleStore {
public:
    TripleStore(std::vector<Triple> train, std::vector<Triple> valid,
                std::vector<Triple> test, int num_entities, int num_relations);

    const std::vector<Triple>& train() const { return train_; }
    const std::vector<Triple>& valid() const { return valid_; }
    const std::vector<Triple>& test() const { return test_; }
    const CorruptionStats& stats() const { return stats_; }

    int num_entities() const { return num_entities_; }
    int num_relations() const { return num_relations_; }

    bool known(const Triple& t) const { return known_.count(triple_key(t)) > 0; }
    std::size_t known_size() const { return known_.size(); }

private:
    std::vector<Triple> train_, valid_, test_;
    std::unordered_set<std::uint64_t> known_;
    CorruptionStats stats_;
    int num_entities_;
    int num_relations_;
};

// Reads tab-separated "head<TAB>relation<TAB>tail" lines. With an empty
// vocabulary new symbols are added; with a fixed one unknown symbols throw.
std::vector<Triple> load_triples(const std::string& path, Vocabulary& vocab,
                                 bool fixed_vocab);

void save_triples(const std::string& path, const std::vector<Triple>& triples,
                  const Vocabulary& vocab);

// Bernoulli head/tail corruption with uniform entity replacement; resamples
// until the result leaves the known set. Throws SamplingExhausted after 100
// consecutive failures.
Triple corrupt_triple(const Triple& t, const CorruptionStats& stats,
                      std::mt19937_64& rng, const TripleStore& store);

}  // namespace ksr
