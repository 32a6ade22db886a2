#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksr/triples.hpp"
#include "ksr/vocabulary.hpp"

namespace ksr::toy {

// Deterministic two-cluster benchmark graph. Entities split into two
// clusters; each relation is the complete digraph on one cluster, so every
// within-cluster pair is a known triple and filtered ranking isolates the
// truth against the opposite cluster.
struct ToyKg {
    Vocabulary vocab;
    std::vector<Triple> train, valid, test;
    std::vector<int> cluster;                       // per-entity cluster id (0 or 1)
    std::vector<std::string> descriptions;          // per-entity "entity<TAB>text" payload text
    std::vector<std::vector<int>> labels;           // per-entity type ids (= cluster)
    std::string signature_word[2] = {"crystal", "harbor"};

    TripleStore make_store() const {
        return TripleStore(train, valid, test, vocab.num_entities(), vocab.num_relations());
    }
};

ToyKg generate(int entities_per_cluster = 100, std::uint64_t seed = 42);

// Writes train.txt / valid.txt / test.txt / descriptions.txt / labels.txt
// into dir (created if missing).
void write_dataset(const ToyKg& kg, const std::string& dir);

}  // namespace ksr::toy
