#include "ksr/triples.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ksr/errors.hpp"

namespace ksr {

CorruptionStats compute_corruption_stats(const std::vector<Triple>& train) {
    // relation -> distinct pairs, distinct heads, distinct tails
    std::unordered_map<int, std::unordered_set<std::uint64_t>> pairs;
    std::unordered_map<int, std::unordered_set<int>> heads, tails;
    for (const auto& t : train) {
        pairs[t.relation].insert((static_cast<std::uint64_t>(t.head) << 32) |
                                 static_cast<std::uint64_t>(t.tail));
        heads[t.relation].insert(t.head);
        tails[t.relation].insert(t.tail);
    }
    CorruptionStats stats;
    for (const auto& [r, ps] : pairs) {
        RelationStats s;
        s.tph = static_cast<double>(ps.size()) / static_cast<double>(heads[r].size());
        s.hpt = static_cast<double>(ps.size()) / static_cast<double>(tails[r].size());
        stats[r] = s;
    }
    return stats;
}

TripleStore::TripleStore(std::vector<Triple> train, std::vector<Triple> valid,
                         std::vector<Triple> test, int num_entities, int num_relations)
    : train_(std::move(train)),
      valid_(std::move(valid)),
      test_(std::move(test)),
      num_entities_(num_entities),
      num_relations_(num_relations) {
    for (const auto* split : {&train_, &valid_, &test_})
        for (const auto& t : *split) known_.insert(triple_key(t));
    stats_ = compute_corruption_stats(train_);
}

std::vector<Triple> load_triples(const std::string& path, Vocabulary& vocab,
                                 bool fixed_vocab) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open triple file: " + path);
    std::vector<Triple> triples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = (tab1 == std::string::npos) ? std::string::npos
                                                       : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 3 tab-separated fields");
        }
        std::string h = line.substr(0, tab1);
        std::string r = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string t = line.substr(tab2 + 1);
        Triple tr;
        if (fixed_vocab) {
            tr.head = vocab.entity_id(h);
            tr.relation = vocab.relation_id(r);
            tr.tail = vocab.entity_id(t);
        } else {
            tr.head = vocab.add_entity(h);
            tr.relation = vocab.add_relation(r);
            tr.tail = vocab.add_entity(t);
        }
        triples.push_back(tr);
    }
    return triples;
}

void save_triples(const std::string& path, const std::vector<Triple>& triples,
                  const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write triple file: " + path);
    for (const auto& t : triples) {
        out << vocab.entity_symbol(t.head) << '\t' << vocab.relation_symbol(t.relation)
            << '\t' << vocab.entity_symbol(t.tail) << '\n';
    }
}

Triple corrupt_triple(const Triple& t, const CorruptionStats& stats,
                      std::mt19937_64& rng, const TripleStore& store) {
    double p_head = 0.5;  // uniform fallback for relations unseen in train
    if (auto it = stats.find(t.relation); it != stats.end())
        p_head = it->second.tph / (it->second.tph + it->second.hpt);

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, store.num_entities() - 1);
    // The side is drawn once; resampling only redraws the entity. Redrawing
    // the side too would skew the head/tail frequency whenever the two sides
    // reject at different rates.
    bool corrupt_head = coin(rng) < p_head;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Triple cand = t;
        (corrupt_head ? cand.head : cand.tail) = pick(rng);
        if (cand == t) continue;
        if (!store.known(cand)) return cand;
    }
    throw SamplingExhausted("negative sampling failed 100 times for relation " +
                            std::to_string(t.relation));
}

}  // namespace ksr
