#include "ksr/toy_kg.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "ksr/errors.hpp"

namespace ksr::toy {

ToyKg generate(int entities_per_cluster, std::uint64_t seed) {
    ToyKg kg;
    int total = 2 * entities_per_cluster;
    kg.cluster.resize(total);
    for (int e = 0; e < total; ++e) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "e%03d", e);
        kg.vocab.add_entity(buf);
        kg.cluster[e] = e < entities_per_cluster ? 0 : 1;
    }
    for (int r = 0; r < 4; ++r) kg.vocab.add_relation("r" + std::to_string(r));

    // relations 0,2 live on cluster 0; relations 1,3 on cluster 1
    std::vector<Triple> all;
    for (int r = 0; r < 4; ++r) {
        int c = r % 2;
        int lo = c * entities_per_cluster;
        int hi = lo + entities_per_cluster;
        for (int h = lo; h < hi; ++h)
            for (int t = lo; t < hi; ++t)
                if (h != t) all.push_back({h, r, t});
    }

    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    std::size_t n_valid = all.size() / 20;
    std::size_t n_test = all.size() / 20;
    std::size_t n_train = all.size() - n_valid - n_test;
    kg.train.assign(all.begin(), all.begin() + n_train);
    kg.valid.assign(all.begin() + n_train, all.begin() + n_train + n_valid);
    kg.test.assign(all.begin() + n_train + n_valid, all.end());

    // Descriptions: one cluster signature word, a few shared filler words,
    // and a unique per-entity token (falls below any sane min_df cutoff).
    static const char* kFiller[] = {"place", "thing", "group", "record", "member"};
    kg.descriptions.resize(total);
    kg.labels.resize(total);
    std::uniform_int_distribution<int> pick_filler(0, 4);
    for (int e = 0; e < total; ++e) {
        std::string text = kg.signature_word[kg.cluster[e]];
        text += " ";
        text += kFiller[pick_filler(rng)];
        text += " item" + std::to_string(e);
        kg.descriptions[e] = text;
        kg.labels[e] = {kg.cluster[e]};
    }
    return kg;
}

void write_dataset(const ToyKg& kg, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write_split = [&](const std::string& name, const std::vector<Triple>& triples) {
        save_triples(dir + "/" + name, triples, kg.vocab);
    };
    write_split("train.txt", kg.train);
    write_split("valid.txt", kg.valid);
    write_split("test.txt", kg.test);

    std::ofstream desc(dir + "/descriptions.txt");
    if (!desc) throw IoError("cannot write descriptions in " + dir);
    for (std::size_t e = 0; e < kg.descriptions.size(); ++e)
        desc << kg.vocab.entity_symbol(static_cast<int>(e)) << '\t' << kg.descriptions[e] << '\n';

    std::ofstream labels(dir + "/labels.txt");
    if (!labels) throw IoError("cannot write labels in " + dir);
    for (std::size_t e = 0; e < kg.labels.size(); ++e)
        for (int ty : kg.labels[e])
            labels << kg.vocab.entity_symbol(static_cast<int>(e)) << "\ttype" << ty << '\n';
}

}  // namespace ksr::toy
