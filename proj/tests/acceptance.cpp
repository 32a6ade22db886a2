// Acceptance suite: runs each end-to-end criterion at its pinned threshold
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "ksr/evaluator.hpp"
#include "ksr/semantics.hpp"
#include "ksr/toy_kg.hpp"
#include "ksr/trainer.hpp"
#include "oracles.hpp"

using namespace ksr;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    if (!pass) ++failures;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

KsrModel random_model(int E, int R, int n, int d, std::uint64_t seed, double scale) {
    ModelConfig cfg{n, d, 0.04, seed};
    std::mt19937_64 rng(seed);
    KsrModel m = init_model(cfg, E, R, rng);
    for (auto* table : {&m.entity_logits(), &m.rel_subj_logits(), &m.rel_obj_logits(),
                        &m.rel_feat_logits()})
        for (auto& x : *table) x *= scale;
    return m;
}

// --- criterion 1: score vs naive-loop oracle -------------------------------

void criterion_score_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    double max_err = 0.0;
    std::mt19937_64 pick(2024);
    for (int n = 1; n <= 3; ++n)
        for (int d = 2; d <= 3; ++d)
            for (int rep = 0; rep < 50; ++rep) {
                auto m = random_model(6, 3, n, d, 9000 + 100 * n + 10 * d + rep, 20.0);
                std::uniform_int_distribution<int> ent(0, 5), rel(0, 2);
                for (int q = 0; q < 20; ++q) {
                    Triple t{ent(pick), rel(pick), ent(pick)};
                    max_err = std::max(max_err,
                                       std::abs(score(m, t) - oracle::naive_score(m, t)));
                }
            }
    double sec = elapsed(t0);
    report(1, "score-oracle equivalence", max_err < 1e-8 && sec < 10.0,
           "max |score - oracle| = " + std::to_string(max_err) + ", " +
               std::to_string(sec) + " s");
}

// --- criterion 2: analytic vs finite-difference gradients ------------------

void criterion_gradient_check() {
    auto t0 = std::chrono::steady_clock::now();
    const double eps = 1e-5;
    double worst = 0.0;
    int instances = 0;
    std::mt19937_64 pick(31337);
    while (instances < 220) {
        int n = 1 + static_cast<int>(pick() % 3);
        int d = 2 + static_cast<int>(pick() % 2);
        auto m = random_model(5, 3, n, d, 40000 + instances, 15.0);
        std::uniform_int_distribution<int> ent(0, 4), rel(0, 2);
        Triple pos{ent(pick), rel(pick), ent(pick)};
        Triple neg{ent(pick), pos.relation, ent(pick)};
        if (pos == neg) continue;  // gradients cancel exactly; FD sees only noise
        // the |p-q| kink of the coupling invalidates the FD oracle; skip
        // instances within the difference window of it
        if (oracle::min_coupling_gap(m, pos) < 1e-4 ||
            oracle::min_coupling_gap(m, neg) < 1e-4)
            continue;
        auto res = score_gradient(m, pos, neg, 10.0);
        if (res.grad.empty()) continue;
        ++instances;

        auto check = [&](std::vector<double>& table, std::size_t off, double analytic) {
            double orig = table[off];
            table[off] = orig + eps;
            double up = oracle::hinge_loss(m, pos, neg, 10.0);
            table[off] = orig - eps;
            double down = oracle::hinge_loss(m, pos, neg, 10.0);
            table[off] = orig;
            double numeric = (up - down) / (2 * eps);
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            worst = std::max(worst, std::abs(analytic - numeric) / denom);
        };
        std::size_t nd = static_cast<std::size_t>(n) * d;
        for (const auto& [e, g] : res.grad.entity)
            for (std::size_t i = 0; i < g.size(); ++i) check(m.entity_logits(), e * nd + i, g[i]);
        for (const auto& [r, g] : res.grad.rel_subj)
            for (std::size_t i = 0; i < g.size(); ++i)
                check(m.rel_subj_logits(), r * nd + i, g[i]);
        for (const auto& [r, g] : res.grad.rel_obj)
            for (std::size_t i = 0; i < g.size(); ++i)
                check(m.rel_obj_logits(), r * nd + i, g[i]);
        for (const auto& [r, g] : res.grad.rel_feat)
            for (std::size_t i = 0; i < g.size(); ++i)
                check(m.rel_feat_logits(), static_cast<std::size_t>(r) * n + i, g[i]);
    }
    double sec = elapsed(t0);
    report(2, "gradient vs central finite differences", worst < 1e-4 && sec < 60.0,
           std::to_string(instances) + " instances, worst rel err = " + std::to_string(worst) +
               ", " + std::to_string(sec) + " s");
}

// --- criteria 3-6 share one trained toy model ------------------------------

struct ToyRun {
    toy::ToyKg kg;
    TripleStore store;
    KsrModel model;
    TrainReport train_report;
};

ToyRun train_toy() {
    auto kg = toy::generate(100, 42);
    TripleStore store = kg.make_store();
    ModelConfig mc{4, 4, 0.04, 7};
    TrainConfig tc;
    tc.alpha = 0.01;
    tc.gamma = 2.5;
    tc.sigma = 0.04;
    tc.epochs = 500;
    tc.eval_every = 10;
    tc.patience = 3;
    tc.seed = 7;
    auto [model, rep] = fit(store, mc, tc);
    return {std::move(kg), std::move(store), std::move(model), std::move(rep)};
}

void criterion_toy_link_prediction(const ToyRun& run, double train_sec) {
    auto rep = link_prediction(run.model, run.store, 4);
    double mrr = 0.5 * (rep.mrr_head_filtered + rep.mrr_tail_filtered);
    bool pass = rep.hits10_filtered >= 0.90 && mrr >= 0.5 && train_sec < 300.0;
    report(3, "toy end-to-end link prediction", pass,
           "filtered HITS@10 = " + std::to_string(rep.hits10_filtered) +
               ", filtered MRR = " + std::to_string(mrr) + ", " +
               std::to_string(run.train_report.epochs_run) + " epochs in " +
               std::to_string(train_sec) + " s");
}

void criterion_code_recovery(const ToyRun& run) {
    int E = run.store.num_entities();
    int n = run.model.config().n;
    std::vector<SemanticCode> codes;
    codes.reserve(E);
    for (int e = 0; e < E; ++e) codes.push_back(infer_entity_code(run.model, e));

    double best_agreement = 0.0;
    int best_feature = -1;
    for (int k = 0; k < n; ++k) {
        // agreement up to label permutation: majority category per cluster
        int agree = 0;
        for (int cluster = 0; cluster < 2; ++cluster) {
            std::vector<int> freq(run.model.config().d, 0);
            for (int e = 0; e < E; ++e)
                if (run.kg.cluster[e] == cluster) ++freq[codes[e].categories[k]];
            agree += *std::max_element(freq.begin(), freq.end());
        }
        double frac = static_cast<double>(agree) / E;
        if (frac > best_agreement) {
            best_agreement = frac;
            best_feature = k;
        }
    }
    report(4, "semantic codes separate the planted clusters", best_agreement >= 0.95,
           "best feature " + std::to_string(best_feature) + " agreement = " +
               std::to_string(best_agreement));
}

void criterion_classification(const ToyRun& run) {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(5);
    double acc = entity_classification(run.model, run.kg.labels, 2, 0.5, 10, rng);

    // empirical random baseline: same protocol on shuffled labels
    auto shuffled = run.kg.labels;
    std::mt19937_64 shuffle_rng(6);
    std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
    std::mt19937_64 rng2(5);
    double baseline = entity_classification(run.model, shuffled, 2, 0.5, 10, rng2);

    double sec = elapsed(t0);
    bool pass = (acc - baseline) >= 0.30 && sec < 60.0;
    report(5, "entity classification beats random at T@50", pass,
           "accuracy = " + std::to_string(acc) + ", random baseline = " +
               std::to_string(baseline) + ", " + std::to_string(sec) + " s");
}

void criterion_retrieval(const ToyRun& run) {
    auto t0 = std::chrono::steady_clock::now();
    Vocabulary vocab = run.kg.vocab;
    auto dir = std::filesystem::temp_directory_path() / "ksr_accept_toy";
    toy::write_dataset(run.kg, dir.string());
    auto corpus = DescriptionCorpus::load((dir / "descriptions.txt").string(), vocab,
                                          DescriptionCorpus::default_stopwords());
    auto table = build_word_category_table(run.model, corpus, 5, 1.0);

    static const char* kNoise[] = {"place", "thing", "group", "record", "member"};
    std::mt19937_64 rng(11);
    int correct = 0, queries = 0;
    for (int q = 0; q < 40; ++q) {
        int cluster = q % 2;
        std::vector<std::string> sentence = {run.kg.signature_word[cluster],
                                             kNoise[rng() % 5]};
        auto top = retrieve_entities(sentence, run.model, table, 1);
        ++queries;
        if (!top.empty() && run.kg.cluster[top[0].entity] == cluster) ++correct;
    }
    std::filesystem::remove_all(dir);
    double sec = elapsed(t0);
    double frac = static_cast<double>(correct) / queries;
    report(6, "signature-word retrieval hits the right cluster", frac >= 0.95 && sec < 30.0,
           std::to_string(correct) + "/" + std::to_string(queries) + " at rank 1, " +
               std::to_string(sec) + " s");
}

// --- criterion 7: O(nd) scaling probe --------------------------------------

void criterion_scaling() {
    auto t0 = std::chrono::steady_clock::now();
    auto kg = toy::generate(40, 3);
    TripleStore store = kg.make_store();
    const int steps = 4000;
    auto probe = [&](int n, int d) {
        return step_seconds_probe(store, ModelConfig{n, d, 0.04, 0}, steps);
    };
    // min over interleaved repeats: timing noise is additive, so the minimum
    // is the most stable estimate and interleaving cancels machine-load drift
    double base = 1e300, doubled_n = 1e300, swapped = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
        base = std::min(base, probe(4, 8));
        doubled_n = std::min(doubled_n, probe(8, 8));
        swapped = std::min(swapped, probe(8, 4));  // same n*d product
    }
    double ratio_double = doubled_n / base;
    double ratio_const = std::max(swapped / base, base / swapped);
    double sec = elapsed(t0);
    bool pass = ratio_double >= 1.6 && ratio_double <= 2.6 && ratio_const <= 1.5 && sec < 120.0;
    report(7, "O(nd) per-step scaling", pass,
           "2x n ratio = " + std::to_string(ratio_double) + ", const-nd ratio = " +
               std::to_string(ratio_const) + ", " + std::to_string(sec) + " s");
}

// --- criterion 8: invariant spot suite -------------------------------------

void criterion_invariants() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    auto fail = [&](const std::string& what) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    };

    // normalization over a random model
    {
        auto m = random_model(10, 4, 3, 5, 101, 6.0);
        std::vector<double> row(5);
        for (int e = 0; e < 10 && ok; ++e)
            for (int k = 0; k < 3; ++k) {
                softmax(m.entity_row(e, k), row);
                double sum = 0.0;
                for (double x : row) sum += x;
                if (std::abs(sum - 1.0) > 1e-9) fail("normalization");
            }
    }
    // shift invariance
    {
        auto m = random_model(5, 2, 2, 3, 102, 8.0);
        Triple t{0, 1, 3};
        double before = score(m, t);
        for (auto& x : m.entity_row(0, 1)) x += 4.2;
        if (std::abs(score(m, t) - before) > 1e-9) fail("shift invariance");
    }
    // coupling symmetry
    {
        std::vector<double> p = {0.7, 0.2, 0.1}, q = {0.1, 0.3, 0.6};
        auto w1 = coupling_weights(p, q, 0.04);
        auto w2 = coupling_weights(q, p, 0.04);
        for (int c = 0; c < 3; ++c)
            if (w1[c] != w2[c]) fail("coupling symmetry");
    }
    // filter dominance
    {
        auto m = random_model(10, 2, 2, 2, 103, 10.0);
        std::mt19937_64 gen(4);
        std::vector<Triple> train, test;
        for (int i = 0; i < 30; ++i) train.push_back({static_cast<int>(gen() % 10),
                                                      static_cast<int>(gen() % 2),
                                                      static_cast<int>(gen() % 10)});
        for (int i = 0; i < 10; ++i) test.push_back({static_cast<int>(gen() % 10),
                                                     static_cast<int>(gen() % 2),
                                                     static_cast<int>(gen() % 10)});
        TripleStore store(train, {}, test, 10, 2);
        for (const auto& t : store.test())
            for (Hole hole : {Hole::Head, Hole::Tail})
                if (rank_entities(m, t, hole, true, store) >
                    rank_entities(m, t, hole, false, store))
                    fail("filter dominance");
    }
    // serialization round-trip
    {
        auto m = random_model(6, 3, 2, 4, 104, 1.0);
        auto path = (std::filesystem::temp_directory_path() / "ksr_accept_model.bin").string();
        save_model(m, path);
        if (!(load_model(path) == m)) fail("serialization round-trip");
        std::filesystem::remove(path);
        std::filesystem::remove(path + ".meta");
    }
    // corrupt_triple never lands in the known set
    {
        auto kg = toy::generate(15, 19);
        TripleStore store = kg.make_store();
        std::mt19937_64 rng(20);
        for (int i = 0; i < 2000; ++i) {
            const Triple& t = store.train()[i % store.train().size()];
            if (store.known(corrupt_triple(t, store.stats(), rng, store)))
                fail("negative sampling in known set");
        }
    }
    // sequential training determinism
    {
        auto kg = toy::generate(10, 23);
        TripleStore store = kg.make_store();
        TrainConfig tc;
        tc.epochs = 2;
        tc.eval_every = 0;
        tc.seed = 77;
        ModelConfig mc{2, 2, 0.04, 77};
        auto [m1, r1] = fit(store, mc, tc);
        auto [m2, r2] = fit(store, mc, tc);
        if (!(m1 == m2) || r1.epoch_loss != r2.epoch_loss) fail("sequential determinism");
    }
    // count conservation in the word-category table
    {
        auto kg = toy::generate(20, 29);
        TripleStore store = kg.make_store();
        std::mt19937_64 rng(1);
        auto m = init_model(ModelConfig{3, 3, 0.04, 1}, store.num_entities(),
                            store.num_relations(), rng);
        auto dir = std::filesystem::temp_directory_path() / "ksr_accept_counts";
        toy::write_dataset(kg, dir.string());
        auto corpus = DescriptionCorpus::load((dir / "descriptions.txt").string(), kg.vocab,
                                              DescriptionCorpus::default_stopwords());
        auto table = build_word_category_table(m, corpus, 1, 1.0);
        for (int j = 0; j < table.num_words() && ok; ++j)
            for (int i = 0; i < table.n(); ++i) {
                int total = 0;
                for (int c = 0; c < table.d(); ++c) total += table.count(j, i, c);
                if (total != table.document_frequency(j)) fail("count conservation");
            }
        std::filesystem::remove_all(dir);
    }

    double sec = elapsed(t0);
    if (detail.empty()) detail = "all invariants hold";
    report(8, "invariant property suite", ok && sec < 120.0,
           detail + ", " + std::to_string(sec) + " s");
}

}  // namespace

int main() {
    criterion_score_oracle();
    criterion_gradient_check();

    auto t0 = std::chrono::steady_clock::now();
    ToyRun run = train_toy();
    double train_sec = elapsed(t0);
    criterion_toy_link_prediction(run, train_sec);
    criterion_code_recovery(run);
    criterion_classification(run);
    criterion_retrieval(run);

    criterion_scaling();
    criterion_invariants();

    std::printf("%d/8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
