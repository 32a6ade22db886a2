#include "ksr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "ksr/errors.hpp"
#include "ksr/evaluator.hpp"

namespace ksr {

namespace {

void apply_gradient(KsrModel& m, const SparseGradient& grad, double alpha) {
    auto apply = [alpha](std::vector<double>& table, std::size_t offset,
                         const std::vector<double>& g) {
        for (std::size_t i = 0; i < g.size(); ++i) table[offset + i] -= alpha * g[i];
    };
    std::size_t nd = static_cast<std::size_t>(m.config().n) * m.config().d;
    for (const auto& [e, g] : grad.entity) apply(m.entity_logits(), e * nd, g);
    for (const auto& [r, g] : grad.rel_subj) apply(m.rel_subj_logits(), r * nd, g);
    for (const auto& [r, g] : grad.rel_obj) apply(m.rel_obj_logits(), r * nd, g);
    for (const auto& [r, g] : grad.rel_feat)
        apply(m.rel_feat_logits(), static_cast<std::size_t>(r) * m.config().n, g);
}

// Runs the SGD steps for train[lo..hi); returns summed hinge loss.
double run_shard(KsrModel& m, const TripleStore& store, const TrainConfig& tc,
                 const std::vector<int>& order, std::size_t lo, std::size_t hi,
                 std::mt19937_64& rng, int epoch) {
    double loss_sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const Triple& pos = store.train()[order[i]];
        for (int neg_i = 0; neg_i < tc.negatives_per_positive; ++neg_i) {
            Triple neg = corrupt_triple(pos, store.stats(), rng, store);
            GradientResult res = score_gradient(m, pos, neg, tc.gamma);
            if (!std::isfinite(res.loss))
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                                     ", step " + std::to_string(i));
            loss_sum += res.loss;
            if (!res.grad.empty()) apply_gradient(m, res.grad, tc.alpha);
        }
    }
    return loss_sum;
}

double filtered_mrr(const LinkPredictionReport& rep) {
    return 0.5 * (rep.mrr_head_filtered + rep.mrr_tail_filtered);
}

}  // namespace

std::pair<KsrModel, TrainReport> fit(const TripleStore& store, const ModelConfig& mconfig,
                                     const TrainConfig& tconfig) {
    if (store.train().empty()) throw ConfigError("training split is empty");
    ModelConfig mc = mconfig;
    mc.sigma = tconfig.sigma;
    mc.seed = tconfig.seed;

    std::mt19937_64 rng(tconfig.seed);
    KsrModel model = init_model(mc, store.num_entities(), store.num_relations(), rng);
    KsrModel best = model;

    TrainReport report;
    report.workers = std::max(1, tconfig.workers);
    report.best_mrr = -1.0;
    int checks_without_improvement = 0;

    std::vector<int> order(store.train().size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < tconfig.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        std::size_t steps = order.size();
        if (report.workers == 1) {
            loss_sum = run_shard(model, store, tconfig, order, 0, steps, rng, epoch);
        } else {
            // Hogwild shards: disjoint triple ranges, lock-free row updates.
            std::vector<std::thread> pool;
            std::vector<double> shard_loss(report.workers, 0.0);
            std::size_t chunk = (steps + report.workers - 1) / report.workers;
            for (int w = 0; w < report.workers; ++w) {
                std::size_t lo = w * chunk;
                std::size_t hi = std::min(steps, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&, w, lo, hi] {
                    std::mt19937_64 wrng(tconfig.seed ^ (0x9e3779b97f4a7c15ULL * (epoch + 1)) ^
                                         static_cast<std::uint64_t>(w + 1));
                    shard_loss[w] = run_shard(model, store, tconfig, order, lo, hi, wrng, epoch);
                });
            }
            for (auto& th : pool) th.join();
            loss_sum = std::accumulate(shard_loss.begin(), shard_loss.end(), 0.0);
        }
        double mean_loss =
            loss_sum / (static_cast<double>(steps) * tconfig.negatives_per_positive);
        report.epoch_loss.push_back(mean_loss);
        report.epochs_run = epoch + 1;

        auto t1 = std::chrono::steady_clock::now();
        report.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());

        bool last_epoch = (epoch + 1 == tconfig.epochs);
        if (tconfig.eval_every > 0 && !store.valid().empty() &&
            ((epoch + 1) % tconfig.eval_every == 0 || last_epoch)) {
            auto lp = link_prediction_on(model, store.valid(), store, report.workers);
            double mrr = filtered_mrr(lp);
            report.valid_mrr.push_back(mrr);
            if (mrr > report.best_mrr) {
                report.best_mrr = mrr;
                report.best_epoch = epoch;
                best = model;
                checks_without_improvement = 0;
            } else if (++checks_without_improvement >= tconfig.patience) {
                break;
            }
        }
    }

    if (report.best_epoch < 0) {
        // no validation ran; the final model is the result
        best = model;
        report.best_epoch = report.epochs_run - 1;
    }
    return {std::move(best), std::move(report)};
}

double step_seconds_probe(const TripleStore& store, const ModelConfig& mconfig, int steps) {
    std::mt19937_64 rng(7);
    KsrModel model = init_model(mconfig, store.num_entities(), store.num_relations(), rng);
    const auto& train = store.train();
    auto run = [&](int count) {
        for (int i = 0; i < count; ++i) {
            const Triple& pos = train[i % train.size()];
            Triple neg = corrupt_triple(pos, store.stats(), rng, store);
            GradientResult res = score_gradient(model, pos, neg, 2.5);
            if (!res.grad.empty()) apply_gradient(model, res.grad, 0.01);
        }
    };
    run(steps / 4 + 1);  // warmup
    auto t0 = std::chrono::steady_clock::now();
    run(steps);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / steps;
}

void write_manifest(const std::string& path, const ModelConfig& mconfig,
                    const TrainConfig& tconfig, const TripleStore& store,
                    const TrainReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << "n=" << mconfig.n << "\n"
        << "d=" << mconfig.d << "\n"
        << "sigma=" << tconfig.sigma << "\n"
        << "alpha=" << tconfig.alpha << "\n"
        << "gamma=" << tconfig.gamma << "\n"
        << "epochs=" << tconfig.epochs << "\n"
        << "negatives_per_positive=" << tconfig.negatives_per_positive << "\n"
        << "eval_every=" << tconfig.eval_every << "\n"
        << "patience=" << tconfig.patience << "\n"
        << "workers=" << tconfig.workers << "\n"
        << "seed=" << tconfig.seed << "\n"
        << "train_triples=" << store.train().size() << "\n"
        << "valid_triples=" << store.valid().size() << "\n"
        << "test_triples=" << store.test().size() << "\n"
        << "entities=" << store.num_entities() << "\n"
        << "relations=" << store.num_relations() << "\n"
        << "epochs_run=" << report.epochs_run << "\n"
        << "best_epoch=" << report.best_epoch << "\n"
        << "best_valid_mrr=" << report.best_mrr << "\n";
}

}  // namespace ksr
