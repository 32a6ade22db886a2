#include "ksr/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "ksr/errors.hpp"

namespace ksr {

int rank_entities(const KsrModel& m, const Triple& truth, Hole hole, bool filtered,
                  const TripleStore& store) {
    double true_score = score(m, truth);
    int rank = 1;
    for (int e = 0; e < store.num_entities(); ++e) {
        Triple cand = truth;
        (hole == Hole::Head ? cand.head : cand.tail) = e;
        if (cand == truth) continue;
        if (filtered && store.known(cand)) continue;
        if (score(m, cand) >= true_score) ++rank;
    }
    return rank;
}

namespace {

struct QueryResult {
    int relation = 0;
    double rr_head_f = 0.0, rr_tail_f = 0.0;
    double hits_raw = 0.0, hits_f = 0.0;  // averaged over both directions
};

QueryResult evaluate_query(const KsrModel& m, const Triple& t, const TripleStore& store) {
    QueryResult res;
    res.relation = t.relation;
    int rh_raw = rank_entities(m, t, Hole::Head, false, store);
    int rh_f = rank_entities(m, t, Hole::Head, true, store);
    int rt_raw = rank_entities(m, t, Hole::Tail, false, store);
    int rt_f = rank_entities(m, t, Hole::Tail, true, store);
    res.rr_head_f = 1.0 / rh_f;
    res.rr_tail_f = 1.0 / rt_f;
    res.hits_raw = 0.5 * ((rh_raw <= 10) + (rt_raw <= 10));
    res.hits_f = 0.5 * ((rh_f <= 10) + (rt_f <= 10));
    return res;
}

LinkPredictionReport reduce(const std::vector<QueryResult>& results) {
    LinkPredictionReport rep;
    if (results.empty()) return rep;
    for (const auto& q : results) {
        rep.mrr_head_filtered += q.rr_head_f;
        rep.mrr_tail_filtered += q.rr_tail_f;
        rep.hits10_raw += q.hits_raw;
        rep.hits10_filtered += q.hits_f;
        auto& pr = rep.per_relation[q.relation];
        ++pr.queries;
        pr.mrr_head_filtered += q.rr_head_f;
        pr.mrr_tail_filtered += q.rr_tail_f;
        pr.hits10_raw += q.hits_raw;
        pr.hits10_filtered += q.hits_f;
    }
    double inv = 1.0 / results.size();
    rep.mrr_head_filtered *= inv;
    rep.mrr_tail_filtered *= inv;
    rep.hits10_raw *= inv;
    rep.hits10_filtered *= inv;
    for (auto& [r, pr] : rep.per_relation) {
        double pinv = 1.0 / pr.queries;
        pr.mrr_head_filtered *= pinv;
        pr.mrr_tail_filtered *= pinv;
        pr.hits10_raw *= pinv;
        pr.hits10_filtered *= pinv;
    }
    return rep;
}

}  // namespace

LinkPredictionReport link_prediction_on(const KsrModel& m, const std::vector<Triple>& queries,
                                        const TripleStore& store, int workers) {
    std::vector<QueryResult> results(queries.size());
    if (workers <= 1 || queries.size() < 2) {
        for (std::size_t i = 0; i < queries.size(); ++i)
            results[i] = evaluate_query(m, queries[i], store);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (queries.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            std::size_t lo = w * chunk;
            std::size_t hi = std::min(queries.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i)
                    results[i] = evaluate_query(m, queries[i], store);
            });
        }
        for (auto& th : pool) th.join();
    }
    return reduce(results);  // fixed order, so parallel == sequential
}

LinkPredictionReport link_prediction(const KsrModel& m, const TripleStore& store, int workers) {
    return link_prediction_on(m, store.test(), store, workers);
}

std::vector<double> entity_features(const KsrModel& m, int entity) {
    int n = m.config().n;
    int d = m.config().d;
    std::vector<double> feat(static_cast<std::size_t>(n) * d);
    for (int k = 0; k < n; ++k)
        softmax(m.entity_row(entity, k),
                std::span<double>(feat.data() + static_cast<std::size_t>(k) * d, d));
    return feat;
}

namespace {

// Full-batch binary logistic regression; small feature spaces only.
std::vector<double> train_logistic(const std::vector<std::vector<double>>& x,
                                   const std::vector<int>& y, int iters, double lr) {
    std::size_t dim = x[0].size();
    std::vector<double> w(dim + 1, 0.0);  // last entry is the bias
    std::vector<double> grad(dim + 1);
    for (int it = 0; it < iters; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double z = w[dim];
            for (std::size_t j = 0; j < dim; ++j) z += w[j] * x[i][j];
            double err = 1.0 / (1.0 + std::exp(-z)) - y[i];
            for (std::size_t j = 0; j < dim; ++j) grad[j] += err * x[i][j];
            grad[dim] += err;
        }
        double step = lr / x.size();
        for (std::size_t j = 0; j <= dim; ++j) w[j] -= step * grad[j];
    }
    return w;
}

double decision(const std::vector<double>& w, const std::vector<double>& x) {
    double z = w.back();
    for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
    return z;
}

}  // namespace

double entity_classification(const KsrModel& m, const std::vector<std::vector<int>>& labels,
                             int num_types, double fraction, int trials, std::mt19937_64& rng,
                             int* skipped_types) {
    std::vector<int> labeled;
    for (std::size_t e = 0; e < labels.size(); ++e)
        if (!labels[e].empty()) labeled.push_back(static_cast<int>(e));
    if (labeled.size() < 2) throw ConfigError("need at least 2 labeled entities");

    std::vector<std::vector<double>> feats(labels.size());
    for (int e : labeled) feats[e] = entity_features(m, e);

    double total_acc = 0.0;
    int total_skipped = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<int> order = labeled;
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t n_train = std::max<std::size_t>(1, static_cast<std::size_t>(
                                  std::llround(fraction * order.size())));
        n_train = std::min(n_train, order.size() - 1);
        std::vector<int> train_set(order.begin(), order.begin() + n_train);
        std::vector<int> test_set(order.begin() + n_train, order.end());

        std::vector<std::vector<double>> x;
        x.reserve(train_set.size());
        for (int e : train_set) x.push_back(feats[e]);

        std::vector<std::vector<double>> classifiers(num_types);
        std::vector<bool> active(num_types, false);
        for (int ty = 0; ty < num_types; ++ty) {
            std::vector<int> y;
            int positives = 0;
            y.reserve(train_set.size());
            for (int e : train_set) {
                bool pos = std::find(labels[e].begin(), labels[e].end(), ty) != labels[e].end();
                y.push_back(pos);
                positives += pos;
            }
            if (positives < 2) {
                ++total_skipped;
                continue;
            }
            classifiers[ty] = train_logistic(x, y, 200, 2.0);
            active[ty] = true;
        }

        int correct = 0;
        for (int e : test_set) {
            double best = -1e300;
            int pred = -1;
            for (int ty = 0; ty < num_types; ++ty) {
                if (!active[ty]) continue;
                double z = decision(classifiers[ty], feats[e]);
                if (z > best) {
                    best = z;
                    pred = ty;
                }
            }
            if (pred >= 0 &&
                std::find(labels[e].begin(), labels[e].end(), pred) != labels[e].end())
                ++correct;
        }
        total_acc += test_set.empty() ? 0.0 : static_cast<double>(correct) / test_set.size();
    }
    if (skipped_types) *skipped_types = total_skipped;
    return total_acc / trials;
}

ClassificationReport classification_report(const KsrModel& m,
                                           const std::vector<std::vector<int>>& labels,
                                           int num_types, const std::vector<double>& fractions,
                                           int trials, std::mt19937_64& rng) {
    ClassificationReport rep;
    for (double f : fractions) {
        int skipped = 0;
        rep.accuracy_at[f] = entity_classification(m, labels, num_types, f, trials, rng, &skipped);
        rep.skipped_types += skipped;
    }
    return rep;
}

}  // namespace ksr
