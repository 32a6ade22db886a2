#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksr/model.hpp"
#include "ksr/triples.hpp"

namespace ksr {

struct TrainConfig {
    double alpha = 0.01;   // SGD step size
    double gamma = 2.5;    // ranking margin
    double sigma = 0.04;   // Laplace coupling scale (copied into ModelConfig)
    int epochs = 2000;
    int negatives_per_positive = 1;
    int eval_every = 25;   // validation cadence in epochs; 0 disables
    int patience = 4;      // validation checks without improvement before stopping
    int workers = 1;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_loss;        // mean hinge loss per epoch run
    std::vector<double> valid_mrr;         // filtered MRR at each validation check
    std::vector<double> epoch_seconds;
    int best_epoch = -1;                   // epoch of the best validation MRR
    double best_mrr = 0.0;
    int epochs_run = 0;
    int workers = 1;
    std::string final_model_path;
};

// SGD on the pairwise hinge max(0, gamma - score(pos) + score(neg)).
// workers == 1 is deterministic under a fixed seed; workers > 1 runs
// lock-free parallel updates (statistical convergence only).
std::pair<KsrModel, TrainReport> fit(const TripleStore& store, const ModelConfig& mconfig,
                                     const TrainConfig& tconfig);

// Mean seconds per training step (one positive/negative pair) at steady state.
double step_seconds_probe(const TripleStore& store, const ModelConfig& mconfig,
                          int steps = 2000);

void write_manifest(const std::string& path, const ModelConfig& mconfig,
                    const TrainConfig& tconfig, const TripleStore& store,
                    const TrainReport& report);

}  // namespace ksr
