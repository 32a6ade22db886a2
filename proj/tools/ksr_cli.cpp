// ksr: train, evaluate, and analyze KSR knowledge graph models.
//
// Subcommands: train, eval-lp, eval-ec, analyze, retrieve, inspect, make-toy.
// Exit codes: 0 success, 1 runtime error, 2 argument error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ksr/descriptions.hpp"
#include "ksr/errors.hpp"
#include "ksr/evaluator.hpp"
#include "ksr/semantics.hpp"
#include "ksr/toy_kg.hpp"
#include "ksr/trainer.hpp"

namespace {

using namespace ksr;

struct DataPaths {
    std::string dir;
    std::string train() const { return dir + "/train.txt"; }
    std::string valid() const { return dir + "/valid.txt"; }
    std::string test() const { return dir + "/test.txt"; }
};

// Loads triples with a vocabulary built from train; valid/test may not
// introduce new symbols.
std::pair<TripleStore, Vocabulary> load_store(const DataPaths& paths) {
    Vocabulary vocab;
    auto train = load_triples(paths.train(), vocab, false);
    std::vector<Triple> valid, test;
    if (std::filesystem::exists(paths.valid())) valid = load_triples(paths.valid(), vocab, true);
    if (std::filesystem::exists(paths.test())) test = load_triples(paths.test(), vocab, true);
    TripleStore store(std::move(train), std::move(valid), std::move(test),
                      vocab.num_entities(), vocab.num_relations());
    return {std::move(store), std::move(vocab)};
}

std::vector<std::vector<int>> load_labels(const std::string& path, const Vocabulary& vocab,
                                          int& num_types) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file: " + path);
    std::unordered_map<std::string, int> type_ids;
    std::vector<std::vector<int>> labels(vocab.num_entities());
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string sym = line.substr(0, tab);
        if (!vocab.has_entity(sym)) continue;
        std::string type = line.substr(tab + 1);
        auto [it, _] = type_ids.try_emplace(type, static_cast<int>(type_ids.size()));
        labels[vocab.entity_id(sym)].push_back(it->second);
    }
    num_types = static_cast<int>(type_ids.size());
    return labels;
}

DescriptionCorpus load_corpus(const std::string& path, const Vocabulary& vocab,
                              const std::string& stopword_file) {
    auto stopwords = stopword_file.empty() ? DescriptionCorpus::default_stopwords()
                                           : DescriptionCorpus::load_stopwords(stopword_file);
    return DescriptionCorpus::load(path, vocab, stopwords);
}

void print_lp_report(const LinkPredictionReport& rep, bool quiet) {
    std::printf("mrr_head_filtered=%.6f\n", rep.mrr_head_filtered);
    std::printf("mrr_tail_filtered=%.6f\n", rep.mrr_tail_filtered);
    std::printf("hits10_raw=%.6f\n", rep.hits10_raw);
    std::printf("hits10_filtered=%.6f\n", rep.hits10_filtered);
    if (quiet) return;
    std::printf("\n%-10s %8s %12s %12s %10s %10s\n", "relation", "queries", "mrr_head_f",
                "mrr_tail_f", "hits10_r", "hits10_f");
    for (const auto& [r, pr] : rep.per_relation)
        std::printf("%-10d %8d %12.4f %12.4f %10.4f %10.4f\n", r, pr.queries,
                    pr.mrr_head_filtered, pr.mrr_tail_filtered, pr.hits10_raw,
                    pr.hits10_filtered);
}

int run(int argc, char** argv) {
    CLI::App app{"KSR knowledge graph embedding"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);
    app.allow_config_extras(false);

    bool quiet = false;
    int workers = 1;
    std::uint64_t seed = 0;
    app.add_flag("--quiet", quiet, "suppress secondary output")->configurable(true);
    app.add_option("--workers", workers, "parallelism degree")->configurable(true);
    app.add_option("--seed", seed, "random seed")->configurable(true);
    app.fallthrough();  // let subcommands accept the global options above

    // ---- train ----
    auto* train = app.add_subcommand("train", "train a model on a dataset directory");
    std::string data_dir, out_dir = ".";
    ModelConfig mc;
    mc.n = 10;
    mc.d = 10;
    TrainConfig tc;
    train->add_option("--data", data_dir, "directory with train.txt/valid.txt/test.txt")
        ->required();
    train->add_option("--out", out_dir, "output directory");
    train->add_option("--n", mc.n, "knowledge feature count");
    train->add_option("--d", mc.d, "categories per feature");
    train->add_option("--sigma", tc.sigma, "Laplace coupling scale");
    train->add_option("--alpha", tc.alpha, "learning rate");
    train->add_option("--gamma", tc.gamma, "ranking margin");
    train->add_option("--epochs", tc.epochs, "maximum training rounds");
    train->add_option("--neg", tc.negatives_per_positive, "negatives per positive");
    train->add_option("--eval-every", tc.eval_every, "validation cadence in epochs");
    train->add_option("--patience", tc.patience, "early-stop patience");

    // ---- eval-lp ----
    auto* eval_lp = app.add_subcommand("eval-lp", "link prediction on the test split");
    std::string model_path;
    eval_lp->add_option("--model", model_path, "model file")->required();
    eval_lp->add_option("--data", data_dir, "dataset directory")->required();

    // ---- eval-ec ----
    auto* eval_ec = app.add_subcommand("eval-ec", "entity type classification");
    std::string labels_path, fractions_arg = "25,50,75";
    int trials = 10;
    eval_ec->add_option("--model", model_path, "model file")->required();
    eval_ec->add_option("--data", data_dir, "dataset directory")->required();
    eval_ec->add_option("--labels", labels_path, "entity<TAB>type file")->required();
    eval_ec->add_option("--fractions", fractions_arg, "training percentages, comma-separated");
    eval_ec->add_option("--trials", trials, "shuffled splits per fraction");

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "word-category tables and feature correlation");
    std::string desc_path, stopword_file;
    int top_k = 8, min_df = 5;
    analyze->add_option("--model", model_path, "model file")->required();
    analyze->add_option("--data", data_dir, "dataset directory")->required();
    analyze->add_option("--descriptions", desc_path, "entity<TAB>text file")->required();
    analyze->add_option("--top-k", top_k, "significant words per category");
    analyze->add_option("--min-df", min_df, "minimum document frequency");
    analyze->add_option("--stopwords", stopword_file, "override the stopword list");

    // ---- retrieve ----
    auto* retrieve = app.add_subcommand("retrieve", "naive-Bayes entity retrieval");
    std::string query;
    int top_n = 5;
    retrieve->add_option("--model", model_path, "model file")->required();
    retrieve->add_option("--data", data_dir, "dataset directory")->required();
    retrieve->add_option("--descriptions", desc_path, "entity<TAB>text file")->required();
    retrieve->add_option("--query", query, "query text")->required();
    retrieve->add_option("--k", top_n, "results to return");
    retrieve->add_option("--min-df", min_df, "minimum document frequency");
    retrieve->add_option("--stopwords", stopword_file, "override the stopword list");

    // ---- inspect ----
    auto* inspect = app.add_subcommand("inspect", "print an entity's or relation's code");
    std::string entity_sym, relation_sym;
    inspect->add_option("--model", model_path, "model file")->required();
    inspect->add_option("--data", data_dir, "dataset directory")->required();
    inspect->add_option("--entity", entity_sym, "entity symbol");
    inspect->add_option("--relation", relation_sym, "relation symbol");

    // ---- make-toy ----
    auto* make_toy = app.add_subcommand("make-toy", "write the deterministic toy benchmark");
    int toy_size = 100;
    make_toy->add_option("--out", out_dir, "output directory")->required();
    make_toy->add_option("--size", toy_size, "entities per cluster");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help is success, bad arguments are 2
    }

    if (train->parsed()) {
        auto [store, vocab] = load_store({data_dir});
        tc.seed = seed;
        tc.workers = workers;
        mc.sigma = tc.sigma;
        auto [model, rep] = fit(store, mc, tc);
        std::filesystem::create_directories(out_dir);
        std::string model_file = out_dir + "/model.ksr";
        save_model(model, model_file);
        TrainReport manifest_rep = rep;
        manifest_rep.final_model_path = model_file;
        write_manifest(out_dir + "/manifest.txt", mc, tc, store, manifest_rep);
        if (!quiet) {
            for (std::size_t i = 0; i < rep.epoch_loss.size(); ++i)
                std::printf("epoch=%zu loss=%.6f time=%.2fs\n", i, rep.epoch_loss[i],
                            rep.epoch_seconds[i]);
        }
        std::printf("epochs_run=%d best_epoch=%d best_valid_mrr=%.6f model=%s\n",
                    rep.epochs_run, rep.best_epoch, rep.best_mrr, model_file.c_str());
        return 0;
    }

    if (eval_lp->parsed()) {
        auto model = load_model(model_path);
        auto [store, vocab] = load_store({data_dir});
        print_lp_report(link_prediction(model, store, workers), quiet);
        return 0;
    }

    if (eval_ec->parsed()) {
        auto model = load_model(model_path);
        auto [store, vocab] = load_store({data_dir});
        int num_types = 0;
        auto labels = load_labels(labels_path, vocab, num_types);
        std::vector<double> fractions;
        std::stringstream ss(fractions_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) fractions.push_back(std::stod(tok) / 100.0);
        std::mt19937_64 rng(seed);
        auto rep = classification_report(model, labels, num_types, fractions, trials, rng);
        for (const auto& [f, acc] : rep.accuracy_at)
            std::printf("accuracy_t%02d=%.6f\n", static_cast<int>(f * 100 + 0.5), acc);
        if (rep.skipped_types > 0)
            std::printf("skipped_types=%d\n", rep.skipped_types);
        return 0;
    }

    if (analyze->parsed()) {
        auto model = load_model(model_path);
        auto [store, vocab] = load_store({data_dir});
        auto corpus = load_corpus(desc_path, vocab, stopword_file);
        auto table = build_word_category_table(model, corpus, min_df, 1.0);

        std::printf("# feature\tcategory\trank\tword\tscore\n");
        for (int i = 0; i < model.config().n; ++i)
            for (int c = 0; c < model.config().d; ++c) {
                auto words = significant_words(table, i, c, top_k);
                for (std::size_t rank = 0; rank < words.size(); ++rank) {
                    int j = table.word_index(words[rank]);
                    std::printf("%d\t%d\t%zu\t%s\t%.6f\n", i, c, rank + 1,
                                words[rank].c_str(), table.conditional(j, i, c));
                }
            }

        std::vector<SemanticCode> codes;
        for (int e = 0; e < model.num_entities(); ++e)
            codes.push_back(infer_entity_code(model, e));
        auto designated =
            default_designated_categories(codes, model.config().n, model.config().d);
        auto corr = feature_correlation(codes, designated);
        std::printf("\n# feature correlation (designated categories:");
        for (int c : designated) std::printf(" %d", c);
        std::printf(")\n");
        for (int i = 0; i < model.config().n; ++i) std::printf("\tf%d", i);
        std::printf("\n");
        for (int i = 0; i < model.config().n; ++i) {
            std::printf("f%d", i);
            for (int j = 0; j < model.config().n; ++j)
                std::printf("\t%.4f", corr.matrix[i][j]);
            std::printf("\n");
        }
        for (int i : corr.empty_features)
            std::fprintf(stderr, "warning: feature %d has no designated-category hits\n", i);
        return 0;
    }

    if (retrieve->parsed()) {
        auto model = load_model(model_path);
        auto [store, vocab] = load_store({data_dir});
        auto corpus = load_corpus(desc_path, vocab, stopword_file);
        auto table = build_word_category_table(model, corpus, min_df, 1.0);
        auto stopwords = stopword_file.empty() ? DescriptionCorpus::default_stopwords()
                                               : DescriptionCorpus::load_stopwords(stopword_file);
        auto tokens = DescriptionCorpus::tokenize(query, stopwords);
        auto top = retrieve_entities(tokens, model, table, top_n);
        if (top.empty()) {
            std::printf("no results (query has no in-vocabulary words)\n");
            return 0;
        }
        for (std::size_t i = 0; i < top.size(); ++i)
            std::printf("%zu\t%s\t%.6f\n", i + 1, vocab.entity_symbol(top[i].entity).c_str(),
                        top[i].similarity);
        return 0;
    }

    if (inspect->parsed()) {
        auto model = load_model(model_path);
        auto [store, vocab] = load_store({data_dir});
        if (entity_sym.empty() == relation_sym.empty())
            throw CLI::ValidationError("inspect", "give exactly one of --entity / --relation");
        std::vector<double> probs(model.config().d);
        if (!entity_sym.empty()) {
            int e = vocab.entity_id(entity_sym);
            auto code = infer_entity_code(model, e);
            std::printf("entity %s code:", entity_sym.c_str());
            for (int c : code.categories) std::printf(" %d", c);
            std::printf("\n");
            for (int k = 0; k < model.config().n; ++k) {
                softmax(model.entity_row(e, k), probs);
                std::printf("feature %d:", k);
                for (double p : probs) std::printf(" %.4f", p);
                std::printf("\n");
            }
        } else {
            int r = vocab.relation_id(relation_sym);
            auto code = infer_relation_code(model, r);
            std::printf("relation %s code:", relation_sym.c_str());
            for (int c : code.categories) std::printf(" %d", c);
            std::printf("\n");
            for (int k = 0; k < model.config().n; ++k) {
                std::printf("feature %d subj:", k);
                softmax(model.rel_subj_row(r, k), probs);
                for (double p : probs) std::printf(" %.4f", p);
                std::printf("  obj:");
                softmax(model.rel_obj_row(r, k), probs);
                for (double p : probs) std::printf(" %.4f", p);
                std::printf("\n");
            }
        }
        return 0;
    }

    if (make_toy->parsed()) {
        auto kg = toy::generate(toy_size, seed == 0 ? 42 : seed);
        toy::write_dataset(kg, out_dir);
        std::printf("wrote toy dataset (%d entities, %d relations) to %s\n",
                    kg.vocab.num_entities(), kg.vocab.num_relations(), out_dir.c_str());
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error&) {
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
