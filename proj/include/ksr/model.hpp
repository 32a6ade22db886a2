#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ksr/triples.hpp"

namespace ksr {

struct ModelConfig {
    int n = 10;           // knowledge feature count
    int d = 10;           // categories per feature
    double sigma = 0.04;  // Laplace coupling scale
    std::uint64_t seed = 0;

    bool operator==(const ModelConfig&) const = default;
};

// All learnable probability tables, parameterized as unconstrained logits
// mapped through per-row softmax. Entities carry a single category table
// used for both the subject and object side.
class KsrModel {
public:
    KsrModel() = default;
    KsrModel(ModelConfig config, int num_entities, int num_relations);

    const ModelConfig& config() const { return config_; }
    int num_entities() const { return num_entities_; }
    int num_relations() const { return num_relations_; }

    // logit rows, length d
    std::span<double> entity_row(int e, int k) {
        return {entity_logits_.data() + row_offset(e, k), static_cast<std::size_t>(config_.d)};
    }
    std::span<const double> entity_row(int e, int k) const {
        return {entity_logits_.data() + row_offset(e, k), static_cast<std::size_t>(config_.d)};
    }
    std::span<double> rel_subj_row(int r, int k) {
        return {rel_subj_logits_.data() + row_offset(r, k), static_cast<std::size_t>(config_.d)};
    }
    std::span<const double> rel_subj_row(int r, int k) const {
        return {rel_subj_logits_.data() + row_offset(r, k), static_cast<std::size_t>(config_.d)};
    }
    std::span<double> rel_obj_row(int r, int k) {
        return {rel_obj_logits_.data() + row_offset(r, k), static_cast<std::size_t>(config_.d)};
    }
    std::span<const double> rel_obj_row(int r, int k) const {
        return {rel_obj_logits_.data() + row_offset(r, k), static_cast<std::size_t>(config_.d)};
    }
    // feature-weight logit row, length n
    std::span<double> rel_feat_row(int r) {
        return {rel_feat_logits_.data() + static_cast<std::size_t>(r) * config_.n,
                static_cast<std::size_t>(config_.n)};
    }
    std::span<const double> rel_feat_row(int r) const {
        return {rel_feat_logits_.data() + static_cast<std::size_t>(r) * config_.n,
                static_cast<std::size_t>(config_.n)};
    }

    std::vector<double>& entity_logits() { return entity_logits_; }
    std::vector<double>& rel_subj_logits() { return rel_subj_logits_; }
    std::vector<double>& rel_obj_logits() { return rel_obj_logits_; }
    std::vector<double>& rel_feat_logits() { return rel_feat_logits_; }
    const std::vector<double>& entity_logits() const { return entity_logits_; }
    const std::vector<double>& rel_subj_logits() const { return rel_subj_logits_; }
    const std::vector<double>& rel_obj_logits() const { return rel_obj_logits_; }
    const std::vector<double>& rel_feat_logits() const { return rel_feat_logits_; }

    std::size_t parameter_count() const {
        return entity_logits_.size() + rel_subj_logits_.size() + rel_obj_logits_.size() +
               rel_feat_logits_.size();
    }

    bool operator==(const KsrModel&) const = default;

private:
    std::size_t row_offset(int i, int k) const {
        return (static_cast<std::size_t>(i) * config_.n + k) * config_.d;
    }

    ModelConfig config_;
    int num_entities_ = 0;
    int num_relations_ = 0;
    std::vector<double> entity_logits_;
    std::vector<double> rel_subj_logits_;
    std::vector<double> rel_obj_logits_;
    std::vector<double> rel_feat_logits_;
};

struct SemanticCode {
    std::vector<int> categories;  // length n, entries in 0..d-1
};

// Gradient restricted to the logit rows touched by a triple pair.
struct SparseGradient {
    std::unordered_map<int, std::vector<double>> entity;    // e -> n*d
    std::unordered_map<int, std::vector<double>> rel_subj;  // r -> n*d
    std::unordered_map<int, std::vector<double>> rel_obj;   // r -> n*d
    std::unordered_map<int, std::vector<double>> rel_feat;  // r -> n

    bool empty() const {
        return entity.empty() && rel_subj.empty() && rel_obj.empty() && rel_feat.empty();
    }
};

struct GradientResult {
    double loss = 0.0;       // hinge value max(0, gamma - s_pos + s_neg)
    double score_pos = 0.0;
    double score_neg = 0.0;
    SparseGradient grad;     // d loss / d logits; empty when the hinge is inactive
};

KsrModel init_model(const ModelConfig& config, int num_entities, int num_relations,
                    std::mt19937_64& rng);

void softmax(std::span<const double> logits, std::span<double> out);

// Normalized head-side message P(z|h)P(z|r) for feature k.
std::vector<double> subject_message(const KsrModel& m, int head, int relation, int k);
// Normalized tail-side message P(y|t)P(y|r) for feature k.
std::vector<double> object_message(const KsrModel& m, int tail, int relation, int k);

// Laplace coupling w_c = exp(-|p_c - q_c| / sigma) over the diagonal
// (the delta constraint zeroes every off-diagonal pair).
std::vector<double> coupling_weights(std::span<const double> p, std::span<const double> q,
                                     double sigma);

double score(const KsrModel& m, const Triple& t);

GradientResult score_gradient(const KsrModel& m, const Triple& pos, const Triple& neg,
                              double gamma);

// Adds scale * d score(t) / d logits into grad.
void accumulate_score_gradient(const KsrModel& m, const Triple& t, double scale,
                               SparseGradient& grad);

SemanticCode infer_entity_code(const KsrModel& m, int entity);
SemanticCode infer_relation_code(const KsrModel& m, int relation);

void save_model(const KsrModel& m, const std::string& path);
KsrModel load_model(const std::string& path);

}  // namespace ksr
