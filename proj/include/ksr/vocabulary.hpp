#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ksr/errors.hpp"

namespace ksr {

// Dense bidirectional symbol<->index maps for entities and relations.
// Indices are assigned in first-seen order, so a rebuilt vocabulary from
// the same file order is identical.
class Vocabulary {
public:
    int add_entity(const std::string& symbol) {
        auto it = entity_to_id_.find(symbol);
        if (it != entity_to_id_.end()) return it->second;
        int id = static_cast<int>(entity_symbols_.size());
        entity_to_id_.emplace(symbol, id);
        entity_symbols_.push_back(symbol);
        return id;
    }

    int add_relation(const std::string& symbol) {
        auto it = relation_to_id_.find(symbol);
        if (it != relation_to_id_.end()) return it->second;
        int id = static_cast<int>(relation_symbols_.size());
        relation_to_id_.emplace(symbol, id);
        relation_symbols_.push_back(symbol);
        return id;
    }

    // Lookup that throws on unknown symbols (fixed-vocabulary mode).
    int entity_id(const std::string& symbol) const {
        auto it = entity_to_id_.find(symbol);
        if (it == entity_to_id_.end())
            throw VocabularyError("unknown entity symbol: " + symbol);
        return it->second;
    }

    int relation_id(const std::string& symbol) const {
        auto it = relation_to_id_.find(symbol);
        if (it == relation_to_id_.end())
            throw VocabularyError("unknown relation symbol: " + symbol);
        return it->second;
    }

    bool has_entity(const std::string& symbol) const {
        return entity_to_id_.count(symbol) > 0;
    }

    const std::string& entity_symbol(int id) const { return entity_symbols_.at(id); }
    const std::string& relation_symbol(int id) const { return relation_symbols_.at(id); }

    int num_entities() const { return static_cast<int>(entity_symbols_.size()); }
    int num_relations() const { return static_cast<int>(relation_symbols_.size()); }
    bool empty() const { return entity_symbols_.empty() && relation_symbols_.empty(); }

private:
    std::unordered_map<std::string, int> entity_to_id_;
    std::unordered_map<std::string, int> relation_to_id_;
    std::vector<std::string> entity_symbols_;
    std::vector<std::string> relation_symbols_;
};

}  // namespace ksr
