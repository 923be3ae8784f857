#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "grammar/corpus.hpp"

namespace grammar {

// Inverted index over tokenized chunks. Immutable after build, shareable
// across threads.
class Index {
public:
    static Index build(const Corpus& corpus, size_t chunk_size);

    const std::vector<Chunk>& chunks() const { return chunks_; }
    size_t chunk_count() const { return chunks_.size(); }
    size_t document_frequency(const std::string& term) const;
    size_t term_frequency(const std::string& term, size_t chunk_id) const;

private:
    std::vector<Chunk> chunks_;
    std::vector<std::unordered_map<std::string, size_t>> chunk_terms_;
    std::unordered_map<std::string, size_t> df_;
};

struct RetrievalResult {
    std::string query;
    std::vector<int> ranked_chunk_ids;
    std::vector<double> scores;  // non-increasing
    std::string assembled_context;
    size_t context_token_count = 0;
};

// score(chunk) = |distinct query terms shared with the chunk|
RetrievalResult keyword_retrieve(const std::string& query, const Index& index, size_t k);

// score(chunk) = sum over distinct query terms of tf * idf with
// idf(t) = ln((1 + N) / (1 + df(t))) + 1, raw tf, no length normalization
RetrievalResult tfidf_retrieve(const std::string& query, const Index& index, size_t k);

double smoothed_idf(size_t chunk_count, size_t df);

// Concatenates chunks in rank order, stopping before the chunk whose
// addition would exceed the token budget.
std::string assemble_context(const Index& index, const std::vector<int>& ranked_chunk_ids,
                             size_t budget, size_t* token_count = nullptr);

}  // namespace grammar
