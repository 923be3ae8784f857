#include "grammar/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "grammar/error.hpp"

namespace grammar {

Index Index::build(const Corpus& corpus, size_t chunk_size) {
    if (corpus.documents.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents");
    if (chunk_size < 16) throw Error(ErrorCode::EmptyCorpus, "chunk_size must be >= 16");

    Index index;
    index.chunks_ = corpus.chunk(chunk_size);
    index.chunk_terms_.resize(index.chunks_.size());
    for (size_t i = 0; i < index.chunks_.size(); ++i) {
        for (const auto& term : tokenize(index.chunks_[i].text)) {
            ++index.chunk_terms_[i][term];
        }
        for (const auto& [term, tf] : index.chunk_terms_[i]) {
            (void)tf;
            ++index.df_[term];
        }
    }
    return index;
}

size_t Index::document_frequency(const std::string& term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

size_t Index::term_frequency(const std::string& term, size_t chunk_id) const {
    const auto& terms = chunk_terms_.at(chunk_id);
    auto it = terms.find(term);
    return it == terms.end() ? 0 : it->second;
}

double smoothed_idf(size_t chunk_count, size_t df) {
    return std::log((1.0 + static_cast<double>(chunk_count)) / (1.0 + static_cast<double>(df))) + 1.0;
}

namespace {

RetrievalResult rank_chunks(const std::string& query, const Index& index, size_t k,
                            const std::vector<double>& chunk_scores) {
    std::vector<int> order(index.chunk_count());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (chunk_scores[static_cast<size_t>(a)] != chunk_scores[static_cast<size_t>(b)]) {
            return chunk_scores[static_cast<size_t>(a)] > chunk_scores[static_cast<size_t>(b)];
        }
        return a < b;  // ties by ascending chunk id
    });
    if (order.size() > k) order.resize(k);

    RetrievalResult result;
    result.query = query;
    for (int id : order) {
        result.ranked_chunk_ids.push_back(id);
        result.scores.push_back(chunk_scores[static_cast<size_t>(id)]);
    }
    return result;
}

}  // namespace

RetrievalResult keyword_retrieve(const std::string& query, const Index& index, size_t k) {
    std::set<std::string> terms;
    for (const auto& t : tokenize(query)) terms.insert(t);

    std::vector<double> scores(index.chunk_count(), 0.0);
    for (size_t c = 0; c < index.chunk_count(); ++c) {
        size_t shared = 0;
        for (const auto& t : terms) {
            if (index.term_frequency(t, c) > 0) ++shared;
        }
        scores[c] = static_cast<double>(shared);
    }
    return rank_chunks(query, index, k, scores);
}

RetrievalResult tfidf_retrieve(const std::string& query, const Index& index, size_t k) {
    std::set<std::string> terms;
    for (const auto& t : tokenize(query)) terms.insert(t);

    std::vector<double> scores(index.chunk_count(), 0.0);
    for (size_t c = 0; c < index.chunk_count(); ++c) {
        double score = 0.0;
        for (const auto& t : terms) {
            size_t tf = index.term_frequency(t, c);
            if (tf == 0) continue;
            score += static_cast<double>(tf) * smoothed_idf(index.chunk_count(), index.document_frequency(t));
        }
        scores[c] = score;
    }
    return rank_chunks(query, index, k, scores);
}

std::string assemble_context(const Index& index, const std::vector<int>& ranked_chunk_ids,
                             size_t budget, size_t* token_count) {
    if (budget < 1) throw Error(ErrorCode::FirstChunkTooLarge, "budget must be >= 1");
    std::string context;
    size_t used = 0;
    bool first = true;
    for (int id : ranked_chunk_ids) {
        const Chunk& chunk = index.chunks().at(static_cast<size_t>(id));
        if (used + chunk.token_count > budget) {
            if (first) {
                throw Error(ErrorCode::FirstChunkTooLarge,
                            "first chunk has " + std::to_string(chunk.token_count) +
                                " tokens, budget is " + std::to_string(budget));
            }
            break;
        }
        if (!first) context += "\n";
        context += chunk.text;
        used += chunk.token_count;
        first = false;
    }
    if (token_count != nullptr) *token_count = used;
    return context;
}

}  // namespace grammar
