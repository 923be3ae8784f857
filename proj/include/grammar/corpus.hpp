#pragma once

#include <map>
#include <string>
#include <vector>

namespace grammar {

struct Document {
    int id = 0;
    std::string title;
    std::string body;
};

struct Chunk {
    int id = 0;
    int doc_id = 0;
    std::string text;
    size_t token_count = 0;
};

// Lowercased Unicode-ish word split: runs of alphanumerics (bytes >= 0x80
// count as letters) form tokens.
std::vector<std::string> tokenize(const std::string& text);

struct Corpus {
    std::vector<Document> documents;

    static Corpus load(const std::string& path);
    void save(const std::string& path) const;

    // Splits every document into chunks of at most chunk_size tokens.
    // Chunk ids are dense 0..n-1 in document order.
    std::vector<Chunk> chunk(size_t chunk_size) const;
};

// Provenance of each semantic group: which document(s) carry its fact and
// the exact sentence encoding it.
struct GoldEntry {
    std::vector<int> document_ids;
    std::string fact_sentence;
};

struct Manifest {
    std::map<std::string, GoldEntry> entries;  // group_id -> gold

    static Manifest load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace grammar
