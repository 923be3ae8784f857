#include "grammar/corpus.hpp"

#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "grammar/error.hpp"

namespace grammar {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        bool word = std::isalnum(c) || c >= 0x80;
        if (word) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Corpus Corpus::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open corpus: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    Corpus corpus;
    try {
        for (const auto& dj : j) {
            Document d;
            d.id = dj.at("id");
            d.title = dj.at("title");
            d.body = dj.at("body");
            corpus.documents.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    return corpus;
}

void Corpus::save(const std::string& path) const {
    ordered_json arr = ordered_json::array();
    for (const auto& d : documents) {
        arr.push_back({{"id", d.id}, {"title", d.title}, {"body", d.body}});
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write corpus: " + path);
    out << arr.dump(2) << '\n';
}

std::vector<Chunk> Corpus::chunk(size_t chunk_size) const {
    std::vector<Chunk> chunks;
    for (const auto& doc : documents) {
        // word-boundary spans over the raw text so chunk text stays verbatim
        std::vector<std::pair<size_t, size_t>> spans;
        size_t i = 0;
        while (i < doc.body.size()) {
            unsigned char c = static_cast<unsigned char>(doc.body[i]);
            if (std::isalnum(c) || c >= 0x80) {
                size_t begin = i;
                while (i < doc.body.size()) {
                    unsigned char d = static_cast<unsigned char>(doc.body[i]);
                    if (!(std::isalnum(d) || d >= 0x80)) break;
                    ++i;
                }
                spans.emplace_back(begin, i);
            } else {
                ++i;
            }
        }
        for (size_t start = 0; start < spans.size(); start += chunk_size) {
            size_t stop = std::min(start + chunk_size, spans.size());
            Chunk chunk;
            chunk.id = static_cast<int>(chunks.size());
            chunk.doc_id = doc.id;
            chunk.token_count = stop - start;
            size_t text_begin = spans[start].first;
            size_t text_end = stop == spans.size() ? doc.body.size() : spans[stop - 1].second;
            chunk.text = doc.body.substr(text_begin, text_end - text_begin);
            chunks.push_back(std::move(chunk));
        }
        if (spans.empty() && !doc.body.empty()) {
            Chunk chunk;
            chunk.id = static_cast<int>(chunks.size());
            chunk.doc_id = doc.id;
            chunk.text = doc.body;
            chunk.token_count = 0;
            chunks.push_back(std::move(chunk));
        }
    }
    return chunks;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open manifest: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    Manifest m;
    try {
        for (auto& [group_id, entry] : j.items()) {
            GoldEntry gold;
            gold.document_ids = entry.at("document_ids").get<std::vector<int>>();
            gold.fact_sentence = entry.at("fact_sentence");
            m.entries[group_id] = std::move(gold);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    return m;
}

void Manifest::save(const std::string& path) const {
    ordered_json j = ordered_json::object();
    for (const auto& [group_id, gold] : entries) {
        j[group_id] = {{"document_ids", gold.document_ids}, {"fact_sentence", gold.fact_sentence}};
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace grammar
