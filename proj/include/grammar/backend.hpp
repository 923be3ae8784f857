#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace grammar {

// Chat-completion abstraction. Implementations must be safe to call from
// multiple threads.
class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual std::string complete(const std::string& prompt, double temperature) = 0;
    virtual std::string identity() const = 0;
};

// Cache/replay key: hash of (prompt, model/identity, temperature).
std::string completion_key(const std::string& prompt, const std::string& identity, double temperature);

// Deterministic record/replay backend keyed by prompt hash. In replay mode a
// missing entry raises BackendUnavailable; in record mode the wrapped backend
// is consulted and its reply stored.
class ReplayBackend : public CompletionBackend {
public:
    explicit ReplayBackend(std::string model = "stub");

    static ReplayBackend from_file(const std::string& path, std::string model = "stub");
    void save(const std::string& path) const;

    void record(const std::string& prompt, double temperature, const std::string& reply);
    void set_fallback(std::shared_ptr<CompletionBackend> inner) { inner_ = std::move(inner); }

    std::string complete(const std::string& prompt, double temperature) override;
    std::string identity() const override { return model_; }
    size_t size() const { return replies_.size(); }
    size_t calls() const { return calls_; }

private:
    std::string model_;
    std::map<std::string, std::string> replies_;
    std::shared_ptr<CompletionBackend> inner_;
    size_t calls_ = 0;
};

// Test helper: computes replies on the fly.
class LambdaBackend : public CompletionBackend {
public:
    using Fn = std::function<std::string(const std::string&, double)>;
    explicit LambdaBackend(Fn fn, std::string name = "lambda") : fn_(std::move(fn)), name_(std::move(name)) {}
    std::string complete(const std::string& prompt, double temperature) override {
        return fn_(prompt, temperature);
    }
    std::string identity() const override { return name_; }

private:
    Fn fn_;
    std::string name_;
};

struct HttpBackendConfig {
    std::string endpoint;  // e.g. http://host:port
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env = "GRAMMAR_API_KEY";
    int max_retries = 3;
    int max_in_flight = 4;
};

// OpenAI-style chat completion client.
class HttpBackend : public CompletionBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string complete(const std::string& prompt, double temperature) override;
    std::string identity() const override { return config_.model; }

private:
    HttpBackendConfig config_;
    std::mutex mutex_;
    int in_flight_ = 0;
};

// Disk cache wrapper: one JSON file per completion under cache_dir, keyed by
// (prompt hash, identity, temperature). Makes live runs resumable.
class CachingBackend : public CompletionBackend {
public:
    CachingBackend(std::shared_ptr<CompletionBackend> inner, std::string cache_dir);
    std::string complete(const std::string& prompt, double temperature) override;
    std::string identity() const override { return inner_->identity(); }
    size_t hits() const { return hits_; }
    size_t misses() const { return misses_; }

private:
    std::shared_ptr<CompletionBackend> inner_;
    std::string cache_dir_;
    std::mutex mutex_;
    size_t hits_ = 0;
    size_t misses_ = 0;
};

}  // namespace grammar
