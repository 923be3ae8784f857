#include "grammar/backend.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "grammar/error.hpp"
#include "grammar/hash.hpp"

namespace grammar {

using nlohmann::json;

std::string completion_key(const std::string& prompt, const std::string& identity, double temperature) {
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.3f", temperature);
    return fnv1a64_hex(prompt + '\x1f' + identity + '\x1f' + temp);
}

ReplayBackend::ReplayBackend(std::string model) : model_(std::move(model)) {}

ReplayBackend ReplayBackend::from_file(const std::string& path, std::string model) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open replay file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, "replay file " + path + ": " + e.what());
    }
    ReplayBackend backend(std::move(model));
    if (j.contains("model")) backend.model_ = j["model"].get<std::string>();
    for (auto& [key, value] : j.at("replies").items()) {
        backend.replies_[key] = value.get<std::string>();
    }
    return backend;
}

void ReplayBackend::save(const std::string& path) const {
    json j;
    j["model"] = model_;
    j["replies"] = replies_;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write replay file: " + path);
    out << j.dump(2) << '\n';
}

void ReplayBackend::record(const std::string& prompt, double temperature, const std::string& reply) {
    replies_[completion_key(prompt, model_, temperature)] = reply;
}

std::string ReplayBackend::complete(const std::string& prompt, double temperature) {
    ++calls_;
    auto it = replies_.find(completion_key(prompt, model_, temperature));
    if (it != replies_.end()) return it->second;
    if (inner_) {
        std::string reply = inner_->complete(prompt, temperature);
        record(prompt, temperature, reply);
        return reply;
    }
    throw Error(ErrorCode::BackendUnavailable,
                "no recorded completion for prompt hash " + completion_key(prompt, model_, temperature));
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::complete(const std::string& prompt, double temperature) {
    {
        std::unique_lock lock(mutex_);
        while (in_flight_ >= config_.max_in_flight) {
            lock.unlock();
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
            lock.lock();
        }
        ++in_flight_;
    }

    json body = {
        {"model", config_.model},
        {"temperature", temperature},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
    };
    const char* key = std::getenv(config_.api_key_env.c_str());

    std::string error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(200 << (attempt - 1)));
        }
        httplib::Client client(config_.endpoint);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (key != nullptr) headers.emplace("Authorization", std::string("Bearer ") + key);
        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        if (!res) {
            error = "no response from " + config_.endpoint;
            continue;
        }
        if (res->status != 200) {
            error = "HTTP " + std::to_string(res->status);
            continue;
        }
        try {
            json reply = json::parse(res->body);
            std::string content = reply.at("choices").at(0).at("message").at("content");
            std::lock_guard lock(mutex_);
            --in_flight_;
            return content;
        } catch (const json::exception& e) {
            error = std::string("malformed completion body: ") + e.what();
        }
    }
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    throw Error(ErrorCode::BackendUnavailable, error);
}

CachingBackend::CachingBackend(std::shared_ptr<CompletionBackend> inner, std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(cache_dir_);
}

std::string CachingBackend::complete(const std::string& prompt, double temperature) {
    std::string key = completion_key(prompt, inner_->identity(), temperature);
    std::filesystem::path file = std::filesystem::path(cache_dir_) / (key + ".json");
    {
        std::lock_guard lock(mutex_);
        std::ifstream in(file);
        if (in) {
            json j;
            in >> j;
            ++hits_;
            return j.at("reply").get<std::string>();
        }
    }
    std::string reply = inner_->complete(prompt, temperature);
    {
        std::lock_guard lock(mutex_);
        ++misses_;
        json j = {{"prompt", prompt},
                  {"model", inner_->identity()},
                  {"temperature", temperature},
                  {"reply", reply}};
        std::ofstream out(file);
        out << j.dump(2) << '\n';
    }
    return reply;
}

}  // namespace grammar
