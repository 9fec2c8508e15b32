#include "codevo/model_provider.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace codevo {

std::string pick_tier(const TierWeights& weights, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < weights.fast ? "fast" : "strong";
}

struct ModelProvider::Backend {
    virtual ~Backend() = default;
    virtual GenerationResult generate(const GenerationRequest& req) = 0;
    virtual bool deterministic() const = 0;
    virtual std::size_t remaining() const { return 0; }
};

namespace {

struct StubRecord {
    std::string predicate;  // "*" or a required substring of the prompt
    std::string response;
    bool consumed = false;
};

class StubBackend : public ModelProvider::Backend {
  public:
    explicit StubBackend(std::vector<StubRecord> records) : records_(std::move(records)) {}

    GenerationResult generate(const GenerationRequest& req) override {
        GenerationResult res;
        res.tier_used = req.tier;
        std::lock_guard<std::mutex> lock(mu_);
        for (auto& rec : records_) {
            if (rec.consumed) continue;
            if (rec.predicate != "*" && req.prompt.find(rec.predicate) == std::string::npos) continue;
            rec.consumed = true;
            res.text = rec.response;
            if (req.max_output > 0 && res.text.size() > static_cast<std::size_t>(req.max_output))
                res.text.resize(static_cast<std::size_t>(req.max_output));
            return res;
        }
        res.failure = "StubExhausted";
        return res;
    }

    bool deterministic() const override { return true; }

    std::size_t remaining() const override {
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& rec : records_)
            if (!rec.consumed) ++n;
        return n;
    }

  private:
    mutable std::mutex mu_;
    std::vector<StubRecord> records_;
};

std::vector<StubRecord> parse_stub_script(const std::string& script) {
    static const std::string kHeader = "### match:";
    std::vector<StubRecord> records;
    for (const auto& line : split_keep_newlines(script)) {
        std::string t = trim(line);
        if (t.rfind(kHeader, 0) == 0) {
            StubRecord rec;
            rec.predicate = trim(t.substr(kHeader.size()));
            if (rec.predicate.empty()) throw Error("ConfigError", "stub record with empty match predicate");
            records.push_back(std::move(rec));
        } else if (!records.empty()) {
            records.back().response += line;
        }
        // Text before the first record header is ignored (script preamble).
    }
    if (records.empty()) throw Error("ConfigError", "stub script contains no records");
    return records;
}

// Bounds concurrently outstanding remote calls without C++20 semaphores so
// the class stays copy-friendly behind shared_ptr.
class Gate {
  public:
    explicit Gate(int slots) : slots_(slots) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return slots_ > 0; });
        --slots_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++slots_;
        }
        cv_.notify_one();
    }

  private:
    std::mutex mu_;
    std::condition_variable cv_;
    int slots_;
};

class HttpBackend : public ModelProvider::Backend {
  public:
    HttpBackend(std::string endpoint, std::string token, double deadline_s, int max_in_flight)
        : endpoint_(std::move(endpoint)), token_(std::move(token)), deadline_s_(deadline_s),
          gate_(max_in_flight) {
        split_endpoint();
    }

    GenerationResult generate(const GenerationRequest& req) override {
        GenerationResult res;
        res.tier_used = req.tier;
        nlohmann::json body = {{"prompt", req.prompt},
                               {"tier", req.tier},
                               {"temperature", req.temperature},
                               {"max_output", req.max_output},
                               {"request_id", req.request_id}};

        gate_.acquire();
        auto t0 = std::chrono::steady_clock::now();
        httplib::Client client(host_.c_str());
        auto secs = static_cast<time_t>(deadline_s_);
        auto usecs = static_cast<time_t>((deadline_s_ - static_cast<double>(secs)) * 1e6);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        auto reply = client.Post(path_.c_str(), headers, body.dump(), "application/json");
        res.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        gate_.release();

        if (!reply) {
            // httplib folds connect/read/write failures into a null result;
            // the deadline is the only configured cause we can hit here.
            res.failure = "Timeout";
            return res;
        }
        if (reply->status != 200) {
            res.failure = "HttpError";
            return res;
        }
        auto parsed = nlohmann::json::parse(reply->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("text") || !parsed["text"].is_string()) {
            res.failure = "BadResponse";
            return res;
        }
        res.text = parsed["text"].get<std::string>();
        if (req.max_output > 0 && res.text.size() > static_cast<std::size_t>(req.max_output))
            res.text.resize(static_cast<std::size_t>(req.max_output));
        return res;
    }

    bool deterministic() const override { return false; }

  private:
    void split_endpoint() {
        // host_ keeps the scheme (httplib parses it); path_ is the rest.
        auto scheme_end = endpoint_.find("://");
        std::size_t path_start =
            endpoint_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        if (path_start == std::string::npos) {
            host_ = endpoint_;
            path_ = "/";
        } else {
            host_ = endpoint_.substr(0, path_start);
            path_ = endpoint_.substr(path_start);
        }
        if (host_.empty()) throw Error("ConfigError", "model endpoint URL has no host: " + endpoint_);
    }

    std::string endpoint_, host_, path_, token_;
    double deadline_s_;
    Gate gate_;
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr ? std::string(v) : fallback;
}

}  // namespace

ModelProvider ModelProvider::stub(const std::string& script) {
    ModelProvider p;
    p.impl_ = std::make_shared<StubBackend>(parse_stub_script(script));
    return p;
}

ModelProvider ModelProvider::stub_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ConfigError", "cannot read stub script: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return stub(buf.str());
}

ModelProvider ModelProvider::remote(const std::string& endpoint, const std::string& token,
                                    double deadline_s, int max_in_flight) {
    std::string ep = endpoint.empty() ? env_or("EVOLVE_MODEL_ENDPOINT", "") : endpoint;
    std::string tok = token.empty() ? env_or("EVOLVE_MODEL_TOKEN", "") : token;
    if (ep.empty())
        throw Error("ConfigError", "no model endpoint (argument and EVOLVE_MODEL_ENDPOINT both empty)");
    if (max_in_flight < 1) throw Error("ConfigError", "max_in_flight must be >= 1");
    ModelProvider p;
    p.impl_ = std::make_shared<HttpBackend>(ep, tok, deadline_s, max_in_flight);
    return p;
}

GenerationResult ModelProvider::generate(const GenerationRequest& req) const {
    if (!impl_) throw Error("ConfigError", "no model backend configured");
    if (req.prompt.empty()) throw Error("ConfigError", "generation request with empty prompt");
    auto t0 = std::chrono::steady_clock::now();
    GenerationResult res = impl_->generate(req);
    if (res.latency_s == 0.0)
        res.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

bool ModelProvider::deterministic() const { return impl_ != nullptr && impl_->deterministic(); }

std::size_t ModelProvider::stub_remaining() const { return impl_ ? impl_->remaining() : 0; }

}  // namespace codevo
