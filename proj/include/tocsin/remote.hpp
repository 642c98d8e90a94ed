#pragma once

// HTTP client for the remote scoring protocol, plus a small server that
// exposes any in-process Backend over the same protocol (used to check the
// remote client against the toy backend).

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>

#include "tocsin/protocol.hpp"
#include "tocsin/scoring.hpp"

namespace tocsin {

class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(std::string endpoint,
                         std::chrono::seconds timeout = std::chrono::seconds(300))
      : endpoint_{std::move(endpoint)}, timeout_{timeout} {
    if (endpoint_.empty()) throw ConfigError("remote backend requires an endpoint");
    while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  }

  [[nodiscard]] const std::string& endpoint() const noexcept { return endpoint_; }

  [[nodiscard]] std::string causal_model_id() const override { return models().first; }
  [[nodiscard]] std::string seq2seq_model_id() const override { return models().second; }

  [[nodiscard]] ScoredSequence causal_score(std::string_view text, Wants wants) const override {
    return score({protocol::Mode::causal, std::nullopt, std::string(text), wants});
  }

  [[nodiscard]] ScoredSequence conditional_score(std::string_view source,
                                                 std::string_view target) const override {
    return score({protocol::Mode::seq2seq, std::string(source), std::string(target), {}});
  }

  [[nodiscard]] ScoredSequence template_score(std::string_view source,
                                              std::string_view target) const override {
    return score({protocol::Mode::causal_template, std::string(source), std::string(target), {}});
  }

  [[nodiscard]] FastDetectStats fastdetect_stats(std::string_view text, std::uint64_t n_samples,
                                                 std::uint64_t seed) const override {
    const auto body =
        post("/v1/fastdetect", protocol::encode(protocol::FastDetectRequest{std::string(text), n_samples, seed}));
    return protocol::decode_stats(body, n_samples, seed);
  }

 private:
  [[nodiscard]] ScoredSequence score(const protocol::ScoreRequest& req) const {
    return protocol::decode_scored(post("/v1/score", protocol::encode(req)));
  }

  // A fresh client per request keeps concurrent calls independent.
  [[nodiscard]] httplib::Client client() const {
    httplib::Client cli(endpoint_);
    cli.set_connection_timeout(std::chrono::seconds(10));
    cli.set_read_timeout(timeout_);
    cli.set_write_timeout(timeout_);
    return cli;
  }

  [[nodiscard]] protocol::json post(const std::string& path, const protocol::json& payload) const {
    auto cli = client();
    const auto res = cli.Post(path, payload.dump(), "application/json");
    return check(res, path);
  }

  [[nodiscard]] protocol::json get(const std::string& path) const {
    auto cli = client();
    const auto res = cli.Get(path);
    return check(res, path);
  }

  [[nodiscard]] protocol::json check(const httplib::Result& res, const std::string& path) const {
    if (!res) {
      throw BackendUnavailable("cannot reach " + endpoint_ + path + ": " + httplib::to_string(res.error()));
    }
    const auto message = [&] {
      try {
        const auto j = protocol::json::parse(res->body);
        if (j.is_object() && j.contains("error")) return j["error"].dump();
      } catch (const protocol::json::exception&) {
      }
      return res->body;
    };
    switch (res->status) {
      case 200:
        break;
      case 413:
        throw ContextOverflow(endpoint_ + path + ": " + message());
      case 503:
        throw BackendUnavailable(endpoint_ + path + ": model not loaded: " + message());
      default:
        throw BackendError(endpoint_ + path + ": HTTP " + std::to_string(res->status) + ": " + message());
    }
    try {
      return protocol::json::parse(res->body);
    } catch (const protocol::json::exception& e) {
      throw BackendError(endpoint_ + path + ": malformed response body: " + e.what());
    }
  }

  [[nodiscard]] std::pair<std::string, std::string> models() const {
    std::call_once(models_once_->flag, [&] {
      const auto j = get("/v1/models");
      const auto first = [&](const char* key) -> std::string {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_array() || it->empty() || !(*it)[0].is_string()) return {};
        return (*it)[0].get<std::string>();
      };
      models_once_->value = {first("causal"), first("seq2seq")};
    });
    return models_once_->value;
  }

  struct ModelsCache {
    std::once_flag flag;
    std::pair<std::string, std::string> value;
  };

  std::string endpoint_;
  std::chrono::seconds timeout_;
  std::unique_ptr<ModelsCache> models_once_ = std::make_unique<ModelsCache>();
};

/// Serves `backend` over the scoring protocol on a background thread.
class ProtocolServer {
 public:
  explicit ProtocolServer(const Backend& backend) : backend_{backend} {
    using httplib::Request;
    using httplib::Response;
    const auto reply = [](Response& res, const protocol::Response& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server_.Post("/v1/score", [this, reply](const Request& req, Response& res) {
      reply(res, protocol::handle_score(backend_, req.body));
    });
    server_.Post("/v1/fastdetect", [this, reply](const Request& req, Response& res) {
      reply(res, protocol::handle_fastdetect(backend_, req.body));
    });
    server_.Get("/v1/models", [this, reply](const Request&, Response& res) {
      reply(res, protocol::handle_models(backend_));
    });
    server_.Get("/v1/health", [reply](const Request&, Response& res) {
      reply(res, {200, protocol::json{{"status", "ok"}}});
    });
  }

  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  ~ProtocolServer() { stop(); }

  /// Binds (port 0 = any free port) and starts serving; returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw BackendUnavailable("cannot bind " + host + ":" + std::to_string(port));
    host_ = host;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Serves on the calling thread until stop() is called from elsewhere.
  void run(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw BackendUnavailable("cannot listen on " + host + ":" + std::to_string(port));
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  [[nodiscard]] std::string url() const { return "http://" + host_ + ":" + std::to_string(port_); }

 private:
  const Backend& backend_;
  httplib::Server server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
};

}  // namespace tocsin
