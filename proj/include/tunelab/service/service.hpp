/* Copyright 2026 The Tunelab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tunelab/common/config.hpp"
#include "tunelab/lm/checkpoint.hpp"
#include "tunelab/lm/model.hpp"

namespace tunelab::service {

using nlohmann::json;

inline constexpr int kDefaultPort = 8080;
inline constexpr int kMaxCandidates = 32;
inline constexpr int kMaxSteps = 5000;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;
  std::vector<std::pair<std::string, std::string>> models;  // id, checkpoint path
};

// Keys: host, port, model.<id> = <checkpoint path>. TUNELAB_PORT, when set,
// overrides the port.
ServiceConfig service_config(const KeyValueConfig& config);

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Request handling independent of the transport. Models are immutable once
// added; handle() is safe to call from many threads.
class Service {
 public:
  Service() = default;

  void add_model(const std::string& id, const lm::Checkpoint& checkpoint);
  // Loads every model of `config`, then marks the service ready.
  void load(const ServiceConfig& config);
  void set_ready(bool ready) { ready_ = ready; }
  bool ready() const { return ready_; }

  // Routes GET /api/models, POST /api/generate, /api/analyze and /api/export.
  Response handle(std::string_view method, std::string_view path, std::string_view body) const;

  json models() const;
  json generate(const json& request) const;
  json analyze(const json& request) const;
  json export_piece(const json& request) const;

 private:
  struct Model {
    std::string id;
    lm::ModelConfig config;
    lm::ModelVocab vocab;
    int epoch = 0;
    std::shared_ptr<const lm::Lstm<float>> net;
  };
  std::shared_ptr<const Model> find(const std::string& id) const;

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Model>> models_;
  std::atomic<bool> ready_{false};
};

// Error carried to the client as {"error": {"status", "message", "position"?}}.
class RequestError : public Error {
 public:
  RequestError(int status, const std::string& message, std::optional<std::size_t> position = std::nullopt)
      : Error(message), status_(status), position_(position) {}
  int status() const { return status_; }
  std::optional<std::size_t> position() const { return position_; }

 private:
  int status_;
  std::optional<std::size_t> position_;
};

// Blocks serving HTTP on host:port until stop() is called from another thread.
class Server {
 public:
  explicit Server(Service& service);
  ~Server();
  // Binds and serves; returns false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds to a free port and returns it; serve with listen_after_bind().
  int bind_any(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tunelab::service
