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

#include "tunelab/service/service.hpp"

#include <cstdlib>
#include <random>

#include <httplib.h>

#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/key.hpp"
#include "tunelab/abc/tokenizer.hpp"
#include "tunelab/abc/transpose.hpp"
#include "tunelab/common/rng.hpp"
#include "tunelab/sampler/sampler.hpp"
#include "tunelab/score/score.hpp"

namespace tunelab::service {
namespace {

// Seeds stay below 2^53 so JavaScript clients can echo them exactly.
constexpr std::uint64_t kMaxSeed = (std::uint64_t{1} << 53) - 1;

json error_body(int status, const std::string& message, std::optional<std::size_t> position) {
  json e = {{"status", status}, {"message", message}};
  if (position) e["position"] = *position;
  return {{"error", e}};
}

Response reply(int status, const json& body) { return Response{status, "application/json", body.dump()}; }

template <class T>
T field(const json& req, const char* name, T fallback) {
  auto it = req.find(name);
  if (it == req.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw RequestError(400, std::string("field '") + name + "' has the wrong type");
  }
}

std::int64_t int_field(const json& req, const char* name, std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
  auto it = req.find(name);
  if (it == req.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) throw RequestError(400, std::string("field '") + name + "' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < lo || v > hi) {
    throw RequestError(400, std::string("field '") + name + "' must lie in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  return v;
}

std::string rational_text(const Rational& r) { return std::to_string(r.num()) + "/" + std::to_string(r.den()); }

// Tokens of the first tune of `abc`, or of a `<s> ...` token line.
abc::TokenSeq tokens_of(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text.substr(first, 3) == abc::kStartToken) return abc::parse_tokens(text);
  return abc::tokenize_abc(text);
}

json structure_summary(const abc::TokenSeq& seq) {
  json out = {{"aabb8", false}, {"sections", json::array()}, {"measure_errors", 0}, {"errors", json::array()}};
  for (const auto& e : score::find_errors(seq)) {
    out["errors"].push_back({{"kind", std::string(score::to_string(e.kind))}, {"position", e.position}});
  }
  try {
    const auto s = score::detect_structure(seq);
    out["aabb8"] = s.aabb8;
    for (const auto& sec : s.sections) out["sections"].push_back({{"bars", sec.bar_count}, {"repeated", sec.repeated}});
    out["measure_errors"] = score::validate_measures(seq).error_count;
  } catch (const Error& e) {
    out["note"] = e.what();
  }
  return out;
}

json candidate_json(const abc::TokenSeq* seq, std::string abc_text, std::string continuation, std::size_t length,
                    bool valid, sampler::StopReason stop) {
  json c = {{"abc", std::move(abc_text)},
            {"continuation", std::move(continuation)},
            {"token_count", length},
            {"grammar_valid", valid},
            {"stop_reason", std::string(sampler::to_string(stop))}};
  c["structure"] = seq && valid ? structure_summary(*seq)
                                : json{{"aabb8", false}, {"sections", json::array()}, {"measure_errors", 0},
                                       {"errors", json::array()}};
  return c;
}

json tune_report(const abc::AbcTune& tune) {
  const abc::KeySpec key = abc::parse_key(tune.key);
  const abc::TokenSeq seq = abc::tokenize_body(tune.body, tune.meter, key, abc::parse_unit(tune.unit));
  json r = {{"title", tune.title}, {"meter", tune.meter}, {"key", tune.key}, {"tokens", seq.size()}};
  const auto grammar = abc::validate_grammar(seq);
  r["grammar"] = {{"valid", grammar.valid()}, {"violations", json::array()}};
  for (const auto& v : grammar.violations) {
    r["grammar"]["violations"].push_back(
        {{"kind", std::string(abc::to_string(v.kind))}, {"position", v.position}, {"message", v.message}});
  }
  const auto measures = score::validate_measures(seq);
  r["measures"] = {{"error_count", measures.error_count}, {"bars", json::array()}};
  for (const auto& m : measures.measures) {
    r["measures"]["bars"].push_back({{"bar", m.bar},
                                     {"position", m.position},
                                     {"nominal", rational_text(m.nominal)},
                                     {"actual", rational_text(m.actual)},
                                     {"class", std::string(score::to_string(m.classification))}});
  }
  r["structure"] = structure_summary(seq);
  return r;
}

}  // namespace

ServiceConfig service_config(const KeyValueConfig& config) {
  const auto unknown = config.unknown_keys({"host", "port"}, "model.");
  if (!unknown.empty()) throw Error("unknown service setting '" + unknown.front() + "'");
  ServiceConfig out;
  out.host = config.get_or("host", out.host);
  out.port = config.get_int("port", out.port);
  if (const char* env = std::getenv("TUNELAB_PORT"); env && *env) {
    KeyValueConfig from_env;
    from_env.set("TUNELAB_PORT", env);
    out.port = from_env.get_int("TUNELAB_PORT", out.port);
  }
  if (out.port < 0 || out.port > 65535) throw Error("port out of range");
  out.models = config.with_prefix("model.");
  return out;
}

void Service::add_model(const std::string& id, const lm::Checkpoint& checkpoint) {
  auto m = std::make_shared<Model>();
  m->id = id;
  m->config = checkpoint.config;
  m->vocab = checkpoint.vocab;
  m->epoch = checkpoint.epoch;
  m->net = std::make_shared<const lm::Lstm<float>>(checkpoint.make_model());
  std::unique_lock lock(mutex_);
  models_[id] = std::move(m);
}

void Service::load(const ServiceConfig& config) {
  for (const auto& [id, path] : config.models) add_model(id, lm::load_checkpoint(path));
  ready_ = true;
}

std::shared_ptr<const Service::Model> Service::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) throw RequestError(404, "unknown model '" + id + "'");
  return it->second;
}

json Service::models() const {
  json list = json::array();
  std::shared_lock lock(mutex_);
  for (const auto& [id, m] : models_) {
    list.push_back({{"id", id},
                    {"mode", std::string(lm::to_string(m->config.mode))},
                    {"vocab_size", m->config.vocab_size},
                    {"layers", m->config.layers},
                    {"hidden", m->config.hidden},
                    {"dropout", m->config.dropout},
                    {"parameters", lm::param_count(m->config)},
                    {"epoch", m->epoch},
                    {"vocabulary", m->vocab.symbols.elements()}});
  }
  return {{"models", list}};
}

json Service::generate(const json& req) const {
  if (!req.is_object()) throw RequestError(400, "request body must be a JSON object");
  const auto id = field<std::string>(req, "model_id", "");
  if (id.empty()) throw RequestError(400, "field 'model_id' is required");
  const auto model = find(id);
  const bool token_mode = model->config.mode == lm::Mode::Token;

  sampler::GenerationConfig cfg;
  cfg.temperature = field<double>(req, "temperature", 1.0);
  if (!(cfg.temperature > 0) || cfg.temperature > 100) throw RequestError(400, "field 'temperature' must lie in (0, 100]");
  const auto count = int_field(req, "count", 1, 1, kMaxCandidates);
  cfg.max_steps = static_cast<int>(int_field(req, "max_steps", token_mode ? 500 : 1000, 1, kMaxSteps));
  cfg.stop_at_delimiter = field<bool>(req, "stop_at_delimiter", false);
  std::uint64_t seed = 0;
  if (req.contains("rng_seed") && !req["rng_seed"].is_null()) {
    seed = static_cast<std::uint64_t>(int_field(req, "rng_seed", 0, 0, static_cast<std::int64_t>(kMaxSeed)));
  } else {
    std::random_device rd;
    seed = ((static_cast<std::uint64_t>(rd()) << 32) | rd()) & kMaxSeed;
  }

  const auto seed_text = field<std::string>(req, "seed_abc", "");
  if (token_mode) {
    if (seed_text.find_first_not_of(" \t\r\n") != std::string::npos) {
      abc::TokenSeq seq;
      try {
        seq = tokens_of(seed_text);
        const auto tunes = abc::parse_abc(seed_text);
        if (!tunes.empty() && seq.size() > 2 && seq[0].text == abc::kStartToken) {
          const auto key = abc::parse_key(tunes.front().key);
          if (abc::shift_to_c(key) != 0 || abc::letter_shift_to_c(key) != 0) seq = abc::transpose(seq, key);
        }
      } catch (const ParseError& e) {
        throw RequestError(400, std::string("seed does not tokenize: ") + e.what(), e.position());
      } catch (const Error& e) {
        throw RequestError(400, std::string("seed does not tokenize: ") + e.what());
      }
      if (!seq.empty() && seq.back().text == abc::kEndToken) seq.pop_back();
      for (const auto& t : seq) cfg.seed.push_back(t.text);
    }
  } else {
    cfg.seed = sampler::split_seed(lm::Mode::Char, seed_text);
  }
  for (std::size_t i = 0; i < cfg.seed.size(); ++i) {
    if (!model->vocab.symbols.find(cfg.seed[i])) {
      throw RequestError(400, "seed symbol '" + cfg.seed[i] + "' is not in the vocabulary of model '" + id + "'", i);
    }
  }

  json candidates = json::array();
  const CounterRng root(seed);
  for (std::int64_t i = 0; i < count; ++i) {
    sampler::GenerationConfig c = cfg;
    c.rng_seed = root.fork(static_cast<std::uint64_t>(i)).key();
    const auto gen = sampler::generate(*model->net, model->vocab, c);
    if (token_mode) {
      const auto texts = sampler::full_transcription(c, gen);
      abc::TokenSeq seq;
      bool valid = true;
      try {
        for (const auto& t : texts) seq.push_back(abc::make_token(t));
        valid = abc::validate_grammar(seq).valid();
      } catch (const Error&) {
        valid = false;
      }
      std::string abc_text;
      if (valid) {
        abc_text = abc::detokenize(seq);
      } else {
        for (const auto& t : texts) abc_text += (abc_text.empty() ? "" : " ") + t;
      }
      std::string continuation;
      for (const auto& t : gen.output) continuation += (continuation.empty() ? "" : " ") + t;
      candidates.push_back(candidate_json(&seq, abc_text, continuation, gen.output.size(), valid, gen.stop));
    } else {
      std::string continuation;
      for (const auto& ch : gen.output) continuation += ch;
      const std::string text = seed_text + continuation;
      abc::TokenSeq seq;
      bool valid = false;
      try {
        seq = abc::tokenize_abc(text);
        valid = abc::validate_grammar(seq).valid();
      } catch (const Error&) {
      }
      candidates.push_back(candidate_json(&seq, text, continuation, gen.output.size(), valid, gen.stop));
    }
  }
  return {{"model_id", id}, {"rng_seed", seed}, {"candidates", candidates}};
}

json Service::analyze(const json& req) const {
  if (!req.is_object()) throw RequestError(400, "request body must be a JSON object");
  const auto text = field<std::string>(req, "abc", "");
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw RequestError(400, "field 'abc' is required");
  json tunes = json::array();
  try {
    for (const auto& tune : abc::parse_abc(text)) tunes.push_back(tune_report(tune));
  } catch (const ParseError& e) {
    throw RequestError(400, e.what(), e.position());
  } catch (const Error& e) {
    throw RequestError(400, e.what());
  }
  if (tunes.empty()) throw RequestError(400, "no tune found (expected a K: header)");
  return {{"tunes", tunes}};
}

json Service::export_piece(const json& req) const {
  if (!req.is_object()) throw RequestError(400, "request body must be a JSON object");
  const auto text = field<std::string>(req, "abc", "");
  const int tempo = static_cast<int>(int_field(req, "tempo", score::kDefaultTempo, 20, 400));
  const int program = static_cast<int>(int_field(req, "program", 0, 0, 127));
  abc::TokenSeq seq;
  try {
    seq = tokens_of(text);
  } catch (const ParseError& e) {
    throw RequestError(400, e.what(), e.position());
  } catch (const Error& e) {
    throw RequestError(400, e.what());
  }
  const auto grammar = abc::validate_grammar(seq);
  if (!grammar.valid()) {
    const auto& v = grammar.violations.front();
    throw RequestError(400, "piece is not a valid transcription: " + v.message, v.position);
  }
  std::vector<std::uint8_t> midi;
  try {
    midi = score::midi_bytes(score::to_note_events(score::expand_repeats(seq)), tempo, program);
  } catch (const Error& e) {
    throw RequestError(400, std::string("cannot render MIDI: ") + e.what());
  }
  const std::string raw(midi.begin(), midi.end());
  return {{"abc", abc::detokenize(seq)},
          {"tokens", abc::format_tokens(seq)},
          {"midi_base64", httplib::detail::base64_encode(raw)},
          {"midi_bytes", midi.size()}};
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
  struct Route {
    std::string_view method, path;
    json (Service::*post)(const json&) const;
  };
  static const Route kRoutes[] = {{"POST", "/api/generate", &Service::generate},
                                  {"POST", "/api/analyze", &Service::analyze},
                                  {"POST", "/api/export", &Service::export_piece},
                                  {"GET", "/api/models", nullptr}};
  const Route* route = nullptr;
  bool path_known = false;
  for (const auto& r : kRoutes) {
    if (r.path != path) continue;
    path_known = true;
    if (r.method == method) route = &r;
  }
  if (!path_known) return reply(404, error_body(404, "no endpoint " + std::string(path), std::nullopt));
  if (!route) return reply(405, error_body(405, "method not allowed on " + std::string(path), std::nullopt));
  if (!ready_) return reply(503, error_body(503, "models are still loading", std::nullopt));
  try {
    if (!route->post) return reply(200, models());
    json req;
    try {
      req = json::parse(body);
    } catch (const json::parse_error& e) {
      return reply(400, error_body(400, std::string("malformed JSON: ") + e.what(), e.byte));
    }
    return reply(200, (this->*route->post)(req));
  } catch (const RequestError& e) {
    return reply(e.status(), error_body(e.status(), e.what(), e.position()));
  } catch (const std::exception& e) {
    return reply(500, error_body(500, e.what(), std::nullopt));
  }
}

struct Server::Impl {
  Service& service;
  httplib::Server http;
  explicit Impl(Service& s) : service(s) {}
};

Server::Server(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = impl_->service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, r.content_type);
  };
  impl_->http.Get(R"(/api/.*)", forward);
  impl_->http.Post(R"(/api/.*)", forward);
  impl_->http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

Server::~Server() { stop(); }

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }
int Server::bind_any(const std::string& host) { return impl_->http.bind_to_any_port(host); }
bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }
void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}
bool Server::running() const { return impl_->http.is_running(); }

}  // namespace tunelab::service
