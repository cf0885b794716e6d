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

#include "tunelab/lm/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace tunelab::lm {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'T', 'L', 'C', 'K'};

template <class U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <class U>
U get_le(const std::string& in, std::size_t& pos) {
  if (in.size() - pos < sizeof(U)) throw IoError("checkpoint truncated");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(U);
  return value;
}

void put_floats(std::string& out, const std::vector<float>& values) {
  out.reserve(out.size() + 4 * values.size());
  for (float v : values) put_le(out, std::bit_cast<std::uint32_t>(v));
}

std::vector<float> get_floats(const std::string& in, std::size_t& pos, std::size_t count) {
  if ((in.size() - pos) / 4 < count) throw IoError("checkpoint truncated in tensor data");
  std::vector<float> values(count);
  for (auto& v : values) v = std::bit_cast<float>(get_le<std::uint32_t>(in, pos));
  return values;
}

// JSON has no NaN; a missing validation loss is stored as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json to_json(const Schedule& s) {
  return {{"epochs", s.epochs},   {"learning_rate", s.learning_rate}, {"decay", s.decay},
          {"decay_after", s.decay_after}, {"batch", s.batch},         {"seq_len", s.seq_len},
          {"clip", s.clip},       {"validation_fraction", s.validation_fraction}};
}

Schedule schedule_from(const json& j) {
  Schedule s;
  s.epochs = j.at("epochs");
  s.learning_rate = j.at("learning_rate");
  s.decay = j.at("decay");
  s.decay_after = j.at("decay_after");
  s.batch = j.at("batch");
  s.seq_len = j.at("seq_len");
  s.clip = j.at("clip");
  s.validation_fraction = j.at("validation_fraction");
  return s;
}

}  // namespace

Lstm<float> Checkpoint::make_model() const {
  Lstm<float> model(config);
  if (params.size() != model.params().size()) throw IoError("checkpoint parameter count does not match its config");
  model.params() = params;
  return model;
}

std::string encode_checkpoint(const Checkpoint& c) {
  json header;
  header["config"] = {{"vocab_size", c.config.vocab_size}, {"layers", c.config.layers},
                      {"hidden", c.config.hidden},         {"dropout", c.config.dropout},
                      {"mode", std::string(to_string(c.config.mode))}};
  header["vocabulary"] = c.vocab.symbols.elements();
  header["null_index"] = c.vocab.null_index() ? json(*c.vocab.null_index()) : json(nullptr);
  json tensors = json::array();
  for (const auto& t : tensor_layout(c.config)) {
    tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"offset", t.offset}});
  }
  header["tensors"] = tensors;
  header["schedule"] = to_json(c.schedule);
  header["seed"] = c.seed;
  header["epoch"] = c.epoch;
  header["lr"] = c.lr;
  header["rng"] = {{"key", c.rng.key()}, {"counter", c.rng.counter()}};
  header["data_fingerprint"] = c.data_fingerprint;
  header["initial_validation"] = number(c.initial_validation);
  json history = json::array();
  for (const auto& h : c.history) {
    history.push_back({{"epoch", h.epoch}, {"lr", h.lr}, {"train", number(h.train_loss)},
                       {"val", number(h.validation_loss)}, {"wall", h.wall_seconds}});
  }
  header["history"] = history;
  header["optimizer"] = {{"name", "rmsprop"}, {"rho", RmsProp{}.rho}, {"epsilon", RmsProp{}.epsilon},
                         {"accumulators", c.mean_square.size()}};

  const std::string text = header.dump();
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  put_floats(out, c.params);
  put_floats(out, c.mean_square);
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 16 || bytes.compare(0, 4, kMagic, 4) != 0) throw IoError("not a tunelab checkpoint");
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto length = get_le<std::uint64_t>(bytes, pos);
  if (bytes.size() - pos < length) throw IoError("checkpoint truncated in header");
  Checkpoint c;
  try {
    const json header = json::parse(bytes.substr(pos, length));
    pos += length;
    const json& cfg = header.at("config");
    c.config.vocab_size = cfg.at("vocab_size");
    c.config.layers = cfg.at("layers");
    c.config.hidden = cfg.at("hidden");
    c.config.dropout = cfg.at("dropout");
    c.config.mode = parse_mode(cfg.at("mode").get<std::string>());
    c.config.validate();
    c.vocab.mode = c.config.mode;
    c.vocab.symbols = abc::Vocabulary(header.at("vocabulary").get<std::vector<std::string>>());
    if (c.vocab.size() != c.config.vocab_size) throw IoError("checkpoint vocabulary does not match its config");
    const auto layout = tensor_layout(c.config);
    const json& tensors = header.at("tensors");
    if (tensors.size() != layout.size()) throw IoError("checkpoint tensor table does not match its config");
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const json& t = tensors[i];
      if (t.at("name") != layout[i].name || t.at("rows") != layout[i].rows || t.at("cols") != layout[i].cols ||
          t.at("offset") != layout[i].offset) {
        throw IoError("checkpoint tensor '" + layout[i].name + "' has an unexpected shape");
      }
    }
    c.schedule = schedule_from(header.at("schedule"));
    c.seed = header.at("seed");
    c.epoch = header.at("epoch");
    c.lr = header.at("lr");
    c.rng = CounterRng(header.at("rng").at("key").get<std::uint64_t>(), header.at("rng").at("counter").get<std::uint64_t>());
    c.data_fingerprint = header.at("data_fingerprint");
    c.initial_validation = number(header.at("initial_validation"));
    for (const json& h : header.at("history")) {
      c.history.push_back(EpochLog{h.at("epoch"), h.at("lr"), number(h.at("train")), number(h.at("val")),
                                   h.at("wall")});
    }
    const std::size_t count = static_cast<std::size_t>(param_count(c.config));
    const std::size_t accumulators = header.at("optimizer").at("accumulators");
    if (accumulators != 0 && accumulators != count) throw IoError("checkpoint optimizer state has the wrong size");
    c.params = get_floats(bytes, pos, count);
    c.mean_square = get_floats(bytes, pos, accumulators);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw IoError(std::string("invalid checkpoint: ") + e.what());
  }
  if (pos != bytes.size()) throw IoError("trailing bytes after checkpoint data");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = encode_checkpoint(ckpt);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace tunelab::lm
