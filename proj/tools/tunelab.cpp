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

// tunelab command-line front end: corpus preparation, training, sampling,
// analysis, MIDI export and the HTTP service.

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tunelab/abc/grammar.hpp"
#include "tunelab/abc/tokenizer.hpp"
#include "tunelab/corpus/corpus.hpp"
#include "tunelab/corpus/synth.hpp"
#include "tunelab/lm/train.hpp"
#include "tunelab/sampler/sampler.hpp"
#include "tunelab/score/score.hpp"
#include "tunelab/service/service.hpp"
#include "tunelab/stats/stats.hpp"

namespace fs = std::filesystem;
using namespace tunelab;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::string slurp(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Writes through a temporary file so a failure never leaves partial output.
void write_file(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out.flush()) throw IoError("short write to " + path);
  }
  fs::rename(tmp, target);
}

std::vector<corpus::RawEntry> read_dump(const std::string& path, corpus::Tally* rejected = nullptr) {
  auto in = open_in(path);
  auto parsed = corpus::parse_dump(in);
  if (rejected) *rejected = parsed.rejected;
  return parsed.entries;
}

stats::Corpus read_corpus(const std::string& path) {
  auto in = open_in(path);
  return corpus::read_token_corpus(in);
}

void merge(corpus::Tally& into, const corpus::Tally& from) {
  for (const auto& [k, n] : from) into[k] += n;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t count = 200;
  std::uint64_t seed = 1;
  double aabb_fraction = 0.5;
  double pickup_rate = 0.3;
};

int run_synth(const SynthArgs& a) {
  corpus::SynthOptions opts;
  opts.aabb_fraction = a.aabb_fraction;
  opts.pickup_rate = a.pickup_rate;
  std::string csv;
  std::size_t aabb = 0;
  for (const auto& t : corpus::synth_corpus(a.seed, a.count, opts)) {
    csv += corpus::format_dump_record(t.entry);
    aabb += t.aabb8;
  }
  write_file(a.out, csv);
  std::cout << "wrote " << a.count << " synthetic settings (" << aabb << " AABB-8) to " << a.out << '\n';
  return 0;
}

struct IngestArgs {
  std::string in, out, report;
};

int run_ingest(const IngestArgs& a) {
  corpus::Tally rejected;
  const auto entries = read_dump(a.in, &rejected);
  std::ostringstream report;
  corpus::write_tally(report, rejected, entries.size());
  if (!a.out.empty()) {
    std::string csv;
    for (const auto& e : entries) csv += corpus::format_dump_record(e);
    write_file(a.out, csv);
  }
  if (!a.report.empty()) write_file(a.report, report.str());
  std::cout << report.str();
  return 0;
}

struct PreprocessArgs {
  std::string mode = "token";
  std::string in, out, report;
  bool explicit_repeats = false;
  std::size_t min_measures = 7;
};

int run_preprocess(const PreprocessArgs& a) {
  corpus::Tally rejected;
  const auto entries = read_dump(a.in, &rejected);
  std::size_t retained = 0;
  std::string text;
  if (lm::parse_mode(a.mode) == lm::Mode::Char) {
    auto built = corpus::build_char_corpus(entries);
    merge(rejected, built.rejected);
    retained = built.entry_count;
    text = std::move(built.text);
  } else {
    auto filtered = corpus::filter_for_tokens(entries, a.min_measures);
    merge(rejected, filtered.rejected);
    auto built = corpus::build_token_corpus(filtered.entries, a.explicit_repeats);
    merge(rejected, built.rejected);
    retained = built.transcriptions.size();
    std::ostringstream out;
    corpus::write_token_corpus(out, built.transcriptions);
    text = out.str();
  }
  std::ostringstream report;
  corpus::write_tally(report, rejected, retained);
  write_file(a.out, text);
  write_file(a.report.empty() ? a.out + ".rejections.txt" : a.report, report.str());
  std::cout << report.str() << "wrote " << retained << " transcriptions to " << a.out << '\n';
  return 0;
}

struct TrainArgs {
  std::string mode = "token";
  std::string corpus, config, out = "checkpoints", resume;
  int epochs = 0;
  std::optional<std::uint64_t> seed;
};

int run_train(const TrainArgs& a) {
  const lm::Mode mode = lm::parse_mode(a.mode);
  const KeyValueConfig cfg = a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config);
  if (auto m = cfg.get("mode"); m && lm::parse_mode(*m) != mode) throw Error("config mode differs from --mode");
  auto settings = lm::train_settings(mode, cfg);
  if (a.epochs > 0) settings.schedule.epochs = a.epochs;
  if (a.seed) settings.seed = *a.seed;

  lm::TrainingData data;
  if (mode == lm::Mode::Char) {
    data = lm::char_training_data(slurp(a.corpus));
  } else {
    auto in = open_in(a.corpus);
    data = lm::token_training_data(corpus::read_token_lines(in));
  }
  fs::create_directories(a.out);
  std::ofstream log_file(fs::path(a.out) / "train.log", std::ios::app);
  struct Tee : std::streambuf {
    std::streambuf *a, *b;
    int overflow(int c) override {
      if (c == EOF) return !EOF;
      a->sputc(static_cast<char>(c));
      b->sputc(static_cast<char>(c));
      return c;
    }
    int sync() override { return a->pubsync() | b->pubsync(); }
  } tee;
  tee.a = std::cout.rdbuf();
  tee.b = log_file.rdbuf();
  std::ostream log(&tee);

  lm::TrainOptions opts;
  opts.seed = settings.seed;
  opts.checkpoint_dir = a.out;
  opts.log = &log;
  if (!a.resume.empty()) {
    opts.resume = lm::load_checkpoint(a.resume);
    if (a.epochs > 0) opts.resume->schedule.epochs = a.epochs;
  }
  log << "corpus " << data.sequences.size() << " sequences, vocabulary " << data.vocab.size() << ", mode "
      << lm::to_string(mode) << '\n';
  const auto result = lm::train(data, settings.architecture, settings.schedule, opts);
  if (result.aborted) {
    std::cerr << "training aborted: " << result.error << " (last good checkpoint kept in " << a.out << ")\n";
    return 1;
  }
  log << "finished at epoch " << result.last.epoch << "; latest checkpoint " << (fs::path(a.out) / "latest.ckpt").string()
      << '\n';
  return 0;
}

struct SampleArgs {
  std::string checkpoint, seed_text, out = "samples.txt", report;
  std::size_t count = 1;
  double temperature = 1.0;
  int max_steps = 0;
  std::uint64_t rng_seed = 1;
  unsigned threads = 0;
  bool random_state = false;
  bool stop_at_delimiter = false;
};

int run_sample(const SampleArgs& a) {
  const auto ck = lm::load_checkpoint(a.checkpoint);
  const auto model = ck.make_model();
  sampler::GenerationConfig cfg;
  cfg.seed = sampler::split_seed(ck.config.mode, a.seed_text);
  cfg.temperature = a.temperature;
  cfg.max_steps = a.max_steps > 0 ? a.max_steps : (ck.config.mode == lm::Mode::Token ? 500 : 1000);
  cfg.rng_seed = a.rng_seed;
  cfg.random_state = a.random_state;
  cfg.stop_at_delimiter = a.stop_at_delimiter;
  const std::string report_path = a.report.empty() ? a.out + ".meta.tsv" : a.report;

  if (ck.config.mode == lm::Mode::Token) {
    const auto tunes = sampler::generate_corpus(model, ck.vocab, a.count, cfg, a.threads);
    std::ostringstream text, meta;
    for (const auto& t : tunes) {
      for (std::size_t i = 0; i < t.tokens.size(); ++i) text << (i ? " " : "") << t.tokens[i];
      text << '\n';
    }
    sampler::write_generation_report(meta, tunes);
    write_file(a.out, text.str());
    write_file(report_path, meta.str());
    std::size_t valid = 0;
    for (const auto& t : tunes) valid += t.valid;
    std::cout << "wrote " << tunes.size() << " transcriptions to " << a.out << " (" << valid << " grammar-valid)\n";
  } else {
    std::ostringstream text, meta;
    meta << "index\tstop\tlength\n";
    const CounterRng root(a.rng_seed);
    for (std::size_t i = 0; i < a.count; ++i) {
      auto c = cfg;
      c.rng_seed = root.fork(i).key();
      const auto gen = sampler::generate(model, ck.vocab, c);
      text << a.seed_text;
      for (const auto& ch : gen.output) text << ch;
      text << "\n\n";
      meta << i << '\t' << sampler::to_string(gen.stop) << '\t' << gen.output.size() << '\n';
    }
    write_file(a.out, text.str());
    write_file(report_path, meta.str());
    std::cout << "wrote " << a.count << " character samples to " << a.out << '\n';
  }
  return 0;
}

struct AnalyzeArgs {
  std::string in, compare, csv;
  int bin_width = 10;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto sa = stats::compute_stats(read_corpus(a.in), a.bin_width);
  stats::write_text_report(std::cout, sa);
  std::ostringstream csv;
  if (!a.compare.empty()) {
    const auto sb = stats::compute_stats(read_corpus(a.compare), a.bin_width);
    std::cout << "\ncompared with " << a.compare << '\n';
    stats::write_comparison_text(std::cout, sa, sb);
    stats::write_comparison_csv(csv, sa, sb);
  } else {
    stats::write_csv_report(csv, sa);
  }
  if (!a.csv.empty()) write_file(a.csv, csv.str());
  return 0;
}

struct ValidateArgs {
  std::string in;
  bool tokens = false;
  bool strict = false;
};

int run_validate(const ValidateArgs& a) {
  std::vector<std::pair<std::string, abc::TokenSeq>> items;
  if (a.tokens) {
    std::size_t n = 0;
    for (auto& seq : read_corpus(a.in)) items.emplace_back("line " + std::to_string(++n), std::move(seq));
  } else {
    for (const auto& tune : abc::parse_abc(slurp(a.in))) {
      items.emplace_back(tune.title.empty() ? "(untitled)" : tune.title,
                         abc::tokenize_body(tune.body, tune.meter, abc::parse_key(tune.key), abc::parse_unit(tune.unit)));
    }
  }
  std::size_t problems = 0;
  for (const auto& [name, seq] : items) {
    const auto grammar = abc::validate_grammar(seq);
    const auto errors = score::find_errors(seq);
    std::size_t measure_errors = 0;
    std::string structure = "n/a";
    try {
      measure_errors = score::validate_measures(seq).error_count;
      structure = score::detect_structure(seq).aabb8 ? "AABB-8" : "other";
    } catch (const Error& e) {
      structure = std::string("unreadable (") + e.what() + ")";
    }
    std::cout << name << ": grammar " << (grammar.valid() ? "ok" : "INVALID") << ", measure errors " << measure_errors
              << ", structure " << structure << '\n';
    for (const auto& v : grammar.violations) std::cout << "  grammar " << abc::to_string(v.kind) << " at " << v.position << ": " << v.message << '\n';
    for (const auto& e : errors) std::cout << "  " << score::to_string(e.kind) << " at token " << e.position << '\n';
    problems += !grammar.valid() || measure_errors > 0 || !errors.empty();
  }
  std::cout << items.size() << " checked, " << problems << " with findings\n";
  return a.strict && problems > 0 ? 1 : 0;
}

struct ExportArgs {
  std::string in, out;
  int tempo = score::kDefaultTempo;
  int program = 0;
};

int run_export(const ExportArgs& a) {
  const std::string text = slurp(a.in);
  const auto first = text.find_first_not_of(" \t\r\n");
  const auto seq = first != std::string::npos && text.compare(first, 3, "<s>") == 0 ? abc::parse_tokens(text)
                                                                                      : abc::tokenize_abc(text);
  const auto bytes = score::midi_bytes(score::to_note_events(score::expand_repeats(seq)), a.tempo, a.program);
  write_file(a.out, std::string(bytes.begin(), bytes.end()));
  std::cout << "wrote " << bytes.size() << " bytes to " << a.out << '\n';
  return 0;
}

struct ServeArgs {
  std::string config;
  int port = -1;
};

service::Server* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  auto cfg = service::service_config(a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config));
  if (a.port >= 0) cfg.port = a.port;
  service::Service svc;
  service::Server server(svc);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  std::thread loader([&] {
    try {
      svc.load(cfg);
      std::cout << "loaded " << cfg.models.size() << " model(s); ready" << std::endl;
    } catch (const std::exception& e) {
      std::cerr << "model loading failed: " << e.what() << std::endl;
      server.stop();
    }
  });
  std::cout << "listening on " << cfg.host << ':' << cfg.port << std::endl;
  const bool ok = server.listen(cfg.host, cfg.port);
  loader.join();
  g_server = nullptr;
  if (!ok && !svc.ready()) {
    std::cerr << "could not serve on " << cfg.host << ':' << cfg.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tunelab: folk-tune transcription modelling"};
  app.require_subcommand(1);
  std::function<int()> action;

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write a synthetic dump with known AABB labels");
  s->add_option("--out", synth.out, "Output CSV")->required();
  s->add_option("--count", synth.count, "Number of settings");
  s->add_option("--seed", synth.seed, "RNG seed");
  s->add_option("--aabb-fraction", synth.aabb_fraction, "Share of AABB-8 tunes")->check(CLI::Range(0.0, 1.0));
  s->add_option("--pickup-rate", synth.pickup_rate, "Share of tunes with a pickup")->check(CLI::Range(0.0, 1.0));
  s->callback([&] { action = [&] { return run_synth(synth); }; });

  IngestArgs ingest;
  auto* i = app.add_subcommand("ingest", "Parse a dump, tally rejected records");
  i->add_option("--in", ingest.in, "Dump CSV")->required();
  i->add_option("--out", ingest.out, "Clean CSV of the accepted records");
  i->add_option("--report", ingest.report, "Rejection report file");
  i->callback([&] { action = [&] { return run_ingest(ingest); }; });

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Build a char or token training corpus from a dump");
  p->add_option("--mode", pre.mode, "char or token")->check(CLI::IsMember({"char", "token"}));
  p->add_option("--in", pre.in, "Dump CSV")->required();
  p->add_option("--out", pre.out, "Corpus file")->required();
  p->add_option("--report", pre.report, "Rejection report (default <out>.rejections.txt)");
  p->add_flag("--explicit-repeats", pre.explicit_repeats, "Write repeats out");
  p->add_option("--min-measures", pre.min_measures, "Minimum measure count (token mode)");
  p->callback([&] { action = [&] { return run_preprocess(pre); }; });

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model; writes a checkpoint per epoch");
  t->add_option("--mode", tr.mode, "char or token")->check(CLI::IsMember({"char", "token"}));
  t->add_option("--corpus", tr.corpus, "Corpus file")->required();
  t->add_option("--config", tr.config, "key=value settings file");
  t->add_option("--out", tr.out, "Checkpoint directory");
  t->add_option("--resume", tr.resume, "Checkpoint to continue from");
  t->add_option("--epochs", tr.epochs, "Override the epoch count");
  t->add_option("--seed", tr.seed, "Override the seed");
  t->callback([&] { action = [&] { return run_train(tr); }; });

  SampleArgs sa;
  auto* g = app.add_subcommand("sample", "Generate from a checkpoint");
  g->add_option("--checkpoint", sa.checkpoint, "Checkpoint file")->required();
  g->add_option("--count", sa.count, "Number of generations");
  g->add_option("--seed-text", sa.seed_text, "Priming text (tokens or characters)");
  g->add_option("--temperature", sa.temperature, "Sampling temperature")->check(CLI::PositiveNumber);
  g->add_option("--max-steps", sa.max_steps, "Maximum generated symbols");
  g->add_option("--rng-seed", sa.rng_seed, "RNG seed");
  g->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");
  g->add_option("--out", sa.out, "Output file");
  g->add_option("--report", sa.report, "Metadata sidecar (default <out>.meta.tsv)");
  g->add_flag("--random-state", sa.random_state, "Start from a random hidden state");
  g->add_flag("--stop-at-delimiter", sa.stop_at_delimiter, "Char mode: stop at a blank line");
  g->callback([&] { action = [&] { return run_sample(sa); }; });

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Corpus statistics, optionally against a second corpus");
  a->add_option("--in", an.in, "Token corpus")->required();
  a->add_option("--compare", an.compare, "Second token corpus");
  a->add_option("--csv", an.csv, "CSV output");
  a->add_option("--bin-width", an.bin_width, "Length histogram bin width")->check(CLI::PositiveNumber);
  a->callback([&] { action = [&] { return run_analyze(an); }; });

  ValidateArgs va;
  auto* v = app.add_subcommand("validate", "Grammar, measure and repeat checks");
  v->add_option("--in", va.in, "ABC file, or token corpus with --tokens")->required();
  v->add_flag("--tokens", va.tokens, "Input is a token corpus");
  v->add_flag("--strict", va.strict, "Exit 1 when anything is found");
  v->callback([&] { action = [&] { return run_validate(va); }; });

  ExportArgs ex;
  auto* e = app.add_subcommand("export-midi", "Render the first tune of a file to MIDI");
  e->add_option("--in", ex.in, "ABC file or token line")->required();
  e->add_option("--out", ex.out, "MIDI file")->required();
  e->add_option("--tempo", ex.tempo, "Quarter notes per minute")->check(CLI::Range(20, 400));
  e->add_option("--program", ex.program, "General MIDI program")->check(CLI::Range(0, 127));
  e->callback([&] { action = [&] { return run_export(ex); }; });

  ServeArgs sv;
  auto* w = app.add_subcommand("serve", "Run the HTTP API");
  w->add_option("--config", sv.config, "key=value service config");
  w->add_option("--port", sv.port, "Port (overrides config and TUNELAB_PORT)");
  w->callback([&] { action = [&] { return run_serve(sv); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const std::exception& ex_) {
    std::cerr << "error: " << ex_.what() << '\n';
    return 1;
  }
}
