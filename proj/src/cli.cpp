// Copyright 2026 The lato Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lato/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lato/curation.hpp"
#include "lato/error.hpp"
#include "lato/fuser.hpp"
#include "lato/image.hpp"
#include "lato/instruction.hpp"
#include "lato/kinematics.hpp"
#include "lato/metrics.hpp"
#include "lato/posenc.hpp"
#include "lato/tokenizer.hpp"

namespace lato::cli {
namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 1234;

struct Options {
  std::string config;
  std::string data = "gen:10000";
  std::string out;
  std::string log;
  std::string model;
  std::string landmarks;
  std::string tokens;
  std::string instruction;
  std::string trace;
  std::string in;
  std::string scorers = "mock";
  std::string image;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
  bool pretty = false;
  bool verbose = false;
  int steps = -1;
  int eval_count = 1000;
  int stride = 16;
  std::int64_t lt = 77, ls = 1024, lf = 68, ln = 1024;
  std::int64_t rendered_tokens = 1024;
  bool rendered = false;
  bool run_attention = false;
  int d_model = 64;
  int heads = 1;
  int timeout_ms = 2000;
  int retries = 2;
  double sarc = 0, phi_ins = 0, phi_real = 0, alpha = 2.0, epsilon = 1e-5;
  int radius = 2;
  int value = 255;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json ReadJson(const std::string& path) {
  try {
    return json::parse(ReadText(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void Emit(const Io& io, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    io.out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "failed writing '" + path + "'");
}

std::string Dump(const json& j, bool pretty) { return j.dump(pretty ? 2 : -1) + "\n"; }

std::string ConfigPath(const Options& o) {
  if (!o.config.empty()) return o.config;
  if (const char* env = std::getenv("LATO_CONFIG"); env != nullptr && *env != '\0') return env;
  return {};
}

std::string Table(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream s;
  for (const auto& [k, v] : rows) s << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
  return s.str();
}

std::string Num(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// "gen:N[:SEED]" draws synthetic faces; anything else is a JSONL file of
// landmark documents.
std::vector<LandmarkSet> LoadDataset(const std::string& spec, std::uint64_t seed) {
  if (spec.rfind("gen:", 0) == 0) {
    std::istringstream s(spec.substr(4));
    std::size_t count = 0;
    char sep = 0;
    if (!(s >> count) || count == 0) throw Error(ErrorKind::kConfig, "bad dataset spec '" + spec + "'");
    if (s >> sep) {
      if (sep != ':' || !(s >> seed)) throw Error(ErrorKind::kConfig, "bad dataset spec '" + spec + "'");
    }
    return kinematics::GenerateSyntheticLandmarks(count, seed);
  }
  std::ifstream in(spec);
  if (!in) throw Error(ErrorKind::kIo, "cannot open dataset '" + spec + "'");
  std::vector<LandmarkSet> data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) data.push_back(ParseLandmarks(line));
  }
  return data;
}

json IndicesJson(const std::vector<int>& indices) { return {{"indices", indices}}; }

std::vector<int> ReadIndices(const std::string& path) {
  const json j = ReadJson(path);
  try {
    return (j.is_array() ? j : j.at("indices")).get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, "'" + path + "' holds no token indices: " + e.what());
  }
}

int TrainTokenizer(const Options& o, const Io& io) {
  tokenizer::TokenizerConfig cfg;
  if (const auto path = ConfigPath(o); !path.empty()) cfg = tokenizer::ConfigFromJson(ReadJson(path));
  cfg.seed = o.seed;
  if (o.steps >= 0) cfg.steps = o.steps;
  const auto data = LoadDataset(o.data, o.seed);
  std::ofstream log;
  if (!o.log.empty()) {
    log.open(o.log);
    if (!log) throw Error(ErrorKind::kIo, "cannot open '" + o.log + "' for writing");
  }
  auto progress = [&](const tokenizer::StepRecord& r) {
    if (log) {
      log << json{{"step", r.step},
                  {"reconstruction", r.loss.reconstruction},
                  {"commitment", r.loss.commitment},
                  {"codebook", r.loss.codebook},
                  {"total", r.loss.total},
                  {"reconstruction_px", r.reconstruction_px},
                  {"codes_in_batch", r.codes_in_batch}}
                 .dump()
          << "\n";
    }
    if (o.verbose && r.step % 500 == 0) {
      io.err << "step " << r.step << " reconstruction " << Num(r.reconstruction_px, 3) << " px\n";
    }
  };
  const auto result = tokenizer::Train(cfg, data, progress);
  result.model.Save(o.out);
  const auto held_out = kinematics::GenerateSyntheticLandmarks(o.eval_count, o.seed + 1);
  const auto ev = tokenizer::EvaluateReconstruction(result.model, held_out);
  const auto stats = tokenizer::ComputeCodebookStats(result.model.codebook());
  const json summary = {
      {"model", o.out},
      {"config", tokenizer::ToJson(cfg)},
      {"samples", data.size()},
      {"seconds", result.log.seconds},
      {"resets", result.log.resets.size()},
      {"final_step_reconstruction_px",
       result.log.steps.empty() ? 0.0 : result.log.steps.back().reconstruction_px},
      {"held_out", {{"count", held_out.size()}, {"mean_l1_px", ev.mean_l1_px}, {"utilization", ev.utilization}}},
      {"codebook",
       {{"mean_abs_cos", stats.cosine.mean_abs},
        {"mean_cos", stats.cosine.mean},
        {"std_cos", stats.cosine.stddev},
        {"max_cos", stats.cosine.max},
        {"zero_rows", stats.zero_rows}}}};
  if (o.pretty) {
    io.out << Table({{"model", o.out},
                     {"seconds", Num(result.log.seconds, 1)},
                     {"held-out L1 (px)", Num(ev.mean_l1_px, 3)},
                     {"utilization", Num(ev.utilization, 3)},
                     {"mean |cos|", Num(stats.cosine.mean_abs, 4)}});
  } else {
    io.out << Dump(summary, false);
  }
  return kExitOk;
}

int Tokenize(const Options& o, const Io& io) {
  const auto model = tokenizer::TokenizerModel::Load(o.model);
  const auto tokens = model.Tokenize(ReadLandmarksFile(o.landmarks, model.canvas()));
  Emit(io, o.out, Dump(IndicesJson(tokens.indices), o.pretty));
  return kExitOk;
}

int Detokenize(const Options& o, const Io& io) {
  const auto model = tokenizer::TokenizerModel::Load(o.model);
  const auto indices = ReadIndices(o.tokens);
  Emit(io, o.out, SerializeLandmarks(model.Decode(indices)) + "\n");
  return kExitOk;
}

int Predict(const Options& o, const Io& io) {
  const LandmarkSet src = ReadLandmarksFile(o.landmarks);
  const auto prediction = kinematics::PredictLandmarks(src, ParseInstruction(o.instruction));
  Emit(io, o.out, SerializeLandmarks(prediction.landmarks) + "\n");
  if (!o.trace.empty()) Emit(io, o.trace, Dump(kinematics::ToJson(prediction.trace), o.pretty));
  return kExitOk;
}

int Posenc(const Options& o, const Io& io) {
  const auto positions = posenc::LandmarkPositions(ReadLandmarksFile(o.landmarks), o.stride);
  if (o.pretty) {
    std::ostringstream s;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      s << std::setw(2) << i << "  (" << positions[i].t << ", " << positions[i].h << ", "
        << positions[i].w << ")\n";
    }
    Emit(io, o.out, s.str());
  } else {
    Emit(io, o.out, Dump(posenc::ToJson(positions), false));
  }
  return kExitOk;
}

double TimeAttention(fuser::SequenceLengths lengths, const Options& o) {
  const fuser::GridSpec grid;
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> n01;
  auto random = [&](Eigen::Index rows) {
    kernels::RowMatrix m(rows, o.d_model);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    return m;
  };
  const auto z_t = random(lengths.text);
  const auto z_s = random(lengths.source);
  const auto z_n = random(lengths.noisy);
  fuser::TokenSequence seq = fuser::Assemble(z_t, z_s, nullptr, z_n, grid);
  if (lengths.facial > 0) {
    // Extra condition tokens, placed on the image grid.
    const auto extra = random(lengths.facial);
    kernels::RowMatrix all(seq.length() + lengths.facial, o.d_model);
    all << seq.tokens, extra;
    seq.tokens = all;
    const auto cells = posenc::ImagePositions(grid.grid_h, grid.grid_w);
    for (std::int64_t i = 0; i < lengths.facial; ++i) seq.positions.push_back(cells[i % cells.size()]);
  }
  const auto params = fuser::AttentionBlockParams::Random(o.d_model, o.heads, o.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = fuser::AttentionForward(seq, params);
  (void)result;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int FuseBench(const Options& o, const Io& io) {
  const fuser::SequenceLengths lengths{o.lt, o.ls, o.lf, o.ln};
  const auto report = fuser::AttentionCost(lengths, o.rendered_tokens);
  json j = fuser::ToJson(report);
  j["selected"] = o.rendered ? "rendered_image" : "landmark_tokens";
  if (o.run_attention) {
    if (o.lt < 0 || o.ls != 1024 || o.ln != 1024) {
      throw Error(ErrorKind::kConfig, "--run needs the 32x32 grid (--ls 1024 --ln 1024)");
    }
    const double t_landmark = TimeAttention(lengths, o);
    const double t_rendered = TimeAttention({o.lt, o.ls, o.rendered_tokens, o.ln}, o);
    j["timing"] = {{"d_model", o.d_model},
                   {"heads", o.heads},
                   {"jobs", o.jobs},
                   {"landmark_seconds", t_landmark},
                   {"rendered_seconds", t_rendered}};
  }
  if (o.pretty) {
    io.out << Table({{"baseline tokens", std::to_string(report.baseline_total)},
                     {"landmark tokens", std::to_string(report.landmark_total)},
                     {"rendered tokens", std::to_string(report.rendered_total)},
                     {"landmark logits", Num(report.landmark_logits, 0)},
                     {"rendered logits", Num(report.rendered_logits, 0)},
                     {"relative cost", Num(report.relative_cost, 6)}});
  } else {
    io.out << Dump(j, false);
  }
  return kExitOk;
}

int Curate(const Options& o, const Io& io) {
  curation::CurationConfig cfg;
  if (const auto path = ConfigPath(o); !path.empty()) cfg = curation::CurationConfigFromJson(ReadJson(path));
  cfg.seed = o.seed;
  auto scorers = curation::ScorerSuite::FromSpec(o.scorers, o.seed, o.timeout_ms, o.retries);
  std::ifstream in(o.in);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + o.in + "'");
  std::ostringstream buffered;
  std::ofstream file;
  std::ostream* sink = &io.out;
  if (!o.out.empty() && o.out != "-") {
    file.open(o.out, std::ios::binary);
    if (!file) throw Error(ErrorKind::kIo, "cannot open '" + o.out + "' for writing");
    sink = &file;
  }
  const auto summary = curation::Curate(in, *sink, cfg, scorers);
  if (file && !file.flush()) throw Error(ErrorKind::kIo, "failed writing '" + o.out + "'");
  std::ostream& report = sink == &io.out ? io.err : io.out;
  if (o.pretty) {
    std::vector<std::pair<std::string, std::string>> rows = {
        {"records", std::to_string(summary.records)},
        {"accepted", std::to_string(summary.accepted)},
        {"rejected", std::to_string(summary.rejected)},
        {"quarantined", std::to_string(summary.quarantined)},
        {"malformed", std::to_string(summary.malformed)}};
    for (int i = 0; i < curation::kStageCount; ++i) {
      rows.emplace_back(std::string(curation::ToString(static_cast<curation::Stage>(i))) + " pass rate",
                        Num(summary.stages[i].pass_rate(), 4));
    }
    report << Table(rows);
  } else {
    report << Dump(curation::ToJson(summary), false);
  }
  return kExitOk;
}

int ScoreIp(const Options& o, const Io& io) {
  const auto r = metrics::RectifiedIp({o.sarc, o.phi_ins, o.phi_real, o.alpha, o.epsilon});
  if (o.pretty) {
    io.out << Table({{"p", Num(r.penalty)}, {"s_rip", Num(r.score)}, {"capped", r.capped ? "yes" : "no"}});
  } else {
    io.out << Dump({{"p", r.penalty}, {"s_rip", r.score}, {"capped", r.capped}}, false);
  }
  return kExitOk;
}

int Eval(const Options& o, const Io& io) {
  metrics::EvalOptions opts;
  auto suite = curation::ScorerSuite::FromSpec(o.scorers, o.seed, o.timeout_ms, o.retries);
  opts.scorer = suite.identity;
  opts.provenance = o.scorers == "mock" ? "mock" : "remote";
  opts.alpha = o.alpha;
  opts.epsilon = o.epsilon;
  std::ifstream in(o.in);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + o.in + "'");
  const auto report = metrics::Evaluate(in, opts);
  if (o.pretty && (o.out.empty() || o.out == "-")) {
    auto row = [](const metrics::MetricAggregate& a) {
      return a.count ? Num(a.mean) + "  (n=" + std::to_string(a.count) + ")" : std::string("n/a");
    };
    io.out << Table({{"SC", row(report.sc)},
                     {"VQ", row(report.vq)},
                     {"NA", row(report.na)},
                     {"IP", row(report.ip)},
                     {"landmark error", row(report.landmark_error)},
                     {"malformed", std::to_string(report.malformed)}});
  } else {
    Emit(io, o.out, Dump(metrics::ToJson(report), o.pretty));
  }
  return kExitOk;
}

int Overlay(const Options& o, const Io& io) {
  if (o.value < 0 || o.value > 255) throw Error(ErrorKind::kRange, "--value must lie in [0, 255]");
  if (o.radius < 0) throw Error(ErrorKind::kRange, "--radius must be non-negative");
  if (o.out.empty()) throw Error(ErrorKind::kConfig, "--out is required");
  const GrayImage image = ReadPgm(o.image);
  WritePgm(o.out, DrawLandmarks(image, ReadLandmarksFile(o.landmarks), o.radius,
                                static_cast<std::uint8_t>(o.value)));
  (void)io;
  return kExitOk;
}

using Handler = int (*)(const Options&, const Io&);

struct Registered {
  CLI::App* app;
  Handler handler;
};

void AddCommon(CLI::App* sub, Options& o, bool with_seed) {
  sub->add_option("--jobs", o.jobs, "OpenMP threads for parallel kernels")->capture_default_str();
  sub->add_flag("--pretty", o.pretty, "human-readable output instead of JSON");
  if (with_seed) sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

std::vector<Registered> Build(CLI::App& app, Options& o) {
  app.require_subcommand(1);
  std::vector<Registered> subs;

  auto* train = app.add_subcommand("train-tokenizer", "train the landmark tokenizer");
  train->add_option("--config", o.config, "tokenizer config JSON (falls back to $LATO_CONFIG)");
  train->add_option("--data", o.data, "gen:N[:SEED] or a JSONL file of landmark documents")->capture_default_str();
  train->add_option("--out", o.out, "output model file")->required();
  train->add_option("--log", o.log, "per-step JSONL training log");
  train->add_option("--steps", o.steps, "override the configured step count");
  train->add_option("--eval-count", o.eval_count, "held-out synthetic faces for the summary")->capture_default_str();
  train->add_flag("--verbose", o.verbose, "progress every 500 steps on stderr");
  AddCommon(train, o, true);
  subs.push_back({train, TrainTokenizer});

  auto* tok = app.add_subcommand("tokenize", "landmarks -> 68 codebook indices");
  tok->add_option("--model", o.model, "tokenizer model file")->required();
  tok->add_option("--landmarks", o.landmarks, "landmark JSON")->required();
  tok->add_option("--out", o.out, "output file (default stdout)");
  AddCommon(tok, o, false);
  subs.push_back({tok, Tokenize});

  auto* detok = app.add_subcommand("detokenize", "68 codebook indices -> landmarks");
  detok->add_option("--model", o.model, "tokenizer model file")->required();
  detok->add_option("--tokens", o.tokens, "JSON {\"indices\": [...]} or a bare array")->required();
  detok->add_option("--out", o.out, "output file (default stdout)");
  AddCommon(detok, o, false);
  subs.push_back({detok, Detokenize});

  auto* predict = app.add_subcommand("predict", "kinematic landmark prediction with a reasoning trace");
  predict->add_option("--landmarks", o.landmarks, "source landmark JSON")->required();
  predict->add_option("--instruction", o.instruction, "edit instruction text")->required();
  predict->add_option("--out", o.out, "predicted landmarks (default stdout)");
  predict->add_option("--trace", o.trace, "reasoning trace JSON");
  AddCommon(predict, o, false);
  subs.push_back({predict, Predict});

  auto* pe = app.add_subcommand("posenc", "location-mapped position triples for landmarks");
  pe->add_option("--landmarks", o.landmarks, "landmark JSON")->required();
  pe->add_option("--stride", o.stride, "pixels per latent cell")->capture_default_str();
  pe->add_option("--out", o.out, "output file (default stdout)");
  AddCommon(pe, o, false);
  subs.push_back({pe, Posenc});

  auto* fb = app.add_subcommand("fuse-bench", "attention cost of landmark vs rendered conditioning");
  fb->add_option("--lt", o.lt, "text tokens")->capture_default_str();
  fb->add_option("--ls", o.ls, "source image tokens")->capture_default_str();
  fb->add_option("--lf", o.lf, "facial landmark tokens")->capture_default_str();
  fb->add_option("--ln", o.ln, "noisy image tokens")->capture_default_str();
  fb->add_option("--rendered-tokens", o.rendered_tokens, "tokens of a rendered landmark image")->capture_default_str();
  fb->add_flag("--rendered", o.rendered, "select the rendered-image row");
  fb->add_flag("--run", o.run_attention, "also time one attention forward pass of each sequence");
  fb->add_option("--d-model", o.d_model, "model width for --run")->capture_default_str();
  fb->add_option("--heads", o.heads, "attention heads for --run")->capture_default_str();
  AddCommon(fb, o, true);
  subs.push_back({fb, FuseBench});

  auto* cur = app.add_subcommand("curate", "filter a JSONL pair manifest");
  cur->add_option("--in", o.in, "input manifest JSONL")->required();
  cur->add_option("--out", o.out, "curated manifest JSONL (default stdout)");
  cur->add_option("--config", o.config, "curation config JSON (falls back to $LATO_CONFIG)");
  cur->add_option("--scorers", o.scorers, "mock or http:<url>")->capture_default_str();
  cur->add_option("--timeout-ms", o.timeout_ms, "remote scorer timeout")->capture_default_str();
  cur->add_option("--retries", o.retries, "remote scorer retries")->capture_default_str();
  AddCommon(cur, o, true);
  subs.push_back({cur, Curate});

  auto* ip = app.add_subcommand("score-ip", "rectified identity-preservation score");
  ip->add_option("--sarc", o.sarc, "identity similarity s_arc in [0, 1]")->required();
  ip->add_option("--phi-ins", o.phi_ins, "instructed amplitude in [0, 1]")->required();
  ip->add_option("--phi-real", o.phi_real, "realized amplitude in [0, 1]")->required();
  ip->add_option("--alpha", o.alpha, "penalty exponent")->capture_default_str();
  ip->add_option("--epsilon", o.epsilon, "denominator guard")->capture_default_str();
  AddCommon(ip, o, false);
  subs.push_back({ip, ScoreIp});

  auto* ev = app.add_subcommand("eval", "evaluate an edit-results manifest");
  ev->add_option("--in", o.in, "results JSONL")->required();
  ev->add_option("--out", o.out, "report JSON (default stdout)");
  ev->add_option("--scorers", o.scorers, "mock or http:<url>")->capture_default_str();
  ev->add_option("--alpha", o.alpha, "penalty exponent")->capture_default_str();
  ev->add_option("--epsilon", o.epsilon, "denominator guard")->capture_default_str();
  ev->add_option("--timeout-ms", o.timeout_ms, "remote scorer timeout")->capture_default_str();
  ev->add_option("--retries", o.retries, "remote scorer retries")->capture_default_str();
  AddCommon(ev, o, true);
  subs.push_back({ev, Eval});

  auto* ov = app.add_subcommand("overlay", "draw landmark dots onto a PGM image");
  ov->add_option("--image", o.image, "input PGM (P5)")->required();
  ov->add_option("--landmarks", o.landmarks, "landmark JSON")->required();
  ov->add_option("--out", o.out, "output PGM")->required();
  ov->add_option("--radius", o.radius, "dot half-width in pixels")->capture_default_str();
  ov->add_option("--value", o.value, "dot intensity")->capture_default_str();
  AddCommon(ov, o, false);
  subs.push_back({ov, Overlay});
  return subs;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("lato: landmark tokens, kinematic prediction, curation and metrics", "lato");
  Options o;
  const auto subs = Build(app, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? kExitOk : kExitValidation;
  }
  const Io io{out, err};
  try {
    if (o.jobs < 1) throw Error(ErrorKind::kConfig, "--jobs must be at least 1");
    omp_set_num_threads(o.jobs);
    for (const auto& s : subs) {
      if (s.app->parsed()) return s.handler(o, io);
    }
    err << app.help();
    return kExitValidation;
  } catch (const Error& e) {
    err << "error (" << ToString(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::kIo ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::vector<std::string> SubcommandNames() {
  CLI::App app;
  Options o;
  std::vector<std::string> names;
  for (const auto& s : Build(app, o)) names.push_back(s.app->get_name());
  return names;
}

std::vector<std::string> SubcommandFlags(const std::string& subcommand) {
  CLI::App app;
  Options o;
  std::vector<std::string> flags;
  for (const auto& s : Build(app, o)) {
    if (s.app->get_name() != subcommand) continue;
    for (const CLI::Option* opt : s.app->get_options()) {
      for (const auto& name : opt->get_lnames()) flags.push_back("--" + name);
    }
  }
  std::sort(flags.begin(), flags.end());
  return flags;
}

}  // namespace lato::cli
