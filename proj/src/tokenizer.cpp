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

#include "lato/tokenizer.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "lato/checksum.hpp"
#include "lato/error.hpp"
#include "lato/kinematics.hpp"

namespace lato::tokenizer {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written as raw little-endian doubles");

// Each sample occupies kStride columns: a zero pad, 68 tokens, a zero pad.
constexpr int kStride = kTokens + 2;
constexpr char kMagic[8] = {'L', 'A', 'T', 'O', 'T', 'O', 'K', '1'};
constexpr int kSchemaVersion = 1;

inline Eigen::Index Col(int sample, int token) {
  return static_cast<Eigen::Index>(sample) * kStride + 1 + token;
}

void ZeroPads(Matrix& m, int samples) {
  for (int s = 0; s < samples; ++s) {
    m.col(static_cast<Eigen::Index>(s) * kStride).setZero();
    m.col(static_cast<Eigen::Index>(s) * kStride + kStride - 1).setZero();
  }
}

Matrix Relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix ReluMask(const Matrix& x) { return (x.array() > 0.0).cast<double>().matrix(); }

Matrix Conv(const ConvBlock& blk, const Matrix& a, int samples) {
  const Eigen::Index n = a.cols();
  Matrix y = Matrix::Zero(blk.b.size(), n);
  auto mid = y.middleCols(1, n - 2);
  mid.noalias() += blk.w[0] * a.middleCols(0, n - 2);
  mid.noalias() += blk.w[1] * a.middleCols(1, n - 2);
  mid.noalias() += blk.w[2] * a.middleCols(2, n - 2);
  y.colwise() += blk.b;
  ZeroPads(y, samples);
  return y;
}

// `dy` is zero on pad columns. Accumulates into `g` and returns d/da.
Matrix ConvBackward(const ConvBlock& blk, const Matrix& a, const Matrix& dy, int samples,
                    ConvBlock& g) {
  const Eigen::Index n = a.cols();
  const auto dmid = dy.middleCols(1, n - 2);
  g.w[0].noalias() += dmid * a.middleCols(0, n - 2).transpose();
  g.w[1].noalias() += dmid * a.middleCols(1, n - 2).transpose();
  g.w[2].noalias() += dmid * a.middleCols(2, n - 2).transpose();
  g.b += dy.rowwise().sum();
  Matrix da = Matrix::Zero(a.rows(), n);
  da.middleCols(0, n - 2).noalias() += blk.w[0].transpose() * dmid;
  da.middleCols(1, n - 2).noalias() += blk.w[1].transpose() * dmid;
  da.middleCols(2, n - 2).noalias() += blk.w[2].transpose() * dmid;
  ZeroPads(da, samples);
  return da;
}

void AddIndexEmbedding(Matrix& h, const Matrix& index, int samples) {
  for (int s = 0; s < samples; ++s) h.middleCols(Col(s, 0), kTokens) += index;
}

// Residual stack h_{b+1} = h_b + conv(relu(h_b)); keeps every h_b.
std::vector<Matrix> RunBlocks(const std::vector<ConvBlock>& blocks, Matrix h0, int samples) {
  std::vector<Matrix> hs;
  hs.reserve(blocks.size() + 1);
  hs.push_back(std::move(h0));
  for (const auto& blk : blocks) hs.push_back(hs.back() + Conv(blk, Relu(hs.back()), samples));
  return hs;
}

// Backward through RunBlocks; `dh` enters as d/dh_B and leaves as d/dh_0.
void BackBlocks(const std::vector<ConvBlock>& blocks, const std::vector<Matrix>& hs, int samples,
                std::vector<ConvBlock>& grads, Matrix& dh) {
  for (std::size_t b = blocks.size(); b-- > 0;) {
    Matrix da = ConvBackward(blocks[b], Relu(hs[b]), dh, samples, grads[b]);
    dh += da.cwiseProduct(ReluMask(hs[b]));
  }
}

Matrix EncoderStack(const TokenizerParams& p, const Matrix& coords, int samples,
                    std::vector<Matrix>* keep) {
  Matrix h0 = p.embed_w * coords;
  h0.colwise() += p.embed_b;
  AddIndexEmbedding(h0, p.enc_index, samples);
  ZeroPads(h0, samples);
  auto hs = RunBlocks(p.enc_blocks, std::move(h0), samples);
  Matrix out = hs.back();
  if (keep != nullptr) *keep = std::move(hs);
  return out;
}

Matrix RealColumns(const Matrix& padded, int samples) {
  Matrix z(padded.rows(), static_cast<Eigen::Index>(samples) * kTokens);
  for (int s = 0; s < samples; ++s) {
    z.middleCols(static_cast<Eigen::Index>(s) * kTokens, kTokens) =
        padded.middleCols(Col(s, 0), kTokens);
  }
  return z;
}

Matrix DecoderInput(const TokenizerParams& p, std::span<const int> indices, int samples) {
  const Eigen::Index d = p.codebook.cols();
  Matrix g0 = Matrix::Zero(d, static_cast<Eigen::Index>(samples) * kStride);
  for (int s = 0; s < samples; ++s) {
    for (int t = 0; t < kTokens; ++t) {
      g0.col(Col(s, t)) = p.codebook.row(indices[static_cast<std::size_t>(s) * kTokens + t]).transpose();
    }
  }
  AddIndexEmbedding(g0, p.dec_index, samples);
  ZeroPads(g0, samples);
  return g0;
}

Matrix Head(const TokenizerParams& p, const Matrix& g_last, int samples) {
  Matrix xh = p.head_w * Relu(g_last);
  xh.colwise() += p.head_b;
  ZeroPads(xh, samples);
  return xh;
}

void FillUniform(std::span<double> xs, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& x : xs) x = dist(rng);
}

std::span<double> Flat(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> Flat(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

ConvBlock ZeroBlock(int d) {
  ConvBlock b;
  for (auto& w : b.w) w = Matrix::Zero(d, d);
  b.b = Vector::Zero(d);
  return b;
}

std::vector<std::span<double>> Spans(TokenizerParams& p) {
  std::vector<std::span<double>> out;
  p.ForEach([&](const std::string&, std::span<double> s) { out.push_back(s); });
  return out;
}

template <typename T>
void ReadScalar(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void TokenizerConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  if (m < 2) fail("codebook size m must be at least 2");
  if (d < 2 || d % 2 != 0) fail("code dimension d must be even and positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be finite and non-negative");
  if (blocks < 0) fail("block count must be non-negative");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail("learning rate must be positive");
  if (batch < 1) fail("batch must be at least 1");
  if (steps < 0) fail("steps must be non-negative");
  if (reset_interval < 1) fail("reset_interval must be at least 1");
}

nlohmann::json ToJson(const TokenizerConfig& c) {
  return {{"m", c.m},         {"d", c.d},         {"beta", c.beta},
          {"blocks", c.blocks}, {"lr", c.lr},     {"batch", c.batch},
          {"steps", c.steps}, {"reset_interval", c.reset_interval},
          {"seed", c.seed},   {"freeze_codebook", c.freeze_codebook}};
}

TokenizerConfig ConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "tokenizer config must be an object");
  static const char* kKeys[] = {"m",     "d",     "beta",           "blocks", "lr",
                                "batch", "steps", "reset_interval", "seed",   "freeze_codebook"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys),
                     [&](const char* k) { return key == k; }) == std::end(kKeys)) {
      throw Error(ErrorKind::kConfig, "unknown tokenizer config key '" + key + "'");
    }
  }
  TokenizerConfig c;
  try {
    ReadScalar(j, "m", c.m);
    ReadScalar(j, "d", c.d);
    ReadScalar(j, "beta", c.beta);
    ReadScalar(j, "blocks", c.blocks);
    ReadScalar(j, "lr", c.lr);
    ReadScalar(j, "batch", c.batch);
    ReadScalar(j, "steps", c.steps);
    ReadScalar(j, "reset_interval", c.reset_interval);
    ReadScalar(j, "seed", c.seed);
    ReadScalar(j, "freeze_codebook", c.freeze_codebook);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kConfig, std::string("tokenizer config: ") + ex.what());
  }
  c.Validate();
  return c;
}

TokenizerParams TokenizerParams::ZerosLike(const TokenizerParams& like) {
  TokenizerParams z = like;
  z.ForEach([](const std::string&, std::span<double> s) { std::fill(s.begin(), s.end(), 0.0); });
  return z;
}

void TokenizerParams::ForEach(
    const std::function<void(const std::string&, std::span<double>)>& fn) {
  fn("embed_w", Flat(embed_w));
  fn("embed_b", Flat(embed_b));
  fn("enc_index", Flat(enc_index));
  for (std::size_t i = 0; i < enc_blocks.size(); ++i) {
    const std::string pre = "enc" + std::to_string(i) + ".";
    for (int k = 0; k < 3; ++k) fn(pre + "w" + std::to_string(k), Flat(enc_blocks[i].w[k]));
    fn(pre + "b", Flat(enc_blocks[i].b));
  }
  fn("dec_index", Flat(dec_index));
  for (std::size_t i = 0; i < dec_blocks.size(); ++i) {
    const std::string pre = "dec" + std::to_string(i) + ".";
    for (int k = 0; k < 3; ++k) fn(pre + "w" + std::to_string(k), Flat(dec_blocks[i].w[k]));
    fn(pre + "b", Flat(dec_blocks[i].b));
  }
  fn("head_w", Flat(head_w));
  fn("head_b", Flat(head_b));
  fn("codebook", {codebook.data(), static_cast<std::size_t>(codebook.size())});
}

void TokenizerParams::ForEach(
    const std::function<void(const std::string&, std::span<const double>)>& fn) const {
  const_cast<TokenizerParams*>(this)->ForEach(
      [&](const std::string& name, std::span<double> s) { fn(name, s); });
}

std::size_t TokenizerParams::ParameterCount() const {
  std::size_t n = 0;
  ForEach([&](const std::string&, std::span<const double> s) { n += s.size(); });
  return n;
}

TokenizerModel TokenizerModel::Initialize(const TokenizerConfig& config, Canvas canvas) {
  config.Validate();
  if (canvas.width < 2 || canvas.height < 2) {
    throw Error(ErrorKind::kConfig, "canvas must be at least 2x2");
  }
  TokenizerModel model;
  model.config_ = config;
  model.canvas_ = canvas;
  const int d = config.d;
  auto& p = model.params_;
  std::mt19937_64 rng(config.seed);
  // Uniform(+-1/sqrt(fan_in)) for weights and biases alike.
  const double conv_bound = 1.0 / std::sqrt(3.0 * d);
  p.embed_w = Matrix(d, 2);
  p.embed_b = Vector(d);
  FillUniform(Flat(p.embed_w), 1.0 / std::sqrt(2.0), rng);
  FillUniform(Flat(p.embed_b), 1.0 / std::sqrt(2.0), rng);
  p.enc_index = Matrix::Zero(d, kTokens);
  auto make_blocks = [&](std::vector<ConvBlock>& blocks) {
    blocks.assign(config.blocks, ZeroBlock(d));
    for (auto& blk : blocks) {
      for (auto& w : blk.w) FillUniform(Flat(w), conv_bound, rng);
      FillUniform(Flat(blk.b), conv_bound, rng);
    }
  };
  make_blocks(p.enc_blocks);
  p.dec_index = Matrix::Zero(d, kTokens);
  make_blocks(p.dec_blocks);
  p.head_w = Matrix(2, d);
  p.head_b = Vector(2);
  FillUniform(Flat(p.head_w), 1.0 / std::sqrt(static_cast<double>(d)), rng);
  FillUniform(Flat(p.head_b), 1.0 / std::sqrt(static_cast<double>(d)), rng);
  p.codebook = RowMatrix::Zero(config.m, d);
  return model;
}

double TokenizerModel::Normalize(double v, int extent) const { return v / (0.5 * extent) - 1.0; }

double TokenizerModel::Denormalize(double v, int extent) const { return (v + 1.0) * 0.5 * extent; }

Batch MakeBatch(const TokenizerModel& model, std::span<const LandmarkSet> samples) {
  Batch batch;
  batch.size = static_cast<int>(samples.size());
  batch.coords = Matrix::Zero(2, static_cast<Eigen::Index>(batch.size) * kStride);
  const Canvas& cv = model.canvas();
  for (int s = 0; s < batch.size; ++s) {
    const LandmarkSet& f = samples[s];
    if (f.canvas() != cv) {
      throw Error(ErrorKind::kUnit, "landmark canvas " + std::to_string(f.canvas().width) + "x" +
                                        std::to_string(f.canvas().height) +
                                        " does not match the model canvas " +
                                        std::to_string(cv.width) + "x" + std::to_string(cv.height));
    }
    for (int t = 0; t < kTokens; ++t) {
      batch.coords(0, Col(s, t)) = model.Normalize(f[t].x, cv.width);
      batch.coords(1, Col(s, t)) = model.Normalize(f[t].y, cv.height);
    }
  }
  return batch;
}

RowMatrix TokenizerModel::Encode(const LandmarkSet& f) const {
  const Batch batch = MakeBatch(*this, std::span(&f, 1));
  const Matrix z = RealColumns(EncoderStack(params_, batch.coords, 1, nullptr), 1);
  return z.transpose();
}

FacialTokens Quantize(const RowMatrix& latents, const RowMatrix& codebook) {
  FacialTokens tokens;
  tokens.indices = kernels::NearestCodes(latents, codebook);
  tokens.embeddings.resize(latents.rows(), codebook.cols());
  for (Eigen::Index i = 0; i < latents.rows(); ++i) {
    tokens.embeddings.row(i) = codebook.row(tokens.indices[i]);
  }
  return tokens;
}

FacialTokens TokenizerModel::Tokenize(const LandmarkSet& f) const {
  return Quantize(Encode(f), params_.codebook);
}

LandmarkSet TokenizerModel::Decode(const FacialTokens& tokens) const {
  return Decode(std::span<const int>(tokens.indices));
}

LandmarkSet TokenizerModel::Decode(std::span<const int> indices) const {
  if (indices.size() != static_cast<std::size_t>(kTokens)) {
    throw Error(ErrorKind::kShape,
                "expected 68 tokens, got " + std::to_string(indices.size()));
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= config_.m) {
      throw Error(ErrorKind::kRange, "token " + std::to_string(i) + " index " +
                                         std::to_string(indices[i]) + " outside [0, " +
                                         std::to_string(config_.m) + ")");
    }
  }
  const auto hs = RunBlocks(params_.dec_blocks, DecoderInput(params_, indices, 1), 1);
  const Matrix xh = Head(params_, hs.back(), 1);
  LandmarkSet::Points pts;
  for (int t = 0; t < kTokens; ++t) {
    pts[t] = {Denormalize(xh(0, Col(0, t)), canvas_.width),
              Denormalize(xh(1, Col(0, t)), canvas_.height)};
  }
  return LandmarkSet(pts, canvas_).Clamped();
}

LandmarkSet TokenizerModel::Reconstruct(const LandmarkSet& f) const {
  return Decode(Tokenize(f));
}

ForwardResult LossAndGradient(const TokenizerModel& model, const Batch& batch,
                              TokenizerParams* grad) {
  const TokenizerParams& p = model.params();
  const TokenizerConfig& cfg = model.config();
  const int samples = batch.size;
  const double tokens = static_cast<double>(samples) * kTokens;

  std::vector<Matrix> enc_hs;
  const Matrix h_enc = EncoderStack(p, batch.coords, samples, &enc_hs);
  ForwardResult out;
  out.latents = RealColumns(h_enc, samples);
  const RowMatrix zt = out.latents.transpose();
  out.indices = kernels::NearestCodes(zt, p.codebook);

  const auto dec_hs = RunBlocks(p.dec_blocks, DecoderInput(p, out.indices, samples), samples);
  const Matrix xh = Head(p, dec_hs.back(), samples);
  const Matrix diff = xh - batch.coords;

  Matrix q(out.latents.rows(), out.latents.cols());
  for (Eigen::Index c = 0; c < q.cols(); ++c) q.col(c) = p.codebook.row(out.indices[c]).transpose();
  const Matrix zq = out.latents - q;
  const double sq = zq.squaredNorm() / tokens;

  out.loss.reconstruction = diff.cwiseAbs().sum() / (2.0 * tokens);
  out.loss.commitment = sq;
  out.loss.codebook = cfg.freeze_codebook ? 0.0 : sq;
  out.loss.total = out.loss.reconstruction + cfg.beta * out.loss.commitment + out.loss.codebook;
  if (grad == nullptr) return out;

  TokenizerParams& g = *grad;
  // Zeroed in place when shapes already match: callers may hold spans into it.
  if (g.ParameterCount() == p.ParameterCount() && g.enc_blocks.size() == p.enc_blocks.size() &&
      g.codebook.rows() == p.codebook.rows()) {
    g.ForEach([](const std::string&, std::span<double> s) { std::fill(s.begin(), s.end(), 0.0); });
  } else {
    g = TokenizerParams::ZerosLike(p);
  }

  // Decoder.
  const Matrix dxh = diff.array().sign().matrix() / (2.0 * tokens);
  g.head_w.noalias() = dxh * Relu(dec_hs.back()).transpose();
  g.head_b = dxh.rowwise().sum();
  Matrix dh = (p.head_w.transpose() * dxh).cwiseProduct(ReluMask(dec_hs.back()));
  BackBlocks(p.dec_blocks, dec_hs, samples, g.dec_blocks, dh);
  for (int s = 0; s < samples; ++s) g.dec_index += dh.middleCols(Col(s, 0), kTokens);

  // Straight-through: decoder-input gradient lands on the encoder output.
  Matrix dz = Matrix::Zero(dh.rows(), dh.cols());
  for (int s = 0; s < samples; ++s) {
    dz.middleCols(Col(s, 0), kTokens) =
        dh.middleCols(Col(s, 0), kTokens) +
        (2.0 * cfg.beta / tokens) *
            zq.middleCols(static_cast<Eigen::Index>(s) * kTokens, kTokens);
  }
  if (!cfg.freeze_codebook) {
    for (Eigen::Index c = 0; c < zq.cols(); ++c) {
      g.codebook.row(out.indices[c]) -= (2.0 / tokens) * zq.col(c).transpose();
    }
  }

  // Encoder.
  BackBlocks(p.enc_blocks, enc_hs, samples, g.enc_blocks, dz);
  for (int s = 0; s < samples; ++s) g.enc_index += dz.middleCols(Col(s, 0), kTokens);
  g.embed_w.noalias() = dz * batch.coords.transpose();
  g.embed_b = dz.rowwise().sum();
  return out;
}

TrainResult Train(const TokenizerConfig& config, std::span<const LandmarkSet> dataset,
                  const ProgressFn& progress) {
  config.Validate();
  if (dataset.empty()) throw Error(ErrorKind::kConfig, "training dataset is empty");
  if (dataset.size() < static_cast<std::size_t>(config.batch)) {
    throw Error(ErrorKind::kConfig, "training dataset has " + std::to_string(dataset.size()) +
                                        " samples, fewer than one batch of " +
                                        std::to_string(config.batch));
  }
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result{TokenizerModel::Initialize(config, dataset.front().canvas()), {}};
  TokenizerModel& model = result.model;
  TokenizerParams& p = model.params();
  // Training draws come from a separate stream so initialization stays
  // independent of the dataset.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick_sample(0, dataset.size() - 1);
  std::vector<LandmarkSet> samples(config.batch);
  auto draw_batch = [&] {
    for (auto& s : samples) s = dataset[pick_sample(rng)];
    return MakeBatch(model, samples);
  };
  auto seed_codes = [&](const Matrix& latents, std::span<const int> codes) {
    std::uniform_int_distribution<Eigen::Index> pick_col(0, latents.cols() - 1);
    for (int j : codes) p.codebook.row(j) = latents.col(pick_col(rng)).transpose();
  };

  {
    const Batch first = draw_batch();
    const Matrix z = RealColumns(EncoderStack(p, first.coords, first.size, nullptr), first.size);
    std::vector<int> all(config.m);
    for (int j = 0; j < config.m; ++j) all[j] = j;
    seed_codes(z, all);
  }

  TokenizerParams grad = TokenizerParams::ZerosLike(p);
  TokenizerParams m1 = TokenizerParams::ZerosLike(p);
  TokenizerParams m2 = TokenizerParams::ZerosLike(p);
  auto ps = Spans(p);
  auto gs = Spans(grad);
  auto m1s = Spans(m1);
  auto m2s = Spans(m2);
  const std::size_t codebook_slot = ps.size() - 1;
  constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8;
  std::vector<char> used(config.m, 0);
  auto& log = result.log;
  log.steps.reserve(config.steps);

  for (int step = 1; step <= config.steps; ++step) {
    const Batch batch = draw_batch();
    const ForwardResult fr = LossAndGradient(model, batch, &grad);
    if (!std::isfinite(fr.loss.total)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << ": reconstruction=" << fr.loss.reconstruction
          << " commitment=" << fr.loss.commitment << " codebook=" << fr.loss.codebook;
      throw Error(ErrorKind::kNumeric, msg.str());
    }
    const double c1 = 1.0 - std::pow(kB1, step);
    const double c2 = 1.0 - std::pow(kB2, step);
    for (std::size_t t = 0; t < ps.size(); ++t) {
      if (t == codebook_slot && config.freeze_codebook) continue;
      auto& w = ps[t];
      const auto& gg = gs[t];
      auto& a = m1s[t];
      auto& b = m2s[t];
      for (std::size_t i = 0; i < w.size(); ++i) {
        a[i] = kB1 * a[i] + (1.0 - kB1) * gg[i];
        b[i] = kB2 * b[i] + (1.0 - kB2) * gg[i] * gg[i];
        w[i] -= config.lr * (a[i] / c1) / (std::sqrt(b[i] / c2) + kEps);
      }
    }

    StepRecord rec;
    rec.step = step;
    rec.loss = fr.loss;
    rec.reconstruction_px = fr.loss.reconstruction * 0.5 * (model.canvas().width +
                                                             model.canvas().height) * 0.5;
    std::vector<char> in_batch(config.m, 0);
    for (int k : fr.indices) {
      used[k] = 1;
      in_batch[k] = 1;
    }
    rec.codes_in_batch = static_cast<int>(std::count(in_batch.begin(), in_batch.end(), 1));
    log.steps.push_back(rec);
    if (progress) progress(rec);

    if (step % config.reset_interval == 0) {
      ResetEvent ev;
      ev.step = step;
      for (int j = 0; j < config.m; ++j) (used[j] ? ev.used_codes : ev.reset_codes).push_back(j);
      if (!config.freeze_codebook) seed_codes(fr.latents, ev.reset_codes);
      std::fill(used.begin(), used.end(), 0);
      log.resets.push_back(std::move(ev));
    }
  }
  log.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

CodebookStats ComputeCodebookStats(const RowMatrix& codebook, std::span<const int> indices,
                                   std::uint64_t seed) {
  if (codebook.rows() < 2) throw Error(ErrorKind::kConfig, "codebook statistics need m >= 2");
  CodebookStats stats;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index j = 0; j < codebook.rows(); ++j) {
    if (codebook.row(j).squaredNorm() == 0.0) {
      stats.zero_rows.push_back(static_cast<int>(j));
    } else {
      rows.push_back(j);
    }
  }
  if (rows.size() > static_cast<std::size_t>(kExactStatsLimit)) {
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(kExactStatsLimit);
    std::sort(rows.begin(), rows.end());
    stats.subsampled = true;
  }
  RowMatrix unit(static_cast<Eigen::Index>(rows.size()), codebook.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) unit.row(i) = codebook.row(rows[i]).normalized();
  stats.cosine = kernels::PairwiseCosine(unit);

  stats.histogram.assign(codebook.rows(), 0);
  for (int k : indices) {
    if (k < 0 || k >= codebook.rows()) {
      throw Error(ErrorKind::kRange, "code index " + std::to_string(k) + " outside the codebook");
    }
    ++stats.histogram[k];
  }
  const auto nonzero = std::count_if(stats.histogram.begin(), stats.histogram.end(),
                                     [](std::uint64_t c) { return c > 0; });
  stats.utilization = static_cast<double>(nonzero) / static_cast<double>(codebook.rows());
  return stats;
}

Evaluation EvaluateReconstruction(const TokenizerModel& model, std::span<const LandmarkSet> data) {
  Evaluation ev;
  ev.histogram.assign(model.config().m, 0);
  if (data.empty()) return ev;
  double total = 0.0;
  for (const auto& f : data) {
    const FacialTokens tokens = model.Tokenize(f);
    for (int k : tokens.indices) ++ev.histogram[k];
    total += LandmarkL1Error(model.Decode(tokens), f);
  }
  ev.mean_l1_px = total / static_cast<double>(data.size());
  const auto nonzero = std::count_if(ev.histogram.begin(), ev.histogram.end(),
                                     [](std::uint64_t c) { return c > 0; });
  ev.utilization = static_cast<double>(nonzero) / model.config().m;
  return ev;
}

std::string TokenizerModel::Serialize() const {
  nlohmann::json header;
  header["schema_version"] = kSchemaVersion;
  header["kind"] = "lato-tokenizer";
  header["config"] = ToJson(config_);
  header["canvas"] = {canvas_.width, canvas_.height};
  header["asset_hashes"] = {{"canonical_face", kinematics::CanonicalFace3D::Default().hash()},
                            {"expression_fields", kinematics::ExpressionFields::Default().hash()}};
  nlohmann::json tensors = nlohmann::json::array();
  params_.ForEach([&](const std::string& name, std::span<const double> s) {
    tensors.push_back({{"name", name}, {"size", s.size()}});
  });
  header["tensors"] = tensors;
  const std::string head = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  const std::uint64_t len = head.size();
  out.append(reinterpret_cast<const char*>(&len), sizeof(len));
  out += head;
  params_.ForEach([&](const std::string&, std::span<const double> s) {
    out.append(reinterpret_cast<const char*>(s.data()), s.size_bytes());
  });
  const std::uint32_t crc = Crc32(out);
  out.append(reinterpret_cast<const char*>(&crc), sizeof(crc));
  return out;
}

TokenizerModel TokenizerModel::Deserialize(std::string_view bytes) {
  auto corrupt = [](const std::string& why) {
    throw Error(ErrorKind::kSchema, "tokenizer model: " + why);
  };
  if (bytes.size() < sizeof(kMagic) + 8 + 4) corrupt("file is truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) corrupt("bad magic");
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
  if (Crc32(bytes.substr(0, bytes.size() - 4)) != stored_crc) corrupt("CRC mismatch");
  std::uint64_t len;
  std::memcpy(&len, bytes.data() + sizeof(kMagic), 8);
  std::size_t pos = sizeof(kMagic) + 8;
  if (len > bytes.size() - pos - 4) corrupt("header length exceeds file");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, len));
  } catch (const nlohmann::json::exception& ex) {
    corrupt(std::string("header is not JSON: ") + ex.what());
  }
  pos += len;
  if (header.value("schema_version", 0) != kSchemaVersion) corrupt("unsupported schema_version");
  TokenizerModel model;
  try {
    const Canvas canvas{header.at("canvas").at(0).get<int>(), header.at("canvas").at(1).get<int>()};
    model = Initialize(ConfigFromJson(header.at("config")), canvas);
  } catch (const nlohmann::json::exception& ex) {
    corrupt(std::string("header: ") + ex.what());
  }
  const auto& tensors = header.at("tensors");
  std::size_t t = 0;
  model.params_.ForEach([&](const std::string& name, std::span<double> s) {
    if (t >= tensors.size() || tensors[t].value("name", "") != name ||
        tensors[t].value("size", std::size_t{0}) != s.size()) {
      corrupt("tensor table does not match the configuration at '" + name + "'");
    }
    if (pos + s.size_bytes() > bytes.size() - 4) corrupt("tensor data is truncated");
    std::memcpy(s.data(), bytes.data() + pos, s.size_bytes());
    pos += s.size_bytes();
    ++t;
  });
  if (t != tensors.size() || pos != bytes.size() - 4) corrupt("trailing tensor data");
  return model;
}

void TokenizerModel::Save(const std::string& path) const {
  const std::string bytes = Serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing '" + path + "'");
}

TokenizerModel TokenizerModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Deserialize(buf.str());
}

}  // namespace lato::tokenizer
