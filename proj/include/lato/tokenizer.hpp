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

#ifndef LATO_TOKENIZER_HPP_
#define LATO_TOKENIZER_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lato/kernels.hpp"
#include "lato/landmarks.hpp"

namespace lato::tokenizer {

using kernels::RowMatrix;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kTokens = static_cast<int>(LandmarkSet::kNumPoints);

struct TokenizerConfig {
  int m = 256;  // codebook entries
  int d = 64;   // code dimension
  double beta = 0.25;
  int blocks = 2;
  double lr = 1e-3;
  int batch = 32;
  int steps = 5000;
  int reset_interval = 50;
  std::uint64_t seed = 0;
  // Excludes the codebook-alignment term from the loss and freezes C.
  bool freeze_codebook = false;

  // Throws Error(kConfig) on any out-of-range field (d must be even, m >= 2).
  void Validate() const;
};

nlohmann::json ToJson(const TokenizerConfig& config);
// Missing keys keep their defaults; unknown keys throw Error(kConfig).
TokenizerConfig ConfigFromJson(const nlohmann::json& j);

// Kernel-3 convolution along the token axis: y[t] = b + sum_k w[k] x[t + k - 1].
struct ConvBlock {
  std::array<Matrix, 3> w;
  Vector b;
};

struct TokenizerParams {
  Matrix embed_w;  // d x 2
  Vector embed_b;  // d
  Matrix enc_index;  // d x 68 learned per-index embedding
  std::vector<ConvBlock> enc_blocks;
  Matrix dec_index;  // d x 68
  std::vector<ConvBlock> dec_blocks;
  Matrix head_w;  // 2 x d
  Vector head_b;  // 2
  RowMatrix codebook;  // m x d

  // Same shapes as `like`, all zeros.
  static TokenizerParams ZerosLike(const TokenizerParams& like);
  // Visits every tensor as a flat span together with a stable name.
  void ForEach(const std::function<void(const std::string&, std::span<double>)>& fn);
  void ForEach(const std::function<void(const std::string&, std::span<const double>)>& fn) const;
  std::size_t ParameterCount() const;
};

struct FacialTokens {
  std::vector<int> indices;  // 68 entries in [0, m)
  RowMatrix embeddings;      // 68 x d, rows of the codebook
};

class TokenizerModel {
 public:
  // Randomly initialized model; the codebook starts at zero until Train
  // seeds it from encoder outputs.
  static TokenizerModel Initialize(const TokenizerConfig& config, Canvas canvas = {});

  const TokenizerConfig& config() const { return config_; }
  const Canvas& canvas() const { return canvas_; }
  TokenizerParams& params() { return params_; }
  const TokenizerParams& params() const { return params_; }
  const RowMatrix& codebook() const { return params_.codebook; }

  // 68 x d continuous latents. Throws Error(kUnit) on a canvas mismatch.
  RowMatrix Encode(const LandmarkSet& f) const;
  // Throws Error(kShape) on a wrong length, Error(kRange) on an index >= m.
  LandmarkSet Decode(const FacialTokens& tokens) const;
  LandmarkSet Decode(std::span<const int> indices) const;
  FacialTokens Tokenize(const LandmarkSet& f) const;
  LandmarkSet Reconstruct(const LandmarkSet& f) const;

  double Normalize(double v, int extent) const;
  double Denormalize(double v, int extent) const;

  // Binary container: magic, u64 header length, JSON header, f64 LE
  // tensors, CRC32 of everything before it. Throws Error(kIo) / kSchema.
  void Save(const std::string& path) const;
  static TokenizerModel Load(const std::string& path);
  std::string Serialize() const;
  static TokenizerModel Deserialize(std::string_view bytes);

 private:
  TokenizerConfig config_;
  Canvas canvas_;
  TokenizerParams params_;
};

// Nearest codebook row per latent row; ties go to the lowest index.
// Throws Error(kConfig) on an empty codebook and Error(kShape) on width mismatch.
FacialTokens Quantize(const RowMatrix& latents, const RowMatrix& codebook);

// One optimisation batch, already normalized, in a padded d-major layout.
struct Batch {
  Matrix coords;  // 2 x (B * 70), one zero column either side of each sample
  int size = 0;
};
Batch MakeBatch(const TokenizerModel& model, std::span<const LandmarkSet> samples);

struct LossTerms {
  double reconstruction = 0.0;  // mean |F - F_hat| on normalized coordinates
  double commitment = 0.0;      // mean over tokens of |E - sg[C]|^2
  double codebook = 0.0;        // mean over tokens of |sg[E] - C|^2
  double total = 0.0;
};

struct ForwardResult {
  LossTerms loss;
  std::vector<int> indices;  // B * 68 code assignments
  Matrix latents;            // d x (B * 68) encoder outputs
};

// Loss and hand-derived gradient for a batch. `grad` must match the model's
// shapes; it is overwritten.
ForwardResult LossAndGradient(const TokenizerModel& model, const Batch& batch,
                              TokenizerParams* grad);

struct StepRecord {
  int step = 0;
  LossTerms loss;
  double reconstruction_px = 0.0;
  int codes_in_batch = 0;
};

struct ResetEvent {
  int step = 0;
  std::vector<int> reset_codes;  // unused since the previous reset
  std::vector<int> used_codes;   // used within the window
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<ResetEvent> resets;
  double seconds = 0.0;
};

struct TrainResult {
  TokenizerModel model;
  TrainLog log;
};

using ProgressFn = std::function<void(const StepRecord&)>;

// Adam with straight-through gradients across the quantizer. Throws
// Error(kConfig) when the dataset holds fewer than `batch` samples and
// Error(kNumeric) on a non-finite loss.
TrainResult Train(const TokenizerConfig& config, std::span<const LandmarkSet> dataset,
                  const ProgressFn& progress = {});

struct CodebookStats {
  kernels::CosineSummary cosine;
  std::vector<int> zero_rows;  // excluded from the cosine statistics
  bool subsampled = false;
  std::vector<std::uint64_t> histogram;  // per-code usage count
  double utilization = 0.0;              // fraction of codes with a nonzero count
};

inline constexpr int kExactStatsLimit = 4096;

// Pairwise cosine statistics over the non-zero rows (exact up to 4096 rows,
// otherwise over a seeded uniform subsample of 4096 rows) and a usage
// histogram over `indices`. Throws Error(kConfig) when m < 2.
CodebookStats ComputeCodebookStats(const RowMatrix& codebook, std::span<const int> indices = {},
                                   std::uint64_t seed = 0);

struct Evaluation {
  double mean_l1_px = 0.0;
  double utilization = 0.0;
  std::vector<std::uint64_t> histogram;
};

Evaluation EvaluateReconstruction(const TokenizerModel& model, std::span<const LandmarkSet> data);

}  // namespace lato::tokenizer

#endif  // LATO_TOKENIZER_HPP_
