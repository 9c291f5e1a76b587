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

#ifndef LATO_FUSER_HPP_
#define LATO_FUSER_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "json.hpp"
#include "lato/kernels.hpp"
#include "lato/landmarks.hpp"
#include "lato/posenc.hpp"
#include "lato/tokenizer.hpp"

namespace lato::fuser {

using kernels::RowMatrix;
using posenc::PositionTriple;

enum class Segment { kText = 0, kSource = 1, kFacial = 2, kNoisy = 3 };

// Concat(z_t, z_s, z_f, z_n) with one position per token.
struct TokenSequence {
  RowMatrix tokens;
  std::vector<PositionTriple> positions;
  // offsets[s] is the first row of segment s; offsets[4] is the length.
  std::array<Eigen::Index, 5> offsets{};

  Eigen::Index length() const { return tokens.rows(); }
  Eigen::Index d_model() const { return tokens.cols(); }
  Eigen::Index SegmentLength(Segment s) const;
  bool HasLandmarks() const { return SegmentLength(Segment::kFacial) > 0; }
};

struct AttentionBlockParams {
  RowMatrix wq, wk, wv, wo;  // d_model x d_model, applied as z * W^T
  int heads = 1;
  posenc::RopeLayout layout;

  // Throws Error(kShape) / kConfig on inconsistent shapes or layout.
  void Validate() const;
  // Gaussian weights with std 1 / sqrt(d_model); layout split from the head dim.
  static AttentionBlockParams Random(int d_model, int heads, std::uint64_t seed);
};

struct LandmarkAdapter {
  RowMatrix w;        // d_model x d_code
  Eigen::VectorXd b;  // d_model

  RowMatrix Apply(const RowMatrix& embeddings) const;
  static LandmarkAdapter Random(int d_code, int d_model, std::uint64_t seed);
};

struct UncondTokens {
  RowMatrix tokens;  // 68 x d_model
  double rho = 0.1;

  void Validate() const;
  static UncondTokens Random(int d_model, std::uint64_t seed, double rho = 0.1);
};

struct LandmarkCondition {
  const tokenizer::FacialTokens* tokens = nullptr;
  const LandmarkSet* landmarks = nullptr;  // drives the location-mapped positions
  const LandmarkAdapter* adapter = nullptr;
};

struct GridSpec {
  int grid_h = 32;
  int grid_w = 32;
  int stride = 16;
  posenc::GridOrder order = posenc::GridOrder::kRowMajor;
};

// Throws Error(kShape) when widths disagree or an image segment does not
// match the grid.
TokenSequence Assemble(const RowMatrix& z_t, const RowMatrix& z_s, const LandmarkCondition* cond,
                       const RowMatrix& z_n, const GridSpec& grid = {});

// Full bidirectional attention with rotary Q/K and plain V, then W_o.
// Throws Error(kNumeric) on non-finite input.
RowMatrix AttentionForward(const TokenSequence& seq, const AttentionBlockParams& params);
// Same computation with the serial attention kernel.
RowMatrix AttentionForwardReference(const TokenSequence& seq, const AttentionBlockParams& params);
// Softmax probabilities of one head, length x length.
RowMatrix AttentionProbabilities(const TokenSequence& seq, const AttentionBlockParams& params,
                                 int head);

struct ReplaceResult {
  TokenSequence sequence;
  bool replaced = false;
};

// One Bernoulli(rho) draw per sequence; on success the facial segment is
// overwritten with the unconditional rows and its positions kept.
ReplaceResult ReplaceUncond(const TokenSequence& seq, const UncondTokens& uncond,
                            std::mt19937_64& rng);

// uncond + w (cond - uncond), evaluated as (1 - w) uncond + w cond so that
// w = 0 and w = 1 reproduce their inputs exactly.
RowMatrix CfgCombine(const RowMatrix& uncond_out, const RowMatrix& cond_out, double w);

struct SequenceLengths {
  std::int64_t text = 77;
  std::int64_t source = 1024;
  std::int64_t facial = 68;
  std::int64_t noisy = 1024;
};

struct CostReport {
  SequenceLengths lengths;
  std::int64_t rendered_tokens = 1024;
  std::int64_t baseline_total = 0;  // no landmark condition
  std::int64_t landmark_total = 0;
  std::int64_t rendered_total = 0;
  double baseline_logits = 0;
  double landmark_logits = 0;
  double rendered_logits = 0;
  double relative_cost = 0;  // landmark_logits / rendered_logits
};

// Closed-form token and pairwise-logit counts. Throws Error(kRange) on a
// negative length.
CostReport AttentionCost(const SequenceLengths& lengths, std::int64_t rendered_tokens = 1024);
nlohmann::json ToJson(const CostReport& report);

}  // namespace lato::fuser

#endif  // LATO_FUSER_HPP_
