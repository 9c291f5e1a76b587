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

#include "lato/fuser.hpp"

#include <cmath>
#include <string>

#include "lato/error.hpp"

namespace lato::fuser {
namespace {

struct Projected {
  RowMatrix q, k, v;
};

void RequireWidth(const RowMatrix& m, Eigen::Index d, const char* what) {
  if (m.rows() > 0 && m.cols() != d) {
    throw Error(ErrorKind::kShape, std::string(what) + " width " + std::to_string(m.cols()) +
                                       " does not match d_model " + std::to_string(d));
  }
}

void Rope(RowMatrix& m, const std::vector<PositionTriple>& positions,
          const AttentionBlockParams& params) {
  const Eigen::Index dh = m.cols() / params.heads;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (int h = 0; h < params.heads; ++h) {
      posenc::ApplyRopeInPlace({m.data() + r * m.cols() + h * dh, static_cast<std::size_t>(dh)},
                               positions[r], params.layout);
    }
  }
}

Projected Project(const TokenSequence& seq, const AttentionBlockParams& params) {
  params.Validate();
  if (seq.d_model() != params.wq.rows()) {
    throw Error(ErrorKind::kShape, "sequence width does not match the attention weights");
  }
  if (static_cast<Eigen::Index>(seq.positions.size()) != seq.length()) {
    throw Error(ErrorKind::kShape, "position list length differs from token count");
  }
  if (!seq.tokens.allFinite()) throw Error(ErrorKind::kNumeric, "non-finite token in sequence");
  Projected p;
  p.q.noalias() = seq.tokens * params.wq.transpose();
  p.k.noalias() = seq.tokens * params.wk.transpose();
  p.v.noalias() = seq.tokens * params.wv.transpose();
  Rope(p.q, seq.positions, params);
  Rope(p.k, seq.positions, params);
  return p;
}

RowMatrix Gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace

Eigen::Index TokenSequence::SegmentLength(Segment s) const {
  const auto i = static_cast<std::size_t>(s);
  return offsets[i + 1] - offsets[i];
}

void AttentionBlockParams::Validate() const {
  const Eigen::Index d = wq.rows();
  for (const RowMatrix* w : {&wq, &wk, &wv, &wo}) {
    if (w->rows() != d || w->cols() != d) {
      throw Error(ErrorKind::kShape, "attention weights must all be d_model x d_model");
    }
  }
  if (heads < 1 || d % heads != 0) {
    throw Error(ErrorKind::kShape, "d_model " + std::to_string(d) +
                                       " is not divisible by head count " + std::to_string(heads));
  }
  layout.Validate();
  if (layout.head_dim() != d / heads) {
    throw Error(ErrorKind::kShape, "rotary layout covers " + std::to_string(layout.head_dim()) +
                                       " dims but each head has " + std::to_string(d / heads));
  }
}

AttentionBlockParams AttentionBlockParams::Random(int d_model, int heads, std::uint64_t seed) {
  if (heads < 1 || d_model % heads != 0) {
    throw Error(ErrorKind::kShape, "d_model must be divisible by the head count");
  }
  std::mt19937_64 rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(d_model));
  AttentionBlockParams p;
  p.wq = Gaussian(d_model, d_model, sd, rng);
  p.wk = Gaussian(d_model, d_model, sd, rng);
  p.wv = Gaussian(d_model, d_model, sd, rng);
  p.wo = Gaussian(d_model, d_model, sd, rng);
  p.heads = heads;
  p.layout = posenc::RopeLayout::ForHeadDim(d_model / heads);
  return p;
}

RowMatrix LandmarkAdapter::Apply(const RowMatrix& embeddings) const {
  if (embeddings.cols() != w.cols() || b.size() != w.rows()) {
    throw Error(ErrorKind::kShape, "landmark embeddings width " +
                                       std::to_string(embeddings.cols()) +
                                       " does not match adapter input " + std::to_string(w.cols()));
  }
  RowMatrix out = embeddings * w.transpose();
  out.rowwise() += b.transpose();
  return out;
}

LandmarkAdapter LandmarkAdapter::Random(int d_code, int d_model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LandmarkAdapter a;
  a.w = Gaussian(d_model, d_code, 1.0 / std::sqrt(static_cast<double>(d_code)), rng);
  a.b = Eigen::VectorXd::Zero(d_model);
  return a;
}

void UncondTokens::Validate() const {
  if (tokens.rows() != static_cast<Eigen::Index>(LandmarkSet::kNumPoints)) {
    throw Error(ErrorKind::kShape, "unconditional tokens must have 68 rows");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::kConfig, "rho must lie in [0, 1]");
}

UncondTokens UncondTokens::Random(int d_model, std::uint64_t seed, double rho) {
  std::mt19937_64 rng(seed);
  UncondTokens u{Gaussian(static_cast<Eigen::Index>(LandmarkSet::kNumPoints), d_model, 0.02, rng),
                 rho};
  u.Validate();
  return u;
}

TokenSequence Assemble(const RowMatrix& z_t, const RowMatrix& z_s, const LandmarkCondition* cond,
                       const RowMatrix& z_n, const GridSpec& grid) {
  const Eigen::Index d = z_n.cols();
  RequireWidth(z_t, d, "text tokens");
  RequireWidth(z_s, d, "source tokens");
  const Eigen::Index cells = static_cast<Eigen::Index>(grid.grid_h) * grid.grid_w;
  if (z_s.rows() != cells || z_n.rows() != cells) {
    throw Error(ErrorKind::kShape, "image segments must hold grid_h * grid_w = " +
                                       std::to_string(cells) + " tokens");
  }
  RowMatrix z_f;
  std::vector<PositionTriple> p_f;  // stays empty without a condition
  if (cond != nullptr) {
    if (cond->tokens == nullptr || cond->landmarks == nullptr || cond->adapter == nullptr) {
      throw Error(ErrorKind::kConfig, "landmark condition is incomplete");
    }
    z_f = cond->adapter->Apply(cond->tokens->embeddings);
    RequireWidth(z_f, d, "adapted landmark tokens");
    if (z_f.rows() != static_cast<Eigen::Index>(LandmarkSet::kNumPoints)) {
      throw Error(ErrorKind::kShape, "facial segment must hold 68 tokens");
    }
    p_f = posenc::LandmarkPositions(*cond->landmarks, grid.stride);
  }

  TokenSequence seq;
  const std::array<Eigen::Index, 4> lengths = {z_t.rows(), z_s.rows(), z_f.rows(), z_n.rows()};
  seq.offsets[0] = 0;
  for (std::size_t i = 0; i < 4; ++i) seq.offsets[i + 1] = seq.offsets[i] + lengths[i];
  seq.tokens.resize(seq.offsets[4], d);
  const std::array<const RowMatrix*, 4> parts = {&z_t, &z_s, &z_f, &z_n};
  for (std::size_t i = 0; i < 4; ++i) {
    if (lengths[i] > 0) seq.tokens.middleRows(seq.offsets[i], lengths[i]) = *parts[i];
  }
  const auto p_t = posenc::TextPositions(static_cast<int>(z_t.rows()));
  const auto p_img = posenc::ImagePositions(grid.grid_h, grid.grid_w, grid.order);
  seq.positions.reserve(seq.offsets[4]);
  const std::array<const std::vector<PositionTriple>*, 4> groups = {&p_t, &p_img, &p_f, &p_img};
  for (const auto* ps : groups) seq.positions.insert(seq.positions.end(), ps->begin(), ps->end());
  return seq;
}

RowMatrix AttentionForward(const TokenSequence& seq, const AttentionBlockParams& params) {
  const Projected p = Project(seq, params);
  return kernels::MultiHeadAttention(p.q, p.k, p.v, params.heads) * params.wo.transpose();
}

RowMatrix AttentionForwardReference(const TokenSequence& seq, const AttentionBlockParams& params) {
  const Projected p = Project(seq, params);
  return kernels::reference::MultiHeadAttention(p.q, p.k, p.v, params.heads) *
         params.wo.transpose();
}

RowMatrix AttentionProbabilities(const TokenSequence& seq, const AttentionBlockParams& params,
                                 int head) {
  if (head < 0 || head >= params.heads) throw Error(ErrorKind::kRange, "head index out of range");
  const Projected p = Project(seq, params);
  const Eigen::Index dh = p.q.cols() / params.heads;
  RowMatrix logits = p.q.middleCols(head * dh, dh) * p.k.middleCols(head * dh, dh).transpose() /
                     std::sqrt(static_cast<double>(dh));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    logits.row(i) = (logits.row(i).array() - logits.row(i).maxCoeff()).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

ReplaceResult ReplaceUncond(const TokenSequence& seq, const UncondTokens& uncond,
                            std::mt19937_64& rng) {
  uncond.Validate();
  if (!seq.HasLandmarks()) {
    throw Error(ErrorKind::kShape, "sequence has no facial segment to replace");
  }
  if (uncond.tokens.cols() != seq.d_model()) {
    throw Error(ErrorKind::kShape, "unconditional token width does not match d_model");
  }
  ReplaceResult out{seq, false};
  std::bernoulli_distribution draw(uncond.rho);
  if (draw(rng)) {
    out.replaced = true;
    out.sequence.tokens.middleRows(seq.offsets[2], seq.SegmentLength(Segment::kFacial)) =
        uncond.tokens;
  }
  return out;
}

RowMatrix CfgCombine(const RowMatrix& uncond_out, const RowMatrix& cond_out, double w) {
  if (uncond_out.rows() != cond_out.rows() || uncond_out.cols() != cond_out.cols()) {
    throw Error(ErrorKind::kShape, "CFG inputs differ in shape");
  }
  if (w == 0.0) return uncond_out;
  if (w == 1.0) return cond_out;
  return (1.0 - w) * uncond_out + w * cond_out;
}

CostReport AttentionCost(const SequenceLengths& lengths, std::int64_t rendered_tokens) {
  if (lengths.text < 0 || lengths.source < 0 || lengths.facial < 0 || lengths.noisy < 0 ||
      rendered_tokens < 0) {
    throw Error(ErrorKind::kRange, "sequence lengths must be non-negative");
  }
  CostReport r;
  r.lengths = lengths;
  r.rendered_tokens = rendered_tokens;
  r.baseline_total = lengths.text + lengths.source + lengths.noisy;
  r.landmark_total = r.baseline_total + lengths.facial;
  r.rendered_total = r.baseline_total + rendered_tokens;
  const auto sq = [](std::int64_t n) { return static_cast<double>(n) * static_cast<double>(n); };
  r.baseline_logits = sq(r.baseline_total);
  r.landmark_logits = sq(r.landmark_total);
  r.rendered_logits = sq(r.rendered_total);
  r.relative_cost = r.rendered_logits > 0 ? r.landmark_logits / r.rendered_logits : 0.0;
  return r;
}

nlohmann::json ToJson(const CostReport& r) {
  return {
      {"lengths",
       {{"text", r.lengths.text},
        {"source", r.lengths.source},
        {"facial", r.lengths.facial},
        {"noisy", r.lengths.noisy}}},
      {"rendered_tokens", r.rendered_tokens},
      {"baseline", {{"tokens", r.baseline_total}, {"logits", r.baseline_logits}}},
      {"landmark_tokens", {{"tokens", r.landmark_total}, {"logits", r.landmark_logits}}},
      {"rendered_image", {{"tokens", r.rendered_total}, {"logits", r.rendered_logits}}},
      {"relative_cost_vs_rendered", r.relative_cost},
  };
}

}  // namespace lato::fuser
