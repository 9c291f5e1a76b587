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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lato/error.hpp"
#include "lato/fuser.hpp"
#include "support.hpp"

namespace lato::fuser {
namespace {

RowMatrix Gaussian(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  RowMatrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

RowMatrix FromJson(const nlohmann::json& rows) {
  RowMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

TokenSequence Manual(const RowMatrix& tokens, std::vector<PositionTriple> positions) {
  TokenSequence s;
  s.tokens = tokens;
  s.positions = std::move(positions);
  s.offsets = {0, tokens.rows(), tokens.rows(), tokens.rows(), tokens.rows()};
  return s;
}

// Small grid so image segments stay cheap: 4 x 4 cells of 128 px.
const GridSpec kSmallGrid{4, 4, 128, posenc::GridOrder::kRowMajor};

struct Fixture {
  tokenizer::FacialTokens tokens;
  LandmarkSet landmarks = testing::SampleSource();
  LandmarkAdapter adapter = LandmarkAdapter::Random(8, 12, 3);
  LandmarkCondition cond;

  Fixture() {
    tokens.indices.assign(68, 0);
    tokens.embeddings = Gaussian(68, 8, 2);
    cond = {&tokens, &landmarks, &adapter};
  }
};

TEST(Assemble, FullSizeLengthsAndOffsets) {
  Fixture fx;
  const LandmarkAdapter adapter = LandmarkAdapter::Random(8, 16, 3);
  fx.cond.adapter = &adapter;
  const TokenSequence s =
      Assemble(Gaussian(77, 16, 1), Gaussian(1024, 16, 2), &fx.cond, Gaussian(1024, 16, 3));
  EXPECT_EQ(s.length(), 2193);
  EXPECT_EQ(s.offsets, (std::array<Eigen::Index, 5>{0, 77, 1101, 1169, 2193}));
  EXPECT_EQ(s.positions.size(), 2193u);
  EXPECT_EQ(s.SegmentLength(Segment::kFacial), 68);
  // Facial rows carry the adapter output and the location-mapped positions.
  const RowMatrix zf = adapter.Apply(fx.tokens.embeddings);
  EXPECT_EQ(s.tokens.block(1101, 0, 68, 16), zf);
  const auto lp = posenc::LandmarkPositions(fx.landmarks, 16);
  for (int i = 0; i < 68; ++i) EXPECT_EQ(s.positions[1101 + i], lp[i]);
  EXPECT_EQ(s.positions[5], (PositionTriple{5, 0, 0}));
  EXPECT_EQ(s.positions[77 + 33], (PositionTriple{0, 1, 1}));
  EXPECT_EQ(s.positions[1169 + 1023], (PositionTriple{0, 31, 31}));
}

TEST(Assemble, WithoutLandmarks) {
  const TokenSequence s = Assemble(Gaussian(5, 12, 1), Gaussian(16, 12, 2), nullptr, Gaussian(16, 12, 3), kSmallGrid);
  EXPECT_EQ(s.length(), 37);
  EXPECT_FALSE(s.HasLandmarks());
  EXPECT_EQ(s.offsets[2], s.offsets[3]);
}

TEST(Assemble, ShapeErrors) {
  Fixture fx;
  EXPECT_THROW(Assemble(Gaussian(5, 12, 1), Gaussian(16, 10, 2), nullptr, Gaussian(16, 12, 3), kSmallGrid), Error);
  EXPECT_THROW(Assemble(Gaussian(5, 12, 1), Gaussian(15, 12, 2), nullptr, Gaussian(16, 12, 3), kSmallGrid), Error);
  const LandmarkAdapter wrong = LandmarkAdapter::Random(8, 10, 1);
  fx.cond.adapter = &wrong;
  EXPECT_THROW(Assemble(Gaussian(5, 12, 1), Gaussian(16, 12, 2), &fx.cond, Gaussian(16, 12, 3), kSmallGrid), Error);
}

TEST(Attention, GoldenFixtureFromIndependentImplementation) {
  const nlohmann::json g = nlohmann::json::parse(testing::ReadFile(testing::Fixture("attention_golden.json")));
  AttentionBlockParams p;
  p.wq = FromJson(g["wq"]);
  p.wk = FromJson(g["wk"]);
  p.wv = FromJson(g["wv"]);
  p.wo = FromJson(g["wo"]);
  p.heads = g["heads"];
  p.layout = {g["layout"][0], g["layout"][1], g["layout"][2], g["base"]};
  std::vector<PositionTriple> pos;
  for (const auto& t : g["positions"]) pos.push_back({t[0], t[1], t[2]});
  const TokenSequence s = Manual(FromJson(g["tokens"]), pos);
  const RowMatrix want = FromJson(g["output"]);
  EXPECT_LE((AttentionForward(s, p) - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((AttentionForwardReference(s, p) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attention, SingleTokenIsValueThenOutputProjection) {
  const AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 4);
  const RowMatrix z = Gaussian(1, 12, 5);
  const TokenSequence s = Manual(z, {{7, 3, 1}});
  const RowMatrix want = z * p.wv.transpose() * p.wo.transpose();
  EXPECT_LE((AttentionForward(s, p) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attention, SwappingTokensThatSharePositionSwapsOutputs) {
  const AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 6);
  const RowMatrix z = Gaussian(6, 12, 7);
  std::vector<PositionTriple> pos{{0, 0, 0}, {1, 0, 0}, {0, 2, 3}, {0, 2, 3}, {0, 5, 1}, {4, 0, 0}};
  RowMatrix swapped = z;
  swapped.row(2).swap(swapped.row(3));
  const RowMatrix a = AttentionForward(Manual(z, pos), p);
  RowMatrix b = AttentionForward(Manual(swapped, pos), p);
  b.row(2).swap(b.row(3));
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attention, ReorderingWithPositionsPermutesOutputs) {
  const AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 8);
  const RowMatrix z = Gaussian(10, 12, 9);
  std::vector<PositionTriple> pos;
  for (int i = 0; i < 10; ++i) pos.push_back({i % 3, i, 9 - i});
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(10));
  RowMatrix zp(10, 12);
  std::vector<PositionTriple> pp(10);
  for (int i = 0; i < 10; ++i) {
    zp.row(i) = z.row(perm[i]);
    pp[i] = pos[perm[i]];
  }
  const RowMatrix a = AttentionForward(Manual(z, pos), p);
  const RowMatrix b = AttentionForward(Manual(zp, pp), p);
  for (int i = 0; i < 10; ++i) EXPECT_LE((b.row(i) - a.row(perm[i])).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attention, ParallelMatchesReferenceOnAssembledSequence) {
  Fixture fx;
  const TokenSequence s = Assemble(Gaussian(5, 12, 1), Gaussian(16, 12, 2), &fx.cond, Gaussian(16, 12, 3), kSmallGrid);
  const AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 11);
  EXPECT_LE((AttentionForward(s, p) - AttentionForwardReference(s, p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attention, SoftmaxRowsSumToOne) {
  Fixture fx;
  const TokenSequence s = Assemble(Gaussian(5, 12, 4), Gaussian(16, 12, 5), &fx.cond, Gaussian(16, 12, 6), kSmallGrid);
  const AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 12);
  for (int h = 0; h < 2; ++h) {
    const RowMatrix probs = AttentionProbabilities(s, p, h);
    ASSERT_EQ(probs.rows(), s.length());
    for (int i = 0; i < probs.rows(); ++i) {
      EXPECT_NEAR(probs.row(i).sum(), 1.0, 1e-9);
      EXPECT_GE(probs.row(i).minCoeff(), 0.0);
    }
  }
}

TEST(Attention, NonFiniteInputIsANumericError) {
  const AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 13);
  RowMatrix z = Gaussian(3, 12, 14);
  z(1, 4) = std::nan("");
  try {
    AttentionForward(Manual(z, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
}

TEST(Attention, InconsistentParamsAreRejected) {
  AttentionBlockParams p = AttentionBlockParams::Random(12, 2, 15);
  p.heads = 5;
  EXPECT_THROW(p.Validate(), Error);
  AttentionBlockParams q = AttentionBlockParams::Random(12, 2, 15);
  q.wk = Gaussian(12, 10, 1);
  EXPECT_THROW(q.Validate(), Error);
}

TEST(Uncond, ReplacementRates) {
  Fixture fx;
  const TokenSequence s = Assemble(Gaussian(2, 12, 1), Gaussian(16, 12, 2), &fx.cond, Gaussian(16, 12, 3), kSmallGrid);
  std::mt19937_64 rng(2026);
  for (double rho : {0.0, 1.0}) {
    UncondTokens u = UncondTokens::Random(12, 4, rho);
    for (int t = 0; t < 10000; ++t) ASSERT_EQ(ReplaceUncond(s, u, rng).replaced, rho == 1.0);
  }
  const UncondTokens u = UncondTokens::Random(12, 4, 0.1);
  int hits = 0;
  for (int t = 0; t < 100000; ++t) hits += ReplaceUncond(s, u, rng).replaced;
  EXPECT_NEAR(hits / 1e5, 0.1, 0.005);
}

TEST(Uncond, ReplacesFacialRowsAndKeepsPositions) {
  Fixture fx;
  const TokenSequence s = Assemble(Gaussian(2, 12, 1), Gaussian(16, 12, 2), &fx.cond, Gaussian(16, 12, 3), kSmallGrid);
  const UncondTokens u = UncondTokens::Random(12, 5, 1.0);
  std::mt19937_64 rng(1);
  const ReplaceResult r = ReplaceUncond(s, u, rng);
  ASSERT_TRUE(r.replaced);
  EXPECT_EQ(r.sequence.positions, s.positions);
  const Eigen::Index f0 = s.offsets[2];
  EXPECT_EQ(r.sequence.tokens.block(f0, 0, 68, 12), u.tokens);
  EXPECT_EQ(r.sequence.tokens.topRows(f0), s.tokens.topRows(f0));
  EXPECT_EQ(r.sequence.tokens.bottomRows(16), s.tokens.bottomRows(16));
}

TEST(Uncond, ValidatesShapeAndRate) {
  UncondTokens u = UncondTokens::Random(12, 6);
  EXPECT_EQ(u.tokens.rows(), 68);
  EXPECT_DOUBLE_EQ(u.rho, 0.1);
  u.rho = 1.5;
  EXPECT_THROW(u.Validate(), Error);
  u.rho = 0.1;
  u.tokens = Gaussian(67, 12, 1);
  EXPECT_THROW(u.Validate(), Error);
}

TEST(Cfg, EndpointsAreExactAndScaleExtrapolates) {
  const RowMatrix a = Gaussian(4, 5, 1), b = Gaussian(4, 5, 2);
  EXPECT_EQ(CfgCombine(a, b, 0.0), a);
  EXPECT_EQ(CfgCombine(a, b, 1.0), b);
  EXPECT_EQ(CfgCombine(RowMatrix::Zero(1, 1), RowMatrix::Ones(1, 1), 4.0)(0, 0), 4.0);
  EXPECT_THROW(CfgCombine(a, Gaussian(4, 4, 3), 2.0), Error);
}

TEST(Cfg, AffineIdentities) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const RowMatrix a = Gaussian(3, 4, 10 + trial), b = Gaussian(3, 4, 1000 + trial);
    const double w = u(rng);
    EXPECT_LE((CfgCombine(a, b, w) + CfgCombine(b, a, w) - (a + b)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((CfgCombine(a, b, w) - CfgCombine(b, a, 1 - w)).cwiseAbs().maxCoeff(), 1e-12);
    const RowMatrix lin = a + w * (b - a);
    EXPECT_LE((CfgCombine(a, b, w) - lin).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Cost, LandmarkTokensVersusRenderedImage) {
  const CostReport r = AttentionCost({});
  EXPECT_EQ(r.landmark_total, 2193);
  EXPECT_EQ(r.rendered_total, 3149);
  EXPECT_EQ(r.baseline_total, 2125);
  EXPECT_DOUBLE_EQ(r.landmark_logits, 2193.0 * 2193.0);
  EXPECT_NEAR(r.relative_cost, (2193.0 / 3149.0) * (2193.0 / 3149.0), 1e-12);
}

TEST(Cost, NoLandmarksIsBaselineAndScalingIsQuadratic) {
  SequenceLengths none;
  none.facial = 0;
  const CostReport r = AttentionCost(none);
  EXPECT_EQ(r.landmark_logits, r.baseline_logits);
  const CostReport a = AttentionCost({10, 20, 30, 40}, 50);
  const CostReport b = AttentionCost({20, 40, 60, 80}, 100);
  EXPECT_DOUBLE_EQ(b.landmark_logits, 4 * a.landmark_logits);
  EXPECT_DOUBLE_EQ(b.rendered_logits, 4 * a.rendered_logits);
  SequenceLengths neg;
  neg.text = -1;
  EXPECT_THROW(AttentionCost(neg), Error);
  EXPECT_EQ(ToJson(a)["relative_cost_vs_rendered"].get<double>(), a.relative_cost);
}

}  // namespace
}  // namespace lato::fuser
