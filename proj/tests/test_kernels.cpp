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
#include <omp.h>

#include <cmath>
#include <random>

#include "lato/error.hpp"
#include "lato/kernels.hpp"
#include "oracles.hpp"

namespace lato::kernels {
namespace {

GrayImage Noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(u(rng));
  return img;
}

RowMatrix Gaussian(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  RowMatrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

RowMatrix NaiveAttention(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v, int heads) {
  const int L = static_cast<int>(q.rows()), dh = static_cast<int>(q.cols()) / heads;
  RowMatrix out = RowMatrix::Zero(L, q.cols());
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < L; ++i) {
      std::vector<double> logits(L);
      double mx = -1e300;
      for (int j = 0; j < L; ++j) {
        double s = 0;
        for (int c = 0; c < dh; ++c) s += q(i, h * dh + c) * k(j, h * dh + c);
        logits[j] = s / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, logits[j]);
      }
      double z = 0;
      for (double& l : logits) z += (l = std::exp(l - mx));
      for (int j = 0; j < L; ++j) {
        for (int c = 0; c < dh; ++c) out(i, h * dh + c) += logits[j] / z * v(j, h * dh + c);
      }
    }
  }
  return out;
}

class ThreadCounts : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

TEST_P(ThreadCounts, NearestCodesMatchExhaustiveScan) {
  const RowMatrix lat = Gaussian(300, 16, 1), book = Gaussian(64, 16, 2);
  const std::vector<int> want = oracle::NearestRows(lat, book);
  EXPECT_EQ(NearestCodes(lat, book), want);
  EXPECT_EQ(reference::NearestCodes(lat, book), want);
}

TEST_P(ThreadCounts, LogResponseMatchesDirectConvolution) {
  for (auto [w, h] : {std::pair{7, 7}, {17, 9}, {40, 33}}) {
    const GrayImage img = Noise(w, h, w * 100 + h);
    const std::vector<double> want = oracle::LogResponse(img);
    const std::vector<double> got = LogResponse(img), ref = reference::LogResponse(img);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-9);
      EXPECT_NEAR(ref[i], want[i], 1e-9);
    }
  }
}

TEST_P(ThreadCounts, SsimMatchesSlidingWindow) {
  const GrayImage a = Noise(40, 30, 5), b = Noise(40, 30, 6);
  const double want = oracle::Ssim(a, b);
  EXPECT_NEAR(MeanSsim(a, b), want, 1e-12);
  EXPECT_NEAR(reference::MeanSsim(a, b), want, 1e-12);
}

TEST_P(ThreadCounts, AttentionMatchesNaiveSoftmax) {
  const RowMatrix q = Gaussian(37, 12, 7), k = Gaussian(37, 12, 8), v = Gaussian(37, 12, 9);
  const RowMatrix want = NaiveAttention(q, k, v, 3);
  EXPECT_LE((MultiHeadAttention(q, k, v, 3) - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((reference::MultiHeadAttention(q, k, v, 3) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(ThreadCounts, PairwiseCosineMatchesDoubleLoop) {
  RowMatrix u = Gaussian(90, 8, 10);
  u.rowwise().normalize();
  double sum = 0, sum_abs = 0, sum_sq = 0, mx = -2;
  std::uint64_t n = 0;
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = i + 1; j < u.rows(); ++j) {
      const double c = u.row(i).dot(u.row(j));
      sum += c;
      sum_abs += std::fabs(c);
      sum_sq += c * c;
      mx = std::max(mx, c);
      ++n;
    }
  }
  const double mean = sum / n;
  for (const CosineSummary& s : {PairwiseCosine(u), reference::PairwiseCosine(u)}) {
    EXPECT_EQ(s.pairs, n);
    EXPECT_NEAR(s.mean, mean, 1e-12);
    EXPECT_NEAR(s.mean_abs, sum_abs / n, 1e-12);
    EXPECT_NEAR(s.stddev, std::sqrt(std::max(0.0, sum_sq / n - mean * mean)), 1e-9);
    EXPECT_NEAR(s.max, mx, 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Kernels, ThreadCounts, ::testing::Values(1, 2, 4));

TEST(Kernels, ParallelResultsAreBitIdenticalToReference) {
  omp_set_num_threads(3);
  const GrayImage a = Noise(64, 64, 11), b = Noise(64, 64, 12);
  EXPECT_EQ(MeanSsim(a, b), reference::MeanSsim(a, b));
  EXPECT_EQ(LogResponse(a), reference::LogResponse(a));
  omp_set_num_threads(1);
}

TEST(Kernels, NearestCodeTiesGoToLowestIndex) {
  RowMatrix book(4, 2);
  book << 1, 0, -1, 0, 0, 1, 1, 0;  // rows 0 and 3 coincide
  RowMatrix lat(2, 2);
  lat << 0, 0, 2, 0;  // first is equidistant from rows 0, 1, 2
  EXPECT_EQ(NearestCodes(lat, book), (std::vector<int>{0, 0}));
  EXPECT_EQ(reference::NearestCodes(lat, book), (std::vector<int>{0, 0}));
}

TEST(Kernels, LaplacianOfImpulse) {
  GrayImage img(21, 21, 0);
  img.at(10, 10) = 255;
  const std::vector<double> r = LogResponse(img);
  const std::vector<double> g = oracle::GaussianTaps(7, 1.0);
  // At the impulse: 4 * g0 * g1 - 4 * g0 * g0 in separable form, scaled by 255.
  const double g0 = g[3], g1 = g[2];
  EXPECT_NEAR(r[10 * 21 + 10], 255 * (4 * g0 * g1 - 4 * g0 * g0), 1e-9);
  double total = 0;
  for (double v : r) total += v;
  EXPECT_NEAR(total, 0.0, 1e-9);  // the Laplacian of a contained blob sums to zero
}

TEST(Kernels, ConstantImageHasZeroResponse) {
  const GrayImage img(16, 16, 77);
  for (double v : LogResponse(img)) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NEAR(Variance(LogResponse(img)), 0.0, 1e-20);
}

TEST(Kernels, ShapeErrors) {
  RowMatrix a(3, 4), b(3, 5), empty(0, 4);
  EXPECT_THROW(NearestCodes(a, b), Error);
  EXPECT_THROW(NearestCodes(a, empty), Error);
  EXPECT_THROW(MultiHeadAttention(a, a, a, 3), Error);
  EXPECT_THROW(MeanSsim(GrayImage(20, 20), GrayImage(21, 20)), Error);
  EXPECT_THROW(MeanSsim(GrayImage(5, 5), GrayImage(5, 5)), Error);
  EXPECT_THROW(LogResponse(GrayImage(3, 3)), Error);
}

}  // namespace
}  // namespace lato::kernels
