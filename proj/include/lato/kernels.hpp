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

#ifndef LATO_KERNELS_HPP_
#define LATO_KERNELS_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lato/image.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP version (top-level
// namespace) and a serial version under `reference` with identical
// semantics; the tests hold them against each other and the benchmark
// compares their throughput.
namespace lato::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Index of the nearest codebook row (squared Euclidean) for every latent row.
// Ties go to the lowest index.
std::vector<int> NearestCodes(const RowMatrix& latents, const RowMatrix& codebook);

// Laplacian (3x3, 4-neighbour) of the Gaussian-smoothed image (sigma, 7 taps
// for sigma = 1), mirror padding without edge repeat. Row-major, same size.
std::vector<double> LogResponse(const GrayImage& image, double sigma = 1.0);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

// Mean of the local SSIM map over all fully-contained windows.
double MeanSsim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});

// softmax(Q K^T / sqrt(d_head)) V per head; Q, K, V are L x (heads * d_head).
RowMatrix MultiHeadAttention(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v,
                             int heads);

struct CosineSummary {
  double mean_abs = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double max = -1.0;
  std::uint64_t pairs = 0;
};

// Statistics of cos(row_i, row_j) over all i < j of unit-norm rows.
CosineSummary PairwiseCosine(const RowMatrix& unit_rows);

namespace reference {
std::vector<int> NearestCodes(const RowMatrix& latents, const RowMatrix& codebook);
std::vector<double> LogResponse(const GrayImage& image, double sigma = 1.0);
double MeanSsim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});
RowMatrix MultiHeadAttention(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v,
                             int heads);
CosineSummary PairwiseCosine(const RowMatrix& unit_rows);
}  // namespace reference

// Population variance of a response map.
double Variance(const std::vector<double>& values);

}  // namespace lato::kernels

#endif  // LATO_KERNELS_HPP_
