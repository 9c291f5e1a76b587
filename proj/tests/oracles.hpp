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

#ifndef LATO_TESTS_ORACLES_HPP_
#define LATO_TESTS_ORACLES_HPP_

// Straight-line reference computations written independently of src/. They
// trade speed for obviousness and share no code with the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lato/image.hpp"

namespace lato::oracle {

inline int Reflect101(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline std::vector<double> GaussianTaps(int size, double sigma) {
  std::vector<double> g(size);
  double total = 0;
  for (int i = 0; i < size; ++i) {
    const double x = i - (size - 1) / 2.0;
    g[i] = std::exp(-x * x / (2 * sigma * sigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Full 7x7 Gaussian by direct 2-D convolution, then the 4-neighbour
// Laplacian, both with reflect-101 borders.
inline std::vector<double> LogResponse(const GrayImage& img) {
  const int w = img.width, h = img.height;
  const std::vector<double> g = GaussianTaps(7, 1.0);
  std::vector<double> blur(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int j = -3; j <= 3; ++j) {
        for (int i = -3; i <= 3; ++i) {
          s += g[j + 3] * g[i + 3] * img.at(Reflect101(x + i, w), Reflect101(y + j, h));
        }
      }
      blur[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  auto b = [&](int x, int y) { return blur[static_cast<std::size_t>(Reflect101(y, h)) * w + Reflect101(x, w)]; };
  std::vector<double> out(blur.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out[static_cast<std::size_t>(y) * w + x] = b(x - 1, y) + b(x + 1, y) + b(x, y - 1) + b(x, y + 1) - 4 * b(x, y);
    }
  }
  return out;
}

inline double Variance(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

// Gaussian-weighted SSIM averaged over every window fully inside the image.
inline double Ssim(const GrayImage& a, const GrayImage& b) {
  const int win = 11;
  const std::vector<double> g = GaussianTaps(win, 1.5);
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  double total = 0;
  int count = 0;
  for (int y0 = 0; y0 + win <= a.height; ++y0) {
    for (int x0 = 0; x0 + win <= a.width; ++x0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int j = 0; j < win; ++j) {
        for (int i = 0; i < win; ++i) {
          const double wt = g[i] * g[j];
          const double va = a.at(x0 + i, y0 + j), vb = b.at(x0 + i, y0 + j);
          ma += wt * va;
          mb += wt * vb;
          saa += wt * va * va;
          sbb += wt * vb * vb;
          sab += wt * va * vb;
        }
      }
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
      ++count;
    }
  }
  return total / count;
}

// Exhaustive nearest row; strict comparison keeps the first minimum.
template <typename Matrix>
std::vector<int> NearestRows(const Matrix& latents, const Matrix& codebook) {
  std::vector<int> out(latents.rows());
  for (int r = 0; r < latents.rows(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < codebook.rows(); ++k) {
      double d = 0;
      for (int c = 0; c < latents.cols(); ++c) {
        const double diff = latents(r, c) - codebook(k, c);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        out[r] = k;
      }
    }
  }
  return out;
}

}  // namespace lato::oracle

#endif  // LATO_TESTS_ORACLES_HPP_
