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

#include "lato/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lato/error.hpp"

namespace lato::kernels {
namespace {

// Shared per-row bodies: the parallel and reference drivers differ only in
// how they iterate, so their results agree bit for bit.

int NearestRow(const RowMatrix& latents, Eigen::Index i, const RowMatrix& codebook) {
  const Eigen::Index d = codebook.cols();
  const double* z = latents.data() + i * d;
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < codebook.rows(); ++j) {
    const double* c = codebook.data() + j * d;
    double dist = 0.0;
#pragma omp simd reduction(+ : dist)
    for (Eigen::Index k = 0; k < d; ++k) {
      const double diff = z[k] - c[k];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(j);
    }
  }
  return best;
}

void CheckNearestShapes(const RowMatrix& latents, const RowMatrix& codebook) {
  if (codebook.rows() == 0) throw Error(ErrorKind::kConfig, "codebook is empty");
  if (latents.cols() != codebook.cols()) {
    throw Error(ErrorKind::kShape, "latent width " + std::to_string(latents.cols()) +
                                       " does not match code dimension " +
                                       std::to_string(codebook.cols()));
  }
}

inline int Mirror(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

std::vector<double> GaussianTaps(double sigma, int radius) {
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    sum += taps[k + radius];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

struct LogPlan {
  int w, h, radius;
  std::vector<double> taps;
};

LogPlan MakeLogPlan(const GrayImage& image, double sigma) {
  if (!(sigma > 0)) throw Error(ErrorKind::kConfig, "LoG sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  if (image.width < 2 * radius + 1 || image.height < 2 * radius + 1) {
    throw Error(ErrorKind::kShape, "image is smaller than the LoG support");
  }
  return {image.width, image.height, radius, GaussianTaps(sigma, radius)};
}

void LogRowH(const LogPlan& p, const GrayImage& img, int y, double* out) {
  for (int x = 0; x < p.w; ++x) {
    double s = 0.0;
    for (int k = -p.radius; k <= p.radius; ++k) s += p.taps[k + p.radius] * img.at(Mirror(x + k, p.w), y);
    out[x] = s;
  }
}

void LogRowV(const LogPlan& p, const std::vector<double>& h, int y, double* out) {
  for (int x = 0; x < p.w; ++x) {
    double s = 0.0;
    for (int k = -p.radius; k <= p.radius; ++k) {
      s += p.taps[k + p.radius] * h[static_cast<std::size_t>(Mirror(y + k, p.h)) * p.w + x];
    }
    out[x] = s;
  }
}

void LogRowLaplacian(const LogPlan& p, const std::vector<double>& g, int y, double* out) {
  const auto at = [&](int xx, int yy) {
    return g[static_cast<std::size_t>(Mirror(yy, p.h)) * p.w + Mirror(xx, p.w)];
  };
  for (int x = 0; x < p.w; ++x) {
    out[x] = at(x - 1, y) + at(x + 1, y) + at(x, y - 1) + at(x, y + 1) - 4.0 * at(x, y);
  }
}

struct SsimPlan {
  int w, h, win, ow, oh;
  std::vector<double> taps;
  double c1, c2;
};

SsimPlan MakeSsimPlan(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorKind::kShape, "SSIM inputs differ in size");
  }
  if (params.window < 1 || params.window % 2 == 0) {
    throw Error(ErrorKind::kConfig, "SSIM window must be odd");
  }
  if (a.width < params.window || a.height < params.window) {
    throw Error(ErrorKind::kShape, "SSIM inputs are smaller than the window");
  }
  SsimPlan p;
  p.w = a.width;
  p.h = a.height;
  p.win = params.window;
  p.ow = a.width - params.window + 1;
  p.oh = a.height - params.window + 1;
  p.taps = GaussianTaps(params.sigma, params.window / 2);
  p.c1 = std::pow(params.k1 * params.dynamic_range, 2);
  p.c2 = std::pow(params.k2 * params.dynamic_range, 2);
  return p;
}

// Horizontal pass for one input row: five filtered signals (a, b, a^2, b^2, ab).
void SsimRowH(const SsimPlan& p, const GrayImage& a, const GrayImage& b, int y, double* out) {
  for (int x = 0; x < p.ow; ++x) {
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int k = 0; k < p.win; ++k) {
      const double t = p.taps[k];
      const double va = a.at(x + k, y);
      const double vb = b.at(x + k, y);
      sa += t * va;
      sb += t * vb;
      saa += t * va * va;
      sbb += t * vb * vb;
      sab += t * va * vb;
    }
    double* o = out + 5 * x;
    o[0] = sa;
    o[1] = sb;
    o[2] = saa;
    o[3] = sbb;
    o[4] = sab;
  }
}

// Vertical pass and SSIM formula for one output row; returns the row sum.
double SsimRowMap(const SsimPlan& p, const std::vector<double>& h, int y) {
  double row_sum = 0.0;
  const std::size_t stride = static_cast<std::size_t>(5) * p.ow;
  for (int x = 0; x < p.ow; ++x) {
    double m[5] = {0, 0, 0, 0, 0};
    for (int k = 0; k < p.win; ++k) {
      const double* src = h.data() + static_cast<std::size_t>(y + k) * stride + 5 * x;
      for (int c = 0; c < 5; ++c) m[c] += p.taps[k] * src[c];
    }
    const double mu_a = m[0], mu_b = m[1];
    const double var_a = m[2] - mu_a * mu_a;
    const double var_b = m[3] - mu_b * mu_b;
    const double cov = m[4] - mu_a * mu_b;
    row_sum += ((2.0 * mu_a * mu_b + p.c1) * (2.0 * cov + p.c2)) /
               ((mu_a * mu_a + mu_b * mu_b + p.c1) * (var_a + var_b + p.c2));
  }
  return row_sum;
}

void CheckAttentionShapes(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v, int heads) {
  if (heads < 1 || q.cols() % heads != 0) {
    throw Error(ErrorKind::kShape, "model width is not divisible by the head count");
  }
  if (k.rows() != q.rows() || v.rows() != q.rows() || k.cols() != q.cols() ||
      v.cols() != q.cols()) {
    throw Error(ErrorKind::kShape, "Q, K and V shapes differ");
  }
}

void AttentionRow(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v, int heads,
                  Eigen::Index i, int head, RowMatrix& out) {
  const Eigen::Index dh = q.cols() / heads;
  const Eigen::Index off = head * dh;
  const Eigen::Index n = q.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> logits(n);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    logits[j] = q.row(i).segment(off, dh).dot(k.row(j).segment(off, dh)) * scale;
    max_logit = std::max(max_logit, logits[j]);
  }
  double denom = 0.0;
  for (auto& l : logits) {
    l = std::exp(l - max_logit);
    denom += l;
  }
  for (Eigen::Index c = 0; c < dh; ++c) out(i, off + c) = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double w = logits[j] / denom;
    for (Eigen::Index c = 0; c < dh; ++c) out(i, off + c) += w * v(j, off + c);
  }
}

struct CosinePartial {
  double abs_sum = 0, sum = 0, sq_sum = 0, max = -1.0;
};

CosinePartial CosineRow(const RowMatrix& u, Eigen::Index i) {
  CosinePartial p;
  for (Eigen::Index j = i + 1; j < u.rows(); ++j) {
    const double c = u.row(i).dot(u.row(j));
    p.abs_sum += std::fabs(c);
    p.sum += c;
    p.sq_sum += c * c;
    p.max = std::max(p.max, c);
  }
  return p;
}

CosineSummary Reduce(const std::vector<CosinePartial>& parts, Eigen::Index rows) {
  CosineSummary s;
  s.pairs = static_cast<std::uint64_t>(rows) * (rows - 1) / 2;
  if (s.pairs == 0) return s;
  double abs_sum = 0, sum = 0, sq_sum = 0;
  for (const auto& p : parts) {
    abs_sum += p.abs_sum;
    sum += p.sum;
    sq_sum += p.sq_sum;
    s.max = std::max(s.max, p.max);
  }
  const double n = static_cast<double>(s.pairs);
  s.mean_abs = abs_sum / n;
  s.mean = sum / n;
  s.stddev = std::sqrt(std::max(0.0, sq_sum / n - s.mean * s.mean));
  return s;
}

}  // namespace

std::vector<int> NearestCodes(const RowMatrix& latents, const RowMatrix& codebook) {
  CheckNearestShapes(latents, codebook);
  std::vector<int> out(latents.rows());
  const Eigen::Index n = latents.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) out[i] = NearestRow(latents, i, codebook);
  return out;
}

std::vector<double> LogResponse(const GrayImage& image, double sigma) {
  const LogPlan p = MakeLogPlan(image, sigma);
  const std::size_t w = p.w;
  std::vector<double> h(w * p.h), g(w * p.h), out(w * p.h);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < p.h; ++y) LogRowH(p, image, y, h.data() + y * w);
#pragma omp for schedule(static)
    for (int y = 0; y < p.h; ++y) LogRowV(p, h, y, g.data() + y * w);
#pragma omp for schedule(static)
    for (int y = 0; y < p.h; ++y) LogRowLaplacian(p, g, y, out.data() + y * w);
  }
  return out;
}

double MeanSsim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
  const SsimPlan p = MakeSsimPlan(a, b, params);
  const std::size_t stride = static_cast<std::size_t>(5) * p.ow;
  std::vector<double> h(stride * p.h);
  std::vector<double> row_sums(p.oh);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < p.h; ++y) SsimRowH(p, a, b, y, h.data() + y * stride);
#pragma omp for schedule(static)
    for (int y = 0; y < p.oh; ++y) row_sums[y] = SsimRowMap(p, h, y);
  }
  double total = 0.0;
  for (double s : row_sums) total += s;
  return total / (static_cast<double>(p.ow) * p.oh);
}

RowMatrix MultiHeadAttention(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v,
                             int heads) {
  CheckAttentionShapes(q, k, v, heads);
  RowMatrix out(q.rows(), q.cols());
  const Eigen::Index n = q.rows();
#pragma omp parallel for collapse(2) schedule(static)
  for (int head = 0; head < heads; ++head) {
    for (Eigen::Index i = 0; i < n; ++i) AttentionRow(q, k, v, heads, i, head, out);
  }
  return out;
}

CosineSummary PairwiseCosine(const RowMatrix& unit_rows) {
  std::vector<CosinePartial> parts(unit_rows.rows());
  const Eigen::Index n = unit_rows.rows();
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) parts[i] = CosineRow(unit_rows, i);
  return Reduce(parts, n);
}

namespace reference {

std::vector<int> NearestCodes(const RowMatrix& latents, const RowMatrix& codebook) {
  CheckNearestShapes(latents, codebook);
  std::vector<int> out(latents.rows());
  for (Eigen::Index i = 0; i < latents.rows(); ++i) out[i] = NearestRow(latents, i, codebook);
  return out;
}

std::vector<double> LogResponse(const GrayImage& image, double sigma) {
  const LogPlan p = MakeLogPlan(image, sigma);
  const std::size_t w = p.w;
  std::vector<double> h(w * p.h), g(w * p.h), out(w * p.h);
  for (int y = 0; y < p.h; ++y) LogRowH(p, image, y, h.data() + y * w);
  for (int y = 0; y < p.h; ++y) LogRowV(p, h, y, g.data() + y * w);
  for (int y = 0; y < p.h; ++y) LogRowLaplacian(p, g, y, out.data() + y * w);
  return out;
}

double MeanSsim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
  const SsimPlan p = MakeSsimPlan(a, b, params);
  const std::size_t stride = static_cast<std::size_t>(5) * p.ow;
  std::vector<double> h(stride * p.h);
  for (int y = 0; y < p.h; ++y) SsimRowH(p, a, b, y, h.data() + y * stride);
  double total = 0.0;
  for (int y = 0; y < p.oh; ++y) total += SsimRowMap(p, h, y);
  return total / (static_cast<double>(p.ow) * p.oh);
}

RowMatrix MultiHeadAttention(const RowMatrix& q, const RowMatrix& k, const RowMatrix& v,
                             int heads) {
  CheckAttentionShapes(q, k, v, heads);
  RowMatrix out(q.rows(), q.cols());
  for (int head = 0; head < heads; ++head) {
    for (Eigen::Index i = 0; i < q.rows(); ++i) AttentionRow(q, k, v, heads, i, head, out);
  }
  return out;
}

CosineSummary PairwiseCosine(const RowMatrix& unit_rows) {
  std::vector<CosinePartial> parts(unit_rows.rows());
  for (Eigen::Index i = 0; i < unit_rows.rows(); ++i) parts[i] = CosineRow(unit_rows, i);
  return Reduce(parts, unit_rows.rows());
}

}  // namespace reference

double Variance(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return sq / static_cast<double>(values.size());
}

}  // namespace lato::kernels
