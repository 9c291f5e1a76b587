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

#ifndef LATO_METRICS_HPP_
#define LATO_METRICS_HPP_

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lato/curation.hpp"
#include "lato/image.hpp"
#include "lato/instruction.hpp"

namespace lato::metrics {

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1 0.01, K2 0.03,
// L 255, valid windows only. Throws Error(kShape) on mismatched or small inputs.
double Ssim(const GrayImage& a, const GrayImage& b);

// 1 - clamp(Ssim(source, edited), 0, 1).
double RealizedAmplitude(const GrayImage& source, const GrayImage& edited);

struct AmplitudeTable {
  double slightly = 0.12;
  double normally = 0.25;
  double strongly = 0.40;
  double per_30_degrees = 0.15;  // per 30 degrees of total instructed rotation
};

// Expression base by intensity plus the rotation term, clamped to [0, 1].
// Throws Error(kRange) on an empty instruction.
double ExpectedAmplitude(const EditInstruction& ins, const AmplitudeTable& table = {});

struct IpInputs {
  double s_arc = 0.0;
  double phi_ins = 0.0;
  double phi_real = 0.0;
  double alpha = 2.0;
  double epsilon = 1e-5;
};

struct IpResult {
  double penalty = 0.0;  // p, capped at 1
  double score = 0.0;    // s_rip
  bool capped = false;   // the raw penalty exceeded 1
};

// p = (|phi_ins - phi_real| / (phi_ins + eps))^alpha, s_rip = max(0, s_arc - p).
// Throws Error(kRange) when an input leaves its range.
IpResult RectifiedIp(const IpInputs& in);

struct EvalOptions {
  std::shared_ptr<curation::Scorer> scorer;  // SC, VQ, NA and identity
  std::string provenance = "mock";
  AmplitudeTable table;
  double alpha = 2.0;
  double epsilon = 1e-5;
  Canvas canvas{};
};

struct EvalSample {
  std::string id;
  std::optional<double> sc, vq, na, ip, landmark_error;
  std::optional<double> s_arc, phi_ins, phi_real, penalty;
  std::vector<std::string> errors;
};

struct MetricAggregate {
  double mean = 0.0;
  std::uint64_t count = 0;
  std::uint64_t missing = 0;
};

struct EvalReport {
  std::vector<EvalSample> samples;
  MetricAggregate sc, vq, na, ip, landmark_error;
  std::uint64_t malformed = 0;
  std::string provenance;
};

inline constexpr int kReportSchemaVersion = 1;

// Per record: "id", "source_image", "edited_image", "instruction" (absent or
// "no-op" means phi_ins = 0), optional "s_arc", "phi_ins",
// "predicted_landmarks", "target_landmarks" and "mock_scores".
EvalSample EvaluateRecord(const nlohmann::json& record, const EvalOptions& options);
// Streams JSONL; malformed lines are skipped and counted.
EvalReport Evaluate(std::istream& manifest, const EvalOptions& options);
// Recomputes the aggregates from the per-sample rows.
void Aggregate(EvalReport& report);
nlohmann::json ToJson(const EvalReport& report);

}  // namespace lato::metrics

#endif  // LATO_METRICS_HPP_
