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

#include "lato/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

#include "lato/error.hpp"
#include "lato/kernels.hpp"

namespace lato::metrics {
namespace {

using nlohmann::json;

void RequireUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorKind::kRange, std::string(name) + " must lie in [0, 1]");
  }
}

json Optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ToJson(const MetricAggregate& a) {
  return {{"mean", a.count ? json(a.mean) : json(nullptr)}, {"count", a.count}, {"missing", a.missing}};
}

}  // namespace

double Ssim(const GrayImage& a, const GrayImage& b) { return kernels::MeanSsim(a, b); }

double RealizedAmplitude(const GrayImage& source, const GrayImage& edited) {
  return 1.0 - std::clamp(Ssim(source, edited), 0.0, 1.0);
}

double ExpectedAmplitude(const EditInstruction& ins, const AmplitudeTable& table) {
  if (!ins.expression && ins.rotations.empty()) {
    throw Error(ErrorKind::kRange, "cannot size an empty instruction");
  }
  double phi = 0.0;
  if (ins.expression) {
    switch (ins.expression->intensity) {
      case Intensity::kSlightly: phi += table.slightly; break;
      case Intensity::kNormally: phi += table.normally; break;
      case Intensity::kStrongly: phi += table.strongly; break;
    }
  }
  double degrees = 0.0;
  for (const auto& r : ins.rotations) degrees += std::abs(r.degrees);
  phi += table.per_30_degrees * degrees / 30.0;
  return std::clamp(phi, 0.0, 1.0);
}

IpResult RectifiedIp(const IpInputs& in) {
  RequireUnit(in.s_arc, "s_arc");
  RequireUnit(in.phi_ins, "phi_ins");
  RequireUnit(in.phi_real, "phi_real");
  if (!(in.alpha > 0.0) || !std::isfinite(in.alpha)) throw Error(ErrorKind::kRange, "alpha must be positive");
  if (!(in.epsilon > 0.0) || !std::isfinite(in.epsilon)) {
    throw Error(ErrorKind::kRange, "epsilon must be positive");
  }
  IpResult r;
  const double raw = std::pow(std::fabs(in.phi_ins - in.phi_real) / (in.phi_ins + in.epsilon), in.alpha);
  r.capped = raw > 1.0;
  r.penalty = std::min(raw, 1.0);
  r.score = std::max(0.0, in.s_arc - r.penalty);
  return r;
}

EvalSample EvaluateRecord(const json& record, const EvalOptions& options) {
  if (!record.is_object() || !record.contains("id") || !record.at("id").is_string()) {
    throw Error(ErrorKind::kSchema, "evaluation record needs a string id");
  }
  EvalSample s;
  s.id = record.at("id").get<std::string>();
  curation::PairRecord pr;
  pr.id = s.id;
  if (record.contains("mock_scores")) {
    for (const auto& [kind, v] : record.at("mock_scores").items()) pr.mock_scores[kind] = v.get<double>();
  }
  std::vector<std::string> refs;
  for (const char* key : {"source_image", "edited_image"}) {
    if (record.contains(key) && record.at(key).is_string()) refs.push_back(record.at(key).get<std::string>());
  }
  auto ask = [&](const char* kind, std::optional<double>& out) {
    if (!options.scorer) {
      s.errors.push_back(std::string(kind) + ": no scorer");
      return;
    }
    try {
      out = options.scorer->Score({s.id, kind, refs}, pr);
    } catch (const Error& e) {
      s.errors.push_back(std::string(kind) + ": " + e.what());
    }
  };
  ask("sc", s.sc);
  ask("vq", s.vq);
  ask("na", s.na);

  // Identity preservation.
  if (record.contains("s_arc")) {
    s.s_arc = record.at("s_arc").get<double>();
  } else {
    ask("identity", s.s_arc);
  }
  try {
    if (record.contains("phi_ins")) {
      s.phi_ins = record.at("phi_ins").get<double>();
    } else if (!record.contains("instruction") || record.at("instruction").is_null() ||
               record.at("instruction").get<std::string>() == "no-op") {
      s.phi_ins = 0.0;
    } else {
      s.phi_ins = ExpectedAmplitude(ParseInstruction(record.at("instruction").get<std::string>()),
                                    options.table);
    }
  } catch (const std::exception& e) {
    s.errors.push_back(std::string("phi_ins: ") + e.what());
  }
  try {
    if (record.contains("phi_real")) {
      s.phi_real = record.at("phi_real").get<double>();
    } else {
      s.phi_real = RealizedAmplitude(ReadPgm(record.at("source_image").get<std::string>()),
                                     ReadPgm(record.at("edited_image").get<std::string>()));
    }
  } catch (const std::exception& e) {
    s.errors.push_back(std::string("phi_real: ") + e.what());
  }
  if (s.s_arc && s.phi_ins && s.phi_real) {
    try {
      const IpResult ip = RectifiedIp({*s.s_arc, *s.phi_ins, *s.phi_real, options.alpha, options.epsilon});
      s.ip = ip.score;
      s.penalty = ip.penalty;
    } catch (const Error& e) {
      s.errors.push_back(std::string("ip: ") + e.what());
    }
  }

  if (record.contains("predicted_landmarks") && record.contains("target_landmarks")) {
    try {
      s.landmark_error =
          LandmarkL1Error(ParseLandmarks(record.at("predicted_landmarks").dump(), options.canvas),
                          ParseLandmarks(record.at("target_landmarks").dump(), options.canvas));
    } catch (const Error& e) {
      s.errors.push_back(std::string("landmark_error: ") + e.what());
    }
  }
  return s;
}

void Aggregate(EvalReport& report) {
  auto fold = [&](std::optional<double> EvalSample::*field, MetricAggregate& agg) {
    agg = {};
    double sum = 0.0;
    for (const auto& s : report.samples) {
      if (s.*field) {
        sum += *(s.*field);
        ++agg.count;
      } else {
        ++agg.missing;
      }
    }
    agg.mean = agg.count ? sum / static_cast<double>(agg.count) : 0.0;
  };
  fold(&EvalSample::sc, report.sc);
  fold(&EvalSample::vq, report.vq);
  fold(&EvalSample::na, report.na);
  fold(&EvalSample::ip, report.ip);
  fold(&EvalSample::landmark_error, report.landmark_error);
}

EvalReport Evaluate(std::istream& manifest, const EvalOptions& options) {
  EvalReport report;
  report.provenance = options.provenance;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      report.samples.push_back(EvaluateRecord(json::parse(line), options));
    } catch (const std::exception&) {
      ++report.malformed;
    }
  }
  Aggregate(report);
  return report;
}

json ToJson(const EvalReport& report) {
  json samples = json::array();
  for (const auto& s : report.samples) {
    samples.push_back({{"id", s.id},
                       {"sc", Optional(s.sc)},
                       {"vq", Optional(s.vq)},
                       {"na", Optional(s.na)},
                       {"ip", Optional(s.ip)},
                       {"landmark_error", Optional(s.landmark_error)},
                       {"s_arc", Optional(s.s_arc)},
                       {"phi_ins", Optional(s.phi_ins)},
                       {"phi_real", Optional(s.phi_real)},
                       {"penalty", Optional(s.penalty)},
                       {"errors", s.errors}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"provenance", report.provenance},
          {"malformed", report.malformed},
          {"aggregates",
           {{"sc", ToJson(report.sc)},
            {"vq", ToJson(report.vq)},
            {"na", ToJson(report.na)},
            {"ip", ToJson(report.ip)},
            {"landmark_error", ToJson(report.landmark_error)}}},
          {"samples", samples}};
}

}  // namespace lato::metrics
