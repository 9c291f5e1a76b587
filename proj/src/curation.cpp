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

#include "lato/curation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "httplib.h"
#include "lato/kernels.hpp"

namespace lato::curation {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxMalformedReported = 100;

StageDecision Decision(Stage stage, Status status, double score, double threshold,
                       std::string reason = {}) {
  StageDecision d;
  d.stage = stage;
  d.status = status;
  d.score = score;
  d.threshold = threshold;
  d.reason = std::move(reason);
  return d;
}

StageDecision ScorerFailure(Stage stage, const std::string& kind, const ScorerError& e) {
  StageDecision d = Decision(stage, Status::kError, 0.0, 0.0, "scorer");
  d.details = {{"scorer", kind}, {"attempts", e.attempts()}, {"error", e.what()}};
  return d;
}

std::vector<std::string> Refs(const PairRecord& rec) {
  std::vector<std::string> refs;
  if (rec.source_image) refs.push_back(*rec.source_image);
  if (rec.target_image) refs.push_back(*rec.target_image);
  return refs;
}

double Ask(Scorer& scorer, const PairRecord& rec, const std::string& kind,
           std::vector<std::string> refs) {
  return scorer.Score({rec.id, kind, std::move(refs)}, rec);
}

std::uint64_t Mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Pronoun PronounFromString(const std::string& s) {
  for (Pronoun p : {Pronoun::kHisHer, Pronoun::kHis, Pronoun::kHer}) {
    if (ToString(p) == s) return p;
  }
  throw Error(ErrorKind::kConfig, "unknown pronoun '" + s + "'");
}

int RoundedDegrees(double deg, const CurationConfig& cfg) {
  if (std::fabs(deg) < cfg.min_rotation_deg) return 0;
  const int q = cfg.rotation_quantum_deg;
  int mag = static_cast<int>(std::lround(std::fabs(deg) / q)) * q;
  mag = std::clamp(mag, q, 90);
  return deg > 0 ? mag : -mag;
}

void Count(StageSummary& s, Status status) {
  ++s.entered;
  switch (status) {
    case Status::kPass: ++s.passed; break;
    case Status::kFail: ++s.failed; break;
    case Status::kError: ++s.errored; break;
    case Status::kNotApplicable: ++s.not_applicable; break;
  }
}

}  // namespace

std::string_view ToString(Stage s) {
  switch (s) {
    case Stage::kQuality: return "quality";
    case Stage::kDiversity: return "diversity";
    case Stage::kIdentity: return "identity";
    case Stage::kValidation: return "validation";
  }
  return "quality";
}

std::string_view ToString(Status s) {
  switch (s) {
    case Status::kPass: return "pass";
    case Status::kFail: return "fail";
    case Status::kError: return "error";
    case Status::kNotApplicable: return "not_applicable";
  }
  return "pass";
}

PairRecord PairRecord::FromJson(const json& j, Canvas canvas) {
  if (!j.is_object()) throw Error(ErrorKind::kSchema, "record is not a JSON object");
  PairRecord rec;
  rec.raw = j;
  try {
    if (!j.contains("id") || !j.at("id").is_string() || j.at("id").get<std::string>().empty()) {
      throw Error(ErrorKind::kSchema, "record needs a non-empty string id");
    }
    rec.id = j.at("id").get<std::string>();
    auto opt_string = [&](const char* key, std::optional<std::string>& out) {
      if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<std::string>();
    };
    opt_string("source_image", rec.source_image);
    opt_string("target_image", rec.target_image);
    opt_string("instruction", rec.instruction);
    auto opt_landmarks = [&](const char* key, std::optional<LandmarkSet>& out) {
      if (!j.contains(key) || j.at(key).is_null()) return;
      try {
        out = ParseLandmarks(j.at(key).dump(), canvas);
      } catch (const Error& e) {
        throw Error(ErrorKind::kSchema, std::string(key) + ": " + e.what());
      }
    };
    opt_landmarks("source_landmarks", rec.source_landmarks);
    opt_landmarks("target_landmarks", rec.target_landmarks);
    if (j.contains("expression") && !j.at("expression").is_null()) {
      const auto& e = j.at("expression");
      ExpressionEdit edit;
      edit.type = ExpressionFromString(e.at("type").get<std::string>());
      if (e.contains("intensity")) edit.intensity = IntensityFromString(e.at("intensity").get<std::string>());
      rec.expression = edit;
    }
    if (j.contains("mock_scores")) {
      for (const auto& [kind, v] : j.at("mock_scores").items()) rec.mock_scores[kind] = v.get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("record field: ") + e.what());
  } catch (const ParseError& e) {
    throw Error(ErrorKind::kSchema, std::string("record expression: ") + e.what());
  }
  return rec;
}

std::string_view PairRecord::status() const {
  for (const auto& d : stage_decisions) {
    if (d.status == Status::kError) return "quarantined";
    if (d.status == Status::kFail) return "rejected";
  }
  return stage_decisions.size() == static_cast<std::size_t>(kStageCount) ? "accepted" : "pending";
}

json PairRecord::ToJson() const {
  json out = raw;
  json decisions = json::array();
  for (const auto& d : stage_decisions) {
    decisions.push_back({{"stage", ToString(d.stage)},
                         {"status", ToString(d.status)},
                         {"pass", d.passed()},
                         {"score", d.score},
                         {"threshold", d.threshold},
                         {"reason", d.reason},
                         {"details", d.details}});
  }
  out["stage_decisions"] = std::move(decisions);
  out["status"] = status();
  if (generated_instruction) {
    out["instruction"] = *generated_instruction;
    out["instruction_source"] = "generated";
  } else if (instruction) {
    out["instruction_source"] = "manifest";
  }
  return out;
}

void CurationConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  for (double v : {centroid_band, landmark_area_min, blur_min, aesthetic_min, change_score_min,
                   change_score_max, semantic_diff_min, identity_min, pose_tolerance_deg,
                   expression_min, min_rotation_deg}) {
    if (!std::isfinite(v)) fail("curation thresholds must be finite");
  }
  if (!(centroid_band > 0.0 && centroid_band <= 1.0)) fail("centroid_band must lie in (0, 1]");
  if (landmark_area_min < 0.0 || landmark_area_min > 1.0) fail("landmark_area_min must lie in [0, 1]");
  if (!(change_score_min < change_score_max)) fail("change_score_min must be below change_score_max");
  if (pose_tolerance_deg < 0.0) fail("pose_tolerance_deg must be non-negative");
  if (min_rotation_deg < 0.0) fail("min_rotation_deg must be non-negative");
  if (rotation_quantum_deg < 1 || rotation_quantum_deg > 90) fail("rotation_quantum_deg must lie in [1, 90]");
  if (canvas.width < 1 || canvas.height < 1) fail("canvas must be positive");
}

json ToJson(const CurationConfig& c) {
  return {{"centroid_band", c.centroid_band},
          {"landmark_area_min", c.landmark_area_min},
          {"blur_min", c.blur_min},
          {"blur_mode", c.blur_mode == BlurMode::kSharpnessFloor ? "sharpness_floor" : "blur_ceiling"},
          {"aesthetic_min", c.aesthetic_min},
          {"change_score_min", c.change_score_min},
          {"change_score_max", c.change_score_max},
          {"semantic_diff_min", c.semantic_diff_min},
          {"identity_min", c.identity_min},
          {"pose_tolerance_deg", c.pose_tolerance_deg},
          {"expression_min", c.expression_min},
          {"min_rotation_deg", c.min_rotation_deg},
          {"rotation_quantum_deg", c.rotation_quantum_deg},
          {"pronoun", ToString(c.pronoun)},
          {"canvas", {c.canvas.width, c.canvas.height}},
          {"seed", c.seed}};
}

CurationConfig CurationConfigFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "curation config must be an object");
  CurationConfig c;
  const json known = ToJson(c);
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorKind::kConfig, "unknown curation config key '" + key + "'");
  }
  try {
    auto num = [&](const char* key, double& out) {
      if (j.contains(key)) out = j.at(key).get<double>();
    };
    num("centroid_band", c.centroid_band);
    num("landmark_area_min", c.landmark_area_min);
    num("blur_min", c.blur_min);
    num("aesthetic_min", c.aesthetic_min);
    num("change_score_min", c.change_score_min);
    num("change_score_max", c.change_score_max);
    num("semantic_diff_min", c.semantic_diff_min);
    num("identity_min", c.identity_min);
    num("pose_tolerance_deg", c.pose_tolerance_deg);
    num("expression_min", c.expression_min);
    num("min_rotation_deg", c.min_rotation_deg);
    if (j.contains("rotation_quantum_deg")) c.rotation_quantum_deg = j.at("rotation_quantum_deg").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("pronoun")) c.pronoun = PronounFromString(j.at("pronoun").get<std::string>());
    if (j.contains("canvas")) c.canvas = {j.at("canvas").at(0).get<int>(), j.at("canvas").at(1).get<int>()};
    if (j.contains("blur_mode")) {
      const auto mode = j.at("blur_mode").get<std::string>();
      if (mode == "sharpness_floor") {
        c.blur_mode = BlurMode::kSharpnessFloor;
      } else if (mode == "blur_ceiling") {
        c.blur_mode = BlurMode::kBlurCeiling;
      } else {
        throw Error(ErrorKind::kConfig, "blur_mode must be sharpness_floor or blur_ceiling");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("curation config: ") + e.what());
  }
  c.Validate();
  return c;
}

double MockScorer::HashScore(std::uint64_t seed, std::string_view kind, std::string_view id) {
  // FNV-1a over kind and id, finished with a 64-bit mixer.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ Mix(seed);
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  feed(kind);
  feed(id);
  return static_cast<double>(Mix(h) >> 11) * 0x1.0p-53;
}

double MockScorer::Score(const ScoreRequest& request, const PairRecord& record) {
  if (auto it = record.mock_scores.find(request.kind); it != record.mock_scores.end()) {
    return it->second;
  }
  return HashScore(seed_, request.kind, request.id);
}

HttpScorer::HttpScorer(HttpScorerOptions options) : options_(std::move(options)) {
  const std::string& url = options_.url;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw Error(ErrorKind::kConfig, "scorer URL must start with http://, got '" + url + "'");
  }
  const auto slash = url.find('/', scheme + 3);
  host_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (options_.timeout_ms < 1 || options_.retries < 0) {
    throw Error(ErrorKind::kConfig, "scorer timeout must be positive and retries non-negative");
  }
}

double HttpScorer::Score(const ScoreRequest& request, const PairRecord&) {
  const std::string body = json{{"id", request.id}, {"kind", request.kind}, {"refs", request.refs}}.dump();
  std::string last_error;
  const int attempts = options_.retries + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(host_);
    const auto timeout = std::chrono::milliseconds(options_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      const double score = json::parse(res->body).at("score").get<double>();
      if (!std::isfinite(score)) throw Error(ErrorKind::kScorer, "non-finite score");
      return score;
    } catch (const std::exception& e) {
      last_error = std::string("bad response: ") + e.what();
    }
  }
  throw ScorerError(attempts, request.kind + " scorer failed after " + std::to_string(attempts) +
                                  " attempt(s): " + last_error);
}

ScorerSuite ScorerSuite::Mock(std::uint64_t seed) {
  auto mock = std::make_shared<MockScorer>(seed);
  return {mock, mock, mock, mock};
}

ScorerSuite ScorerSuite::FromSpec(const std::string& spec, std::uint64_t seed, int timeout_ms,
                                  int retries) {
  if (spec == "mock") return Mock(seed);
  if (spec.rfind("http:", 0) == 0 && spec.size() > 5) {
    // "http:<url>", or the bare URL
    const std::string url = spec.rfind("http://", 0) == 0 ? spec : spec.substr(5);
    auto http = std::make_shared<HttpScorer>(HttpScorerOptions{url, timeout_ms, retries});
    return {http, http, http, http};
  }
  throw Error(ErrorKind::kConfig, "scorers must be 'mock' or 'http:<url>', got '" + spec + "'");
}

double BlurScore(const GrayImage& image) {
  return kernels::Variance(kernels::LogResponse(image, 1.0));
}

StageDecision QualityFilter(const PairRecord& rec, const CurationConfig& cfg, ScorerSuite& scorers) {
  constexpr Stage kStage = Stage::kQuality;
  if (!rec.source_landmarks) return Decision(kStage, Status::kFail, 0, 0, "missing-landmarks");
  const LandmarkSet& f = *rec.source_landmarks;
  const double w = f.canvas().width;
  const double h = f.canvas().height;
  json details;

  const Point c = f.Centroid();
  const double offset = std::max(std::fabs(c.x / w - 0.5), std::fabs(c.y / h - 0.5));
  const double half_band = cfg.centroid_band / 2.0;
  details["centroid_offset"] = offset;
  if (offset > half_band) {
    StageDecision d = Decision(kStage, Status::kFail, offset, half_band, "centroid");
    d.details = details;
    return d;
  }

  double x0 = f[0].x, x1 = f[0].x, y0 = f[0].y, y1 = f[0].y;
  for (const Point& p : f.points()) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double area = (x1 - x0) * (y1 - y0) / (w * h);
  details["area_fraction"] = area;
  if (area < cfg.landmark_area_min) {
    StageDecision d = Decision(kStage, Status::kFail, area, cfg.landmark_area_min, "area");
    d.details = details;
    return d;
  }

  double blur = 0.0;
  try {
    if (!rec.source_image) throw Error(ErrorKind::kIo, "record has no source_image");
    blur = BlurScore(ReadPgm(*rec.source_image));
  } catch (const Error& e) {
    details["error"] = e.what();
    StageDecision d = Decision(kStage, Status::kFail, 0.0, cfg.blur_min,
                               e.kind() == ErrorKind::kShape ? "image-too-small" : "io");
    d.details = details;
    return d;
  }
  details["blur_score"] = blur;
  const bool sharp_enough =
      cfg.blur_mode == BlurMode::kSharpnessFloor ? blur >= cfg.blur_min : blur < cfg.blur_min;
  if (!sharp_enough) {
    StageDecision d = Decision(kStage, Status::kFail, blur, cfg.blur_min, "blur");
    d.details = details;
    return d;
  }

  double aesthetic = 0.0;
  try {
    aesthetic = Ask(*scorers.aesthetic, rec, "aesthetic", {*rec.source_image});
  } catch (const ScorerError& e) {
    return ScorerFailure(kStage, "aesthetic", e);
  }
  details["aesthetic"] = aesthetic;
  const bool ok = aesthetic >= cfg.aesthetic_min;
  StageDecision d = Decision(kStage, ok ? Status::kPass : Status::kFail, aesthetic,
                             cfg.aesthetic_min, ok ? "" : "aesthetic");
  d.details = details;
  return d;
}

StageDecision DiversityFilter(const PairRecord& rec, const CurationConfig& cfg,
                              ScorerSuite& scorers) {
  constexpr Stage kStage = Stage::kDiversity;
  if (!rec.source_landmarks || !rec.target_landmarks) {
    return Decision(kStage, Status::kFail, 0, 0, "missing-landmarks");
  }
  const ChangeScore change = ComputeChangeScore(*rec.source_landmarks, *rec.target_landmarks);
  json details = {{"change_score", change.score},
                  {"inner_diff", change.inner_diff},
                  {"overall_diff", change.overall_diff}};
  auto finish = [&](StageDecision d) {
    d.details = details;
    return d;
  };
  if (change.score < cfg.change_score_min) {
    return finish(Decision(kStage, Status::kFail, change.score, cfg.change_score_min, "too-static"));
  }
  if (change.score > cfg.change_score_max) {
    return finish(Decision(kStage, Status::kFail, change.score, cfg.change_score_max,
                           "copy-paste/outlier band"));
  }
  double semantic = 0.0;
  try {
    semantic = Ask(*scorers.semantic, rec, "semantic", Refs(rec));
  } catch (const ScorerError& e) {
    return ScorerFailure(kStage, "semantic", e);
  }
  details["semantic_diff"] = semantic;
  if (semantic < cfg.semantic_diff_min) {
    return finish(Decision(kStage, Status::kFail, semantic, cfg.semantic_diff_min, "semantic"));
  }
  return finish(Decision(kStage, Status::kPass, change.score, cfg.change_score_min));
}

StageDecision IdentityFilter(const PairRecord& rec, const CurationConfig& cfg,
                             ScorerSuite& scorers) {
  constexpr Stage kStage = Stage::kIdentity;
  if (!scorers.identity) throw Error(ErrorKind::kConfig, "no identity scorer configured");
  double score = 0.0;
  try {
    score = Ask(*scorers.identity, rec, "identity", Refs(rec));
  } catch (const ScorerError& e) {
    return ScorerFailure(kStage, "identity", e);
  }
  const bool ok = score >= cfg.identity_min;
  return Decision(kStage, ok ? Status::kPass : Status::kFail, score, cfg.identity_min,
                  ok ? "" : "identity");
}

StageDecision PoseValidate(const PairRecord& rec, const EditInstruction& target,
                           const CurationConfig& cfg) {
  constexpr Stage kStage = Stage::kValidation;
  if (!target.HasRotation()) {
    return Decision(kStage, Status::kNotApplicable, 0.0, cfg.pose_tolerance_deg, "no-rotation");
  }
  if (!rec.source_landmarks || !rec.target_landmarks) {
    return Decision(kStage, Status::kFail, 0, cfg.pose_tolerance_deg, "missing-landmarks");
  }
  kinematics::HeadPose src, tgt;
  try {
    src = kinematics::EstimatePose(*rec.source_landmarks);
    tgt = kinematics::EstimatePose(*rec.target_landmarks);
  } catch (const Error& e) {
    StageDecision d = Decision(kStage, Status::kError, 0, cfg.pose_tolerance_deg, "pose-estimation");
    d.details = {{"error", e.what()}};
    return d;
  }
  const kinematics::HeadPose achieved{tgt.pitch - src.pitch, tgt.yaw - src.yaw};
  const kinematics::HeadPose instructed{target.PitchDegrees(), target.YawDegrees()};
  const double dev = kinematics::PoseDeviation(achieved, instructed);
  const bool ok = dev <= cfg.pose_tolerance_deg;
  StageDecision d = Decision(kStage, ok ? Status::kPass : Status::kFail, dev,
                             cfg.pose_tolerance_deg, ok ? "" : "pose");
  d.details = {{"achieved", {{"pitch", achieved.pitch}, {"yaw", achieved.yaw}}},
               {"instructed", {{"pitch", instructed.pitch}, {"yaw", instructed.yaw}}}};
  return d;
}

StageDecision ValidationStage(const PairRecord& rec, const EditInstruction& target,
                              const CurationConfig& cfg, ScorerSuite& scorers) {
  StageDecision pose = PoseValidate(rec, target, cfg);
  json details = {{"pose", {{"status", ToString(pose.status)}, {"deviation", pose.score}}}};
  if (!pose.details.empty()) details["pose"]["details"] = pose.details;
  if (!pose.passed()) {
    pose.details = details;
    return pose;
  }
  const bool has_expression =
      target.expression && target.expression->type != ExpressionType::kNeutral;
  if (!has_expression) {
    pose.details = details;
    return pose;
  }
  double score = 0.0;
  try {
    std::vector<std::string> refs = Refs(rec);
    refs.push_back(RenderInstruction(target));
    score = Ask(*scorers.expression, rec, "expression", std::move(refs));
  } catch (const ScorerError& e) {
    return ScorerFailure(Stage::kValidation, "expression", e);
  }
  details["expression"] = {{"score", score}, {"threshold", cfg.expression_min}};
  const bool ok = score >= cfg.expression_min;
  StageDecision d = Decision(Stage::kValidation, ok ? Status::kPass : Status::kFail, score,
                             cfg.expression_min, ok ? "" : "expression");
  d.details = details;
  return d;
}

EditInstruction MakeInstruction(const std::optional<ExpressionEdit>& expression,
                                const std::optional<kinematics::HeadPose>& pose_delta,
                                const CurationConfig& cfg) {
  EditInstruction e;
  e.pronoun = cfg.pronoun;
  if (expression && expression->type != ExpressionType::kNeutral) e.expression = expression;
  if (pose_delta) {
    if (const int yaw = RoundedDegrees(pose_delta->yaw, cfg); yaw != 0) {
      e.rotations.push_back({Axis::kYaw, yaw});
    }
    if (const int pitch = RoundedDegrees(pose_delta->pitch, cfg); pitch != 0) {
      e.rotations.push_back({Axis::kPitch, pitch});
    }
  }
  if (!e.expression && e.rotations.empty()) {
    throw Error(ErrorKind::kRange, "no-edit: neither an expression nor a rotation clause applies");
  }
  return e;
}

void CurateRecord(PairRecord& rec, const CurationConfig& cfg, ScorerSuite& scorers) {
  rec.stage_decisions.clear();
  rec.generated_instruction.reset();
  auto run = [&](StageDecision d) {
    rec.stage_decisions.push_back(std::move(d));
    return rec.stage_decisions.back().passed();
  };
  if (!run(QualityFilter(rec, cfg, scorers))) return;
  if (!run(DiversityFilter(rec, cfg, scorers))) return;
  if (!run(IdentityFilter(rec, cfg, scorers))) return;

  EditInstruction target;
  try {
    if (rec.instruction) {
      target = ParseInstruction(*rec.instruction);
    } else {
      std::optional<kinematics::HeadPose> delta;
      if (rec.source_landmarks && rec.target_landmarks) {
        const auto s = kinematics::EstimatePose(*rec.source_landmarks);
        const auto t = kinematics::EstimatePose(*rec.target_landmarks);
        delta = kinematics::HeadPose{t.pitch - s.pitch, t.yaw - s.yaw};
      }
      target = MakeInstruction(rec.expression, delta, cfg);
      rec.generated_instruction = RenderInstruction(target);
    }
  } catch (const Error& e) {
    StageDecision d = Decision(Stage::kValidation, Status::kFail, 0.0, cfg.pose_tolerance_deg,
                               e.kind() == ErrorKind::kRange ? "no-edit" : "instruction");
    d.details = {{"error", e.what()}};
    run(std::move(d));
    return;
  }
  run(ValidationStage(rec, target, cfg, scorers));
}

json ToJson(const CurationSummary& s) {
  json stages = json::array();
  for (int i = 0; i < kStageCount; ++i) {
    const auto& st = s.stages[i];
    stages.push_back({{"stage", ToString(static_cast<Stage>(i))},
                      {"entered", st.entered},
                      {"passed", st.passed},
                      {"failed", st.failed},
                      {"errored", st.errored},
                      {"not_applicable", st.not_applicable},
                      {"pass_rate", st.pass_rate()}});
  }
  json malformed = json::array();
  for (const auto& m : s.malformed_lines) malformed.push_back({{"line", m.line}, {"error", m.error}});
  return {{"records", s.records},   {"accepted", s.accepted},   {"rejected", s.rejected},
          {"quarantined", s.quarantined}, {"malformed", s.malformed},
          {"malformed_lines", malformed}, {"stages", stages}};
}

CurationSummary Curate(std::istream& in, std::ostream& out, const CurationConfig& cfg,
                       ScorerSuite& scorers) {
  cfg.Validate();
  CurationSummary summary;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    PairRecord rec;
    try {
      rec = PairRecord::FromJson(json::parse(line), cfg.canvas);
    } catch (const std::exception& e) {
      ++summary.malformed;
      if (summary.malformed_lines.size() < kMaxMalformedReported) {
        summary.malformed_lines.push_back({line_no, e.what()});
      }
      continue;
    }
    CurateRecord(rec, cfg, scorers);
    ++summary.records;
    for (const auto& d : rec.stage_decisions) {
      Count(summary.stages[static_cast<int>(d.stage)], d.status);
    }
    const std::string_view status = rec.status();
    if (status == "accepted") {
      ++summary.accepted;
    } else if (status == "quarantined") {
      ++summary.quarantined;
    } else {
      ++summary.rejected;
    }
    out << rec.ToJson().dump() << '\n';
  }
  return summary;
}

}  // namespace lato::curation
