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

#ifndef LATO_CURATION_HPP_
#define LATO_CURATION_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lato/error.hpp"
#include "lato/image.hpp"
#include "lato/instruction.hpp"
#include "lato/kinematics.hpp"
#include "lato/landmarks.hpp"

namespace lato::curation {

enum class Stage { kQuality = 0, kDiversity = 1, kIdentity = 2, kValidation = 3 };
inline constexpr int kStageCount = 4;
enum class Status { kPass, kFail, kError, kNotApplicable };

std::string_view ToString(Stage s);
std::string_view ToString(Status s);

struct StageDecision {
  Stage stage = Stage::kQuality;
  Status status = Status::kPass;
  double score = 0.0;      // the deciding measurement
  double threshold = 0.0;  // the bound it was compared against
  std::string reason;      // empty on pass
  nlohmann::json details = nlohmann::json::object();

  bool passed() const { return status == Status::kPass || status == Status::kNotApplicable; }
};

struct PairRecord {
  std::string id;
  std::optional<std::string> source_image;
  std::optional<std::string> target_image;
  std::optional<LandmarkSet> source_landmarks;
  std::optional<LandmarkSet> target_landmarks;
  std::optional<std::string> instruction;
  std::optional<ExpressionEdit> expression;  // validator label, if annotated
  std::map<std::string, double> mock_scores;  // pinned mock outputs by scorer kind
  std::vector<StageDecision> stage_decisions;
  std::optional<std::string> generated_instruction;  // when the manifest had none
  nlohmann::json raw = nlohmann::json::object();  // the input line, echoed on output

  // Throws Error(kSchema) on a missing id or malformed field.
  static PairRecord FromJson(const nlohmann::json& j, Canvas canvas = {});
  nlohmann::json ToJson() const;
  // "accepted", "rejected", "quarantined" (a stage errored) or "pending".
  std::string_view status() const;
};

enum class BlurMode {
  kSharpnessFloor,  // retain iff LoG variance >= blur_min
  kBlurCeiling,     // retain iff LoG variance < blur_min
};

struct CurationConfig {
  double centroid_band = 0.2;  // centred band width, fraction of each dimension
  double landmark_area_min = 0.07;
  double blur_min = 50.0;
  BlurMode blur_mode = BlurMode::kSharpnessFloor;
  double aesthetic_min = 0.5;
  double change_score_min = 23.0;
  double change_score_max = 120.0;
  double semantic_diff_min = 0.4;
  double identity_min = 0.9;
  double pose_tolerance_deg = 10.0;
  double expression_min = 0.5;
  // Generated instructions: rotations below the minimum are dropped, the
  // rest rounded to the quantum.
  double min_rotation_deg = 5.0;
  int rotation_quantum_deg = 5;
  Pronoun pronoun = Pronoun::kHisHer;
  Canvas canvas{};
  std::uint64_t seed = 0;

  // Throws Error(kConfig).
  void Validate() const;
};

nlohmann::json ToJson(const CurationConfig& c);
// Missing keys keep their defaults; unknown keys throw Error(kConfig).
CurationConfig CurationConfigFromJson(const nlohmann::json& j);

struct ScoreRequest {
  std::string id;
  std::string kind;  // "aesthetic", "semantic", "identity" or "expression"
  std::vector<std::string> refs;
};

// Scorer failures throw Error(kScorer); `attempts` records how many calls
// were made before giving up.
class ScorerError : public Error {
 public:
  ScorerError(int attempts, const std::string& msg)
      : Error(ErrorKind::kScorer, msg), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  // Score in [0, 1].
  virtual double Score(const ScoreRequest& request, const PairRecord& record) = 0;
};

// Seeded hash of (kind, id) mapped to [0, 1); a record's mock_scores entry
// for the kind takes precedence.
class MockScorer : public Scorer {
 public:
  explicit MockScorer(std::uint64_t seed) : seed_(seed) {}
  double Score(const ScoreRequest& request, const PairRecord& record) override;
  static double HashScore(std::uint64_t seed, std::string_view kind, std::string_view id);

 private:
  std::uint64_t seed_;
};

struct HttpScorerOptions {
  std::string url;  // http://host[:port]/path
  int timeout_ms = 2000;
  int retries = 2;  // extra attempts after the first
};

// POST {"id", "kind", "refs"} -> {"score": float}.
class HttpScorer : public Scorer {
 public:
  explicit HttpScorer(HttpScorerOptions options);
  double Score(const ScoreRequest& request, const PairRecord& record) override;

 private:
  HttpScorerOptions options_;
  std::string host_;
  std::string path_;
};

struct ScorerSuite {
  std::shared_ptr<Scorer> aesthetic;
  std::shared_ptr<Scorer> semantic;
  std::shared_ptr<Scorer> identity;
  std::shared_ptr<Scorer> expression;

  static ScorerSuite Mock(std::uint64_t seed);
  // "mock", "http:<url>" or a bare http:// URL; throws Error(kConfig) otherwise.
  static ScorerSuite FromSpec(const std::string& spec, std::uint64_t seed, int timeout_ms = 2000,
                              int retries = 2);
};

// Variance of the LoG response (sigma 1, 3x3 Laplacian, reflect padding).
// Throws Error(kShape) below 7x7.
double BlurScore(const GrayImage& image);

StageDecision QualityFilter(const PairRecord& rec, const CurationConfig& cfg, ScorerSuite& scorers);
StageDecision DiversityFilter(const PairRecord& rec, const CurationConfig& cfg,
                              ScorerSuite& scorers);
// Throws Error(kConfig) when no identity scorer is configured.
StageDecision IdentityFilter(const PairRecord& rec, const CurationConfig& cfg,
                             ScorerSuite& scorers);
// Achieved pose delta (target minus source estimate) against the instructed
// delta; not applicable when the instruction has no rotation.
StageDecision PoseValidate(const PairRecord& rec, const EditInstruction& target,
                           const CurationConfig& cfg);
// Pose check plus, for expression edits, the expression validator score.
StageDecision ValidationStage(const PairRecord& rec, const EditInstruction& target,
                              const CurationConfig& cfg, ScorerSuite& scorers);

// Builds the template instruction from an expression label and/or a pose
// delta. Throws Error(kRange) with reason "no-edit" when neither yields a clause.
EditInstruction MakeInstruction(const std::optional<ExpressionEdit>& expression,
                                const std::optional<kinematics::HeadPose>& pose_delta,
                                const CurationConfig& cfg);

// Runs the stages in order, stopping at the first failure or error.
void CurateRecord(PairRecord& rec, const CurationConfig& cfg, ScorerSuite& scorers);

struct StageSummary {
  std::uint64_t entered = 0;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::uint64_t errored = 0;
  std::uint64_t not_applicable = 0;
  double pass_rate() const {
    return entered == 0 ? 0.0 : static_cast<double>(passed + not_applicable) / entered;
  }
};

struct MalformedLine {
  std::uint64_t line = 0;
  std::string error;
};

struct CurationSummary {
  std::uint64_t records = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t quarantined = 0;
  std::uint64_t malformed = 0;
  std::vector<MalformedLine> malformed_lines;  // first 100 only
  std::array<StageSummary, kStageCount> stages{};
};

nlohmann::json ToJson(const CurationSummary& s);

// Streams JSONL records from `in` to `out`. Malformed lines are skipped and
// counted; they never abort the stream.
CurationSummary Curate(std::istream& in, std::ostream& out, const CurationConfig& cfg,
                       ScorerSuite& scorers);

}  // namespace lato::curation

#endif  // LATO_CURATION_HPP_
