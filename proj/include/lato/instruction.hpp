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

#ifndef LATO_INSTRUCTION_HPP_
#define LATO_INSTRUCTION_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lato {

enum class ExpressionType { kHappy, kSad, kAngry, kScared, kSurprised, kDisgusted, kNeutral };
enum class Intensity { kSlightly, kNormally, kStrongly };
enum class Axis { kYaw, kPitch };
enum class Pronoun { kHisHer, kHis, kHer };

inline constexpr ExpressionType kAllExpressions[] = {
    ExpressionType::kHappy,     ExpressionType::kSad,       ExpressionType::kAngry,
    ExpressionType::kScared,    ExpressionType::kSurprised, ExpressionType::kDisgusted,
    ExpressionType::kNeutral};
inline constexpr Intensity kAllIntensities[] = {Intensity::kSlightly, Intensity::kNormally,
                                                Intensity::kStrongly};

std::string_view ToString(ExpressionType t);
std::string_view ToString(Intensity i);
std::string_view ToString(Axis a);
std::string_view ToString(Pronoun p);
// Throw ParseError (offset 0) on an unknown word.
ExpressionType ExpressionFromString(std::string_view word);
Intensity IntensityFromString(std::string_view word);
Axis AxisFromString(std::string_view word);

struct ExpressionEdit {
  ExpressionType type = ExpressionType::kNeutral;
  Intensity intensity = Intensity::kNormally;

  friend bool operator==(const ExpressionEdit&, const ExpressionEdit&) = default;
};

// Sign convention: "left" is +yaw (the face turns toward image-left) and
// "up" is +pitch. Magnitudes are whole degrees in [1, 90].
struct Rotation {
  Axis axis = Axis::kYaw;
  int degrees = 0;

  friend bool operator==(const Rotation&, const Rotation&) = default;
};

struct EditInstruction {
  std::optional<ExpressionEdit> expression;
  std::vector<Rotation> rotations;  // at most one per axis
  Pronoun pronoun = Pronoun::kHisHer;

  double YawDegrees() const;
  double PitchDegrees() const;
  bool HasRotation() const { return !rotations.empty(); }

  friend bool operator==(const EditInstruction&, const EditInstruction&) = default;
};

// Throws Error(kRange) on an empty instruction. Magnitudes must lie in
// [1, 90] with each axis used once.
void Validate(const EditInstruction& e);

// Case-insensitive parser for
//   instruction := expr_clause | pose_clause | expr_clause "and" pose_clause
//   expr_clause := "make" PRONOUN "facial expression" TYPE [INTENSITY]
//   pose_clause := "turn" PRONOUN "head" term ["and" term]
//   term        := N "degrees" ["to the"] ("left" | "right" | "up" | "down")
// A trailing period is accepted. Throws ParseError with the byte offset of the
// first token that does not fit.
EditInstruction ParseInstruction(std::string_view text);

// Emits the unified template sentence. ParseInstruction(RenderInstruction(e)) == e.
std::string RenderInstruction(const EditInstruction& e);

nlohmann::json ToJson(const EditInstruction& e);
EditInstruction InstructionFromJson(const nlohmann::json& j);

}  // namespace lato

#endif  // LATO_INSTRUCTION_HPP_
