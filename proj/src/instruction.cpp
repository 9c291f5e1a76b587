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

#include "lato/instruction.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "lato/error.hpp"

namespace lato {
namespace {

struct Token {
  std::string text;  // lower-cased
  std::size_t offset;
};

std::vector<Token> Lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    const std::size_t start = i;
    std::string word;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
      ++i;
    }
    tokens.push_back({std::move(word), start});
  }
  if (!tokens.empty() && tokens.back().text.size() > 1 && tokens.back().text.back() == '.') {
    tokens.back().text.pop_back();
  } else if (!tokens.empty() && tokens.back().text == ".") {
    tokens.pop_back();
  }
  return tokens;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t text_size)
      : tokens_(std::move(tokens)), end_offset_(text_size) {}

  EditInstruction Parse() {
    EditInstruction e;
    bool pronoun_seen = false;
    if (Peek() == "make") {
      Next();
      SetPronoun(e, pronoun_seen);
      Expect("facial");
      Expect("expression");
      ExpressionEdit edit;
      edit.type = ParseExpressionWord();
      if (AtIntensity()) edit.intensity = IntensityFromString(Next().text);
      e.expression = edit;
      if (AtEnd()) return e;
      Expect("and");
    }
    if (Peek() != "turn") {
      if (!e.expression && AtEnd()) Fail("empty instruction");
      Fail(e.expression ? "expected \"turn\"" : "expected \"make\" or \"turn\"");
    }
    Next();
    SetPronoun(e, pronoun_seen);
    Expect("head");
    e.rotations.push_back(ParseTerm());
    if (!AtEnd()) {
      Expect("and");
      const std::size_t at = Offset();
      e.rotations.push_back(ParseTerm());
      if (e.rotations[0].axis == e.rotations[1].axis) {
        throw ParseError(at, "both rotation terms use the same axis");
      }
    }
    if (!AtEnd()) Fail("unexpected trailing text");
    return e;
  }

 private:
  bool AtEnd() const { return pos_ >= tokens_.size(); }
  std::string_view Peek() const { return AtEnd() ? std::string_view() : tokens_[pos_].text; }
  std::size_t Offset() const { return AtEnd() ? end_offset_ : tokens_[pos_].offset; }
  const Token& Next() {
    if (AtEnd()) Fail("unexpected end of instruction");
    return tokens_[pos_++];
  }

  [[noreturn]] void Fail(const std::string& what) const { throw ParseError(Offset(), what); }

  void Expect(std::string_view word) {
    if (Peek() != word) Fail("expected \"" + std::string(word) + "\"");
    ++pos_;
  }

  void SetPronoun(EditInstruction& e, bool& seen) {
    Pronoun p;
    const auto w = Peek();
    if (w == "his/her") {
      p = Pronoun::kHisHer;
    } else if (w == "his") {
      p = Pronoun::kHis;
    } else if (w == "her") {
      p = Pronoun::kHer;
    } else {
      Fail("expected \"his\", \"her\" or \"his/her\"");
    }
    if (seen && p != e.pronoun) Fail("pronoun changes within the instruction");
    e.pronoun = p;
    seen = true;
    ++pos_;
  }

  ExpressionType ParseExpressionWord() {
    const std::size_t at = Offset();
    try {
      return ExpressionFromString(Next().text);
    } catch (const ParseError&) {
      throw ParseError(at, "unrecognized expression word");
    }
  }

  bool AtIntensity() const {
    const auto w = Peek();
    return w == "slightly" || w == "normally" || w == "strongly";
  }

  Rotation ParseTerm() {
    const std::size_t at = Offset();
    const std::string number = Next().text;
    int value = 0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size() || value < 1 || value > 90) {
      throw ParseError(at, "expected a whole number of degrees in [1, 90]");
    }
    if (Peek() != "degrees" && Peek() != "degree") Fail("expected \"degrees\"");
    ++pos_;
    if (Peek() == "to") {
      ++pos_;
      Expect("the");
    }
    const std::string_view dir = Peek();
    Rotation r;
    if (dir == "left") {
      r = {Axis::kYaw, value};
    } else if (dir == "right") {
      r = {Axis::kYaw, -value};
    } else if (dir == "up") {
      r = {Axis::kPitch, value};
    } else if (dir == "down") {
      r = {Axis::kPitch, -value};
    } else {
      Fail("missing direction word (left, right, up or down)");
    }
    ++pos_;
    return r;
  }

  std::vector<Token> tokens_;
  std::size_t end_offset_;
  std::size_t pos_ = 0;
};

std::string DirectionPhrase(const Rotation& r) {
  const int mag = std::abs(r.degrees);
  std::string s = std::to_string(mag) + " degrees ";
  if (r.axis == Axis::kYaw) {
    s += r.degrees > 0 ? "to the left" : "to the right";
  } else {
    s += r.degrees > 0 ? "up" : "down";
  }
  return s;
}

}  // namespace

std::string_view ToString(ExpressionType t) {
  switch (t) {
    case ExpressionType::kHappy: return "happy";
    case ExpressionType::kSad: return "sad";
    case ExpressionType::kAngry: return "angry";
    case ExpressionType::kScared: return "scared";
    case ExpressionType::kSurprised: return "surprised";
    case ExpressionType::kDisgusted: return "disgusted";
    case ExpressionType::kNeutral: return "neutral";
  }
  return "neutral";
}

std::string_view ToString(Intensity i) {
  switch (i) {
    case Intensity::kSlightly: return "slightly";
    case Intensity::kNormally: return "normally";
    case Intensity::kStrongly: return "strongly";
  }
  return "normally";
}

std::string_view ToString(Axis a) { return a == Axis::kYaw ? "yaw" : "pitch"; }

std::string_view ToString(Pronoun p) {
  switch (p) {
    case Pronoun::kHisHer: return "his/her";
    case Pronoun::kHis: return "his";
    case Pronoun::kHer: return "her";
  }
  return "his/her";
}

ExpressionType ExpressionFromString(std::string_view word) {
  for (ExpressionType t : kAllExpressions) {
    if (ToString(t) == word) return t;
  }
  throw ParseError(0, "unrecognized expression \"" + std::string(word) + "\"");
}

Intensity IntensityFromString(std::string_view word) {
  for (Intensity i : kAllIntensities) {
    if (ToString(i) == word) return i;
  }
  throw ParseError(0, "unrecognized intensity \"" + std::string(word) + "\"");
}

Axis AxisFromString(std::string_view word) {
  if (word == "yaw") return Axis::kYaw;
  if (word == "pitch") return Axis::kPitch;
  throw ParseError(0, "unrecognized axis \"" + std::string(word) + "\"");
}

double EditInstruction::YawDegrees() const {
  double sum = 0.0;
  for (const auto& r : rotations) {
    if (r.axis == Axis::kYaw) sum += r.degrees;
  }
  return sum;
}

double EditInstruction::PitchDegrees() const {
  double sum = 0.0;
  for (const auto& r : rotations) {
    if (r.axis == Axis::kPitch) sum += r.degrees;
  }
  return sum;
}

void Validate(const EditInstruction& e) {
  if (!e.expression && e.rotations.empty()) {
    throw Error(ErrorKind::kRange, "instruction has neither an expression nor a rotation");
  }
  if (e.rotations.size() > 2) throw Error(ErrorKind::kRange, "at most two rotation terms");
  for (const auto& r : e.rotations) {
    if (r.degrees == 0 || std::abs(r.degrees) > 90) {
      throw Error(ErrorKind::kRange, "rotation magnitude must be in [1, 90] degrees");
    }
  }
  if (e.rotations.size() == 2 && e.rotations[0].axis == e.rotations[1].axis) {
    throw Error(ErrorKind::kRange, "rotation axes must differ");
  }
}

EditInstruction ParseInstruction(std::string_view text) {
  Parser parser(Lex(text), text.size());
  EditInstruction e = parser.Parse();
  Validate(e);
  return e;
}

std::string RenderInstruction(const EditInstruction& e) {
  Validate(e);
  const std::string pronoun(ToString(e.pronoun));
  std::string out;
  if (e.expression) {
    out = "Make " + pronoun + " facial expression " + std::string(ToString(e.expression->type)) +
          " " + std::string(ToString(e.expression->intensity));
  }
  if (!e.rotations.empty()) {
    out += out.empty() ? "Turn " : " and turn ";
    out += pronoun + " head ";
    for (std::size_t i = 0; i < e.rotations.size(); ++i) {
      if (i) out += " and ";
      out += DirectionPhrase(e.rotations[i]);
    }
  }
  return out;
}

nlohmann::json ToJson(const EditInstruction& e) {
  nlohmann::json j;
  if (e.expression) {
    j["expression"] = {{"type", ToString(e.expression->type)},
                       {"intensity", ToString(e.expression->intensity)}};
  } else {
    j["expression"] = nullptr;
  }
  j["rotations"] = nlohmann::json::array();
  for (const auto& r : e.rotations) {
    j["rotations"].push_back({{"axis", ToString(r.axis)}, {"degrees", r.degrees}});
  }
  j["pronoun"] = ToString(e.pronoun);
  return j;
}

EditInstruction InstructionFromJson(const nlohmann::json& j) {
  try {
    EditInstruction e;
    if (j.contains("expression") && !j.at("expression").is_null()) {
      const auto& x = j.at("expression");
      e.expression = ExpressionEdit{ExpressionFromString(x.at("type").get<std::string>()),
                                    IntensityFromString(x.value("intensity", "normally"))};
    }
    if (j.contains("rotations")) {
      for (const auto& r : j.at("rotations")) {
        e.rotations.push_back({AxisFromString(r.at("axis").get<std::string>()),
                               r.at("degrees").get<int>()});
      }
    }
    if (j.contains("pronoun")) {
      const auto p = j.at("pronoun").get<std::string>();
      e.pronoun = p == "his" ? Pronoun::kHis : p == "her" ? Pronoun::kHer : Pronoun::kHisHer;
    }
    Validate(e);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kSchema, std::string("instruction JSON: ") + ex.what());
  }
}

}  // namespace lato
