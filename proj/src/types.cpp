#include "mma/types.hpp"

#include <stdexcept>
#include <string>

namespace mma {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrue:
      return "TRUE";
    case Verdict::kFalse:
      return "FALSE";
    case Verdict::kUnknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view to_string(LogicType t) {
  switch (t) {
    case LogicType::kStandard:
      return "A_STANDARD";
    case LogicType::kInversion:
      return "B_INVERSION";
    case LogicType::kAmbiguity:
      return "C_AMBIGUITY";
    case LogicType::kUnknowable:
      return "D_UNKNOWABLE";
  }
  return "A_STANDARD";
}

std::string_view to_string(Mode m) { return m == Mode::kText ? "TEXT" : "VISION"; }

Verdict parse_verdict(std::string_view s) {
  if (s == "TRUE") return Verdict::kTrue;
  if (s == "FALSE") return Verdict::kFalse;
  if (s == "UNKNOWN") return Verdict::kUnknown;
  throw std::invalid_argument("unknown verdict: " + std::string(s));
}

LogicType parse_logic_type(std::string_view s) {
  if (s == "A" || s == "A_STANDARD") return LogicType::kStandard;
  if (s == "B" || s == "B_INVERSION") return LogicType::kInversion;
  if (s == "C" || s == "C_AMBIGUITY") return LogicType::kAmbiguity;
  if (s == "D" || s == "D_UNKNOWABLE") return LogicType::kUnknowable;
  throw std::invalid_argument("unknown logic type: " + std::string(s));
}

Mode parse_mode(std::string_view s) {
  if (s == "TEXT" || s == "text") return Mode::kText;
  if (s == "VISION" || s == "vision") return Mode::kVision;
  throw std::invalid_argument("unknown mode: " + std::string(s));
}

char type_letter(LogicType t) { return to_string(t).front(); }

}  // namespace mma
