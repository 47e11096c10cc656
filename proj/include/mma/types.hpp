#pragma once

#include <string_view>

namespace mma {

enum class Verdict { kTrue, kFalse, kUnknown };

// A/B are deterministic (the truth is recoverable), C/D indeterminate.
enum class LogicType { kStandard, kInversion, kAmbiguity, kUnknowable };

enum class Mode { kText, kVision };

std::string_view to_string(Verdict v);
std::string_view to_string(LogicType t);
std::string_view to_string(Mode m);

Verdict parse_verdict(std::string_view s);
// Accepts the full name ("B_INVERSION") or the bare letter ("B").
LogicType parse_logic_type(std::string_view s);
Mode parse_mode(std::string_view s);

char type_letter(LogicType t);

inline bool is_deterministic(LogicType t) {
  return t == LogicType::kStandard || t == LogicType::kInversion;
}

}  // namespace mma
