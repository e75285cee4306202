#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bsim::executor {

// Unknown is a synthetic result whose shape is not known yet; first use
// refines it to a Value, Object or String.
enum class DatumKind : std::uint8_t { Value, Object, Array, Unknown };
enum class Mode : std::uint8_t { Concrete, Symbolic };

enum DatumFlag : std::uint8_t {
  kStatic = 1,
  kSynthetic = 2,
  kEntryParam = 4,
};

using DatumId = int;
constexpr DatumId kNoDatum = -1;

// Concrete scalar payload. Booleans and chars use `i`.
struct Scalar {
  std::int64_t i = 0;
  double d = 0;
  bool isFloat = false;
};

struct Datum {
  DatumId id = kNoDatum;
  DatumKind kind = DatumKind::Unknown;
  Mode mode = Mode::Symbolic;
  bool isNull = false;
  bool sourceDefined = false;  // runtime type declared in the submission
  std::uint8_t flags = 0;
  std::string type;    // runtime type: "int", "String", "User", "int[]"; "" unknown
  std::string origin;  // static boundary field origin, e.g. "System.out"
  Scalar scalar;       // concrete Values
  std::string text;    // concrete String content
  bool hasText = false;
  // Field table (objects) and element table (arrays; key = index text).
  std::vector<std::pair<std::string, DatumId>> members;

  bool concrete() const { return mode == Mode::Concrete; }
  bool is_string() const { return kind == DatumKind::Object && type == "String"; }
  DatumId member(const std::string& key) const {
    for (const auto& [k, v] : members)
      if (k == key) return v;
    return kNoDatum;
  }
  void set_member(const std::string& key, DatumId v) {
    for (auto& [k, old] : members)
      if (k == key) {
        old = v;
        return;
      }
    members.emplace_back(key, v);
  }
  // Canonical literal text for concrete Values ("42", "2.5", "true", "'c'").
  std::string literal() const;
};

const char* to_string(DatumKind k);
const char* to_string(Mode m);

// Zero/false for a primitive type name.
Scalar zero_scalar(const std::string& primitive);
bool is_floating(const std::string& primitive);
bool is_integral(const std::string& primitive);

// Wraps an integer to the width of `primitive`.
std::int64_t wrap_integral(std::int64_t v, const std::string& primitive);

// Text produced by Java string conversion of a concrete Value.
std::string stringify_scalar(const Scalar& s, const std::string& primitive);

}  // namespace bsim::executor
