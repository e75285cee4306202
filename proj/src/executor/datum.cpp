#include "bsim/executor/datum.hpp"

#include <charconv>
#include <cmath>

namespace bsim::executor {

namespace {

std::string format_double(double d, bool single) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto res = single ? std::to_chars(buf, buf + sizeof buf, static_cast<float>(d))
                    : std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::string Datum::literal() const {
  if (kind != DatumKind::Value || mode != Mode::Concrete) return "";
  if (type == "char") {
    std::string s = "'";
    append_utf8(s, static_cast<std::uint32_t>(scalar.i));
    return s + "'";
  }
  return stringify_scalar(scalar, type);
}

const char* to_string(DatumKind k) {
  switch (k) {
    case DatumKind::Value: return "Value";
    case DatumKind::Object: return "Object";
    case DatumKind::Array: return "Array";
    case DatumKind::Unknown: return "Unknown";
  }
  return "?";
}

const char* to_string(Mode m) { return m == Mode::Concrete ? "Concrete" : "Symbolic"; }

bool is_floating(const std::string& p) { return p == "float" || p == "double"; }

bool is_integral(const std::string& p) {
  return p == "byte" || p == "short" || p == "int" || p == "long" || p == "char";
}

Scalar zero_scalar(const std::string& p) {
  Scalar s;
  s.isFloat = is_floating(p);
  return s;
}

std::int64_t wrap_integral(std::int64_t v, const std::string& p) {
  auto u = static_cast<std::uint64_t>(v);
  if (p == "byte") return static_cast<std::int8_t>(u);
  if (p == "short") return static_cast<std::int16_t>(u);
  if (p == "char") return static_cast<std::uint16_t>(u);
  if (p == "int") return static_cast<std::int32_t>(u);
  return v;
}

std::string stringify_scalar(const Scalar& s, const std::string& p) {
  if (p == "boolean") return s.i ? "true" : "false";
  if (p == "char") {
    std::string out;
    append_utf8(out, static_cast<std::uint32_t>(s.i));
    return out;
  }
  if (is_floating(p)) return format_double(s.d, p == "float");
  return std::to_string(s.i);
}

}  // namespace bsim::executor
