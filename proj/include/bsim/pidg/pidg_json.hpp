#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bsim/pidg/pidg.hpp"
#include "json.hpp"

namespace bsim::pidg {

inline constexpr const char* kPidgSchema = "bsim-pidg/1";

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nodes are emitted in id order, edges in insertion order, so output is
// byte-stable for a given graph.
nlohmann::ordered_json pidg_to_json(const Pidg& g);
Pidg pidg_from_json(const nlohmann::ordered_json& doc);

nlohmann::ordered_json pidgs_to_json(const std::vector<Pidg>& gs);
// Accepts one graph document or {"schema", "graphs": [...]}.
std::vector<Pidg> pidgs_from_json(const nlohmann::ordered_json& doc);

std::string pidg_to_dot(const Pidg& g);

}  // namespace bsim::pidg
