#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bsim/executor/trace.hpp"
#include "json.hpp"

namespace bsim::executor {

inline constexpr const char* kTraceSchema = "bsim-trace/1";

class TraceSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::ordered_json trace_to_json(const ExecutionTrace& t);
ExecutionTrace trace_from_json(const nlohmann::ordered_json& doc);

// A file holds either one trace document or {"schema", "traces": [...]}.
nlohmann::ordered_json traces_to_json(const std::vector<ExecutionTrace>& ts);
std::vector<ExecutionTrace> traces_from_json(const nlohmann::ordered_json& doc);

}  // namespace bsim::executor
