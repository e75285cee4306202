#pragma once

#include <stdexcept>
#include <vector>

#include "bsim/executor/trace.hpp"
#include "bsim/pidg/pidg.hpp"

namespace bsim::pidg {

class MalformedTrace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Pidg build_pidg(const executor::ExecutionTrace& trace);
std::vector<Pidg> build_pidg_set(const std::vector<executor::ExecutionTrace>& traces);

}  // namespace bsim::pidg
