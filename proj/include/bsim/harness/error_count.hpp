#pragma once

// Minimum misclassification count over score thresholds. A pair is flagged
// as plagiarised when its score is strictly above the threshold.

#include <optional>
#include <stdexcept>
#include <vector>

namespace bsim::harness {

enum class Label { Innocent, Plagiarised };

struct LabelledScore {
  double score = 0;
  Label label = Label::Innocent;
};

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ErrorCount {
  int errors = 0;
  // Flag scores > threshold; nullopt flags everything. Ties in the error
  // count go to the lowest threshold.
  std::optional<double> threshold;
  int plagiarised = 0;
  int innocent = 0;
};

// O(n log n) sweep over cuts between groups of equal scores.
ErrorCount count_errors(const std::vector<LabelledScore>& scores);

// O(n^2) reference: every candidate threshold tried independently.
ErrorCount count_errors_brute_force(const std::vector<LabelledScore>& scores);

}  // namespace bsim::harness
