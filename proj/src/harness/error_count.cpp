#include "bsim/harness/error_count.hpp"

#include <algorithm>
#include <cmath>

namespace bsim::harness {

namespace {

void check(const std::vector<LabelledScore>& scores, ErrorCount& out) {
  for (const auto& s : scores) {
    if (std::isnan(s.score)) throw DegenerateInput("score is NaN");
    (s.label == Label::Plagiarised ? out.plagiarised : out.innocent)++;
  }
  if (out.plagiarised == 0) throw DegenerateInput("no plagiarised scores");
  if (out.innocent == 0) throw DegenerateInput("no innocent scores");
}

}  // namespace

ErrorCount count_errors(const std::vector<LabelledScore>& scores) {
  ErrorCount out;
  check(scores, out);
  std::vector<LabelledScore> v = scores;
  std::sort(v.begin(), v.end(), [](const LabelledScore& a, const LabelledScore& b) { return a.score < b.score; });
  // cut below everything: every innocent pair is a false positive
  int errors = out.innocent;
  out.errors = errors;
  out.threshold.reset();
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    for (; j < v.size() && v[j].score == v[i].score; ++j) {
      if (v[j].label == Label::Innocent)
        --errors;
      else
        ++errors;
    }
    if (errors < out.errors) {
      out.errors = errors;
      out.threshold = v[i].score;
    }
    i = j;
  }
  return out;
}

ErrorCount count_errors_brute_force(const std::vector<LabelledScore>& scores) {
  ErrorCount out;
  check(scores, out);
  std::vector<std::optional<double>> cuts{std::nullopt};
  for (const auto& s : scores) cuts.push_back(s.score);
  std::sort(cuts.begin() + 1, cuts.end(), [](auto a, auto b) { return *a < *b; });
  out.errors = -1;
  for (const auto& t : cuts) {
    int errors = 0;
    for (const auto& s : scores) {
      bool flagged = !t || s.score > *t;
      if (flagged != (s.label == Label::Plagiarised)) ++errors;
    }
    if (out.errors < 0 || errors < out.errors) {
      out.errors = errors;
      out.threshold = t;
    }
  }
  return out;
}

}  // namespace bsim::harness
