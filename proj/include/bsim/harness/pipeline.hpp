#pragma once

// parse -> resolve -> execute -> build, then pairwise matching.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bsim/executor/trace.hpp"
#include "bsim/harness/submission.hpp"
#include "bsim/matcher/graph_matcher.hpp"
#include "bsim/matcher/program_score.hpp"
#include "bsim/pidg/pidg.hpp"

namespace bsim::harness {

struct StageTimes {
  double parse = 0;  // parse + resolve + compile
  double trace = 0;  // symbolic execution
  double build = 0;  // PIDG construction
};

struct Analysis {
  std::string id;
  std::string hash;
  std::size_t traces = 0;
  std::vector<pidg::Pidg> graphs;
  matcher::PreparedProgram prepared;
  StageTimes times;
  bool fromDisk = false;
};

// Front-end and executor failures surface as IngestError naming the submission.
Analysis analyze(const Submission& s, const executor::ExecutorLimits& limits = {});

// Also keeps the traces (for `bsim trace`).
std::vector<executor::ExecutionTrace> trace_submission(const Submission& s, const executor::ExecutorLimits& limits = {});

std::string limits_key(const executor::ExecutorLimits& limits);

// One analysis per (content hash, limits). Entries are computed once even
// under concurrent requests; with a directory, graphs persist between runs.
class AnalysisCache {
 public:
  explicit AnalysisCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {}

  std::shared_ptr<const Analysis> get(const Submission& s, const executor::ExecutorLimits& limits);
  std::size_t size() const;

 private:
  std::shared_ptr<const Analysis> compute(const Submission& s, const executor::ExecutorLimits& limits,
                                          const std::string& key) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const Analysis>>> entries_;
};

int default_jobs();

// Runs fn(0..n-1) on up to `jobs` threads. The exception of the lowest
// failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct CompareOptions {
  executor::ExecutorLimits limits;
  matcher::MatchOptions match;
  int jobs = 1;
  AnalysisCache* cache = nullptr;  // a private cache when null
};

struct SimilarityMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> values;   // symmetric; diagonal is the self-baseline
  std::vector<std::vector<double>> seconds;  // match time per pair
  std::vector<IngestFailure> failures;
};

double similarity(const Analysis& a, const Analysis& b, const matcher::MatchOptions& opt = {});

SimilarityMatrix compare_submissions(const std::vector<Submission>& subs, const CompareOptions& opt = {});
SimilarityMatrix compare_corpus(const std::filesystem::path& dir, const std::optional<std::string>& entry,
                                const CompareOptions& opt = {});

// Header row "id,<ids...>", one row per submission, 4 decimals.
std::string matrix_to_csv(const SimilarityMatrix& m);

// Fixed-point rounding used by every report.
double round4(double v);

}  // namespace bsim::harness
