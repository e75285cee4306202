#pragma once

// Robustness (similarity drop under mutation), accuracy (error counts with
// an innocent pool) and per-pair timing.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsim/executor/trace.hpp"
#include "bsim/harness/error_count.hpp"
#include "bsim/harness/pipeline.hpp"
#include "bsim/harness/submission.hpp"
#include "bsim/matcher/graph_matcher.hpp"
#include "json.hpp"

namespace bsim::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentParams {
  std::vector<int> levels{1, 2, 3, 4, 5};
  std::vector<double> chances{60};
  std::map<int, int> countsPerLevel;  // variants per (base, level, chance)
  std::uint64_t seed = 0;
  std::vector<bool> excludeModes{false};  // one table section per mode
  executor::ExecutorLimits limits;
  matcher::MatchOptions match;
  int jobs = 1;
  AnalysisCache* cache = nullptr;
  std::optional<std::filesystem::path> corpusOut;  // generated variants land here when set
};

struct DropStats {
  int variants = 0;
  double meanDrop = 0;  // points, i.e. percent of the 0..1 scale
};

struct RobustnessRow {
  std::string mode;  // "all" or "excluded"
  int level = 0;
  double chance = 0;
  int variants = 0;
  double meanDrop = 0;
  double minDrop = 0;
  double maxDrop = 0;
  DropStats injected;  // variants where a value-injecting rewrite fired
  DropStats clean;
};

struct Baseline {
  std::string id;
  double score = 0;
  std::size_t graphs = 0;
};

struct RobustnessTable {
  std::vector<Baseline> baselines;
  std::vector<RobustnessRow> rows;
  std::vector<IngestFailure> failures;
  bool partial = false;
};

// drop = 100 * (sim(base, base) - sim(base, variant))
RobustnessTable run_robustness(const std::vector<Submission>& bases, const ExperimentParams& params);

struct AccuracyRow {
  std::string mode;
  int level = 0;
  double chance = 0;
  ErrorCount count;
  double minPlagiarised = 0;  // lowest variant score in the cell
};

struct AccuracyTable {
  std::vector<std::string> innocentIds;
  int innocentPairs = 0;
  int excludedPairs = 0;
  double maxInnocent = 0;
  std::vector<RobustnessRow> drops;  // the same variants seen as robustness rows
  std::vector<AccuracyRow> rows;
  std::vector<IngestFailure> failures;
  bool partial = false;
};

// Innocent pool: all pairs of `innocent` minus `exclusions` (unordered id
// pairs). Each cell adds its base-vs-variant scores as plagiarised.
// DegenerateInput when a cell or the pool ends up empty.
AccuracyTable run_accuracy(const std::vector<Submission>& innocent, const std::vector<Submission>& bases,
                           const std::vector<std::pair<std::string, std::string>>& exclusions,
                           const ExperimentParams& params);

struct PairTiming {
  std::string a, b;
  double trace = 0;  // parse, resolve, compile and execute, both sides
  double build = 0;
  double match = 0;
  double total = 0;
};

// Single-threaded and uncached, so every pair pays the full pipeline.
std::vector<PairTiming> time_pairs(const std::vector<Submission>& subs, const executor::ExecutorLimits& limits = {},
                                   const matcher::MatchOptions& match = {});

struct ExperimentConfig {
  std::filesystem::path bases;
  std::optional<std::filesystem::path> innocent;
  std::optional<std::string> entry;
  std::vector<std::pair<std::string, std::string>> exclusions;
  std::optional<std::filesystem::path> cacheDir;
  std::optional<std::filesystem::path> output;
  ExperimentParams params;
};

// Relative paths are taken from the config file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& file);
ExperimentConfig parse_experiment_config(const nlohmann::ordered_json& doc, const std::filesystem::path& baseDir);

// Reports hold no timings or paths, so equal inputs give equal bytes.
nlohmann::ordered_json robustness_to_json(const RobustnessTable& t, const ExperimentParams& p);
nlohmann::ordered_json accuracy_to_json(const AccuracyTable& t, const ExperimentParams& p);
nlohmann::ordered_json timings_to_json(const std::vector<PairTiming>& rows);

}  // namespace bsim::harness
