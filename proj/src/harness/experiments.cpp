#include "bsim/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>

#include "bsim/mutator/mutator.hpp"

namespace bsim::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

const char* mode_name(bool exclude) { return exclude ? "excluded" : "all"; }

struct BaseState {
  const Submission* sub = nullptr;
  std::shared_ptr<const Analysis> analysis;
  double self = 0;
};

struct ScoredVariant {
  std::size_t base = 0;
  int level = 0;
  double chance = 0;
  bool injecting = false;
  bool ok = false;
  double score = 0;
};

// Analyses every base once; failures go to `failures` and are skipped.
std::vector<BaseState> prepare_bases(const std::vector<Submission>& bases, const ExperimentParams& p,
                                     AnalysisCache& cache, std::vector<IngestFailure>& failures) {
  std::vector<std::shared_ptr<const Analysis>> as(bases.size());
  std::vector<std::string> errs(bases.size());
  parallel_for(bases.size(), p.jobs, [&](std::size_t i) {
    try {
      as[i] = cache.get(bases[i], p.limits);
    } catch (const IngestError& e) {
      errs[i] = e.what();
    }
  });
  std::vector<BaseState> out;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (!as[i]) {
      failures.push_back({bases[i].id, errs[i]});
      continue;
    }
    out.push_back({&bases[i], as[i], 0});
  }
  parallel_for(out.size(), p.jobs,
               [&](std::size_t i) { out[i].self = similarity(*out[i].analysis, *out[i].analysis, p.match); });
  return out;
}

std::vector<ScoredVariant> score_variants(const std::vector<BaseState>& bases, const ExperimentParams& p,
                                          bool exclude, std::vector<IngestFailure>& failures) {
  std::vector<mutator::BaseProgram> programs;
  for (const auto& b : bases) programs.push_back({b.sub->id, b.sub->units, b.sub->entry});
  mutator::CorpusConfig cc;
  cc.levels = p.levels;
  cc.chances = p.chances;
  cc.countsPerLevel = p.countsPerLevel;
  cc.seed = p.seed;
  cc.excludeValueInjecting = exclude;
  cc.jobs = p.jobs;
  mutator::Corpus corpus = mutator::generate_corpus(programs, cc);
  if (p.corpusOut) mutator::write_corpus(corpus, *p.corpusOut / mode_name(exclude));

  std::map<std::string, std::size_t> baseIndex;
  for (std::size_t i = 0; i < bases.size(); ++i) baseIndex[bases[i].sub->id] = i;
  std::vector<ScoredVariant> out(corpus.variants.size());
  std::vector<std::string> errs(corpus.variants.size());
  parallel_for(corpus.variants.size(), p.jobs, [&](std::size_t i) {
    const auto& v = corpus.variants[i];
    ScoredVariant& sv = out[i];
    sv.base = baseIndex.at(v.record.baseId);
    sv.level = v.record.level;
    sv.chance = v.record.chance;
    sv.injecting = v.record.value_injecting();
    Submission s{v.record.variantId, v.units, bases[sv.base].sub->entry};
    try {
      Analysis a = analyze(s, p.limits);
      sv.score = similarity(*bases[sv.base].analysis, a, p.match);
      sv.ok = true;
    } catch (const IngestError& e) {
      errs[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!out[i].ok) failures.push_back({corpus.variants[i].record.variantId, errs[i]});
  return out;
}

std::vector<RobustnessRow> drop_rows(const std::vector<BaseState>& bases, const std::vector<ScoredVariant>& vs,
                                     const ExperimentParams& p, bool exclude) {
  std::vector<RobustnessRow> rows;
  for (int level : p.levels)
    for (double chance : p.chances) {
      RobustnessRow r;
      r.mode = mode_name(exclude);
      r.level = level;
      r.chance = chance;
      double sum = 0, sumInj = 0, sumClean = 0;
      r.minDrop = std::numeric_limits<double>::infinity();
      r.maxDrop = -std::numeric_limits<double>::infinity();
      for (const auto& v : vs) {
        if (!v.ok || v.level != level || v.chance != chance) continue;
        double drop = 100.0 * (bases[v.base].self - v.score);
        ++r.variants;
        sum += drop;
        r.minDrop = std::min(r.minDrop, drop);
        r.maxDrop = std::max(r.maxDrop, drop);
        if (v.injecting) {
          ++r.injected.variants;
          sumInj += drop;
        } else {
          ++r.clean.variants;
          sumClean += drop;
        }
      }
      if (r.variants) {
        r.meanDrop = sum / r.variants;
      } else {
        r.minDrop = r.maxDrop = 0;
      }
      if (r.injected.variants) r.injected.meanDrop = sumInj / r.injected.variants;
      if (r.clean.variants) r.clean.meanDrop = sumClean / r.clean.variants;
      rows.push_back(r);
    }
  return rows;
}

}  // namespace

RobustnessTable run_robustness(const std::vector<Submission>& bases, const ExperimentParams& params) {
  AnalysisCache local;
  AnalysisCache& cache = params.cache ? *params.cache : local;
  RobustnessTable t;
  auto states = prepare_bases(bases, params, cache, t.failures);
  for (const auto& b : states) t.baselines.push_back({b.sub->id, b.self, b.analysis->graphs.size()});
  for (bool exclude : params.excludeModes) {
    auto vs = score_variants(states, params, exclude, t.failures);
    auto rows = drop_rows(states, vs, params, exclude);
    t.rows.insert(t.rows.end(), rows.begin(), rows.end());
  }
  t.partial = !t.failures.empty();
  return t;
}

AccuracyTable run_accuracy(const std::vector<Submission>& innocent, const std::vector<Submission>& bases,
                           const std::vector<std::pair<std::string, std::string>>& exclusions,
                           const ExperimentParams& params) {
  AnalysisCache local;
  AnalysisCache& cache = params.cache ? *params.cache : local;
  AccuracyTable t;

  std::vector<std::shared_ptr<const Analysis>> pool;
  {
    std::vector<std::shared_ptr<const Analysis>> as(innocent.size());
    std::vector<std::string> errs(innocent.size());
    parallel_for(innocent.size(), params.jobs, [&](std::size_t i) {
      try {
        as[i] = cache.get(innocent[i], params.limits);
      } catch (const IngestError& e) {
        errs[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < innocent.size(); ++i) {
      if (as[i]) {
        pool.push_back(as[i]);
        t.innocentIds.push_back(innocent[i].id);
      } else {
        t.failures.push_back({innocent[i].id, errs[i]});
      }
    }
  }
  std::set<std::pair<std::string, std::string>> excluded;
  for (auto [a, b] : exclusions) {
    if (b < a) std::swap(a, b);
    excluded.insert({a, b});
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      auto key = std::minmax(t.innocentIds[i], t.innocentIds[j]);
      if (excluded.count({key.first, key.second}))
        ++t.excludedPairs;
      else
        pairs.emplace_back(i, j);
    }
  std::vector<double> innocentScores(pairs.size());
  parallel_for(pairs.size(), params.jobs, [&](std::size_t k) {
    innocentScores[k] = similarity(*pool[pairs[k].first], *pool[pairs[k].second], params.match);
  });
  t.innocentPairs = static_cast<int>(innocentScores.size());
  if (innocentScores.empty()) throw DegenerateInput("innocent pool has no pairs");
  t.maxInnocent = *std::max_element(innocentScores.begin(), innocentScores.end());

  auto states = prepare_bases(bases, params, cache, t.failures);
  for (bool exclude : params.excludeModes) {
    auto vs = score_variants(states, params, exclude, t.failures);
    auto drops = drop_rows(states, vs, params, exclude);
    t.drops.insert(t.drops.end(), drops.begin(), drops.end());
    for (int level : params.levels)
      for (double chance : params.chances) {
        std::vector<LabelledScore> scores;
        for (double s : innocentScores) scores.push_back({s, Label::Innocent});
        AccuracyRow r;
        r.mode = mode_name(exclude);
        r.level = level;
        r.chance = chance;
        r.minPlagiarised = std::numeric_limits<double>::infinity();
        for (const auto& v : vs)
          if (v.ok && v.level == level && v.chance == chance) {
            scores.push_back({v.score, Label::Plagiarised});
            r.minPlagiarised = std::min(r.minPlagiarised, v.score);
          }
        r.count = count_errors(scores);
        t.rows.push_back(r);
      }
  }
  t.partial = !t.failures.empty();
  return t;
}

std::vector<PairTiming> time_pairs(const std::vector<Submission>& subs, const executor::ExecutorLimits& limits,
                                   const matcher::MatchOptions& match) {
  std::vector<PairTiming> rows;
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = i + 1; j < subs.size(); ++j) {
      PairTiming r;
      r.a = subs[i].id;
      r.b = subs[j].id;
      auto t0 = Clock::now();
      Analysis a = analyze(subs[i], limits);
      Analysis b = analyze(subs[j], limits);
      auto t1 = Clock::now();
      similarity(a, b, match);
      auto t2 = Clock::now();
      r.trace = a.times.parse + a.times.trace + b.times.parse + b.times.trace;
      r.build = a.times.build + b.times.build;
      r.match = std::chrono::duration<double>(t2 - t1).count();
      r.total = std::chrono::duration<double>(t2 - t0).count();
      rows.push_back(r);
    }
  return rows;
}

namespace {

const std::set<std::string> kConfigKeys = {"bases",  "innocent", "entry",      "levels",   "chances",
                                           "counts", "count",    "seed",       "excludeValueInjecting",
                                           "limits", "match",    "jobs",       "exclusions",
                                           "cacheDir", "corpusOut", "output"};

fs::path rel(const fs::path& base, const std::string& p) {
  fs::path x(p);
  return x.is_absolute() ? x : base / x;
}

template <typename T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' is missing or has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& baseDir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : doc.items())
    if (!kConfigKeys.count(k)) throw ConfigError("unknown config field '" + k + "'");
  ExperimentConfig c;
  ExperimentParams& p = c.params;
  c.bases = rel(baseDir, field<std::string>(doc, "bases"));
  if (doc.contains("innocent")) c.innocent = rel(baseDir, field<std::string>(doc, "innocent"));
  if (doc.contains("entry")) c.entry = field<std::string>(doc, "entry");
  if (doc.contains("cacheDir")) c.cacheDir = rel(baseDir, field<std::string>(doc, "cacheDir"));
  if (doc.contains("corpusOut")) p.corpusOut = rel(baseDir, field<std::string>(doc, "corpusOut"));
  if (doc.contains("output")) c.output = rel(baseDir, field<std::string>(doc, "output"));
  if (doc.contains("levels")) p.levels = field<std::vector<int>>(doc, "levels");
  if (doc.contains("chances")) p.chances = field<std::vector<double>>(doc, "chances");
  if (p.levels.empty() || p.chances.empty()) throw ConfigError("levels and chances must not be empty");
  for (int l : p.levels)
    if (l < mutator::kMinLevel || l > mutator::kMaxLevel) throw ConfigError("level out of range: " + std::to_string(l));
  for (double ch : p.chances)
    if (!(ch >= 0 && ch <= 100)) throw ConfigError("chance must be in [0, 100]");
  if (doc.contains("count") == doc.contains("counts")) throw ConfigError("give exactly one of 'count' or 'counts'");
  if (doc.contains("count")) {
    int n = field<int>(doc, "count");
    for (int l : p.levels) p.countsPerLevel[l] = n;
  } else {
    const json& counts = doc.at("counts");
    if (!counts.is_object()) throw ConfigError("'counts' maps level to variant count");
    for (int l : p.levels) {
      std::string k = std::to_string(l);
      if (!counts.contains(k) || !counts.at(k).is_number_integer()) throw ConfigError("no count for level " + k);
      p.countsPerLevel[l] = counts.at(k).get<int>();
    }
  }
  for (const auto& [l, n] : p.countsPerLevel)
    if (n <= 0) throw ConfigError("variant count must be positive for level " + std::to_string(l));
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    p.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("excludeValueInjecting")) {
    const json& e = doc.at("excludeValueInjecting");
    if (e.is_boolean()) {
      p.excludeModes = {e.get<bool>()};
    } else if (e.is_array() && !e.empty()) {
      p.excludeModes.clear();
      for (const auto& x : e) {
        if (!x.is_boolean()) throw ConfigError("excludeValueInjecting holds booleans");
        p.excludeModes.push_back(x.get<bool>());
      }
    } else {
      throw ConfigError("excludeValueInjecting must be a boolean or a non-empty array of booleans");
    }
  }
  if (doc.contains("limits")) {
    const json& l = doc.at("limits");
    if (!l.is_object()) throw ConfigError("'limits' must be an object");
    for (const auto& [k, v] : l.items()) {
      if (!v.is_number_integer() || v.get<long>() <= 0) throw ConfigError("limit '" + k + "' must be a positive integer");
      if (k == "loopBound")
        p.limits.loopBound = v.get<int>();
      else if (k == "recursionBound")
        p.limits.recursionBound = v.get<int>();
      else if (k == "contextBudget")
        p.limits.contextBudget = v.get<int>();
      else if (k == "instructionLimit")
        p.limits.instructionLimit = v.get<long>();
      else
        throw ConfigError("unknown limit '" + k + "'");
    }
  }
  if (doc.contains("match")) {
    const json& m = doc.at("match");
    if (!m.is_object()) throw ConfigError("'match' must be an object");
    for (const auto& [k, v] : m.items()) {
      if (!v.is_boolean()) throw ConfigError("match option '" + k + "' must be a boolean");
      if (k == "countEdges")
        p.match.countEdges = v.get<bool>();
      else if (k == "exactAssignment")
        p.match.exactAssignment = v.get<bool>();
      else
        throw ConfigError("unknown match option '" + k + "'");
    }
  }
  p.jobs = doc.contains("jobs") ? field<int>(doc, "jobs") : 0;
  if (p.jobs < 0) throw ConfigError("jobs must be >= 0");
  if (p.jobs == 0) p.jobs = default_jobs();
  if (doc.contains("exclusions")) {
    const json& ex = doc.at("exclusions");
    if (!ex.is_array()) throw ConfigError("'exclusions' is a list of id pairs");
    for (const auto& pr : ex) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
        throw ConfigError("each exclusion is a pair of submission ids");
      c.exclusions.emplace_back(pr[0].get<std::string>(), pr[1].get<std::string>());
    }
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc, file.parent_path());
}

namespace {

json params_json(const ExperimentParams& p) {
  json counts = json::object();
  for (const auto& [l, n] : p.countsPerLevel) counts[std::to_string(l)] = n;
  json modes = json::array();
  for (bool e : p.excludeModes) modes.push_back(mode_name(e));
  return {{"seed", p.seed},
          {"levels", p.levels},
          {"chances", p.chances},
          {"counts", counts},
          {"modes", modes},
          {"limits",
           {{"loopBound", p.limits.loopBound},
            {"recursionBound", p.limits.recursionBound},
            {"contextBudget", p.limits.contextBudget},
            {"instructionLimit", p.limits.instructionLimit}}},
          {"match", {{"countEdges", p.match.countEdges}, {"exactAssignment", p.match.exactAssignment}}}};
}

json stats_json(const DropStats& s) {
  return {{"variants", s.variants}, {"meanDrop", s.variants ? json(round4(s.meanDrop)) : json(nullptr)}};
}

json row_json(const RobustnessRow& r) {
  return {{"mode", r.mode},
          {"level", r.level},
          {"chance", r.chance},
          {"variants", r.variants},
          {"meanDrop", round4(r.meanDrop)},
          {"minDrop", round4(r.minDrop)},
          {"maxDrop", round4(r.maxDrop)},
          {"valueInjected", stats_json(r.injected)},
          {"withoutValueInjection", stats_json(r.clean)}};
}

json failures_json(const std::vector<IngestFailure>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back({{"id", f.id}, {"message", f.message}});
  return out;
}

}  // namespace

json robustness_to_json(const RobustnessTable& t, const ExperimentParams& p) {
  json baselines = json::array();
  for (const auto& b : t.baselines)
    baselines.push_back({{"id", b.id}, {"selfSimilarity", round4(b.score)}, {"graphs", b.graphs}});
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(row_json(r));
  return {{"experiment", "robustness"},
          {"parameters", params_json(p)},
          {"baselines", baselines},
          {"rows", rows},
          {"failures", failures_json(t.failures)},
          {"partial", t.partial}};
}

json accuracy_to_json(const AccuracyTable& t, const ExperimentParams& p) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"mode", r.mode},
                    {"level", r.level},
                    {"chance", r.chance},
                    {"plagiarised", r.count.plagiarised},
                    {"innocent", r.count.innocent},
                    {"errors", r.count.errors},
                    {"threshold", r.count.threshold ? json(round4(*r.count.threshold)) : json(nullptr)},
                    {"minPlagiarisedScore", round4(r.minPlagiarised)}});
  json drops = json::array();
  for (const auto& r : t.drops) drops.push_back(row_json(r));
  return {{"experiment", "accuracy"},
          {"parameters", params_json(p)},
          {"innocent", {{"submissions", t.innocentIds}, {"pairs", t.innocentPairs}, {"excludedPairs", t.excludedPairs},
                        {"maxScore", round4(t.maxInnocent)}}},
          {"rows", rows},
          {"drops", drops},
          {"failures", failures_json(t.failures)},
          {"partial", t.partial}};
}

json timings_to_json(const std::vector<PairTiming>& rows) {
  json out = json::array();
  PairTiming mean;
  for (const auto& r : rows) {
    out.push_back({{"a", r.a}, {"b", r.b}, {"trace", r.trace}, {"build", r.build}, {"match", r.match}, {"total", r.total}});
    mean.trace += r.trace;
    mean.build += r.build;
    mean.match += r.match;
    mean.total += r.total;
  }
  double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  return {{"experiment", "timing"},
          {"pairs", rows.size()},
          {"mean", {{"trace", mean.trace / n}, {"build", mean.build / n}, {"match", mean.match / n}, {"total", mean.total / n}}},
          {"rows", out}};
}

}  // namespace bsim::harness
