#include "bsim/harness/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "bsim/executor/compiler.hpp"
#include "bsim/executor/executor.hpp"
#include "bsim/frontend/lexer.hpp"
#include "bsim/frontend/resolver.hpp"
#include "bsim/pidg/builder.hpp"
#include "bsim/pidg/pidg_json.hpp"
#include "json.hpp"

namespace bsim::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

frontend::ResolvedProgram front(const Submission& s) {
  try {
    return frontend::resolve_program(s.units, s.entry);
  } catch (const frontend::ParseError& e) {
    throw IngestError(s.id + ": " + e.what());
  } catch (const frontend::ResolveError& e) {
    throw IngestError(s.id + ": " + e.what());
  }
}

executor::CompiledProgram compile(const Submission& s, const frontend::ResolvedProgram& p) {
  if (p.entryPoints.empty()) throw IngestError(s.id + ": program has no entry points");
  try {
    return executor::compile_program(p);
  } catch (const std::runtime_error& e) {
    throw IngestError(s.id + ": " + e.what());
  }
}

std::vector<executor::ExecutionTrace> run(const Submission& s, const frontend::ResolvedProgram& p,
                                          const executor::CompiledProgram& cp,
                                          const executor::ExecutorLimits& limits) {
  std::vector<executor::ExecutionTrace> out;
  try {
    for (const auto& e : p.entryPoints) {
      auto ts = executor::execute_entry(p, cp, e, limits);
      for (auto& t : ts) out.push_back(std::move(t));
    }
  } catch (const executor::ExecutionError& e) {
    throw IngestError(s.id + ": " + e.what());
  }
  return out;
}

}  // namespace

std::vector<executor::ExecutionTrace> trace_submission(const Submission& s, const executor::ExecutorLimits& limits) {
  auto p = front(s);
  auto cp = compile(s, p);
  return run(s, p, cp, limits);
}

Analysis analyze(const Submission& s, const executor::ExecutorLimits& limits) {
  Analysis a;
  a.id = s.id;
  a.hash = content_hash(s);
  auto t0 = Clock::now();
  auto p = front(s);
  auto cp = compile(s, p);
  a.times.parse = since(t0);
  t0 = Clock::now();
  auto traces = run(s, p, cp, limits);
  a.times.trace = since(t0);
  a.traces = traces.size();
  t0 = Clock::now();
  a.graphs = pidg::build_pidg_set(traces);
  a.times.build = since(t0);
  a.prepared = matcher::PreparedProgram(a.graphs);
  return a;
}

std::string limits_key(const executor::ExecutorLimits& l) {
  return "l" + std::to_string(l.loopBound) + "-r" + std::to_string(l.recursionBound) + "-b" +
         std::to_string(l.contextBudget) + "-i" + std::to_string(l.instructionLimit);
}

std::shared_ptr<const Analysis> AnalysisCache::compute(const Submission& s, const executor::ExecutorLimits& limits,
                                                       const std::string& key) const {
  std::optional<fs::path> file;
  if (dir_) file = *dir_ / (key + ".json");
  if (file) {
    std::ifstream in(*file, std::ios::binary);
    if (in) {
      try {
        json doc = json::parse(in);
        if (doc.at("schema") == "bsim-cache/1" && doc.at("hash") == content_hash(s)) {
          auto a = std::make_shared<Analysis>();
          a->id = s.id;
          a->hash = doc.at("hash").get<std::string>();
          a->traces = doc.at("traces").get<std::size_t>();
          a->graphs = pidg::pidgs_from_json(doc.at("graphs"));
          a->prepared = matcher::PreparedProgram(a->graphs);
          a->fromDisk = true;
          return a;
        }
      } catch (const std::exception&) {
        // unreadable cache entries are recomputed and overwritten
      }
    }
  }
  auto a = std::make_shared<Analysis>(analyze(s, limits));
  if (file) {
    json doc = {{"schema", "bsim-cache/1"},
                {"hash", a->hash},
                {"limits", limits_key(limits)},
                {"traces", a->traces},
                {"graphs", pidg::pidgs_to_json(a->graphs)}};
    fs::create_directories(*dir_);
    // write then rename so a concurrent reader never sees half a file
    fs::path tmp = *file;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary);
      out << doc.dump() << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, *file, ec);
    if (ec) fs::remove(tmp, ec);
  }
  return a;
}

std::shared_ptr<const Analysis> AnalysisCache::get(const Submission& s, const executor::ExecutorLimits& limits) {
  std::string key = content_hash(s) + "-" + limits_key(limits);
  std::promise<std::shared_ptr<const Analysis>> promise;
  std::shared_future<std::shared_ptr<const Analysis>> fut;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      fut = promise.get_future().share();
      entries_.emplace(key, fut);
      owner = true;
    } else {
      fut = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(compute(s, limits, key));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  auto a = fut.get();
  if (a->id == s.id) return a;
  // same content under another id
  auto copy = std::make_shared<Analysis>(*a);
  copy->id = s.id;
  return copy;
}

std::size_t AnalysisCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  std::size_t errIndex = n;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < errIndex) {
          errIndex = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::size_t threads = std::min<std::size_t>(std::max(1, jobs), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < threads; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double similarity(const Analysis& a, const Analysis& b, const matcher::MatchOptions& opt) {
  return matcher::sim_program(a.prepared, b.prepared, opt).value;
}

SimilarityMatrix compare_submissions(const std::vector<Submission>& subs, const CompareOptions& opt) {
  AnalysisCache local;
  AnalysisCache& cache = opt.cache ? *opt.cache : local;
  std::vector<std::shared_ptr<const Analysis>> analyses(subs.size());
  std::vector<std::string> errors(subs.size());
  parallel_for(subs.size(), opt.jobs, [&](std::size_t i) {
    try {
      analyses[i] = cache.get(subs[i], opt.limits);
    } catch (const IngestError& e) {
      errors[i] = e.what();
    }
  });

  SimilarityMatrix m;
  std::vector<const Analysis*> ok;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (analyses[i]) {
      m.ids.push_back(subs[i].id);
      ok.push_back(analyses[i].get());
    } else {
      m.failures.push_back({subs[i].id, errors[i]});
    }
  }
  std::size_t n = ok.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  m.seconds.assign(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), opt.jobs, [&](std::size_t k) {
    auto [i, j] = pairs[k];
    auto t0 = Clock::now();
    double v = similarity(*ok[i], *ok[j], opt.match);
    double dt = since(t0);
    m.values[i][j] = m.values[j][i] = v;
    m.seconds[i][j] = m.seconds[j][i] = dt;
  });
  return m;
}

SimilarityMatrix compare_corpus(const fs::path& dir, const std::optional<std::string>& entry,
                                const CompareOptions& opt) {
  CorpusListing listing = load_corpus(dir, entry);
  SimilarityMatrix m = compare_submissions(listing.submissions, opt);
  m.failures.insert(m.failures.begin(), listing.failures.begin(), listing.failures.end());
  std::sort(m.failures.begin(), m.failures.end(),
            [](const IngestFailure& a, const IngestFailure& b) { return a.id < b.id; });
  return m;
}

double round4(double v) {
  double r = std::round(v * 10000.0) / 10000.0;
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string matrix_to_csv(const SimilarityMatrix& m) {
  std::ostringstream os;
  os << "id";
  for (const auto& id : m.ids) os << ',' << csv_field(id);
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    os << csv_field(m.ids[i]);
    for (std::size_t j = 0; j < m.ids.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.4f", round4(m.values[i][j]));
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace bsim::harness
