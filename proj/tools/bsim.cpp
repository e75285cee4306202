// bsim: behavioural similarity for submissions of the mini-language.
// exit codes: 0 ok, 1 usage, 2 ingest failure, 3 internal error

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsim/executor/trace_json.hpp"
#include "bsim/frontend/lexer.hpp"
#include "bsim/frontend/printer.hpp"
#include "bsim/frontend/resolver.hpp"
#include "bsim/harness/experiments.hpp"
#include "bsim/harness/pipeline.hpp"
#include "bsim/harness/submission.hpp"
#include "bsim/mutator/mutator.hpp"
#include "bsim/pidg/builder.hpp"
#include "bsim/pidg/pidg_json.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace bsim;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIngest = 2, kInternal = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  fs::path p(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw harness::IngestError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> opt_entry(const std::string& e) {
  if (e.empty()) return std::nullopt;
  return e;
}

const char* member_kind(const frontend::Member& m) {
  if (m.as<frontend::FieldDecl>()) return "field";
  if (m.as<frontend::MethodDecl>()) return "method";
  if (m.as<frontend::ConstructorDecl>()) return "constructor";
  return "initializer";
}

std::string member_name(const frontend::Member& m) {
  if (auto* f = m.as<frontend::FieldDecl>()) {
    std::string s;
    for (const auto& v : f->vars) s += (s.empty() ? "" : ",") + v.name;
    return s;
  }
  if (auto* md = m.as<frontend::MethodDecl>()) return md->name;
  if (auto* c = m.as<frontend::ConstructorDecl>()) return c->name;
  return m.as<frontend::InitializerDecl>()->isStatic ? "static" : "instance";
}

int cmd_parse(const std::vector<std::string>& files, bool print, const std::string& entry) {
  std::vector<frontend::Ast> asts;
  json units = json::array();
  for (const auto& f : files) {
    frontend::SourceUnit u{f, read_text(f)};
    frontend::Ast ast = frontend::parse_unit(u);
    if (print) {
      std::cout << frontend::print_unit(ast);
    } else {
      json classes = json::array();
      for (const auto& c : ast.classes) {
        json members = json::array();
        for (const auto& m : c.members) members.push_back({{"kind", member_kind(m)}, {"name", member_name(m)}});
        classes.push_back({{"name", c.name}, {"members", members}});
      }
      std::string pkg;
      if (ast.package)
        for (const auto& s : ast.package->segments) pkg += (pkg.empty() ? "" : ".") + s;
      units.push_back({{"path", f}, {"package", pkg}, {"classes", classes}});
    }
    asts.push_back(std::move(ast));
  }
  frontend::ResolvedProgram p = frontend::resolve_program(std::move(asts), opt_entry(entry));
  if (print) return kOk;
  json entries = json::array();
  for (const auto& e : p.entryPoints) entries.push_back(p.signature(e));
  json api(p.apiBoundary);
  json doc = {{"units", units}, {"entryPoints", entries}, {"apiBoundary", api}, {"warnings", p.warnings}};
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

void check_limits(const executor::ExecutorLimits& l) {
  if (l.loopBound <= 0 || l.recursionBound <= 0 || l.contextBudget <= 0 || l.instructionLimit <= 0)
    throw UsageError("executor limits must be positive");
}

int cmd_trace(const std::string& path, const std::string& entry, const executor::ExecutorLimits& limits,
              const std::string& out, const std::string& graphOut) {
  check_limits(limits);
  auto sub = harness::load_submission(path, opt_entry(entry));
  auto traces = harness::trace_submission(sub, limits);
  emit(executor::traces_to_json(traces).dump(2) + "\n", out);
  if (!graphOut.empty()) emit(pidg::pidgs_to_json(pidg::build_pidg_set(traces)).dump(2) + "\n", graphOut);
  return kOk;
}

int cmd_graph(const std::string& traceFile, const std::string& out, bool dot) {
  json doc;
  try {
    doc = json::parse(read_text(traceFile));
  } catch (const json::parse_error& e) {
    throw harness::IngestError(traceFile + " is not valid JSON: " + e.what());
  }
  std::vector<executor::ExecutionTrace> traces;
  try {
    traces = executor::traces_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw harness::IngestError(traceFile + ": malformed trace document: " + e.what());
  }
  auto graphs = pidg::build_pidg_set(traces);
  if (dot) {
    std::string text;
    for (const auto& g : graphs) text += pidg::pidg_to_dot(g);
    emit(text, out);
  } else {
    emit(pidg::pidgs_to_json(graphs).dump(2) + "\n", out);
  }
  return kOk;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& entry,
                const executor::ExecutorLimits& limits, bool exact) {
  check_limits(limits);
  auto sa = harness::load_submission(a, opt_entry(entry));
  auto sb = harness::load_submission(b, opt_entry(entry));
  matcher::MatchOptions mo;
  mo.exactAssignment = exact;
  harness::Analysis xa = harness::analyze(sa, limits);
  harness::Analysis xb = harness::analyze(sb, limits);
  json doc = {{"a", sa.id},
              {"b", sb.id},
              {"similarity", harness::round4(harness::similarity(xa, xb, mo))},
              {"baselines",
               {{"a", harness::round4(harness::similarity(xa, xa, mo))},
                {"b", harness::round4(harness::similarity(xb, xb, mo))}}},
              {"graphs", {{"a", xa.graphs.size()}, {"b", xb.graphs.size()}}}};
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int cmd_corpus(const std::string& dir, const std::string& entry, const executor::ExecutorLimits& limits, int jobs,
               const std::string& out, const std::string& cacheDir) {
  check_limits(limits);
  if (jobs < 0) throw UsageError("--jobs must be >= 0");
  std::optional<harness::AnalysisCache> cache;
  cache.emplace(cacheDir.empty() ? std::nullopt : std::optional<fs::path>(cacheDir));
  harness::CompareOptions opt;
  opt.limits = limits;
  opt.jobs = jobs == 0 ? harness::default_jobs() : jobs;
  opt.cache = &*cache;
  auto m = harness::compare_corpus(dir, opt_entry(entry), opt);
  for (const auto& f : m.failures) std::cerr << "skipped " << f.id << ": " << f.message << "\n";
  emit(harness::matrix_to_csv(m), out);
  return kOk;
}

int cmd_mutate(const std::string& base, int level, double chance, std::uint64_t seed, bool exclude,
               const std::string& entry, const std::string& outDir) {
  mutator::MutationConfig cfg{level, chance, seed, exclude};
  try {
    mutator::validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto sub = harness::load_submission(base, opt_entry(entry));
  mutator::Variant v;
  try {
    v = mutator::mutate(sub.units, cfg, sub.entry, sub.id, sub.id + "-variant");
  } catch (const frontend::ParseError& e) {
    throw harness::IngestError(sub.id + ": " + e.what());
  } catch (const frontend::ResolveError& e) {
    throw harness::IngestError(sub.id + ": " + e.what());
  }
  if (outDir.empty()) {
    for (const auto& u : v.units) {
      if (v.units.size() > 1) std::cout << "// ==> " << u.path << "\n";
      std::cout << u.text;
    }
    std::cerr << mutator::record_to_json(v.record).dump(2) << "\n";
    return kOk;
  }
  fs::create_directories(outDir);
  for (const auto& u : v.units) emit(u.text, (fs::path(outDir) / fs::path(u.path).filename()).string());
  emit(mutator::record_to_json(v.record).dump(2) + "\n", (fs::path(outDir) / "variant.json").string());
  return kOk;
}

int cmd_experiment(const std::string& kind, const std::string& config, const std::string& out, int jobs) {
  harness::ExperimentConfig cfg = harness::load_experiment_config(config);
  if (jobs < 0) throw UsageError("--jobs must be >= 0");
  if (jobs > 0) cfg.params.jobs = jobs;
  std::optional<harness::AnalysisCache> cache;
  cache.emplace(cfg.cacheDir);
  cfg.params.cache = &*cache;
  auto bases = harness::load_corpus(cfg.bases, cfg.entry);
  for (const auto& f : bases.failures) std::cerr << "skipped " << f.id << ": " << f.message << "\n";
  if (bases.submissions.empty()) throw harness::IngestError("no base programs under " + cfg.bases.string());
  json report;
  if (kind == "robustness") {
    auto t = harness::run_robustness(bases.submissions, cfg.params);
    report = harness::robustness_to_json(t, cfg.params);
  } else if (kind == "accuracy") {
    if (!cfg.innocent) throw harness::ConfigError("accuracy needs an 'innocent' corpus");
    auto pool = harness::load_corpus(*cfg.innocent, cfg.entry);
    for (const auto& f : pool.failures) std::cerr << "skipped " << f.id << ": " << f.message << "\n";
    auto t = harness::run_accuracy(pool.submissions, bases.submissions, cfg.exclusions, cfg.params);
    report = harness::accuracy_to_json(t, cfg.params);
  } else {
    auto rows = harness::time_pairs(bases.submissions, cfg.params.limits, cfg.params.match);
    report = harness::timings_to_json(rows);
  }
  std::string target = !out.empty() ? out : cfg.output ? cfg.output->string() : "";
  emit(report.dump(2) + "\n", target);
  return kOk;
}

void add_limits(CLI::App* cmd, executor::ExecutorLimits& l) {
  cmd->add_option("--loop-bound", l.loopBound, "iterations explored per loop")->capture_default_str();
  cmd->add_option("--recursion-bound", l.recursionBound, "re-entries of a method on one path")->capture_default_str();
  cmd->add_option("--budget", l.contextBudget, "execution contexts per entry point")->capture_default_str();
  cmd->add_option("--instruction-limit", l.instructionLimit, "instructions per path")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bsim: behavioural similarity of programs"};
  app.require_subcommand(1);

  std::vector<std::string> parseFiles;
  bool printTree = false;
  std::string entry, out, graphOut, cacheDir;
  executor::ExecutorLimits limits;
  int jobs = 0;
  bool dot = false, exact = false;

  auto* parse = app.add_subcommand("parse", "parse and resolve source units");
  parse->add_option("files", parseFiles, "source files")->required()->check(CLI::ExistingFile);
  parse->add_flag("--print", printTree, "print the canonical source instead of a summary");
  parse->add_option("--entry", entry, "entry method, 'name' or 'Class.name'");

  std::string subPath;
  auto* trace = app.add_subcommand("trace", "symbolically execute a submission, JSON traces");
  trace->add_option("submission", subPath, "file or directory")->required();
  add_limits(trace, limits);
  trace->add_option("--entry", entry, "entry method");
  trace->add_option("--out,-o", out, "output file (default stdout)");
  trace->add_option("--graphs", graphOut, "also write the PIDGs here");

  std::string traceFile;
  auto* graph = app.add_subcommand("graph", "build PIDGs from a trace file");
  graph->add_option("trace-file", traceFile)->required();
  graph->add_option("--out,-o", out, "output file (default stdout)");
  graph->add_flag("--dot", dot, "Graphviz instead of JSON");

  std::string a, b;
  auto* compare = app.add_subcommand("compare", "similarity of two submissions");
  compare->add_option("a", a)->required();
  compare->add_option("b", b)->required();
  compare->add_option("--entry", entry, "entry method");
  compare->add_flag("--exact", exact, "optimal assignment in graph matching");
  add_limits(compare, limits);

  std::string corpusDir;
  auto* corpus = app.add_subcommand("corpus", "pairwise similarity matrix of a corpus");
  corpus->add_option("dir", corpusDir)->required();
  corpus->add_option("--jobs,-j", jobs, "worker threads (0: all cores)");
  corpus->add_option("--out,-o", out, "CSV output (default stdout)");
  corpus->add_option("--entry", entry, "entry method");
  corpus->add_option("--cache", cacheDir, "persist graphs in this directory");
  add_limits(corpus, limits);

  int level = 1;
  double chance = 0;
  std::uint64_t seed = 0;
  bool exclude = false;
  auto* mutate = app.add_subcommand("mutate", "generate one variant of a base program");
  mutate->add_option("base", subPath)->required();
  mutate->add_option("--level", level, "1..5, cumulative")->required();
  mutate->add_option("--chance", chance, "per-site percentage")->required();
  mutate->add_option("--seed", seed)->required();
  mutate->add_flag("--exclude-value-injecting", exclude, "skip rewrites that add new values");
  mutate->add_option("--entry", entry, "entry method");
  mutate->add_option("--out,-o", out, "write units and variant.json here (default: source to stdout)");

  std::string kind, config;
  auto* experiment = app.add_subcommand("experiment", "run an experiment from a JSON config");
  experiment->add_option("kind", kind)->required()->check(CLI::IsMember({"robustness", "accuracy", "timing"}));
  experiment->add_option("config", config)->required();
  experiment->add_option("--out,-o", out, "report file (default: config 'output' or stdout)");
  experiment->add_option("--jobs,-j", jobs, "worker threads, overrides the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) return cmd_parse(parseFiles, printTree, entry);
    if (*trace) return cmd_trace(subPath, entry, limits, out, graphOut);
    if (*graph) return cmd_graph(traceFile, out, dot);
    if (*compare) return cmd_compare(a, b, entry, limits, exact);
    if (*corpus) return cmd_corpus(corpusDir, entry, limits, jobs, out, cacheDir);
    if (*mutate) return cmd_mutate(subPath, level, chance, seed, exclude, entry, out);
    if (*experiment) return cmd_experiment(kind, config, out, jobs);
  } catch (const UsageError& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kUsage;
  } catch (const harness::ConfigError& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kUsage;
  } catch (const harness::IngestError& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kIngest;
  } catch (const frontend::ParseError& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kIngest;
  } catch (const frontend::ResolveError& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kIngest;
  } catch (const executor::TraceSchemaError& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kIngest;
  } catch (const pidg::MalformedTrace& e) {
    std::cerr << "bsim: " << e.what() << "\n";
    return kIngest;
  } catch (const std::exception& e) {
    std::cerr << "bsim: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
