#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>

#include "bsim/harness/error_count.hpp"
#include "bsim/harness/experiments.hpp"
#include "bsim/harness/pipeline.hpp"
#include "bsim/harness/submission.hpp"
#include "test_util.hpp"

using namespace bsim::harness;
namespace fs = std::filesystem;
using bsim::testsupport::corpus_programs;
using bsim::testsupport::slurp;
using bsim::testsupport::source_dir;
using json = nlohmann::ordered_json;

namespace {

std::vector<LabelledScore> labelled(const std::string& pattern, const std::vector<double>& scores) {
  std::vector<LabelledScore> out;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    out.push_back({scores[i], pattern[i] == 'p' ? Label::Plagiarised : Label::Innocent});
  return out;
}

std::vector<LabelledScore> ascending(const std::string& pattern) {
  std::vector<double> s;
  for (std::size_t i = 0; i < pattern.size(); ++i) s.push_back(0.1 * (i + 1));
  return labelled(pattern, s);
}

Submission sub(const std::string& id, const std::string& text) { return {id, {{id + ".src", text}}, std::nullopt}; }

const char* kShop = R"(
class Shop {
    private int total;
    void add(int x) { total = total + x; }
    public static void main(String[] args) {
        Shop s = new Shop();
        s.add(args.length);
        System.out.println("total " + s.total);
    }
}
)";

const char* kTill = R"(
class Till {
    private int sum;
    void put(int v) { sum = sum + v; }
    public static void main(String[] args) {
        Till t = new Till();
        t.put(args.length);
        System.out.println("total " + t.sum);
    }
}
)";

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("bsim_harness_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& f, const std::string& text) {
  fs::create_directories(f.parent_path());
  std::ofstream(f, std::ios::binary) << text;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(BSIM_CLI) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(ErrorCount, SeparableListHasNoErrors) {
  ErrorCount c = count_errors(ascending("iiippp"));
  EXPECT_EQ(c.errors, 0);
  ASSERT_TRUE(c.threshold.has_value());
  EXPECT_NEAR(*c.threshold, 0.3, 1e-12);
  EXPECT_EQ(c.plagiarised, 3);
  EXPECT_EQ(c.innocent, 3);
}

TEST(ErrorCount, InterleavedListHasOneError) {
  EXPECT_EQ(count_errors(ascending("ipip")).errors, 1);
}

TEST(ErrorCount, FlagAllWhenPlagiarisedLowest) {
  ErrorCount c = count_errors(ascending("pppi"));
  EXPECT_EQ(c.errors, 1);
  EXPECT_FALSE(c.threshold.has_value());
}

TEST(ErrorCount, TiesCannotBeSplit) {
  // equal scores fall on the same side of any threshold
  EXPECT_EQ(count_errors(labelled("ip", {0.5, 0.5})).errors, 1);
  EXPECT_EQ(count_errors(labelled("iipp", {0.2, 0.5, 0.5, 0.9})).errors, 1);
}

TEST(ErrorCount, DegenerateInputs) {
  EXPECT_THROW(count_errors({}), DegenerateInput);
  EXPECT_THROW(count_errors(ascending("iii")), DegenerateInput);
  EXPECT_THROW(count_errors(ascending("pp")), DegenerateInput);
  EXPECT_THROW(count_errors(labelled("ip", {NAN, 0.4})), DegenerateInput);
  EXPECT_THROW(count_errors_brute_force(ascending("ii")), DegenerateInput);
}

TEST(ErrorCount, SweepEqualsBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> len(2, 30), grid(0, 8), coin(0, 1);
  for (int k = 0; k < 500; ++k) {
    std::vector<LabelledScore> v;
    int n = len(rng);
    for (int i = 0; i < n; ++i) v.push_back({grid(rng) / 8.0, coin(rng) ? Label::Plagiarised : Label::Innocent});
    v[0].label = Label::Innocent;
    v[1].label = Label::Plagiarised;
    ErrorCount a = count_errors(v), b = count_errors_brute_force(v);
    ASSERT_EQ(a.errors, b.errors);
    ASSERT_EQ(a.threshold, b.threshold);
  }
}

TEST(Submission, LoadsFilesAndDirectories) {
  fs::path d = scratch("load");
  write(d / "single.src", kShop);
  write(d / "multi/B.src", kTill);
  write(d / "multi/A.src", "class Helper { }\n");
  write(d / "empty/readme.txt", "nothing");
  Submission s = load_submission(d / "single.src");
  EXPECT_EQ(s.id, "single");
  Submission m = load_submission(d / "multi");
  EXPECT_EQ(m.id, "multi");
  ASSERT_EQ(m.units.size(), 2u);
  EXPECT_LT(m.units[0].path, m.units[1].path);
  EXPECT_THROW(load_submission(d / "empty"), IngestError);
  EXPECT_THROW(load_submission(d / "missing"), IngestError);
  CorpusListing c = load_corpus(d);
  ASSERT_EQ(c.submissions.size(), 2u);
  EXPECT_EQ(c.submissions[0].id, "multi");
  ASSERT_EQ(c.failures.size(), 1u);
  EXPECT_EQ(c.failures[0].id, "empty");
  fs::remove_all(d);
}

TEST(Submission, HashTracksContentAndEntry) {
  Submission a = sub("a", kShop), b = sub("a", kShop);
  EXPECT_EQ(content_hash(a), content_hash(b));
  EXPECT_EQ(content_hash(a).size(), 16u);
  b.entry = "main";
  EXPECT_NE(content_hash(a), content_hash(b));
  EXPECT_NE(content_hash(a), content_hash(sub("a", kTill)));
}

TEST(Pipeline, IngestErrorsNameTheSubmission) {
  try {
    analyze(sub("broken", "class X { void f( }"));
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("broken:", 0), 0u);
  }
  EXPECT_THROW(analyze(sub("noentry", "class X { void f() { } }")), IngestError);
}

TEST(Pipeline, RenamedProgramMatchesBaseline) {
  SimilarityMatrix m = compare_submissions({sub("shop", kShop), sub("till", kTill)});
  ASSERT_EQ(m.ids.size(), 2u);
  EXPECT_DOUBLE_EQ(m.values[0][1], m.values[0][0]);
  EXPECT_DOUBLE_EQ(m.values[1][0], m.values[1][1]);
}

TEST(Pipeline, MatrixIsSymmetricWithUnitDiagonal) {
  auto subs = corpus_programs();
  CompareOptions opt;
  opt.jobs = 2;
  SimilarityMatrix m = compare_submissions(subs, opt);
  ASSERT_EQ(m.values.size(), subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    EXPECT_EQ(m.ids[i], subs[i].id);
    EXPECT_NEAR(m.values[i][i], 1.0, 1e-9);
    for (std::size_t j = 0; j < subs.size(); ++j) {
      EXPECT_DOUBLE_EQ(m.values[i][j], m.values[j][i]);
      EXPECT_GE(m.values[i][j], 0.0);
      EXPECT_LE(m.values[i][j], 1.0 + 1e-12);
    }
  }
}

TEST(Pipeline, SingleSubmissionMatrix) {
  SimilarityMatrix m = compare_submissions({sub("only", kShop)});
  EXPECT_EQ(matrix_to_csv(m), "id,only\nonly,1.0000\n");
}

TEST(Pipeline, CsvQuotesAndRounds) {
  SimilarityMatrix m;
  m.ids = {"a,b", "c"};
  m.values = {{1.0, 0.123456}, {0.123456, -0.00001}};
  EXPECT_EQ(matrix_to_csv(m), "id,\"a,b\",c\n\"a,b\",1.0000,0.1235\nc,0.1235,0.0000\n");
}

TEST(Pipeline, CorpusFailuresAreReportedNotFatal) {
  fs::path d = scratch("corpus");
  write(d / "good.src", kShop);
  write(d / "bad.src", "class {");
  SimilarityMatrix m = compare_corpus(d, std::nullopt);
  ASSERT_EQ(m.ids.size(), 1u);
  ASSERT_EQ(m.failures.size(), 1u);
  EXPECT_EQ(m.failures[0].id, "bad");
  fs::remove_all(d);
}

TEST(Pipeline, ParallelForRethrowsLowestIndex) {
  try {
    parallel_for(20, 4, [](std::size_t i) {
      if (i == 5 || i == 12) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "5");
  }
}

TEST(Cache, ComputesOncePerContent) {
  AnalysisCache cache;
  auto a = cache.get(sub("x", kShop), {});
  auto b = cache.get(sub("x", kShop), {});
  EXPECT_EQ(a.get(), b.get());
  Submission same = sub("x", kShop);
  same.id = "renamed";
  auto c = cache.get(same, {});
  EXPECT_EQ(c->id, "renamed");
  EXPECT_EQ(c->graphs, a->graphs);
  bsim::executor::ExecutorLimits other;
  other.loopBound = 7;
  cache.get(sub("x", kShop), other);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(Cache, PersistsToDisk) {
  fs::path d = scratch("cache");
  std::vector<bsim::pidg::Pidg> first;
  {
    AnalysisCache cache(d);
    auto a = cache.get(sub("x", kShop), {});
    EXPECT_FALSE(a->fromDisk);
    first = a->graphs;
  }
  AnalysisCache again(d);
  auto b = again.get(sub("x", kShop), {});
  EXPECT_TRUE(b->fromDisk);
  EXPECT_EQ(b->graphs, first);
  fs::remove_all(d);
}

TEST(Config, ParsesAndResolvesPaths) {
  json doc = json::parse(R"({"bases": "b", "innocent": "i", "levels": [1, 3], "chances": [60],
    "counts": {"1": 2, "3": 4}, "seed": 9, "excludeValueInjecting": [false, true],
    "limits": {"loopBound": 4}, "match": {"exactAssignment": true}, "jobs": 2,
    "exclusions": [["a", "b"]], "output": "out.json"})");
  ExperimentConfig c = parse_experiment_config(doc, "/cfg");
  EXPECT_EQ(c.bases, fs::path("/cfg/b"));
  EXPECT_EQ(*c.output, fs::path("/cfg/out.json"));
  EXPECT_EQ(c.params.countsPerLevel.at(3), 4);
  EXPECT_EQ(c.params.excludeModes.size(), 2u);
  EXPECT_EQ(c.params.limits.loopBound, 4);
  EXPECT_TRUE(c.params.match.exactAssignment);
  EXPECT_EQ(c.params.jobs, 2);
  ASSERT_EQ(c.exclusions.size(), 1u);
}

TEST(Config, RejectsBadDocuments) {
  auto bad = [](const char* text) {
    EXPECT_THROW(parse_experiment_config(json::parse(text), "/"), ConfigError) << text;
  };
  bad(R"([])");
  bad(R"({"levels": [1], "chances": [1], "count": 1})");
  bad(R"({"bases": "b", "count": 1, "colour": 1})");
  bad(R"({"bases": "b", "levels": [6], "count": 1})");
  bad(R"({"bases": "b", "chances": [120], "count": 1})");
  bad(R"({"bases": "b"})");
  bad(R"({"bases": "b", "count": 1, "counts": {"1": 1}})");
  bad(R"({"bases": "b", "levels": [1, 2], "counts": {"1": 1}})");
  bad(R"({"bases": "b", "count": 0})");
  bad(R"({"bases": "b", "count": 1, "seed": -1})");
  bad(R"({"bases": "b", "count": 1, "limits": {"loopBound": 0}})");
  bad(R"({"bases": "b", "count": 1, "match": {"fast": true}})");
  bad(R"({"bases": "b", "count": 1, "exclusions": [["a"]]})");
  EXPECT_THROW(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

TEST(Experiments, ZeroChanceHasNoDrop) {
  auto all = corpus_programs();
  std::vector<Submission> bases(all.begin(), all.begin() + 3);
  ExperimentParams p;
  p.levels = {1, 5};
  p.chances = {0};
  p.countsPerLevel = {{1, 2}, {5, 2}};
  RobustnessTable t = run_robustness(bases, p);
  ASSERT_EQ(t.rows.size(), 2u);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.variants, 6);
    EXPECT_EQ(r.meanDrop, 0.0);
    EXPECT_EQ(r.maxDrop, 0.0);
  }
  EXPECT_FALSE(t.partial);
}

TEST(Experiments, AccuracyNeedsInnocentPairs) {
  auto all = corpus_programs();
  ExperimentParams p;
  p.levels = {1};
  p.countsPerLevel = {{1, 1}};
  EXPECT_THROW(run_accuracy({all[0]}, {all[0]}, {}, p), DegenerateInput);
  std::vector<Submission> pool(all.begin(), all.begin() + 3);
  AccuracyTable t = run_accuracy(pool, {all[0]}, {{pool[0].id, pool[1].id}}, p);
  EXPECT_EQ(t.innocentPairs, 2);
  EXPECT_EQ(t.excludedPairs, 1);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].count.plagiarised, 1);
}

TEST(Experiments, ReportsAreStable) {
  auto all = corpus_programs();
  std::vector<Submission> bases(all.begin(), all.begin() + 3);
  ExperimentParams p;
  p.levels = {3};
  p.countsPerLevel = {{3, 2}};
  p.seed = 5;
  p.jobs = 1;
  std::string a = robustness_to_json(run_robustness(bases, p), p).dump(2);
  p.jobs = 3;
  std::string b = robustness_to_json(run_robustness(bases, p), p).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("seconds"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  fs::path d = scratch("cli");
  write(d / "ok.src", kShop);
  write(d / "bad.src", "class {");
  std::string ok = (d / "ok.src").string(), bad = (d / "bad.src").string();
  EXPECT_EQ(run_cli("parse " + ok), 0);
  EXPECT_EQ(run_cli("compare " + ok + " " + ok), 0);
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("trace " + ok + " --loop-bound 0"), 1);
  EXPECT_EQ(run_cli("mutate " + ok + " --level 9 --chance 10 --seed 1"), 1);
  EXPECT_EQ(run_cli("parse " + bad), 2);
  EXPECT_EQ(run_cli("compare " + ok + " " + (d / "missing.src").string()), 2);
  write(d / "cfg.json", R"({"bases": "x", "colour": 1})");
  EXPECT_EQ(run_cli("experiment robustness " + (d / "cfg.json").string()), 1);
  fs::remove_all(d);
}

TEST(Cli, CorpusWritesCsv) {
  fs::path d = scratch("clicsv");
  write(d / "in/shop.src", kShop);
  write(d / "in/till.src", kTill);
  EXPECT_EQ(run_cli("corpus " + (d / "in").string() + " --jobs 2 --out " + (d / "m.csv").string()), 0);
  std::string csv = slurp(d / "m.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,shop,till");
  fs::remove_all(d);
}
