#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "bsim/matcher/program_score.hpp"
#include "bsim/mutator/mutator.hpp"
#include "test_util.hpp"

using namespace bsim::mutator;
using bsim::frontend::SourceUnit;
using bsim::testsupport::corpus_programs;
using bsim::testsupport::one_unit;
using bsim::testsupport::slurp;
using bsim::testsupport::source_dir;

namespace {

const char* kLoops = R"(
class Loops {
    public static void main(String[] args) {
        int s = 0;
        for (int i = 0; i < 3; i++) {
            s += i;
        }
        for (int j = 0; j < 3; j++) {
            if (j == 1) continue;
            s += j;
        }
        switch (s) {
            case 1: s = 2; break;
            case 2:
            case 3: s = 4; break;
            default: s = 0;
        }
        String t = "x";
        switch (t.length()) {
            case 1: s++; break;
        }
        System.out.println(s);
    }
}
)";

std::vector<SourceUnit> hashpass() {
  return one_unit(slurp(source_dir() / "corpus/samples/hashpass/Main.src"));
}

std::vector<bsim::pidg::Pidg> graphs(const std::vector<SourceUnit>& units, const std::optional<std::string>& entry) {
  return bsim::pidg::build_pidg_set(
      bsim::executor::execute_program(bsim::frontend::resolve_program(units, entry)));
}

std::vector<std::string> names(const Variant& v) {
  std::vector<std::string> out;
  for (const auto& a : v.record.applied) out.push_back(a.name);
  return out;
}

}  // namespace

TEST(Transformations, TableIsOrderedByLevel) {
  const auto& t = transformations();
  EXPECT_EQ(t.size(), 19u);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LE(t[i - 1].level, t[i].level);
  int injecting = 0;
  for (const auto& s : t) injecting += s.valueInjecting;
  EXPECT_EQ(injecting, 2);
  EXPECT_EQ(find_transformation("Rename identifiers"), 1);
  EXPECT_EQ(find_transformation("nope"), -1);
}

TEST(Transformations, ForSitesSkipContinue) {
  EXPECT_EQ(list_sites(one_unit(kLoops), "Replace for statement with while loop").size(), 1u);
}

TEST(Transformations, SwitchSitesNeedPrimitiveSelector) {
  // the second selector is an API result whose type is not known
  auto sites = list_sites(one_unit(kLoops), "Replace switch statement with if statements");
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].location, "Main.src:12:9");
}

TEST(Transformations, UnknownNameRejected) {
  EXPECT_THROW(list_sites(one_unit(kLoops), "Inline everything"), std::invalid_argument);
}

TEST(Mutate, ValidatesConfig) {
  EXPECT_THROW(mutate(hashpass(), {0, 50, 1, false}, "hashPassword"), std::invalid_argument);
  EXPECT_THROW(mutate(hashpass(), {6, 50, 1, false}, "hashPassword"), std::invalid_argument);
  EXPECT_THROW(mutate(hashpass(), {1, 101, 1, false}, "hashPassword"), std::invalid_argument);
  EXPECT_THROW(mutate(hashpass(), {1, -1, 1, false}, "hashPassword"), std::invalid_argument);
}

TEST(Mutate, ZeroChanceIsIdentity) {
  for (const auto& s : corpus_programs()) {
    Variant v = mutate(s.units, {5, 0, 7, false}, s.entry);
    ASSERT_EQ(v.units.size(), s.units.size());
    for (std::size_t i = 0; i < v.units.size(); ++i) EXPECT_EQ(v.units[i].text, s.units[i].text) << s.id;
    EXPECT_TRUE(v.record.applied.empty());
  }
}

TEST(Mutate, SameSeedSameVariant) {
  for (const auto& s : corpus_programs()) {
    Variant a = mutate(s.units, {5, 60, 1234, false}, s.entry);
    Variant b = mutate(s.units, {5, 60, 1234, false}, s.entry);
    ASSERT_EQ(a.units.size(), b.units.size());
    for (std::size_t i = 0; i < a.units.size(); ++i) EXPECT_EQ(a.units[i].text, b.units[i].text);
    EXPECT_EQ(record_to_json(a.record).dump(), record_to_json(b.record).dump());
  }
}

TEST(Mutate, EveryVariantResolvesAndRuns) {
  for (const auto& s : corpus_programs())
    for (int level = 1; level <= 5; ++level)
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        Variant v;
        ASSERT_NO_THROW(v = mutate(s.units, {level, 100, seed, false}, s.entry)) << s.id << " L" << level;
        EXPECT_FALSE(graphs(v.units, s.entry).empty()) << s.id;
      }
}

TEST(Mutate, LevelsAreCumulative) {
  auto s = corpus_programs().at(0);
  std::set<int> seen;
  Variant v = mutate(s.units, {5, 100, 9, false}, s.entry);
  for (const auto& n : names(v)) seen.insert(transformations()[find_transformation(n)].level);
  EXPECT_TRUE(seen.count(1));
  EXPECT_TRUE(seen.count(2));
  Variant low = mutate(s.units, {2, 100, 9, false}, s.entry);
  for (const auto& n : names(low)) EXPECT_LE(transformations()[find_transformation(n)].level, 2);
}

TEST(Mutate, ExcludedModeSkipsValueInjection) {
  for (const auto& s : corpus_programs()) {
    Variant v = mutate(s.units, {5, 100, 4, true}, s.entry);
    EXPECT_FALSE(v.record.value_injecting()) << s.id;
    for (const auto& n : names(v)) EXPECT_FALSE(transformations()[find_transformation(n)].valueInjecting);
  }
}

TEST(Mutate, LexicalLevelsKeepSelfBaseline) {
  auto base = hashpass();
  auto g0 = graphs(base, "hashPassword");
  double self = bsim::matcher::sim_program(g0, g0).value;
  for (int level : {1, 2})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Variant v = mutate(base, {level, 100, seed, false}, "hashPassword");
      EXPECT_DOUBLE_EQ(bsim::matcher::sim_program(g0, graphs(v.units, "hashPassword")).value, self);
    }
}

TEST(Mutate, RedundantConstantAddsIsolatedNode) {
  auto base = hashpass();
  auto t = find_transformation("Declare redundant constants");
  // force only that rewrite: level 3 applies others too, so inspect the graph instead
  Variant v = mutate(base, {3, 100, 3, false}, "hashPassword");
  bool applied = false;
  for (const auto& a : v.record.applied) applied = applied || a.name == transformations()[t].name;
  ASSERT_TRUE(applied);
  auto gs = graphs(v.units, "hashPassword");
  ASSERT_EQ(gs.size(), 1u);
  int isolated = 0;
  for (const auto& n : gs[0].nodes()) isolated += gs[0].degree(n.id) == 0;
  EXPECT_GE(isolated, 1);
}

TEST(Corpus, IdsAndSeeds) {
  EXPECT_EQ(variant_id("bank", 3, 60, 2), "bank-L3-c60-002");
  EXPECT_EQ(variant_id("bank", 3, 12.5, 0), "bank-L3-c12p5-000");
  EXPECT_NE(variant_seed(1, "a-L1-c60-000"), variant_seed(1, "a-L1-c60-001"));
  EXPECT_EQ(variant_seed(1, "a-L1-c60-000"), variant_seed(1, "a-L1-c60-000"));
}

TEST(Corpus, IndependentOfJobs) {
  std::vector<BaseProgram> bases;
  for (const auto& s : corpus_programs()) {
    if (bases.size() == 4) break;
    bases.push_back({s.id, s.units, s.entry});
  }
  CorpusConfig cfg;
  cfg.levels = {1, 3, 5};
  cfg.chances = {60};
  cfg.countsPerLevel = {{1, 1}, {3, 2}, {5, 1}};
  cfg.seed = 77;
  cfg.jobs = 1;
  Corpus a = generate_corpus(bases, cfg);
  cfg.jobs = 3;
  Corpus b = generate_corpus(bases, cfg);
  EXPECT_EQ(a.variants.size(), 4u * 4u);
  EXPECT_EQ(manifest_to_json(a).dump(), manifest_to_json(b).dump());
  for (std::size_t i = 0; i < a.variants.size(); ++i)
    EXPECT_EQ(a.variants[i].units.at(0).text, b.variants[i].units.at(0).text);
}

TEST(Corpus, WritesLayoutAndManifest) {
  auto s = corpus_programs().at(0);
  CorpusConfig cfg;
  cfg.levels = {2};
  cfg.chances = {100};
  cfg.countsPerLevel = {{2, 2}};
  Corpus c = generate_corpus({{s.id, s.units, s.entry}}, cfg);
  auto dir = std::filesystem::temp_directory_path() / "bsim_test_corpus";
  std::filesystem::remove_all(dir);
  write_corpus(c, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  EXPECT_EQ(read_sources(dir / s.id / "base").size(), s.units.size());
  auto v0 = dir / s.id / "variants" / variant_id(s.id, 2, 100, 0);
  auto back = read_sources(v0);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].text, c.variants[0].units[0].text);
  auto manifest = nlohmann::ordered_json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["schema"], "bsim-corpus/1");
  EXPECT_EQ(manifest["variants"].size(), 2u);
  VariantRecord r = record_from_json(manifest["variants"][1]);
  EXPECT_EQ(record_to_json(r).dump(), record_to_json(c.variants[1].record).dump());
  std::filesystem::remove_all(dir);
}
