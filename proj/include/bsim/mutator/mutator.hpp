#pragma once

// Variant generation: seeded, cumulative-level application of the rewrites
// plus corpus layout and manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bsim/frontend/parser.hpp"
#include "bsim/mutator/transformations.hpp"

namespace bsim::mutator {

class MutationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MutationConfig {
  int level = 1;          // 1..5, cumulative
  double chance = 0.0;    // percent
  std::uint64_t seed = 0;
  bool excludeValueInjecting = false;
};

void validate(const MutationConfig& cfg);  // throws std::invalid_argument

struct AppliedTransformation {
  std::string name;
  std::string site;  // path:line:col
  std::string detail;
};

struct MutationConflict {
  std::string name;
  std::string site;
  std::string reason;
};

struct VariantRecord {
  std::string baseId;
  std::string variantId;
  int level = 1;
  double chance = 0.0;
  std::uint64_t seed = 0;
  bool excludeValueInjecting = false;
  std::vector<AppliedTransformation> applied;
  std::vector<MutationConflict> conflicts;

  // At least one value-injecting rewrite was applied.
  bool value_injecting() const;
};

struct Variant {
  std::vector<frontend::SourceUnit> units;
  VariantRecord record;
};

// The output re-parses and re-resolves; MutationError otherwise.
Variant mutate(const std::vector<frontend::SourceUnit>& base, const MutationConfig& cfg,
               const std::optional<std::string>& entry = std::nullopt, const std::string& baseId = "base",
               const std::string& variantId = "variant");

// Site listing by transformation name on unparsed sources.
std::vector<Site> list_sites(const std::vector<frontend::SourceUnit>& base, const std::string& transformation,
                             const std::optional<std::string>& entry = std::nullopt);

struct BaseProgram {
  std::string id;
  std::vector<frontend::SourceUnit> units;
  std::optional<std::string> entry;
};

struct CorpusConfig {
  std::vector<int> levels;
  std::vector<double> chances;
  std::map<int, int> countsPerLevel;  // level -> variants per (base, chance)
  std::uint64_t seed = 0;
  bool excludeValueInjecting = false;
  int jobs = 1;
};

struct Corpus {
  std::vector<BaseProgram> bases;
  std::vector<Variant> variants;  // base order, then level, chance, index
};

// Distinct sub-seed per (base, level, chance, index); independent of `jobs`.
std::uint64_t variant_seed(std::uint64_t seed, const std::string& variantId);
std::string variant_id(const std::string& baseId, int level, double chance, int index);

Corpus generate_corpus(const std::vector<BaseProgram>& bases, const CorpusConfig& cfg);

nlohmann::ordered_json record_to_json(const VariantRecord& r);
VariantRecord record_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json manifest_to_json(const Corpus& c);

// corpus/<base-id>/base/*.src, corpus/<base-id>/variants/<variant-id>/*.src, manifest.json
void write_corpus(const Corpus& c, const std::filesystem::path& dir);

// Reads every *.src file directly under `dir`, sorted by name.
std::vector<frontend::SourceUnit> read_sources(const std::filesystem::path& dir);

}  // namespace bsim::mutator
