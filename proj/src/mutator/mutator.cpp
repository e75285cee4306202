#include "bsim/mutator/mutator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "bsim/frontend/printer.hpp"

namespace bsim::mutator {

using namespace frontend;
using json = nlohmann::ordered_json;

void validate(const MutationConfig& cfg) {
  if (cfg.level < kMinLevel || cfg.level > kMaxLevel)
    throw std::invalid_argument("level must be between 1 and 5, got " + std::to_string(cfg.level));
  if (!(cfg.chance >= 0.0 && cfg.chance <= 100.0))
    throw std::invalid_argument("chance must be a percentage in [0, 100]");
}

bool VariantRecord::value_injecting() const {
  const auto& table = transformations();
  for (const auto& a : applied) {
    int t = find_transformation(a.name);
    if (t >= 0 && table[t].valueInjecting) return true;
  }
  return false;
}

namespace {

std::vector<Ast> parse_all(const std::vector<SourceUnit>& units) {
  std::vector<Ast> out;
  out.reserve(units.size());
  for (const auto& u : units) out.push_back(parse_unit(u));
  return out;
}

}  // namespace

Variant mutate(const std::vector<SourceUnit>& base, const MutationConfig& cfg, const std::optional<std::string>& entry,
               const std::string& baseId, const std::string& variantId) {
  validate(cfg);
  ResolvedProgram p = resolve_program(parse_all(base), entry);
  std::vector<std::string> canonical;
  for (const auto& a : p.units) canonical.push_back(print_unit(a));

  Rng rng(cfg.seed);
  NameGen names(collect_identifiers(p.units));
  ApplyContext ctx{rng, names, entry, std::vector<PrintStyle>(p.units.size()),
                   std::vector<bool>(p.units.size(), false), {}, {}};

  Variant v;
  VariantRecord& rec = v.record;
  rec.baseId = baseId;
  rec.variantId = variantId;
  rec.level = cfg.level;
  rec.chance = cfg.chance;
  rec.seed = cfg.seed;
  rec.excludeValueInjecting = cfg.excludeValueInjecting;

  const auto& table = transformations();
  bool first = true;
  for (std::size_t t = 0; t < table.size(); ++t) {
    const auto& spec = table[t];
    if (spec.level > cfg.level || (cfg.excludeValueInjecting && spec.valueInjecting)) continue;
    if (!first) p = resolve_program(std::move(p.units), entry);
    first = false;
    ctx.exprIndex.clear();
    std::vector<Site> sites = list_sites(p, static_cast<int>(t), entry);
    std::vector<const Site*> chosen;
    for (const Site& s : sites)
      if (rng.chance(cfg.chance)) chosen.push_back(&s);
    bool dirty = false;
    for (const Site* s : chosen) {
      if (dirty && reresolve_each(static_cast<int>(t))) {
        p = resolve_program(std::move(p.units), entry);
        ctx.exprIndex.clear();
      }
      if (apply_site(p, static_cast<int>(t), *s, ctx)) {
        rec.applied.push_back({spec.name, s->location, s->detail});
        dirty = true;
      } else {
        rec.conflicts.push_back({spec.name, s->location, "site taken by an earlier application"});
      }
    }
  }

  for (std::size_t u = 0; u < p.units.size(); ++u) {
    std::string text;
    if (!ctx.restyled[u] && print_unit(p.units[u]) == canonical[u])
      text = base[u].text;
    else
      text = print_unit(p.units[u], ctx.styles[u]);
    v.units.push_back({base[u].path, std::move(text)});
  }
  try {
    resolve_program(v.units, entry);
  } catch (const std::exception& e) {
    throw MutationError("variant " + variantId + " of " + baseId + " does not re-resolve: " + e.what());
  }
  return v;
}

std::vector<Site> list_sites(const std::vector<SourceUnit>& base, const std::string& transformation,
                             const std::optional<std::string>& entry) {
  int t = find_transformation(transformation);
  if (t < 0) throw std::invalid_argument("unknown transformation '" + transformation + "'");
  ResolvedProgram p = resolve_program(base, entry);
  return list_sites(p, t, entry);
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string chance_text(double chance) {
  std::ostringstream os;
  os << chance;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

}  // namespace

std::uint64_t variant_seed(std::uint64_t seed, const std::string& variantId) { return mix_seed(seed, fnv1a(variantId)); }

std::string variant_id(const std::string& baseId, int level, double chance, int index) {
  char idx[16];
  std::snprintf(idx, sizeof idx, "%03d", index);
  return baseId + "-L" + std::to_string(level) + "-c" + chance_text(chance) + "-" + idx;
}

Corpus generate_corpus(const std::vector<BaseProgram>& bases, const CorpusConfig& cfg) {
  struct Task {
    std::size_t base;
    MutationConfig mc;
    std::string id;
  };
  std::vector<Task> tasks;
  for (std::size_t b = 0; b < bases.size(); ++b)
    for (int level : cfg.levels) {
      auto it = cfg.countsPerLevel.find(level);
      int count = it == cfg.countsPerLevel.end() ? 0 : it->second;
      if (count < 0) throw std::invalid_argument("negative variant count for level " + std::to_string(level));
      for (double chance : cfg.chances)
        for (int k = 0; k < count; ++k) {
          Task t;
          t.base = b;
          t.id = variant_id(bases[b].id, level, chance, k);
          t.mc = MutationConfig{level, chance, variant_seed(cfg.seed, t.id), cfg.excludeValueInjecting};
          validate(t.mc);
          tasks.push_back(std::move(t));
        }
    }
  Corpus c;
  c.bases = bases;
  c.variants.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex errMu;
  std::exception_ptr firstError;
  std::size_t firstErrorTask = tasks.size();
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      const BaseProgram& bp = bases[t.base];
      try {
        c.variants[i] = mutate(bp.units, t.mc, bp.entry, bp.id, t.id);
      } catch (const std::exception& e) {
        std::lock_guard lock(errMu);
        // keep the earliest task's error so the report does not depend on scheduling
        if (i < firstErrorTask) {
          firstErrorTask = i;
          firstError = std::make_exception_ptr(MutationError("base " + bp.id + ": " + e.what()));
        }
      }
    }
  };
  int jobs = std::max(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (firstError) std::rethrow_exception(firstError);
  return c;
}

json record_to_json(const VariantRecord& r) {
  json applied = json::array();
  for (const auto& a : r.applied) applied.push_back({{"name", a.name}, {"site", a.site}, {"detail", a.detail}});
  json conflicts = json::array();
  for (const auto& a : r.conflicts) conflicts.push_back({{"name", a.name}, {"site", a.site}, {"reason", a.reason}});
  return {{"baseId", r.baseId},
          {"variantId", r.variantId},
          {"level", r.level},
          {"chance", r.chance},
          {"seed", r.seed},
          {"excludeValueInjecting", r.excludeValueInjecting},
          {"valueInjecting", r.value_injecting()},
          {"appliedTransformations", applied},
          {"conflicts", conflicts}};
}

VariantRecord record_from_json(const json& j) {
  VariantRecord r;
  r.baseId = j.at("baseId").get<std::string>();
  r.variantId = j.at("variantId").get<std::string>();
  r.level = j.at("level").get<int>();
  r.chance = j.at("chance").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.excludeValueInjecting = j.value("excludeValueInjecting", false);
  for (const auto& a : j.at("appliedTransformations"))
    r.applied.push_back({a.at("name").get<std::string>(), a.at("site").get<std::string>(), a.value("detail", "")});
  if (j.contains("conflicts"))
    for (const auto& a : j.at("conflicts"))
      r.conflicts.push_back({a.at("name").get<std::string>(), a.at("site").get<std::string>(), a.value("reason", "")});
  return r;
}

json manifest_to_json(const Corpus& c) {
  json bases = json::array();
  for (const auto& b : c.bases) {
    json files = json::array();
    for (const auto& u : b.units) files.push_back(u.path);
    json e = {{"id", b.id}, {"files", files}};
    if (b.entry) e["entry"] = *b.entry;
    bases.push_back(std::move(e));
  }
  json variants = json::array();
  for (const auto& v : c.variants) variants.push_back(record_to_json(v.record));
  return {{"schema", "bsim-corpus/1"}, {"bases", bases}, {"variants", variants}};
}

namespace {

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

std::filesystem::path unit_file(const std::filesystem::path& dir, const SourceUnit& u) {
  return dir / std::filesystem::path(u.path).filename();
}

}  // namespace

void write_corpus(const Corpus& c, const std::filesystem::path& dir) {
  for (const auto& b : c.bases)
    for (const auto& u : b.units) write_text(unit_file(dir / b.id / "base", u), u.text);
  for (const auto& v : c.variants)
    for (const auto& u : v.units) write_text(unit_file(dir / v.record.baseId / "variants" / v.record.variantId, u), u.text);
  write_text(dir / "manifest.json", manifest_to_json(c).dump(2) + "\n");
}

std::vector<SourceUnit> read_sources(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".src") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<SourceUnit> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + f.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back({f.filename().string(), ss.str()});
  }
  return out;
}

}  // namespace bsim::mutator
