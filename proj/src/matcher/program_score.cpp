#include "bsim/matcher/program_score.hpp"

#include <unordered_map>

namespace bsim::matcher {

using pidg::Pidg;

namespace {

struct Hasher {
  std::uint64_t h = 14695981039346656037ULL;
  void byte(unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  void str(const std::string& s) {
    for (unsigned char c : s) byte(c);
    byte(0xff);
  }
  void num(long long v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
  }
};

}  // namespace

std::uint64_t structure_hash(const Pidg& g) {
  Hasher h;
  h.num(static_cast<long long>(g.nodes().size()));
  for (const auto& n : g.nodes()) {
    h.byte(static_cast<unsigned char>(n.type));
    h.str(n.runtimeType);
    h.str(n.literal);
    h.byte(n.hasString);
    h.str(n.string);
    h.str(n.op);
    h.str(n.signature);
    h.byte(n.flags);
    h.byte(n.sourceDefined);
  }
  h.num(static_cast<long long>(g.edges().size()));
  for (const auto& e : g.edges()) {
    h.num(e.from);
    h.num(e.to);
    h.byte(static_cast<unsigned char>(e.type));
    h.str(e.label);
  }
  return h.h;
}

PreparedProgram::PreparedProgram(std::vector<Pidg> graphs) {
  auto uniq = std::make_shared<std::vector<Pidg>>();
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> byHash;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    std::uint64_t h = structure_hash(graphs[i]);
    std::size_t found = SIZE_MAX;
    for (std::size_t u : byHash[h])
      if ((*uniq)[u] == graphs[i]) {
        found = u;
        break;
      }
    if (found == SIZE_MAX) {
      found = uniq->size();
      byHash[h].push_back(found);
      uniq->push_back(std::move(graphs[i]));
      hashes_.push_back(h);
      mult_.push_back(0);
      first_.push_back(i);
    }
    ++mult_[found];
    index_.push_back(found);
  }
  graphs_ = uniq;
  views_.reserve(uniq->size());
  for (const auto& g : *graphs_) views_.emplace_back(g);
}

GraphScore sim_graph_symmetric(const MatchView& x, std::uint64_t hx, const MatchView& y, std::uint64_t hy,
                               const MatchOptions& opt) {
  if (hy < hx) {
    GraphScore s = sim_graph(y, x, opt);
    std::swap(s.sizeX, s.sizeY);
    return s;
  }
  return sim_graph(x, y, opt);
}

ProgramScore sim_program(const PreparedProgram& a, const PreparedProgram& b, const MatchOptions& opt) {
  ProgramScore r;
  if (a.size() == 0 || b.size() == 0) {
    r.diagnostic = "EmptySide";
    return r;
  }
  std::size_t na = a.unique(), nb = b.unique();
  std::vector<double> bestA(na, -1.0), bestB(nb, -1.0);
  std::vector<std::size_t> argA(na, 0), argB(nb, 0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      double s = sim_graph_symmetric(a.view(i), a.hash(i), b.view(j), b.hash(j), opt).value;
      if (s > bestA[i]) {
        bestA[i] = s;
        argA[i] = j;
      }
      if (s > bestB[j]) {
        bestB[j] = s;
        argB[j] = i;
      }
    }
  }
  double sumA = 0, sumB = 0;
  for (std::size_t i = 0; i < na; ++i) sumA += bestA[i] * static_cast<double>(a.multiplicity(i));
  for (std::size_t j = 0; j < nb; ++j) sumB += bestB[j] * static_cast<double>(b.multiplicity(j));
  double meanA = sumA / static_cast<double>(a.size());
  double meanB = sumB / static_cast<double>(b.size());
  r.value = (meanA + meanB) / 2.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t u = a.unique_of(i);
    r.aToB.push_back(static_cast<int>(b.first_of(argA[u])));
    r.aBest.push_back(bestA[u]);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::size_t u = b.unique_of(j);
    r.bToA.push_back(static_cast<int>(a.first_of(argB[u])));
    r.bBest.push_back(bestB[u]);
  }
  return r;
}

ProgramScore sim_program(const std::vector<Pidg>& a, const std::vector<Pidg>& b, const MatchOptions& opt) {
  return sim_program(PreparedProgram(a), PreparedProgram(b), opt);
}

}  // namespace bsim::matcher
