#include "mcs_oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "bsim/matcher/valid_match.hpp"

namespace bsim::testsupport {

using pidg::Pidg;

namespace {

// Maximum matching between two small edge lists, by exhaustive search.
int best_edge_pairing(const Pidg& x, const std::vector<int>& ex, const Pidg& y, const std::vector<int>& ey) {
  std::vector<char> used(ey.size(), 0);
  std::function<int(std::size_t)> go = [&](std::size_t i) -> int {
    if (i == ex.size()) return 0;
    int best = go(i + 1);
    const auto& a = x.edges()[ex[i]];
    for (std::size_t j = 0; j < ey.size(); ++j) {
      if (used[j]) continue;
      const auto& b = y.edges()[ey[j]];
      if (a.type != b.type || !matcher::labels_agree(x, a, y, b)) continue;
      used[j] = 1;
      best = std::max(best, 1 + go(i + 1));
      used[j] = 0;
    }
    return best;
  };
  return go(0);
}

struct Search {
  const Pidg& x;
  const Pidg& y;
  const matcher::MatchView& vx;
  const matcher::MatchView& vy;
  bool countEdges;
  std::map<std::pair<int, int>, std::vector<int>> xGroups, yGroups;  // (from,to) -> edge indices
  std::vector<std::vector<int>> cands;
  std::vector<int> xToY;
  std::vector<char> yUsed;
  std::vector<int> edgesLeft;  // edges whose later endpoint is node i or beyond
  int best = 0;

  Search(const Pidg& x_, const Pidg& y_, const matcher::MatchView& vx_, const matcher::MatchView& vy_, bool ce)
      : x(x_), y(y_), vx(vx_), vy(vy_), countEdges(ce) {
    for (std::size_t i = 0; i < x.edges().size(); ++i)
      xGroups[{x.edges()[i].from, x.edges()[i].to}].push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < y.edges().size(); ++i)
      yGroups[{y.edges()[i].from, y.edges()[i].to}].push_back(static_cast<int>(i));
    int n = static_cast<int>(x.nodes().size());
    cands.resize(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < static_cast<int>(y.nodes().size()); ++b)
        if (matcher::valid_match(vx, a, vy, b)) cands[a].push_back(b);
    xToY.assign(n, -1);
    yUsed.assign(y.nodes().size(), 0);
    edgesLeft.assign(n + 1, 0);
    for (const auto& e : x.edges()) edgesLeft[std::max(e.from, e.to)]++;
    for (int i = n - 1; i >= 0; --i) edgesLeft[i] += edgesLeft[i + 1];
  }

  int group_gain(int a, int b) {
    auto gx = xGroups.find({a, b});
    if (gx == xGroups.end()) return 0;
    auto gy = yGroups.find({xToY[a], xToY[b]});
    if (gy == yGroups.end()) return 0;
    return best_edge_pairing(x, gx->second, y, gy->second);
  }

  // Edges among nodes 0..i once node i is assigned.
  int gain_for(int i) {
    if (!countEdges || xToY[i] < 0) return 0;
    int g = group_gain(i, i);
    for (int j = 0; j < i; ++j) {
      if (xToY[j] < 0) continue;
      g += group_gain(i, j) + group_gain(j, i);
    }
    return g;
  }

  void run(int i, int score) {
    int n = static_cast<int>(x.nodes().size());
    if (i == n) {
      best = std::max(best, score);
      return;
    }
    int bound = score + (n - i) + (countEdges ? edgesLeft[i] : 0);
    if (bound <= best) return;
    for (int b : cands[i]) {
      if (yUsed[b]) continue;
      xToY[i] = b;
      yUsed[b] = 1;
      run(i + 1, score + 1 + gain_for(i));
      yUsed[b] = 0;
      xToY[i] = -1;
    }
    run(i + 1, score);
  }
};

}  // namespace

matcher::GraphScore mcs_score(const Pidg& x, const Pidg& y, const matcher::MatchOptions& opt) {
  matcher::MatchView vx(x), vy(y);
  Search s(x, y, vx, vy, opt.countEdges);
  s.run(0, 0);
  matcher::GraphScore out;
  out.mapped = static_cast<std::size_t>(s.best);
  out.sizeX = x.nodes().size() + (opt.countEdges ? x.edges().size() : 0);
  out.sizeY = y.nodes().size() + (opt.countEdges ? y.edges().size() : 0);
  if (out.sizeX + out.sizeY > 0)
    out.value = std::min(1.0, 2.0 * static_cast<double>(out.mapped) / static_cast<double>(out.sizeX + out.sizeY));
  return out;
}

}  // namespace bsim::testsupport
