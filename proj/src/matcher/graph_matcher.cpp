#include "bsim/matcher/graph_matcher.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

namespace bsim::matcher {

using pidg::Edge;
using pidg::Pidg;

std::size_t NodeMapping::mapped_nodes() const {
  std::size_t n = 0;
  for (int v : xToY) n += v >= 0;
  return n;
}

namespace {

int far_end(const Edge& e, int self) { return e.from == self ? e.to : e.from; }

// Edge ea at x-node a and edge eb at y-node b could correspond.
bool edges_correspond(const MatchView& x, int a, int ea, const MatchView& y, int b, int eb) {
  const Edge& p = x.g().edges()[ea];
  const Edge& q = y.g().edges()[eb];
  if (p.type != q.type) return false;
  if ((p.from == a) != (q.from == b)) return false;
  return labels_agree(x.g(), p, y.g(), q);
}

bool pair_open(const NodeMapping& m, int u, int w) {
  return (m.xToY[u] < 0 && m.yToX[w] < 0) || m.xToY[u] == w;
}

// Kuhn's augmenting paths over incident edges.
class EdgeMatcher {
 public:
  EdgeMatcher(const MatchView& x, int a, const MatchView& y, int b, const NodeMapping& m)
      : ia_(x.g().incident(a)), ib_(y.g().incident(b)) {
    adj_.resize(ia_.size());
    for (std::size_t i = 0; i < ia_.size(); ++i) {
      int u = far_end(x.g().edges()[ia_[i]], a);
      for (std::size_t j = 0; j < ib_.size(); ++j) {
        if (!edges_correspond(x, a, ia_[i], y, b, ib_[j])) continue;
        int w = far_end(y.g().edges()[ib_[j]], b);
        if (valid_match(x, u, y, w) && pair_open(m, u, w)) adj_[i].push_back(static_cast<int>(j));
      }
    }
  }

  int run() {
    owner_.assign(ib_.size(), -1);
    int count = 0;
    for (std::size_t i = 0; i < ia_.size(); ++i) {
      if (adj_[i].empty()) continue;
      seen_.assign(ib_.size(), 0);
      if (augment(static_cast<int>(i))) ++count;
    }
    return count;
  }

 private:
  bool augment(int i) {
    for (int j : adj_[i]) {
      if (seen_[j]) continue;
      seen_[j] = 1;
      if (owner_[j] < 0 || augment(owner_[j])) {
        owner_[j] = i;
        return true;
      }
    }
    return false;
  }

  const std::vector<int>& ia_;
  const std::vector<int>& ib_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> owner_;
  std::vector<char> seen_;
};

void map_pair(NodeMapping& m, int a, int b) {
  m.xToY[a] = b;
  m.yToX[b] = a;
}

// Chooses a conflict-free subset of candidate pairs.
std::vector<ScoredPair> assign(std::vector<ScoredPair> cands, const MatchOptions& opt) {
  std::vector<ScoredPair> out;
  if (cands.empty()) return out;
  if (!opt.exactAssignment) {
    std::sort(cands.begin(), cands.end(), [](const ScoredPair& p, const ScoredPair& q) {
      if (p.score != q.score) return p.score > q.score;
      if (p.x != q.x) return p.x < q.x;
      return p.y < q.y;
    });
    std::set<int> usedX, usedY;
    for (const auto& c : cands) {
      if (usedX.count(c.x) || usedY.count(c.y)) continue;
      usedX.insert(c.x);
      usedY.insert(c.y);
      out.push_back(c);
    }
    return out;
  }
  std::vector<int> rows, cols;
  for (const auto& c : cands) {
    rows.push_back(c.x);
    cols.push_back(c.y);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  std::vector<std::vector<double>> w(rows.size(), std::vector<double>(cols.size(), 0.0));
  auto idx = [](const std::vector<int>& v, int k) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), k) - v.begin());
  };
  for (const auto& c : cands) w[idx(rows, c.x)][idx(cols, c.y)] = c.score;
  std::vector<int> pick = hungarian(w);
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (pick[r] >= 0) out.push_back({rows[r], cols[pick[r]], w[r][pick[r]]});
  return out;
}

// Greedy in index order, for candidates that all score zero.
std::vector<ScoredPair> assign_all(std::vector<ScoredPair> cands) {
  std::sort(cands.begin(), cands.end(), [](const ScoredPair& p, const ScoredPair& q) {
    return p.x != q.x ? p.x < q.x : p.y < q.y;
  });
  std::vector<ScoredPair> out;
  std::set<int> usedX, usedY;
  for (const auto& c : cands) {
    if (usedX.count(c.x) || usedY.count(c.y)) continue;
    usedX.insert(c.x);
    usedY.insert(c.y);
    out.push_back(c);
  }
  return out;
}

}  // namespace

double neighbour_score(const MatchView& x, int a, const MatchView& y, int b, const NodeMapping& m) {
  std::size_t da = x.g().degree(a), db = y.g().degree(b);
  if (da + db == 0) return 1.0;
  EdgeMatcher em(x, a, y, b, m);
  return 2.0 * em.run() / static_cast<double>(da + db);
}

NodeMapping seed_mapping(const MatchView& x, const MatchView& y, const MatchOptions& opt) {
  NodeMapping m;
  m.xToY.assign(x.g().nodes().size(), -1);
  m.yToX.assign(y.g().nodes().size(), -1);
  std::unordered_map<std::uint64_t, std::vector<int>> bucket;
  for (int b : y.refs) bucket[y.key[b]].push_back(b);
  std::vector<ScoredPair> cands;
  for (int a : x.refs) {
    auto it = bucket.find(x.key[a]);
    if (it == bucket.end()) continue;
    for (int b : it->second) {
      if (!valid_match(x, a, y, b)) continue;
      double s = neighbour_score(x, a, y, b, m);
      if (s > 0) cands.push_back({a, b, s});
    }
  }
  m.seeds = assign(std::move(cands), opt);
  for (const auto& p : m.seeds) map_pair(m, p.x, p.y);
  return m;
}

namespace {

// Strict rounds: same edge type, direction and label from the last mapped pair.
void expand_from(const MatchView& x, const MatchView& y, NodeMapping& m, std::vector<ScoredPair> frontier,
                 const MatchOptions& opt) {
  while (!frontier.empty()) {
    std::set<std::pair<int, int>> seen;
    std::vector<ScoredPair> cands;
    for (const auto& f : frontier) {
      const auto& ia = x.g().incident(f.x);
      const auto& ib = y.g().incident(f.y);
      for (int ea : ia) {
        int u = far_end(x.g().edges()[ea], f.x);
        if (m.xToY[u] >= 0) continue;
        for (int eb : ib) {
          int w = far_end(y.g().edges()[eb], f.y);
          if (m.yToX[w] >= 0) continue;
          if (!edges_correspond(x, f.x, ea, y, f.y, eb) || !valid_match(x, u, y, w)) continue;
          if (!seen.insert({u, w}).second) continue;
          double s = neighbour_score(x, u, y, w, m);
          if (s > 0) cands.push_back({u, w, s});
        }
      }
    }
    frontier = assign(std::move(cands), opt);
    for (const auto& p : frontier) map_pair(m, p.x, p.y);
    if (!frontier.empty()) m.frontiers.push_back(frontier);
  }
}

// Positive scores through the configured assignment, then zero scores on
// whatever is left.
std::vector<ScoredPair> assign_with_zeros(std::vector<ScoredPair> cands, const MatchOptions& opt) {
  std::vector<ScoredPair> live, dead;
  for (const auto& c : cands) (c.score > 0 ? live : dead).push_back(c);
  std::vector<ScoredPair> out = assign(std::move(live), opt);
  std::set<int> usedX, usedY;
  for (const auto& p : out) {
    usedX.insert(p.x);
    usedY.insert(p.y);
  }
  std::vector<ScoredPair> rest;
  for (const auto& c : dead)
    if (!usedX.count(c.x) && !usedY.count(c.y)) rest.push_back(c);
  for (const auto& p : assign_all(std::move(rest))) out.push_back(p);
  return out;
}

// Once strict rounds stall: unmapped neighbours of any mapped pair that were
// reached over the same edge type, whatever the direction.
std::vector<ScoredPair> loose_step(const MatchView& x, const MatchView& y, NodeMapping& m, const MatchOptions& opt) {
  std::set<std::pair<int, int>> seen;
  std::vector<ScoredPair> cands;
  for (std::size_t a = 0; a < m.xToY.size(); ++a) {
    int b = m.xToY[a];
    if (b < 0) continue;
    for (int ea : x.g().incident(static_cast<int>(a))) {
      const Edge& p = x.g().edges()[ea];
      int u = far_end(p, static_cast<int>(a));
      if (m.xToY[u] >= 0) continue;
      for (int eb : y.g().incident(b)) {
        const Edge& q = y.g().edges()[eb];
        int w = far_end(q, b);
        if (m.yToX[w] >= 0 || p.type != q.type || !labels_agree(x.g(), p, y.g(), q)) continue;
        if (!valid_match(x, u, y, w) || !seen.insert({u, w}).second) continue;
        cands.push_back({u, w, neighbour_score(x, u, y, w, m)});
      }
    }
  }
  std::vector<ScoredPair> picked = assign_with_zeros(std::move(cands), opt);
  for (const auto& p : picked) map_pair(m, p.x, p.y);
  if (!picked.empty()) m.frontiers.push_back(picked);
  return picked;
}

void grow(const MatchView& x, const MatchView& y, NodeMapping& m, std::vector<ScoredPair> from,
          const MatchOptions& opt) {
  expand_from(x, y, m, std::move(from), opt);
  for (;;) {
    std::vector<ScoredPair> loose = loose_step(x, y, m, opt);
    if (loose.empty()) return;
    expand_from(x, y, m, std::move(loose), opt);
  }
}

}  // namespace

void expand_mapping(const MatchView& x, const MatchView& y, NodeMapping& m, const MatchOptions& opt) {
  grow(x, y, m, m.seeds, opt);
}

void residual_seeds(const MatchView& x, const MatchView& y, NodeMapping& m, const MatchOptions& opt) {
  for (;;) {
    std::vector<ScoredPair> cands;
    for (int a : x.refs) {
      if (m.xToY[a] >= 0) continue;
      for (int b : y.refs)
        if (m.yToX[b] < 0 && valid_match(x, a, y, b)) cands.push_back({a, b, neighbour_score(x, a, y, b, m)});
    }
    if (cands.empty()) return;
    std::vector<ScoredPair> picked = assign_with_zeros(std::move(cands), opt);
    for (const auto& p : picked) map_pair(m, p.x, p.y);
    m.seeds.insert(m.seeds.end(), picked.begin(), picked.end());
    grow(x, y, m, picked, opt);
  }
}

void map_edges(const MatchView& x, const MatchView& y, NodeMapping& m) {
  m.edges.clear();
  const auto& ex = x.g().edges();
  const auto& ey = y.g().edges();
  std::vector<char> used(ey.size(), 0);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const Edge& p = ex[i];
    int f = m.xToY[p.from], t = m.xToY[p.to];
    if (f < 0 || t < 0) continue;
    for (int j : y.g().incident(f)) {
      const Edge& q = ey[j];
      if (used[j] || q.from != f || q.to != t || q.type != p.type) continue;
      if (!labels_agree(x.g(), p, y.g(), q)) continue;
      used[j] = 1;
      m.edges.emplace_back(static_cast<int>(i), j);
      break;
    }
  }
}

GraphScore score_mapping(const Pidg& x, const Pidg& y, const NodeMapping& m, const MatchOptions& opt) {
  GraphScore s;
  s.mapped = m.mapped_nodes();
  s.sizeX = x.nodes().size();
  s.sizeY = y.nodes().size();
  if (opt.countEdges) {
    s.mapped += m.edges.size();
    s.sizeX += x.edges().size();
    s.sizeY += y.edges().size();
  }
  if (s.sizeX + s.sizeY == 0) return s;
  s.value = std::clamp(2.0 * static_cast<double>(s.mapped) / static_cast<double>(s.sizeX + s.sizeY), 0.0, 1.0);
  return s;
}

GraphScore sim_graph(const MatchView& x, const MatchView& y, const MatchOptions& opt, NodeMapping* out) {
  NodeMapping m = seed_mapping(x, y, opt);
  expand_mapping(x, y, m, opt);
  residual_seeds(x, y, m, opt);
  map_edges(x, y, m);
  GraphScore s = score_mapping(x.g(), y.g(), m, opt);
  if (out) *out = std::move(m);
  return s;
}

GraphScore sim_graph(const Pidg& x, const Pidg& y, const MatchOptions& opt, NodeMapping* out) {
  MatchView vx(x), vy(y);
  return sim_graph(vx, vy, opt, out);
}

nlohmann::ordered_json mapping_to_json(const NodeMapping& m, const GraphScore& s) {
  using nlohmann::ordered_json;
  auto pairs = [](const std::vector<ScoredPair>& ps) {
    ordered_json a = ordered_json::array();
    for (const auto& p : ps) a.push_back({{"x", p.x}, {"y", p.y}, {"score", p.score}});
    return a;
  };
  ordered_json doc;
  doc["seeds"] = pairs(m.seeds);
  ordered_json fr = ordered_json::array();
  for (const auto& f : m.frontiers) fr.push_back(pairs(f));
  doc["frontiers"] = std::move(fr);
  ordered_json fin = ordered_json::array();
  for (std::size_t a = 0; a < m.xToY.size(); ++a)
    if (m.xToY[a] >= 0) fin.push_back({static_cast<int>(a), m.xToY[a]});
  doc["pairs"] = std::move(fin);
  ordered_json edges = ordered_json::array();
  for (const auto& [a, b] : m.edges) edges.push_back({a, b});
  doc["edges"] = std::move(edges);
  doc["score"] = {{"value", s.value}, {"mapped", s.mapped}, {"sizeX", s.sizeX}, {"sizeY", s.sizeY}};
  return doc;
}

std::vector<int> hungarian(const std::vector<std::vector<double>>& w) {
  std::size_t rows = w.size();
  std::size_t cols = rows ? w[0].size() : 0;
  std::vector<int> result(rows, -1);
  if (rows == 0 || cols == 0) return result;
  bool flip = rows > cols;
  std::size_t n = flip ? cols : rows, k = flip ? rows : cols;
  auto weight = [&](std::size_t i, std::size_t j) { return flip ? w[j][i] : w[i][j]; };
  double top = 0;
  for (const auto& r : w)
    for (double v : r) top = std::max(top, v);
  // min-cost on cost = top - weight, 1-based potentials (e-maxx formulation)
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(k + 1, 0);
  std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        double cur = (top - weight(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (std::size_t j = 1; j <= k; ++j) {
    if (p[j] == 0) continue;
    std::size_t i = p[j] - 1, c = j - 1;
    if (weight(i, c) <= 0) continue;
    if (flip)
      result[c] = static_cast<int>(i);
    else
      result[i] = static_cast<int>(c);
  }
  return result;
}

}  // namespace bsim::matcher
