#include "program_gen.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace bsim::testsupport {

using pidg::EdgeType;
using pidg::Node;
using pidg::NodeType;
using pidg::Pidg;

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int roll(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Node ref_node(std::mt19937_64& rng) {
  Node n;
  if (coin(rng, 0.6)) {
    n.type = NodeType::Operator;
    n.op = pick<std::string>(rng, {"+", "-", "*", "<"});
    n.runtimeType = n.op == "<" ? "boolean" : "int";
  } else {
    n.type = NodeType::MethodCall;
    n.signature = pick<std::string>(rng, {"Math.max(int,int)", "StringBuilder.append(int)", "Helper.calc(int)"});
    n.sourceDefined = n.signature.rfind("Helper", 0) == 0;
  }
  return n;
}

Node data_node(std::mt19937_64& rng) {
  Node n;
  int k = roll(rng, 0, 9);
  if (k < 6) {
    n.type = NodeType::Value;
    n.runtimeType = "int";
    if (coin(rng, 0.5)) {
      n.flags = pidg::kConcrete;
      n.literal = pick<std::string>(rng, {"0", "1", "2"});
    } else {
      n.flags = pidg::kSymbolic;
    }
  } else if (k < 8) {
    n.type = NodeType::Value;
    n.runtimeType = "String";
    n.flags = pidg::kSymbolic;
  } else if (k < 9) {
    n.type = NodeType::Object;
    n.runtimeType = "StringBuilder";
    n.flags = pidg::kSynthetic;
  } else {
    n.type = NodeType::Array;
    n.runtimeType = "int[]";
    n.flags = pidg::kConcrete;
  }
  return n;
}

struct RawEdge {
  int from, to;
  EdgeType type;
  std::string label;
};

struct Raw {
  std::vector<Node> nodes;
  std::vector<RawEdge> edges;
};

bool is_ref(const Node& n) { return n.type == NodeType::Operator || n.type == NodeType::MethodCall; }

// An edge between data node d and reference node r in a direction that the
// builder could have produced.
RawEdge link(std::mt19937_64& rng, const Node& dn, int d, const Node& rn, int r) {
  if (rn.type == NodeType::Operator) {
    if (coin(rng, 0.6)) return {d, r, EdgeType::Transformation, ""};
    return {r, d, EdgeType::Transformation, ""};
  }
  if (dn.type == NodeType::Object && coin(rng, 0.7)) return {d, r, EdgeType::Scope, ""};
  if (coin(rng, 0.6)) return {d, r, EdgeType::Parameter, ""};
  return {r, d, EdgeType::Supplied, ""};
}

Raw random_raw(std::mt19937_64& rng, int maxNodes) {
  Raw g;
  int n = roll(rng, 3, std::max(3, maxNodes));
  int refs = roll(rng, 1, std::max(1, n / 3));
  for (int i = 0; i < refs; ++i) g.nodes.push_back(ref_node(rng));
  while (static_cast<int>(g.nodes.size()) < n) {
    Node d = data_node(rng);
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(d);
    int r = roll(rng, 0, refs - 1);
    if ((d.type == NodeType::Value) && coin(rng, 0.25)) {
      // element or field of an earlier container, which itself touches a reference
      std::vector<int> owners;
      for (int j = refs; j < id; ++j)
        if (g.nodes[j].type == NodeType::Object || g.nodes[j].type == NodeType::Array) owners.push_back(j);
      if (!owners.empty()) {
        int o = pick(rng, owners);
        std::string label = g.nodes[o].type == NodeType::Array ? pick<std::string>(rng, {"[0]", "[1]", "[?]"})
                                                               : pick<std::string>(rng, {"count", "total"});
        g.edges.push_back({o, id, EdgeType::Aggregation, label});
        continue;
      }
    }
    g.edges.push_back(link(rng, d, id, g.nodes[r], r));
  }
  // a few extra edges between references and data
  int extra = roll(rng, 0, n / 3);
  for (int k = 0; k < extra; ++k) {
    int r = roll(rng, 0, refs - 1);
    int d = roll(rng, refs, n - 1);
    if (d >= n) continue;
    g.edges.push_back(link(rng, g.nodes[d], d, g.nodes[r], r));
  }
  return g;
}

// Drops kept nodes that no longer reach a reference node, so perturbed
// graphs keep the same shape property as built ones.
void prune_detached(const Raw& raw, std::vector<int>& keep) {
  std::vector<char> in(raw.nodes.size(), 0), reached(raw.nodes.size(), 0);
  for (int i : keep) in[i] = 1;
  std::vector<int> stack;
  for (int i : keep)
    if (is_ref(raw.nodes[i])) {
      reached[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& e : raw.edges) {
      if (e.from != v && e.to != v) continue;
      int w = e.from == v ? e.to : e.from;
      if (in[w] && !reached[w]) {
        reached[w] = 1;
        stack.push_back(w);
      }
    }
  }
  keep.erase(std::remove_if(keep.begin(), keep.end(), [&](int i) { return !reached[i]; }), keep.end());
}

Pidg materialise(const Raw& raw, const std::vector<int>& order) {
  // order[k] = raw index placed at position k
  std::vector<int> pos(raw.nodes.size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
  Pidg g;
  for (int i : order) g.add_node(raw.nodes[i]);
  for (const auto& e : raw.edges) {
    if (pos[e.from] < 0 || pos[e.to] < 0) continue;
    g.add_edge(pos[e.from], pos[e.to], e.type, e.label);
  }
  return g;
}

Pidg materialise(const Raw& raw) {
  std::vector<int> order(raw.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return materialise(raw, order);
}

}  // namespace

Pidg random_pidg(std::mt19937_64& rng, int maxNodes) { return materialise(random_raw(rng, maxNodes)); }

GraphPair random_graph_pair(std::mt19937_64& rng, int maxNodes) {
  Raw a = random_raw(rng, maxNodes);
  GraphPair out;
  out.x = materialise(a);
  if (coin(rng, 0.5)) {
    out.y = random_pidg(rng, maxNodes);
    return out;
  }
  out.perturbed = true;
  Raw b = a;
  std::vector<int> keep;
  for (std::size_t i = 0; i < b.nodes.size(); ++i) keep.push_back(static_cast<int>(i));
  if (b.nodes.size() > 3 && coin(rng, 0.4)) keep.erase(keep.begin() + roll(rng, 0, static_cast<int>(keep.size()) - 1));
  if (!b.edges.empty() && coin(rng, 0.3)) b.edges.erase(b.edges.begin() + roll(rng, 0, static_cast<int>(b.edges.size()) - 1));
  if (coin(rng, 0.3)) {
    for (auto& n : b.nodes)
      if (n.type == NodeType::Value && n.flags == pidg::kConcrete) {
        n.literal = n.literal == "0" ? "7" : "0";
        break;
      }
  }
  prune_detached(b, keep);
  if (static_cast<int>(keep.size()) < maxNodes && coin(rng, 0.4)) {
    std::vector<int> refs;
    for (int i : keep)
      if (is_ref(b.nodes[i])) refs.push_back(i);
    if (!refs.empty()) {
      Node d = data_node(rng);
      int id = static_cast<int>(b.nodes.size());
      b.nodes.push_back(d);
      int r = pick(rng, refs);
      b.edges.push_back(link(rng, d, id, b.nodes[r], r));
      keep.push_back(id);
    }
  }
  std::shuffle(keep.begin(), keep.end(), rng);
  out.y = materialise(b, keep);
  return out;
}

namespace {

class ProgramWriter {
 public:
  ProgramWriter(std::uint64_t seed, int target) : rng_(seed), target_(target) {}

  std::string run() {
    int classes = std::max(1, target_ / 150);
    int methodsPer = 4;
    for (int c = 0; c < classes; ++c) write_class(c, methodsPer);
    write_main(classes, methodsPer);
    return out_.str();
  }

 private:
  void line(const std::string& s) {
    out_ << std::string(static_cast<std::size_t>(indent_) * 4, ' ') << s << "\n";
    ++lines_;
  }
  void open(const std::string& s) {
    line(s + " {");
    ++indent_;
  }
  void close() {
    --indent_;
    line("}");
  }
  std::string num(int lo, int hi) { return std::to_string(roll(rng_, lo, hi)); }

  std::string operand(const std::vector<std::string>& vars) {
    if (coin(rng_, 0.3)) return num(1, 9);
    return pick(rng_, vars);
  }

  std::string arith(const std::vector<std::string>& vars) {
    return operand(vars) + " " + pick<std::string>(rng_, {"+", "-", "*", "+"}) + " " + operand(vars);
  }

  void statement(std::vector<std::string>& vars, int c, int m, int depth) {
    int k = roll(rng_, 0, depth > 1 ? 6 : 10);
    std::string v = "t" + std::to_string(tmp_++);
    switch (k) {
      case 0:
      case 1:
        line("int " + v + " = " + arith(vars) + ";");
        vars.push_back(v);
        break;
      case 2:
        line(pick(rng_, vars) == "total" ? "total = total + " + operand(vars) + ";"
                                         : "total = total + " + arith(vars) + ";");
        break;
      case 3:
        // API results are symbolic; keep them out of later conditions
        line("sb.append(Math.max(" + operand(vars) + ", " + operand(vars) + "));");
        break;
      case 4:
        line("sb.append(" + pick(rng_, vars) + ");");
        break;
      case 5:
        line("count = count + " + operand(vars) + ";");
        break;
      case 6:
        if (m > 0) {
          line("int " + v + " = step" + std::to_string(c) + "_" + std::to_string(roll(rng_, 0, m - 1)) + "(" +
               operand(vars) + ", " + num(1, 5) + ");");
          vars.push_back(v);
        } else {
          line("int " + v + " = " + arith(vars) + " % " + num(2, 7) + ";");
          vars.push_back(v);
        }
        break;
      case 7: {
        open("if (" + pick(rng_, vars) + " > " + num(2, 20) + ")");
        auto inner = vars;
        statement(inner, c, m, depth + 1);
        statement(inner, c, m, depth + 1);
        close();
        open("else");
        inner = vars;
        statement(inner, c, m, depth + 1);
        close();
        break;
      }
      case 8: {
        std::string i = "i" + std::to_string(tmp_++);
        open("for (int " + i + " = 0; " + i + " < " + num(2, 4) + "; " + i + "++)");
        auto inner = vars;
        inner.push_back(i);
        line("total += " + i + " * " + operand(vars) + ";");
        statement(inner, c, m, depth + 1);
        close();
        break;
      }
      case 9: {
        line("int[] " + v + " = new int[" + num(3, 5) + "];");
        line(v + "[0] = " + arith(vars) + ";");
        line(v + "[1] = " + v + "[0] + " + operand(vars) + ";");
        line("total = total + " + v + "[1];");
        break;
      }
      default: {
        std::string sel = pick(rng_, vars);
        open("switch (" + sel + " % 3)");
        line("case 0:");
        ++indent_;
        line("total = total + " + operand(vars) + ";");
        line("break;");
        --indent_;
        line("case 1:");
        ++indent_;
        line("count = count + 1;");
        line("break;");
        --indent_;
        line("default:");
        ++indent_;
        line("total = total - " + operand(vars) + ";");
        --indent_;
        close();
        break;
      }
    }
  }

  void write_class(int c, int methods) {
    open("class Part" + std::to_string(c));
    line("private int total;");
    line("private int count;");
    line("private StringBuilder sb;");
    line("");
    open("Part" + std::to_string(c) + "(int seed)");
    line("total = seed;");
    line("count = 0;");
    line("sb = new StringBuilder();");
    close();
    line("");
    for (int m = 0; m < methods; ++m) {
      open("int step" + std::to_string(c) + "_" + std::to_string(m) + "(int a, int b)");
      std::vector<std::string> vars{"a", "b", "total", "count"};
      int n = roll(rng_, 6, 12);
      for (int s = 0; s < n; ++s) statement(vars, c, m, 0);
      line("return " + arith(vars) + ";");
      close();
      line("");
    }
    open("String report()");
    line("return sb.toString() + \":\" + total + \"/\" + count;");
    close();
    close();
    line("");
  }

  void write_main(int classes, int methods) {
    open("class Main");
    open("public static void main(String[] args)");
    line("int n = args.length;");
    line("int acc = 0;");
    for (int c = 0; c < classes; ++c) {
      std::string p = "p" + std::to_string(c);
      line("Part" + std::to_string(c) + " " + p + " = new Part" + std::to_string(c) + "(" + num(1, 9) + ");");
      for (int m = 0; m < methods; ++m) {
        line("acc = acc + " + p + ".step" + std::to_string(c) + "_" + std::to_string(m) + "(" + num(0, 12) + ", " +
             num(1, 6) + ");");
      }
      line("System.out.println(" + p + ".report());");
    }
    // the symbolic input reaches main's last two branches only
    open("if (n > 2)");
    line("acc = acc * 2;");
    close();
    open("else");
    line("acc = acc - n;");
    close();
    open("if (n % 2 == 0)");
    line("acc = acc + 5;");
    close();
    line("System.out.println(acc);");
    close();
    close();
  }

  std::mt19937_64 rng_;
  int target_;
  std::ostringstream out_;
  int indent_ = 0;
  int lines_ = 0;
  int tmp_ = 0;
};

}  // namespace

std::string random_program(std::uint64_t seed, int targetLines) { return ProgramWriter(seed, targetLines).run(); }

}  // namespace bsim::testsupport
