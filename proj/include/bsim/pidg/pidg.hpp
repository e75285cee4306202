#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsim::pidg {

enum class NodeType : std::uint8_t { Object, Array, Value, Operator, MethodCall, EntryPoint };
enum class EdgeType : std::uint8_t { Scope, Parameter, Supplied, Aggregation, Transformation };

enum NodeFlag : std::uint8_t {
  kStatic = 1,
  kSymbolic = 2,
  kConcrete = 4,
  kSynthetic = 8,
  kEntryPointParameter = 16,
};

const char* to_string(NodeType t);
const char* to_string(EdgeType t);
bool is_data(NodeType t);

// Attributes are empty when absent.
struct Node {
  int id = 0;
  NodeType type = NodeType::Object;
  std::string runtimeType;  // data nodes and the result type of operators
  std::string literal;      // concrete Values
  std::string string;       // concrete Strings
  bool hasString = false;
  std::string op;         // Operator nodes
  std::string signature;  // MethodCall / EntryPoint nodes
  std::uint8_t flags = 0;  // data nodes only
  bool sourceDefined = false;
  int datum = -1;  // trace datum id, -1 for non-data nodes and fresh concrete copies

  friend bool operator==(const Node& a, const Node& b) {
    return a.id == b.id && a.type == b.type && a.runtimeType == b.runtimeType && a.literal == b.literal &&
           a.string == b.string && a.hasString == b.hasString && a.op == b.op && a.signature == b.signature &&
           a.flags == b.flags && a.sourceDefined == b.sourceDefined;
  }
};

// Array element labels are "[i]" for a concrete index and "[?]" otherwise;
// anything else is a field name.
struct Edge {
  int from = 0;
  int to = 0;
  EdgeType type = EdgeType::Aggregation;
  std::string label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class Pidg {
 public:
  int add_node(Node n);
  // Set semantics: an identical edge is not added twice. Returns false then.
  bool add_edge(int from, int to, EdgeType type, std::string label = {});

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  Node& node(int id) { return nodes_.at(id); }
  const Node& node(int id) const { return nodes_.at(id); }
  int entry() const { return entry_; }
  std::size_t size() const { return nodes_.size() + edges_.size(); }
  // Edge indices touching `id`, in insertion order.
  const std::vector<int>& incident(int id) const { return incident_.at(id); }
  std::size_t degree(int id) const { return incident_.at(id).size(); }

  friend bool operator==(const Pidg& a, const Pidg& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.entry_ == b.entry_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  int entry_ = -1;
};

}  // namespace bsim::pidg
