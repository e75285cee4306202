#include "bsim/pidg/pidg.hpp"

namespace bsim::pidg {

const char* to_string(NodeType t) {
  switch (t) {
    case NodeType::Object: return "Object";
    case NodeType::Array: return "Array";
    case NodeType::Value: return "Value";
    case NodeType::Operator: return "Operator";
    case NodeType::MethodCall: return "MethodCall";
    case NodeType::EntryPoint: return "EntryPoint";
  }
  return "?";
}

const char* to_string(EdgeType t) {
  switch (t) {
    case EdgeType::Scope: return "Scope";
    case EdgeType::Parameter: return "Parameter";
    case EdgeType::Supplied: return "Supplied";
    case EdgeType::Aggregation: return "Aggregation";
    case EdgeType::Transformation: return "Transformation";
  }
  return "?";
}

bool is_data(NodeType t) { return t == NodeType::Object || t == NodeType::Array || t == NodeType::Value; }

int Pidg::add_node(Node n) {
  if (n.type == NodeType::EntryPoint) {
    if (entry_ >= 0) throw std::logic_error("graph already has an entry point");
    entry_ = static_cast<int>(nodes_.size());
  }
  n.id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  incident_.emplace_back();
  return nodes_.back().id;
}

bool Pidg::add_edge(int from, int to, EdgeType type, std::string label) {
  if (from < 0 || to < 0 || from >= static_cast<int>(nodes_.size()) || to >= static_cast<int>(nodes_.size()))
    throw std::out_of_range("edge endpoint out of range");
  for (int e : incident_[from]) {
    const Edge& x = edges_[e];
    if (x.from == from && x.to == to && x.type == type && x.label == label) return false;
  }
  int idx = static_cast<int>(edges_.size());
  edges_.push_back({from, to, type, std::move(label)});
  incident_[from].push_back(idx);
  if (to != from) incident_[to].push_back(idx);
  return true;
}

}  // namespace bsim::pidg
