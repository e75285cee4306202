#include "bsim/pidg/pidg_json.hpp"

#include <sstream>

namespace bsim::pidg {

using nlohmann::ordered_json;

namespace {

constexpr std::pair<NodeFlag, const char*> kFlagNames[] = {
    {kStatic, "Static"},
    {kSymbolic, "Symbolic"},
    {kConcrete, "Concrete"},
    {kSynthetic, "Synthetic"},
    {kEntryPointParameter, "EntryPointParameter"},
};

NodeType node_type(const std::string& s) {
  for (NodeType t : {NodeType::Object, NodeType::Array, NodeType::Value, NodeType::Operator, NodeType::MethodCall,
                     NodeType::EntryPoint})
    if (s == to_string(t)) return t;
  throw SchemaError("unknown nodeType '" + s + "'");
}

EdgeType edge_type(const std::string& s) {
  for (EdgeType t : {EdgeType::Scope, EdgeType::Parameter, EdgeType::Supplied, EdgeType::Aggregation,
                     EdgeType::Transformation})
    if (s == to_string(t)) return t;
  throw SchemaError("unknown edgeType '" + s + "'");
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

ordered_json pidg_to_json(const Pidg& g) {
  ordered_json doc;
  doc["schema"] = kPidgSchema;
  doc["entry"] = g.entry();
  ordered_json nodes = ordered_json::array();
  for (const Node& n : g.nodes()) {
    ordered_json j;
    j["id"] = n.id;
    j["nodeType"] = to_string(n.type);
    ordered_json attrs = ordered_json::object();
    if (!n.runtimeType.empty()) attrs["runtimeType"] = n.runtimeType;
    if (!n.literal.empty()) attrs["literal"] = n.literal;
    if (n.hasString) attrs["string"] = n.string;
    if (!n.op.empty()) attrs["operator"] = n.op;
    if (!n.signature.empty()) attrs["signature"] = n.signature;
    j["attributes"] = std::move(attrs);
    ordered_json flags = ordered_json::array();
    for (auto [f, name] : kFlagNames)
      if (n.flags & f) flags.push_back(name);
    j["flags"] = std::move(flags);
    if (n.sourceDefined) j["sourceDefined"] = true;
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const Edge& e : g.edges()) {
    ordered_json j;
    j["from"] = e.from;
    j["to"] = e.to;
    j["edgeType"] = to_string(e.type);
    if (!e.label.empty()) j["label"] = e.label;
    edges.push_back(std::move(j));
  }
  doc["edges"] = std::move(edges);
  return doc;
}

Pidg pidg_from_json(const ordered_json& doc) {
  try {
    if (!doc.is_object() || doc.value("schema", "") != kPidgSchema)
      throw SchemaError("not a " + std::string(kPidgSchema) + " document");
    Pidg g;
    for (const auto& j : doc.at("nodes")) {
      Node n;
      int id = j.at("id").get<int>();
      if (id != static_cast<int>(g.nodes().size()))
        throw SchemaError("node ids must be dense and ascending; found " + std::to_string(id));
      n.type = node_type(j.at("nodeType").get<std::string>());
      const auto& a = j.at("attributes");
      n.runtimeType = a.value("runtimeType", "");
      n.literal = a.value("literal", "");
      n.hasString = a.contains("string");
      n.string = a.value("string", "");
      n.op = a.value("operator", "");
      n.signature = a.value("signature", "");
      for (const auto& f : j.at("flags")) {
        std::string s = f.get<std::string>();
        bool known = false;
        for (auto [bit, name] : kFlagNames)
          if (s == name) {
            n.flags |= bit;
            known = true;
          }
        if (!known) throw SchemaError("unknown flag '" + s + "'");
      }
      if (n.flags && !is_data(n.type)) throw SchemaError("flags on non-data node " + std::to_string(id));
      n.sourceDefined = j.value("sourceDefined", false);
      g.add_node(std::move(n));
    }
    int count = static_cast<int>(g.nodes().size());
    for (const auto& j : doc.at("edges")) {
      int from = j.at("from").get<int>();
      int to = j.at("to").get<int>();
      for (int end : {from, to})
        if (end < 0 || end >= count) throw SchemaError("edge references missing node " + std::to_string(end));
      g.add_edge(from, to, edge_type(j.at("edgeType").get<std::string>()), j.value("label", ""));
    }
    if (g.entry() != doc.at("entry").get<int>()) throw SchemaError("entry does not name the EntryPoint node");
    return g;
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("malformed graph document: ") + ex.what());
  } catch (const std::logic_error& ex) {
    if (dynamic_cast<const SchemaError*>(&ex)) throw;
    throw SchemaError(ex.what());
  }
}

ordered_json pidgs_to_json(const std::vector<Pidg>& gs) {
  ordered_json doc;
  doc["schema"] = kPidgSchema;
  ordered_json arr = ordered_json::array();
  for (const auto& g : gs) arr.push_back(pidg_to_json(g));
  doc["graphs"] = std::move(arr);
  return doc;
}

std::vector<Pidg> pidgs_from_json(const ordered_json& doc) {
  if (doc.is_object() && doc.contains("graphs")) {
    if (doc.value("schema", "") != kPidgSchema) throw SchemaError("not a graph list document");
    std::vector<Pidg> out;
    for (const auto& g : doc.at("graphs")) out.push_back(pidg_from_json(g));
    return out;
  }
  return {pidg_from_json(doc)};
}

std::string pidg_to_dot(const Pidg& g) {
  std::ostringstream os;
  os << "digraph pidg {\n";
  for (const Node& n : g.nodes()) {
    std::string label = to_string(n.type);
    std::string shape = "ellipse";
    switch (n.type) {
      case NodeType::Operator:
        label = n.op;
        shape = "diamond";
        break;
      case NodeType::MethodCall:
        label = n.signature;
        shape = "box";
        break;
      case NodeType::EntryPoint:
        label = n.signature;
        shape = "doubleoctagon";
        break;
      default:
        label = n.runtimeType + "@" + std::to_string(n.id);
        if (!n.literal.empty()) label += "\n" + n.literal;
        if (n.hasString) label += "\n\"" + n.string + "\"";
        break;
    }
    os << "  n" << n.id << " [shape=" << shape << ", label=\"" << escape_dot(label) << "\"];\n";
  }
  for (const Edge& e : g.edges()) {
    const char* style = "solid";
    switch (e.type) {
      case EdgeType::Transformation: style = "dashed"; break;
      case EdgeType::Aggregation: style = "bold"; break;
      case EdgeType::Scope: style = "dotted"; break;
      default: break;
    }
    os << "  n" << e.from << " -> n" << e.to << " [style=" << style << ", label=\"" << to_string(e.type);
    if (!e.label.empty()) os << " " << escape_dot(e.label);
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace bsim::pidg
