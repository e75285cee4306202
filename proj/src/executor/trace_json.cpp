#include "bsim/executor/trace_json.hpp"

namespace bsim::executor {

using nlohmann::ordered_json;

namespace {

EventKind event_kind(const std::string& s) {
  static const EventKind all[] = {EventKind::ApiCall,          EventKind::FieldAccess,  EventKind::ArrayAccess,
                                  EventKind::PrimaryOperation, EventKind::StringConcat, EventKind::Stringify,
                                  EventKind::Assertion};
  for (EventKind k : all)
    if (s == to_string(k)) return k;
  throw TraceSchemaError("unknown event kind '" + s + "'");
}

Termination termination(const std::string& s) {
  for (Termination t : {Termination::Normal, Termination::Budget, Termination::Limit, Termination::Fault})
    if (s == to_string(t)) return t;
  throw TraceSchemaError("unknown termination '" + s + "'");
}

DatumKind datum_kind(const std::string& s) {
  for (DatumKind k : {DatumKind::Value, DatumKind::Object, DatumKind::Array, DatumKind::Unknown})
    if (s == to_string(k)) return k;
  throw TraceSchemaError("unknown datum kind '" + s + "'");
}

ordered_json flag_list(std::uint8_t flags) {
  ordered_json a = ordered_json::array();
  if (flags & kStatic) a.push_back("Static");
  if (flags & kSynthetic) a.push_back("Synthetic");
  if (flags & kEntryParam) a.push_back("EntryPointParameter");
  return a;
}

std::uint8_t parse_flags(const ordered_json& a) {
  std::uint8_t f = 0;
  for (const auto& x : a) {
    std::string s = x.get<std::string>();
    if (s == "Static")
      f |= kStatic;
    else if (s == "Synthetic")
      f |= kSynthetic;
    else if (s == "EntryPointParameter")
      f |= kEntryParam;
    else
      throw TraceSchemaError("unknown datum flag '" + s + "'");
  }
  return f;
}

void put_ref(ordered_json& j, const char* key, DatumId id) {
  if (id != kNoDatum) j[key] = id;
}

DatumId get_ref(const ordered_json& j, const char* key) { return j.contains(key) ? j.at(key).get<int>() : kNoDatum; }

}  // namespace

ordered_json trace_to_json(const ExecutionTrace& t) {
  ordered_json doc;
  doc["schema"] = kTraceSchema;
  doc["entry"] = t.entry;
  doc["params"] = t.params;
  doc["termination"] = to_string(t.termination);
  if (!t.diagnostic.empty()) doc["diagnostic"] = t.diagnostic;
  ordered_json data = ordered_json::array();
  for (const DatumInfo& d : t.data) {
    ordered_json j;
    j["id"] = d.id;
    j["kind"] = to_string(d.kind);
    j["mode"] = to_string(d.mode);
    j["type"] = d.type;
    if (!d.literal.empty()) j["literal"] = d.literal;
    if (d.hasText) j["text"] = d.text;
    if (d.sourceDefined) j["sourceDefined"] = true;
    if (d.isNull) j["null"] = true;
    j["flags"] = flag_list(d.flags);
    data.push_back(std::move(j));
  }
  doc["data"] = std::move(data);
  ordered_json events = ordered_json::array();
  for (const TraceEvent& e : t.events) {
    ordered_json j;
    j["kind"] = to_string(e.kind);
    switch (e.kind) {
      case EventKind::ApiCall:
        j["signature"] = e.signature;
        put_ref(j, "scope", e.scope);
        j["params"] = e.operands;
        put_ref(j, "result", e.result);
        break;
      case EventKind::FieldAccess:
        j["write"] = e.write;
        if (!e.staticType.empty()) j["staticType"] = e.staticType;
        put_ref(j, "scope", e.scope);
        j["name"] = e.name;
        j["datum"] = e.datum;
        break;
      case EventKind::ArrayAccess:
        j["write"] = e.write;
        j["scope"] = e.scope;
        j["index"] = e.index;
        j["datum"] = e.datum;
        break;
      case EventKind::PrimaryOperation:
        j["operator"] = e.name;
        j["operands"] = e.operands;
        j["result"] = e.result;
        break;
      case EventKind::StringConcat:
      case EventKind::Stringify:
        j["operands"] = e.operands;
        j["result"] = e.result;
        break;
      case EventKind::Assertion:
        j["condition"] = e.operands.at(0);
        j["truth"] = e.truth;
        break;
    }
    events.push_back(std::move(j));
  }
  doc["events"] = std::move(events);
  return doc;
}

ExecutionTrace trace_from_json(const ordered_json& doc) {
  try {
    if (!doc.is_object() || doc.value("schema", "") != kTraceSchema)
      throw TraceSchemaError("not a " + std::string(kTraceSchema) + " document");
    ExecutionTrace t;
    t.entry = doc.at("entry").get<std::string>();
    t.params = doc.at("params").get<std::vector<DatumId>>();
    t.termination = termination(doc.at("termination").get<std::string>());
    t.diagnostic = doc.value("diagnostic", "");
    for (const auto& j : doc.at("data")) {
      DatumInfo d;
      d.id = j.at("id").get<int>();
      if (d.id != static_cast<DatumId>(t.data.size())) throw TraceSchemaError("datum ids must be dense and ordered");
      d.kind = datum_kind(j.at("kind").get<std::string>());
      std::string mode = j.at("mode").get<std::string>();
      if (mode != "Concrete" && mode != "Symbolic") throw TraceSchemaError("unknown mode '" + mode + "'");
      d.mode = mode == "Concrete" ? Mode::Concrete : Mode::Symbolic;
      d.type = j.at("type").get<std::string>();
      d.literal = j.value("literal", "");
      d.hasText = j.contains("text");
      d.text = j.value("text", "");
      d.sourceDefined = j.value("sourceDefined", false);
      d.isNull = j.value("null", false);
      d.flags = parse_flags(j.at("flags"));
      t.data.push_back(std::move(d));
    }
    for (const auto& j : doc.at("events")) {
      TraceEvent e;
      e.kind = event_kind(j.at("kind").get<std::string>());
      switch (e.kind) {
        case EventKind::ApiCall:
          e.signature = j.at("signature").get<std::string>();
          e.scope = get_ref(j, "scope");
          e.operands = j.at("params").get<std::vector<DatumId>>();
          e.result = get_ref(j, "result");
          break;
        case EventKind::FieldAccess:
          e.write = j.at("write").get<bool>();
          e.staticType = j.value("staticType", "");
          e.scope = get_ref(j, "scope");
          e.name = j.at("name").get<std::string>();
          e.datum = j.at("datum").get<int>();
          break;
        case EventKind::ArrayAccess:
          e.write = j.at("write").get<bool>();
          e.scope = j.at("scope").get<int>();
          e.index = j.at("index").get<int>();
          e.datum = j.at("datum").get<int>();
          break;
        case EventKind::PrimaryOperation:
          e.name = j.at("operator").get<std::string>();
          e.operands = j.at("operands").get<std::vector<DatumId>>();
          e.result = j.at("result").get<int>();
          break;
        case EventKind::StringConcat:
        case EventKind::Stringify:
          e.operands = j.at("operands").get<std::vector<DatumId>>();
          e.result = j.at("result").get<int>();
          break;
        case EventKind::Assertion:
          e.operands = {j.at("condition").get<int>()};
          e.truth = j.at("truth").get<bool>();
          break;
      }
      t.events.push_back(std::move(e));
    }
    return t;
  } catch (const nlohmann::json::exception& ex) {
    throw TraceSchemaError(std::string("malformed trace document: ") + ex.what());
  }
}

ordered_json traces_to_json(const std::vector<ExecutionTrace>& ts) {
  ordered_json doc;
  doc["schema"] = kTraceSchema;
  ordered_json arr = ordered_json::array();
  for (const auto& t : ts) arr.push_back(trace_to_json(t));
  doc["traces"] = std::move(arr);
  return doc;
}

std::vector<ExecutionTrace> traces_from_json(const ordered_json& doc) {
  if (doc.is_object() && doc.contains("traces")) {
    if (doc.value("schema", "") != kTraceSchema) throw TraceSchemaError("not a trace list document");
    std::vector<ExecutionTrace> out;
    for (const auto& t : doc.at("traces")) out.push_back(trace_from_json(t));
    return out;
  }
  return {trace_from_json(doc)};
}

}  // namespace bsim::executor
