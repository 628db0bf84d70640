#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tasksheaf/domain.hpp"
#include "tasksheaf/errors.hpp"
#include "tasksheaf/task.hpp"

namespace tasksheaf {

// delta_p: finite partial map from local views to output values. Views not
// in the map mean "no decision yet". The owning process is implicit in the
// view, so one map serves the whole system.
class DecisionMap {
 public:
  DecisionMap(uint32_t process_count, ValueKind kind) : n_(process_count), kind_(kind) {}

  uint32_t process_count() const { return n_; }
  ValueKind kind() const { return kind_; }

  std::optional<Value> lookup(ViewId v) const {
    auto it = entries_.find(v);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Idempotent on equal values; a genuine conflict is a construction bug.
  void set(ViewId v, const Value& value) {
    bool ok = kind_ == ValueKind::rational ? value.is_rational() : value.is_symbol();
    if (!ok) throw ValidationError("decision value of wrong kind");
    auto [it, fresh] = entries_.emplace(v, value);
    if (!fresh && !(it->second == value))
      throw ValidationError("conflicting decision for one view");
  }

  size_t size() const { return entries_.size(); }
  const std::map<ViewId, Value>& entries() const { return entries_; }

 private:
  uint32_t n_;
  ValueKind kind_;
  std::map<ViewId, Value> entries_;
};

// Views serialize structurally, so a map written in one session reloads in a
// fresh Universe: {"p": i, "in": value} at depth 0, deeper views
// {"prev": view, "recv": [view-or-null per sender, own slot null]}.
inline nlohmann::json view_to_json(const Universe& u, ViewId v) {
  nlohmann::json j;
  if (u.view_depth(v) == 0) {
    j["p"] = u.view_process(v).index;
    j["in"] = value_to_json(u.view_input(v));
    return j;
  }
  j["prev"] = view_to_json(u, u.view_prev(v));
  auto recv = nlohmann::json::array();
  for (const auto& r : u.view_received(v)) {
    if (r.has_value())
      recv.push_back(view_to_json(u, *r));
    else
      recv.push_back(nullptr);
  }
  j["recv"] = std::move(recv);
  return j;
}

inline ViewId view_from_json(Universe& u, ValueKind kind, const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("view must be a JSON object");
  if (j.contains("p")) {
    if (!j["p"].is_number_unsigned() || !j.contains("in"))
      throw ParseError("depth-0 view needs 'p' and 'in'");
    return u.input_view(ProcessId{j["p"].get<uint32_t>()}, value_from_json(kind, j["in"]));
  }
  if (!j.contains("prev") || !j.contains("recv"))
    throw ParseError("view needs either 'p'/'in' or 'prev'/'recv'");
  ViewId prev = view_from_json(u, kind, j["prev"]);
  if (!j["recv"].is_array() || j["recv"].size() != u.process_count())
    throw ParseError("'recv' must list one entry per process");
  std::vector<std::optional<ViewId>> recv(u.process_count());
  for (uint32_t s = 0; s < u.process_count(); ++s) {
    const auto& r = j["recv"][s];
    if (r.is_null()) continue;
    recv[s] = view_from_json(u, kind, r);
  }
  return u.step_view(prev, recv);  // validates depths, slots, ownership
}

inline nlohmann::json decision_map_to_json(const Universe& u, const DecisionMap& dm) {
  nlohmann::json j;
  j["n"] = dm.process_count();
  j["kind"] = kind_name(dm.kind());
  auto entries = nlohmann::json::array();
  for (const auto& [view, value] : dm.entries()) {
    nlohmann::json e;
    e["process"] = u.view_process(view).index;
    e["view"] = view_to_json(u, view);
    e["value"] = value_to_json(value);
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline DecisionMap decision_map_from_json(Universe& u, const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("decision map must be a JSON object");
  for (const char* key : {"n", "kind", "entries"})
    if (!j.contains(key)) throw ParseError(std::string("decision map missing '") + key + "'");
  if (!j["n"].is_number_integer() ||
      j["n"].get<int64_t>() != static_cast<int64_t>(u.process_count()))
    throw ArityError("decision map was written for a different process count");
  ValueKind kind = kind_by_name(j["kind"].get<std::string>());
  DecisionMap dm(u.process_count(), kind);
  if (!j["entries"].is_array()) throw ParseError("'entries' must be an array");
  for (const auto& e : j["entries"]) {
    if (!e.is_object() || !e.contains("view") || !e.contains("value"))
      throw ParseError("each entry needs 'view' and 'value'");
    ViewId v = view_from_json(u, kind, e["view"]);
    if (e.contains("process") && e["process"].get<uint32_t>() != u.view_process(v).index)
      throw ParseError("entry 'process' disagrees with the view's owner");
    dm.set(v, value_from_json(kind, e["value"]));
  }
  return dm;
}

}  // namespace tasksheaf
