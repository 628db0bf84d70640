#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tasksheaf/errors.hpp"
#include "tasksheaf/value.hpp"

namespace tasksheaf {

enum class ValueKind { rational, symbolic };

inline const char* kind_name(ValueKind k) {
  return k == ValueKind::rational ? "rational" : "symbolic";
}

inline ValueKind kind_by_name(const std::string& name) {
  if (name == "rational") return ValueKind::rational;
  if (name == "symbolic") return ValueKind::symbolic;
  throw ParseError("unknown value kind '" + name + "'");
}

// A one-shot decision task: finite input vectors, finite output vectors,
// and a validity map delta sending every input to its acceptable outputs.
// All vectors are per-process, all values share one kind.
class Task {
 public:
  Task(uint32_t process_count, ValueKind kind, std::vector<ValueVector> inputs,
       std::vector<ValueVector> outputs,
       std::vector<std::pair<ValueVector, std::vector<ValueVector>>> delta)
      : n_(process_count), kind_(kind) {
    if (n_ < 2) throw ValidationError("task needs at least two processes");
    auto check_vec = [&](const ValueVector& v, const char* what) {
      if (v.size() != n_) throw ArityError(std::string(what) + " vector has wrong width");
      for (const Value& x : v) {
        bool ok = kind_ == ValueKind::rational ? x.is_rational() : x.is_symbol();
        if (!ok)
          throw ValidationError(std::string(what) + " value " + x.render() + " has wrong kind");
      }
    };
    auto normalise = [&](std::vector<ValueVector> vs, const char* what) {
      for (const ValueVector& v : vs) check_vec(v, what);
      std::sort(vs.begin(), vs.end());
      auto dup = std::adjacent_find(vs.begin(), vs.end());
      if (dup != vs.end())
        throw ValidationError(std::string("duplicate ") + what + " vector " + render_vector(*dup));
      return vs;
    };
    inputs_ = normalise(std::move(inputs), "input");
    outputs_ = normalise(std::move(outputs), "output");
    if (inputs_.empty()) throw ValidationError("task has no inputs");
    if (outputs_.empty()) throw ValidationError("task has no outputs");
    std::set<ValueVector> output_set(outputs_.begin(), outputs_.end());
    for (auto& [in, outs] : delta) {
      check_vec(in, "delta input");
      if (!std::binary_search(inputs_.begin(), inputs_.end(), in))
        throw ValidationError("delta entry for unknown input " + render_vector(in));
      if (outs.empty())
        throw ValidationError("delta gives no output for input " + render_vector(in));
      std::sort(outs.begin(), outs.end());
      outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
      for (const ValueVector& o : outs)
        if (!output_set.count(o))
          throw ValidationError("delta output " + render_vector(o) + " not in output set");
      if (!delta_.emplace(std::move(in), std::move(outs)).second)
        throw ValidationError("two delta entries for one input");
    }
    for (const ValueVector& in : inputs_)
      if (!delta_.count(in))
        throw ValidationError("delta undefined for input " + render_vector(in));
  }

  uint32_t process_count() const { return n_; }
  ValueKind kind() const { return kind_; }
  const std::vector<ValueVector>& inputs() const { return inputs_; }
  const std::vector<ValueVector>& outputs() const { return outputs_; }

  bool has_input(const ValueVector& in) const { return delta_.count(in) > 0; }

  // Acceptable outputs for this input, sorted. Throws on unknown inputs.
  const std::vector<ValueVector>& delta(const ValueVector& in) const {
    auto it = delta_.find(in);
    if (it == delta_.end())
      throw ValidationError("input " + render_vector(in) + " outside the task");
    return it->second;
  }

  bool allows(const ValueVector& in, const ValueVector& out) const {
    const auto& outs = delta(in);
    return std::binary_search(outs.begin(), outs.end(), out);
  }

 private:
  uint32_t n_;
  ValueKind kind_;
  std::vector<ValueVector> inputs_;
  std::vector<ValueVector> outputs_;
  std::map<ValueVector, std::vector<ValueVector>> delta_;
};

namespace detail {

inline std::vector<ValueVector> vector_power(const std::vector<Value>& base, uint32_t n) {
  std::vector<ValueVector> out;
  ValueVector cur(n);
  std::function<void(uint32_t)> rec = [&](uint32_t i) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (const Value& v : base) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace detail

// Everyone decides one common value that someone started with.
inline Task builtin_consensus(uint32_t n, const std::vector<Value>& values) {
  std::vector<Value> base = values;
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  if (base.size() < 2) throw ValidationError("consensus needs at least two values");
  ValueKind kind = base.front().is_rational() ? ValueKind::rational : ValueKind::symbolic;
  std::vector<ValueVector> inputs = detail::vector_power(base, n);
  std::vector<ValueVector> outputs;
  for (const Value& v : base) outputs.push_back(ValueVector(n, v));
  std::vector<std::pair<ValueVector, std::vector<ValueVector>>> delta;
  for (const ValueVector& in : inputs) {
    std::vector<ValueVector> outs;
    std::set<Value> present(in.begin(), in.end());
    for (const Value& v : present) outs.push_back(ValueVector(n, v));
    delta.emplace_back(in, std::move(outs));
  }
  return Task(n, kind, std::move(inputs), std::move(outputs), std::move(delta));
}

// How epsilon agreement treats mixed inputs. Outputs always stay within
// epsilon of each other; `strict` additionally keeps every decision inside
// the hull [min(input), max(input)]. On binary inputs the two coincide.
enum class AgreementMode { paper_exact, strict };

inline AgreementMode agreement_mode_by_name(const std::string& name) {
  if (name == "paper-exact") return AgreementMode::paper_exact;
  if (name == "strict") return AgreementMode::strict;
  throw ValidationError("unknown agreement mode '" + name + "'");
}

// Decisions on a rational grid, pairwise within epsilon; equal inputs force
// that exact value. Default inputs are the 0/1 corners.
inline Task builtin_epsilon_agreement(uint32_t n, const Rat& eps, const std::vector<Rat>& grid,
                                      std::vector<ValueVector> inputs = {},
                                      AgreementMode mode = AgreementMode::paper_exact) {
  if (eps < 0) throw ValidationError("negative epsilon");
  std::vector<Rat> pts = grid;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) throw ValidationError("grid needs at least two points");
  std::vector<Value> base;
  for (const Rat& q : pts) base.push_back(Value::rational(q));
  if (inputs.empty()) {
    std::vector<Value> corners{Value::rational(Rat(0)), Value::rational(Rat(1))};
    inputs = detail::vector_power(corners, n);
  }
  auto span = [](const ValueVector& v) {
    Rat lo = v[0].rat(), hi = v[0].rat();
    for (const Value& x : v) {
      if (x.rat() < lo) lo = x.rat();
      if (x.rat() > hi) hi = x.rat();
    }
    return std::make_pair(lo, hi);
  };
  std::vector<ValueVector> close;
  for (const ValueVector& o : detail::vector_power(base, n)) {
    auto [lo, hi] = span(o);
    if (hi - lo <= eps) close.push_back(o);
  }
  std::vector<std::pair<ValueVector, std::vector<ValueVector>>> delta;
  std::vector<ValueVector> outputs = close;
  std::set<ValueVector> output_set(outputs.begin(), outputs.end());
  for (const ValueVector& in : inputs) {
    for (const Value& x : in)
      if (!x.is_rational()) throw ValidationError("epsilon agreement inputs must be rational");
    auto [lo, hi] = span(in);
    std::vector<ValueVector> outs;
    if (lo == hi) {
      ValueVector only(n, Value::rational(lo));
      outs.push_back(only);
      if (!output_set.count(only)) {
        outputs.push_back(only);
        output_set.insert(only);
      }
    } else {
      for (const ValueVector& o : close) {
        if (mode == AgreementMode::strict) {
          bool inside = true;
          for (const Value& x : o)
            if (x.rat() < lo || x.rat() > hi) {
              inside = false;
              break;
            }
          if (!inside) continue;
        }
        outs.push_back(o);
      }
    }
    delta.emplace_back(in, std::move(outs));
  }
  return Task(n, ValueKind::rational, std::move(inputs), std::move(outputs), std::move(delta));
}

// Two-process consensus where a's value is the only valid decision. Pairs
// with the single-shot adversary: b eventually learns a's value, but no
// finite slice admits a section.
inline Task builtin_tilted_consensus() {
  Value zero = Value::rational(Rat(0)), one = Value::rational(Rat(1));
  std::vector<ValueVector> inputs{{zero, zero}, {zero, one}, {one, zero}, {one, one}};
  std::vector<ValueVector> outputs{{zero, zero}, {one, one}};
  std::vector<std::pair<ValueVector, std::vector<ValueVector>>> delta;
  for (const ValueVector& in : inputs)
    delta.emplace_back(in, std::vector<ValueVector>{ValueVector(2, in[0])});
  return Task(2, ValueKind::rational, std::move(inputs), std::move(outputs), std::move(delta));
}

inline Value value_from_json(ValueKind kind, const nlohmann::json& j) {
  if (kind == ValueKind::symbolic) {
    if (!j.is_string()) throw ParseError("symbolic values must be strings");
    return Value::symbol(j.get<std::string>());
  }
  if (j.is_number_integer()) return Value::rational(Rat(j.get<long long>()));
  if (j.is_string()) return Value::rational(parse_rational(j.get<std::string>()));
  throw ParseError("rational values must be integers or strings like \"1/4\" or \"0.25\"");
}

inline nlohmann::json value_to_json(const Value& v) { return v.render(); }

inline ValueVector vector_from_json(ValueKind kind, const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("value vector must be an array");
  ValueVector out;
  for (const auto& x : j) out.push_back(value_from_json(kind, x));
  return out;
}

inline nlohmann::json vector_to_json(const ValueVector& v) {
  auto j = nlohmann::json::array();
  for (const Value& x : v) j.push_back(value_to_json(x));
  return j;
}

inline Task task_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("task document must be a JSON object");
  for (const char* key : {"n", "kind", "inputs", "outputs", "delta"})
    if (!j.contains(key)) throw ParseError(std::string("task document missing '") + key + "'");
  if (!j["n"].is_number_integer() || j["n"].get<int64_t>() < 0)
    throw ParseError("'n' must be a nonnegative integer");
  uint32_t n = j["n"].get<uint32_t>();
  if (!j["kind"].is_string()) throw ParseError("'kind' must be a string");
  ValueKind kind = kind_by_name(j["kind"].get<std::string>());
  auto vectors = [&](const nlohmann::json& arr, const char* what) {
    if (!arr.is_array()) throw ParseError(std::string("'") + what + "' must be an array");
    std::vector<ValueVector> out;
    for (const auto& v : arr) out.push_back(vector_from_json(kind, v));
    return out;
  };
  std::vector<ValueVector> inputs = vectors(j["inputs"], "inputs");
  std::vector<ValueVector> outputs = vectors(j["outputs"], "outputs");
  if (!j["delta"].is_array()) throw ParseError("'delta' must be an array");
  std::vector<std::pair<ValueVector, std::vector<ValueVector>>> delta;
  for (const auto& e : j["delta"]) {
    if (!e.is_object() || !e.contains("in") || !e.contains("out"))
      throw ParseError("each delta entry needs 'in' and 'out'");
    delta.emplace_back(vector_from_json(kind, e["in"]), vectors(e["out"], "out"));
  }
  return Task(n, kind, std::move(inputs), std::move(outputs), std::move(delta));
}

inline nlohmann::json task_to_json(const Task& task) {
  nlohmann::json j;
  j["n"] = task.process_count();
  j["kind"] = kind_name(task.kind());
  auto vectors = [](const std::vector<ValueVector>& vs) {
    auto arr = nlohmann::json::array();
    for (const ValueVector& v : vs) arr.push_back(vector_to_json(v));
    return arr;
  };
  j["inputs"] = vectors(task.inputs());
  j["outputs"] = vectors(task.outputs());
  auto delta = nlohmann::json::array();
  for (const ValueVector& in : task.inputs()) {
    nlohmann::json e;
    e["in"] = vector_to_json(in);
    e["out"] = vectors(task.delta(in));
    delta.push_back(std::move(e));
  }
  j["delta"] = std::move(delta);
  return j;
}

inline Task load_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open task file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad JSON in '" + path + "': " + e.what());
  }
  return task_from_json(j);
}

inline void save_task(const Task& task, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write task file '" + path + "'");
  out << task_to_json(task).dump(2) << "\n";
}

}  // namespace tasksheaf
