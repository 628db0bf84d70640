#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tasksheaf/decision_map.hpp"
#include "tasksheaf/execution.hpp"
#include "tasksheaf/task.hpp"

namespace tasksheaf {

// One finite run, for counterexample reporting: the input vector and the
// letters played so far. Rendered in arrow notation: "(0,1) →, ↔, −".
struct WitnessRun {
  ValueVector input;
  std::vector<RoundDigraph> letters;

  std::string render(uint32_t n) const {
    std::string out = render_vector(input);
    for (size_t i = 0; i < letters.size(); ++i)
      out += (i == 0 ? " " : ", ") + letters[i].render(n);
    return out;
  }
};

enum class FailureKind { none, termination, finality, validity };

inline const char* failure_name(FailureKind k) {
  switch (k) {
    case FailureKind::termination: return "termination";
    case FailureKind::finality: return "finality";
    case FailureKind::validity: return "validity";
    default: return "none";
  }
}

struct Verdict {
  bool pass = true;
  FailureKind failure = FailureKind::none;
  std::string detail;
  std::optional<WitnessRun> witness;
};

// Exhaustive check of a decision map against terminating solvability, over
// every run of length <= depth from every given input (default: all task
// inputs). A process's decision is the first non-bottom value its views map
// to along the path; the checks are
//   termination: every process decides by the horizon on every path,
//   finality:    a decided process never maps to a different value later,
//   validity:    the vector of first decisions lies in Delta(input).
// Failures are reported at the first offending node in BFS order, so
// witnesses are minimal-length runs.
inline Verdict verify_decision_map(Universe& u, const Adversary& adv, const Task& task,
                                   const DecisionMap& dm, uint32_t depth,
                                   std::vector<ValueVector> inputs = {}) {
  if (adv.process_count() != u.process_count() || task.process_count() != u.process_count() ||
      dm.process_count() != u.process_count())
    throw ArityError("process counts disagree");
  if (dm.kind() != task.kind()) throw ValidationError("decision map and task value kinds differ");
  if (inputs.empty()) inputs = task.inputs();
  for (const ValueVector& in : inputs) task.delta(in);  // fail fast on unknown inputs

  ExecutionGraph graph(u, adv, inputs);
  graph.expand_to(depth);
  uint32_t n = u.process_count();

  auto witness_to = [&](NodeId id) {
    WitnessRun w;
    w.input = u.project_inputs(graph.node(id).config);
    NodeId cur = id;
    while (!graph.node(cur).parents.empty()) {
      const auto& e = graph.node(cur).parents.front();
      w.letters.push_back(e.letter);
      cur = e.parent;
    }
    std::reverse(w.letters.begin(), w.letters.end());
    return w;
  };

  // first decisions per process, inherited down the forest
  std::vector<std::vector<std::optional<Value>>> state(graph.node_count());
  for (uint32_t d = 0; d <= depth; ++d) {
    for (NodeId id : graph.layer(d)) {
      const ExecNode& node = graph.node(id);
      std::vector<std::optional<Value>> mine =
          node.parents.empty() ? std::vector<std::optional<Value>>(n)
                               : state[node.parents.front().parent.raw];
      bool parent_complete = true;
      for (const auto& v : mine)
        if (!v.has_value()) parent_complete = false;
      for (uint32_t p = 0; p < n; ++p) {
        std::optional<Value> cur = dm.lookup(u.project_local(node.config, ProcessId{p}));
        if (mine[p].has_value()) {
          if (cur.has_value() && !(*cur == *mine[p])) {
            Verdict v;
            v.pass = false;
            v.failure = FailureKind::finality;
            v.detail = "process " + process_name(ProcessId{p}) + " decided " +
                       mine[p]->render() + " but maps to " + cur->render() + " at round " +
                       std::to_string(d);
            v.witness = witness_to(id);
            return v;
          }
        } else if (cur.has_value()) {
          mine[p] = cur;
        }
      }
      bool complete = true;
      for (const auto& v : mine)
        if (!v.has_value()) complete = false;
      if (complete && !parent_complete) {
        ValueVector decided;
        for (const auto& v : mine) decided.push_back(*v);
        ValueVector in = u.project_inputs(node.config);
        if (!task.allows(in, decided)) {
          Verdict v;
          v.pass = false;
          v.failure = FailureKind::validity;
          v.detail = "first decisions " + render_vector(decided) + " not allowed for input " +
                     render_vector(in);
          v.witness = witness_to(id);
          return v;
        }
      }
      if (d == depth && !complete) {
        uint32_t p = 0;
        while (mine[p].has_value()) ++p;
        Verdict v;
        v.pass = false;
        v.failure = FailureKind::termination;
        v.detail = "process " + process_name(ProcessId{p}) + " undecided at horizon " +
                   std::to_string(depth);
        v.witness = witness_to(id);
        return v;
      }
      state[id.raw] = std::move(mine);
    }
  }
  Verdict v;
  v.detail = "all runs to depth " + std::to_string(depth) + " decide correctly";
  return v;
}

}  // namespace tasksheaf
