#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tasksheaf/adversary.hpp"
#include "tasksheaf/domain.hpp"
#include "tasksheaf/errors.hpp"
#include "tasksheaf/value.hpp"

namespace tasksheaf {

struct NodeId {
  uint32_t raw = UINT32_MAX;
  bool valid() const { return raw != UINT32_MAX; }
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// One explored configuration together with the adversary state it was
// reached in. Parent edges carry the round digraph of the connecting round.
struct ExecNode {
  ConfigId config;
  uint32_t adv_state = 0;
  uint32_t depth = 0;
  struct InEdge {
    NodeId parent;
    RoundDigraph letter;
  };
  std::vector<InEdge> parents;                              // empty for roots
  std::vector<std::pair<RoundDigraph, NodeId>> children;    // letter order
};

// Run one synchronous round over configuration c under digraph g. Receivers
// fold the arriving depth-d views into a depth-(d+1) view.
inline ConfigId apply_round(Universe& u, ConfigId c, const RoundDigraph& g) {
  uint32_t n = u.process_count();
  g.check_width(n);
  std::vector<ViewId> cur = u.config_views(c);
  std::vector<ViewId> next(n);
  for (uint32_t r = 0; r < n; ++r) {
    std::vector<std::optional<ViewId>> recv(n);
    for (auto [s, t] : g.arrivals())
      if (t == r) recv[s] = cur[s];
    next[r] = u.step_view(cur[r], recv);
  }
  return u.config_of(next);
}

// Layered graph of everything the adversary can do, up to the explored
// depth. Layer 0 holds one node per distinct input vector; expanding appends
// one layer by applying every allowed letter to every frontier node, with
// (configuration, state) deduplication inside the new layer.
//
// With full-information views a configuration pins down its entire past, so
// dedup never actually merges and the graph is a forest. Nothing here relies
// on that; SystemFrame asserts it once per build instead.
class ExecutionGraph {
 public:
  ExecutionGraph(Universe& u, const Adversary& adv, const std::vector<ValueVector>& inputs)
      : u_(&u), adv_(&adv) {
    if (adv.process_count() != u.process_count())
      throw ArityError("adversary and universe disagree on process count");
    if (inputs.empty()) throw ValidationError("no input vectors");
    std::vector<ValueVector> distinct = inputs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<NodeId> roots;
    for (const ValueVector& in : distinct) {
      if (in.size() != u.process_count()) throw ArityError("input vector has wrong width");
      std::vector<ViewId> views;
      views.reserve(in.size());
      for (uint32_t p = 0; p < u.process_count(); ++p)
        views.push_back(u.input_view(ProcessId{p}, in[p]));
      ConfigId cfg = u.config_of(views);
      roots.push_back(add_node(cfg, adv.initial_state(), 0));
    }
    layers_.push_back(std::move(roots));
  }

  ExecutionGraph(const ExecutionGraph&) = delete;
  ExecutionGraph& operator=(const ExecutionGraph&) = delete;

  Universe& universe() const { return *u_; }
  const Adversary& adversary() const { return *adv_; }

  uint32_t frontier_depth() const { return static_cast<uint32_t>(layers_.size() - 1); }
  size_t layer_count() const { return layers_.size(); }
  size_t node_count() const { return nodes_.size(); }

  const std::vector<NodeId>& layer(uint32_t d) const {
    if (d >= layers_.size()) throw ValidationError("layer not explored");
    return layers_[d];
  }

  const ExecNode& node(NodeId id) const {
    if (id.raw >= nodes_.size()) throw ValidationError("unknown node id");
    return nodes_[id.raw];
  }

  NodeId node_of_config(ConfigId c) const {
    auto it = by_config_.find(c.raw);
    if (it == by_config_.end()) throw ValidationError("configuration not in explored graph");
    return NodeId{it->second};
  }

  // Appends one layer. Children are created parent by parent in layer order,
  // letters in the adversary's sorted order, so node ids are reproducible.
  void expand_layer() {
    const std::vector<NodeId> frontier = layers_.back();
    std::vector<NodeId> next;
    std::map<std::pair<uint32_t, uint32_t>, NodeId> dedup;
    for (NodeId pid : frontier) {
      ConfigId pcfg = nodes_[pid.raw].config;
      uint32_t pstate = nodes_[pid.raw].adv_state;
      uint32_t pdepth = nodes_[pid.raw].depth;
      for (const auto& [letter, to_state] : adv_->allowed_rounds(pstate)) {
        ConfigId ccfg = apply_round(*u_, pcfg, letter);
        auto key = std::make_pair(ccfg.raw, to_state);
        auto it = dedup.find(key);
        NodeId cid;
        if (it == dedup.end()) {
          cid = add_node(ccfg, to_state, pdepth + 1);
          dedup.emplace(key, cid);
          next.push_back(cid);
        } else {
          cid = it->second;
        }
        nodes_[cid.raw].parents.push_back({pid, letter});
        nodes_[pid.raw].children.emplace_back(letter, cid);
      }
    }
    layers_.push_back(std::move(next));
  }

  void expand_to(uint32_t depth) {
    while (frontier_depth() < depth) expand_layer();
  }

  // x is a causal ancestor of y (reflexively). Walks parent sets upward;
  // cheap on the forests this produces in practice.
  bool causally_precedes(NodeId x, NodeId y) const {
    if (x.raw >= nodes_.size() || y.raw >= nodes_.size())
      throw ValidationError("unknown node id");
    if (x == y) return true;
    uint32_t dx = nodes_[x.raw].depth;
    std::set<uint32_t> frontier{y.raw};
    uint32_t d = nodes_[y.raw].depth;
    while (d > dx) {
      std::set<uint32_t> up;
      for (uint32_t id : frontier)
        for (const auto& e : nodes_[id].parents) up.insert(e.parent.raw);
      frontier = std::move(up);
      --d;
    }
    return frontier.count(x.raw) > 0;
  }

 private:
  NodeId add_node(ConfigId cfg, uint32_t state, uint32_t depth) {
    NodeId id{static_cast<uint32_t>(nodes_.size())};
    ExecNode n;
    n.config = cfg;
    n.adv_state = state;
    n.depth = depth;
    nodes_.push_back(std::move(n));
    auto [it, fresh] = by_config_.emplace(cfg.raw, id.raw);
    if (!fresh)
      throw InternalError("configuration reached in two distinct adversary states");
    return id;
  }

  Universe* u_;
  const Adversary* adv_;
  std::deque<ExecNode> nodes_;
  std::vector<std::vector<NodeId>> layers_;
  std::map<uint32_t, uint32_t> by_config_;
};

// g ~_p h for two explored configurations, as an edge. Normalised g < h.
struct IndistEdge {
  NodeId g, h;
  ProcessId p;
  friend auto operator<=>(const IndistEdge&, const IndistEdge&) = default;
};

// All indistinguishability edges of the explored graph. Views are
// round-aware, so only same-depth configurations can share one.
inline std::vector<IndistEdge> indistinguishability_edges(const ExecutionGraph& graph) {
  const Universe& u = graph.universe();
  std::map<uint32_t, std::vector<NodeId>> by_view;
  for (uint32_t d = 0; d < graph.layer_count(); ++d)
    for (NodeId id : graph.layer(d))
      for (uint32_t p = 0; p < u.process_count(); ++p)
        by_view[u.project_local(graph.node(id).config, ProcessId{p}).raw].push_back(id);
  std::vector<IndistEdge> edges;
  for (auto& [vraw, members] : by_view) {
    if (members.size() < 2) continue;
    ProcessId p = u.view_process(ViewId{vraw});
    std::sort(members.begin(), members.end());
    for (size_t i = 0; i < members.size(); ++i)
      for (size_t j = i + 1; j < members.size(); ++j)
        edges.push_back({members[i], members[j], p});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Immutable snapshot of an explored graph: indistinguishability edges, the
// per-view classes behind them, and an ancestor bit matrix for O(1)
// causality tests. Build one after expanding; expanding again invalidates it.
class SystemFrame {
 public:
  explicit SystemFrame(const ExecutionGraph& graph) : graph_(&graph) {
    const Universe& u = graph.universe();
    size_t count = graph.node_count();
    words_ = (count + 63) / 64;
    anc_.assign(count * words_, 0);
    for (uint32_t d = 0; d < graph.layer_count(); ++d) {
      for (NodeId id : graph.layer(d)) {
        const ExecNode& node = graph.node(id);
        if (node.parents.size() > 1)
          throw InternalError("frame expects forest-shaped execution graphs");
        uint64_t* row = &anc_[size_t(id.raw) * words_];
        for (const auto& e : node.parents) {
          const uint64_t* prow = &anc_[size_t(e.parent.raw) * words_];
          for (size_t w = 0; w < words_; ++w) row[w] |= prow[w];
          row[e.parent.raw / 64] |= uint64_t(1) << (e.parent.raw % 64);
        }
        for (uint32_t p = 0; p < u.process_count(); ++p)
          classes_[u.project_local(node.config, ProcessId{p}).raw].push_back(id);
      }
    }
    for (auto& [vraw, members] : classes_) std::sort(members.begin(), members.end());
    edges_ = indistinguishability_edges(graph);
  }

  const ExecutionGraph& graph() const { return *graph_; }
  const Universe& universe() const { return graph_->universe(); }
  const std::vector<IndistEdge>& edges() const { return edges_; }

  // Nodes whose owner-process view equals v (the ~_p class through v).
  const std::vector<NodeId>& view_class(ViewId v) const {
    auto it = classes_.find(v.raw);
    if (it == classes_.end()) throw ValidationError("view not in frame");
    return it->second;
  }

  // x <= y in causal order, reflexively.
  bool reaches(NodeId x, NodeId y) const {
    if (x.raw >= graph_->node_count() || y.raw >= graph_->node_count())
      throw ValidationError("unknown node id");
    if (x == y) return true;
    return (anc_[size_t(y.raw) * words_ + x.raw / 64] >> (x.raw % 64)) & 1;
  }

 private:
  const ExecutionGraph* graph_;
  std::vector<IndistEdge> edges_;
  std::map<uint32_t, std::vector<NodeId>> classes_;
  std::vector<uint64_t> anc_;
  size_t words_ = 0;
};

}  // namespace tasksheaf
