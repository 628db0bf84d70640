#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tasksheaf/execution.hpp"

namespace tasksheaf {

// A set of explored configurations meeting every maximal explored path.
// Members sorted by node id; the tag records which enumerator produced it.
struct ExecutionCut {
  std::vector<NodeId> members;
  std::string strategy;
};

inline bool is_execution_cut(const SystemFrame& frame, const std::vector<NodeId>& members) {
  const ExecutionGraph& g = frame.graph();
  std::set<uint32_t> chosen;
  for (NodeId m : members) {
    g.node(m);  // existence check
    chosen.insert(m.raw);
  }
  std::map<uint32_t, bool> memo;
  // true iff some maximal path from v dodges the whole set
  std::function<bool(NodeId)> escapes = [&](NodeId v) -> bool {
    if (chosen.count(v.raw)) return false;
    auto it = memo.find(v.raw);
    if (it != memo.end()) return it->second;
    const ExecNode& node = g.node(v);
    bool r = node.children.empty();
    for (const auto& [letter, child] : node.children) {
      if (r) break;
      r = escapes(child);
    }
    memo[v.raw] = r;
    return r;
  };
  for (NodeId root : g.layer(0))
    if (escapes(root)) return false;
  return true;
}

// N(A): everything some process confuses with some cut member.
inline std::vector<NodeId> local_star(const SystemFrame& frame, const ExecutionCut& cut) {
  const Universe& u = frame.universe();
  const ExecutionGraph& g = frame.graph();
  std::set<NodeId> star;
  for (NodeId w : cut.members) {
    for (uint32_t p = 0; p < u.process_count(); ++p) {
      ViewId v = u.project_local(g.node(w).config, ProcessId{p});
      for (NodeId m : frame.view_class(v)) star.insert(m);
    }
  }
  return std::vector<NodeId>(star.begin(), star.end());
}

// ccl(N(A)): nodes g lying causally between the star and the cut, i.e.
// h <= g <= w for some h in the star and w in the cut. Star and cut members
// qualify through reflexivity.
inline std::vector<NodeId> causal_closure(const SystemFrame& frame,
                                          const std::vector<NodeId>& star,
                                          const ExecutionCut& cut) {
  std::vector<NodeId> out;
  size_t count = frame.graph().node_count();
  for (uint32_t raw = 0; raw < count; ++raw) {
    NodeId v{raw};
    bool above_star = false;
    for (NodeId h : star) {
      if (frame.reaches(h, v)) {
        above_star = true;
        break;
      }
    }
    if (!above_star) continue;
    for (NodeId w : cut.members) {
      if (frame.reaches(v, w)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

// One causal-consistency edge of a slice: a and b related through some
// process p's knowledge. Normalised a < b.
struct SliceEdge {
  NodeId a, b;
  ProcessId p;
  friend auto operator<=>(const SliceEdge&, const SliceEdge&) = default;
};

// g is p-consistent with h when some configuration p confuses with g
// causally precedes h. The mediator ranges over the whole frame; only the
// endpoints are required to lie in the node set. Edges are the symmetric
// closure, so indistinguishability edges and causal pairs both show up.
inline std::vector<SliceEdge> causal_consistency(const SystemFrame& frame,
                                                 const std::vector<NodeId>& nodes) {
  const Universe& u = frame.universe();
  const ExecutionGraph& g = frame.graph();
  auto rel = [&](NodeId x, NodeId y, ProcessId p) {
    ViewId v = u.project_local(g.node(x).config, p);
    for (NodeId m : frame.view_class(v))
      if (frame.reaches(m, y)) return true;
    return false;
  };
  std::vector<SliceEdge> edges;
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      for (uint32_t p = 0; p < u.process_count(); ++p) {
        ProcessId pid{p};
        if (rel(nodes[i], nodes[j], pid) || rel(nodes[j], nodes[i], pid))
          edges.push_back({nodes[i], nodes[j], pid});
      }
    }
  }
  return edges;  // sorted by construction when nodes came in sorted
}

struct SystemSlice {
  ExecutionCut cut;
  std::vector<NodeId> configs;  // ccl(N(cut)), sorted
  std::vector<SliceEdge> edges;
};

inline SystemSlice build_slice(const SystemFrame& frame, ExecutionCut cut) {
  std::sort(cut.members.begin(), cut.members.end());
  cut.members.erase(std::unique(cut.members.begin(), cut.members.end()), cut.members.end());
  if (cut.members.empty()) throw ValidationError("empty execution cut");
  if (!is_execution_cut(frame, cut.members))
    throw ValidationError("node set misses a maximal path, not an execution cut");
  SystemSlice s;
  s.configs = causal_closure(frame, local_star(frame, cut), cut);
  s.edges = causal_consistency(frame, s.configs);
  s.cut = std::move(cut);
  return s;
}

enum class CutStrategy { uniform, antichain };

inline const char* strategy_name(CutStrategy s) {
  return s == CutStrategy::uniform ? "uniform" : "antichain";
}

inline CutStrategy strategy_by_name(const std::string& name) {
  if (name == "uniform") return CutStrategy::uniform;
  if (name == "antichain") return CutStrategy::antichain;
  throw ValidationError("unknown cut strategy '" + name + "'");
}

namespace detail {

// All antichains cutting every maximal path through the subtree of v while
// staying at depth <= horizon, each as a sorted id vector with its deepest
// member. Either v itself, or a cut of every child subtree combined.
inline std::vector<std::pair<std::vector<uint32_t>, uint32_t>> subtree_cuts(
    const ExecutionGraph& g, NodeId v, uint32_t horizon) {
  const ExecNode& node = g.node(v);
  std::vector<std::pair<std::vector<uint32_t>, uint32_t>> out;
  out.push_back({{v.raw}, node.depth});
  if (node.depth >= horizon || node.children.empty()) return out;
  std::vector<NodeId> kids;
  for (const auto& [letter, child] : node.children) kids.push_back(child);
  std::sort(kids.begin(), kids.end());
  kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  std::vector<std::pair<std::vector<uint32_t>, uint32_t>> acc;
  acc.push_back({{}, 0});
  for (NodeId child : kids) {
    auto rec = subtree_cuts(g, child, horizon);
    std::vector<std::pair<std::vector<uint32_t>, uint32_t>> next;
    next.reserve(acc.size() * rec.size());
    for (const auto& [amembers, amax] : acc) {
      for (const auto& [rmembers, rmax] : rec) {
        std::vector<uint32_t> merged;
        merged.reserve(amembers.size() + rmembers.size());
        std::merge(amembers.begin(), amembers.end(), rmembers.begin(), rmembers.end(),
                   std::back_inserter(merged));
        next.push_back({std::move(merged), std::max(amax, rmax)});
      }
    }
    acc = std::move(next);
  }
  out.insert(out.end(), std::make_move_iterator(acc.begin()), std::make_move_iterator(acc.end()));
  return out;
}

}  // namespace detail

// Cuts whose deepest member sits exactly at depth k, in a reproducible
// order. Uniform: the whole layer k, one cut. Antichain: every maximal
// antichain of the explored forest with max depth k, lexicographically by
// member ids. Levels partition the cut space, so iterating k = 0,1,2,...
// never revisits a cut.
inline std::vector<ExecutionCut> cuts_at_depth(const SystemFrame& frame, uint32_t k,
                                               CutStrategy strategy) {
  const ExecutionGraph& g = frame.graph();
  if (k > g.frontier_depth()) throw ValidationError("depth not explored yet");
  if (strategy == CutStrategy::uniform) {
    ExecutionCut cut;
    cut.members = g.layer(k);
    std::sort(cut.members.begin(), cut.members.end());
    cut.strategy = "uniform";
    return {cut};
  }
  std::vector<std::pair<std::vector<uint32_t>, uint32_t>> acc;
  acc.push_back({{}, 0});
  bool first = true;
  for (NodeId root : g.layer(0)) {
    auto rec = detail::subtree_cuts(g, root, k);
    std::vector<std::pair<std::vector<uint32_t>, uint32_t>> next;
    next.reserve(acc.size() * rec.size());
    for (const auto& [amembers, amax] : acc) {
      for (const auto& [rmembers, rmax] : rec) {
        std::vector<uint32_t> merged;
        merged.reserve(amembers.size() + rmembers.size());
        std::merge(amembers.begin(), amembers.end(), rmembers.begin(), rmembers.end(),
                   std::back_inserter(merged));
        next.push_back({std::move(merged), first ? rmax : std::max(amax, rmax)});
      }
    }
    acc = std::move(next);
    first = false;
  }
  std::vector<std::vector<uint32_t>> picked;
  for (auto& [members, maxd] : acc)
    if (maxd == k) picked.push_back(std::move(members));
  std::sort(picked.begin(), picked.end());
  std::vector<ExecutionCut> cuts;
  cuts.reserve(picked.size());
  for (auto& members : picked) {
    ExecutionCut cut;
    cut.members.reserve(members.size());
    for (uint32_t raw : members) cut.members.push_back(NodeId{raw});
    cut.strategy = "antichain";
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

// Lazy level-by-level walk over cuts_at_depth(0..max_depth).
class CutStream {
 public:
  CutStream(const SystemFrame& frame, uint32_t max_depth, CutStrategy strategy)
      : frame_(&frame),
        max_(std::min(max_depth, frame.graph().frontier_depth())),
        strategy_(strategy) {}

  std::optional<ExecutionCut> next() {
    while (true) {
      if (level_ > max_) return std::nullopt;
      if (!loaded_) {
        buffer_ = cuts_at_depth(*frame_, level_, strategy_);
        pos_ = 0;
        loaded_ = true;
      }
      if (pos_ < buffer_.size()) return buffer_[pos_++];
      ++level_;
      loaded_ = false;
    }
  }

 private:
  const SystemFrame* frame_;
  uint32_t max_;
  CutStrategy strategy_;
  uint32_t level_ = 0;
  bool loaded_ = false;
  size_t pos_ = 0;
  std::vector<ExecutionCut> buffer_;
};

}  // namespace tasksheaf
