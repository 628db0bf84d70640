#pragma once

#include <ostream>
#include <set>
#include <string>

#include "tasksheaf/slicing.hpp"

namespace tasksheaf {

namespace detail {

// a gets orange, b green, like the figures; further processes cycle
inline const char* process_color(ProcessId p) {
  static const char* palette[] = {"orange", "green", "blue", "purple", "red", "brown"};
  return palette[p.index % 6];
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

// Layers lo..hi of the explored graph: configurations as labelled nodes per
// rank, causal edges dashed with their letters, indistinguishability edges
// solid and colored per process.
inline void write_frame_dot(std::ostream& os, const SystemFrame& frame, uint32_t lo, uint32_t hi) {
  const ExecutionGraph& g = frame.graph();
  const Universe& u = frame.universe();
  if (hi > g.frontier_depth()) hi = g.frontier_depth();
  os << "graph frame {\n  rankdir=TB;\n  node [shape=box];\n";
  for (uint32_t d = lo; d <= hi; ++d) {
    os << "  { rank=same;";
    for (NodeId id : g.layer(d)) os << " n" << id.raw << ";";
    os << " }\n";
    for (NodeId id : g.layer(d))
      os << "  n" << id.raw << " [label=\""
         << detail::dot_escape(u.render_config(g.node(id).config)) << "\"];\n";
  }
  for (uint32_t d = lo; d < hi; ++d) {
    for (NodeId id : g.layer(d)) {
      for (const auto& [letter, child] : g.node(id).children)
        os << "  n" << id.raw << " -- n" << child.raw << " [style=dashed, label=\""
           << detail::dot_escape(letter.render(u.process_count())) << "\"];\n";
    }
  }
  for (const IndistEdge& e : frame.edges()) {
    uint32_t d = g.node(e.g).depth;
    if (d < lo || d > hi) continue;
    os << "  n" << e.g.raw << " -- n" << e.h.raw << " [color=" << detail::process_color(e.p)
       << ", label=\"" << process_name(e.p) << "\"];\n";
  }
  os << "}\n";
}

// A slice: member configurations of the cut inside dashed boxes, solid
// colored edges where the endpoints are indistinguishable outright, dashed
// colored edges for the remaining (mediated) consistency pairs.
inline void write_slice_dot(std::ostream& os, const SystemFrame& frame, const SystemSlice& slice) {
  const ExecutionGraph& g = frame.graph();
  const Universe& u = frame.universe();
  std::set<NodeId> cut(slice.cut.members.begin(), slice.cut.members.end());
  os << "graph slice {\n  rankdir=TB;\n  node [shape=box];\n";
  for (NodeId id : slice.configs) {
    os << "  n" << id.raw << " [label=\""
       << detail::dot_escape(u.render_config(g.node(id).config)) << "\"";
    if (cut.count(id)) os << ", peripheries=2, style=dashed";
    os << "];\n";
  }
  for (const SliceEdge& e : slice.edges) {
    bool plain = u.indistinguishable(g.node(e.a).config, g.node(e.b).config, e.p);
    os << "  n" << e.a.raw << " -- n" << e.b.raw << " [color=" << detail::process_color(e.p)
       << ", label=\"" << process_name(e.p) << "\"";
    if (!plain) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
}

}  // namespace tasksheaf
