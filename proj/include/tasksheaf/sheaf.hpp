#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tasksheaf/linalg.hpp"
#include "tasksheaf/slicing.hpp"
#include "tasksheaf/task.hpp"

namespace tasksheaf {

// Edge of a task sheaf, endpoints as indices into TaskSheaf::configs, a < b.
struct SheafEdge {
  uint32_t a = 0, b = 0;
  ProcessId p;
  friend auto operator<=>(const SheafEdge&, const SheafEdge&) = default;
};

// The task sheaf over a slice: one stalk of acceptable output vectors per
// configuration (Delta of its input), one stalk of projected values per
// consistency edge, restriction maps = coordinate projections. Kept flat so
// synthetic instances (tests, oracles) can be built without a slice.
struct TaskSheaf {
  uint32_t n = 0;
  ValueKind kind = ValueKind::rational;
  std::vector<NodeId> configs;                    // sorted when built from a slice
  std::vector<ConfigId> config_ids;               // interned identities; empty for synthetic sheaves
  std::vector<std::string> config_names;
  std::vector<ValueVector> inputs;                // per config; empty names allowed for synthetic
  std::vector<std::vector<ValueVector>> stalks;   // each sorted, unique, nonempty
  std::vector<SheafEdge> edges;                   // sorted, unique
  std::vector<std::vector<Value>> edge_stalks;    // parallel to edges; sorted, unique

  size_t config_index(NodeId id) const {
    auto it = std::lower_bound(configs.begin(), configs.end(), id);
    if (it == configs.end() || *it != id) throw ValidationError("configuration not in sheaf");
    return static_cast<size_t>(it - configs.begin());
  }
};

// Restriction of a vertex value onto an edge: project to the edge's process.
inline Value restrict_value(const TaskSheaf&, const SheafEdge& e, const ValueVector& x) {
  return x.at(e.p.index);
}

namespace detail {

inline std::vector<std::vector<Value>> derive_edge_stalks(const TaskSheaf& F) {
  std::vector<std::vector<Value>> out;
  out.reserve(F.edges.size());
  for (const SheafEdge& e : F.edges) {
    std::set<Value> vals;
    for (const ValueVector& x : F.stalks[e.a]) vals.insert(x[e.p.index]);
    for (const ValueVector& x : F.stalks[e.b]) vals.insert(x[e.p.index]);
    out.emplace_back(vals.begin(), vals.end());
  }
  return out;
}

}  // namespace detail

// Build a sheaf directly from parts. Stalks are sorted and deduplicated,
// edges normalised; edge stalks are always derived, never supplied.
inline TaskSheaf make_sheaf(uint32_t n, ValueKind kind,
                            std::vector<std::vector<ValueVector>> stalks,
                            std::vector<SheafEdge> edges,
                            std::vector<std::string> names = {}) {
  TaskSheaf F;
  F.n = n;
  F.kind = kind;
  F.stalks = std::move(stalks);
  size_t count = F.stalks.size();
  if (count == 0) throw ValidationError("sheaf needs at least one configuration");
  for (auto& stalk : F.stalks) {
    if (stalk.empty()) throw ValidationError("empty vertex stalk");
    for (const ValueVector& x : stalk) {
      if (x.size() != n) throw ArityError("stalk vector has wrong width");
      for (const Value& v : x) {
        bool ok = kind == ValueKind::rational ? v.is_rational() : v.is_symbol();
        if (!ok) throw ValidationError("stalk value of wrong kind");
      }
    }
    std::sort(stalk.begin(), stalk.end());
    stalk.erase(std::unique(stalk.begin(), stalk.end()), stalk.end());
  }
  for (SheafEdge& e : edges) {
    if (e.a >= count || e.b >= count || e.a == e.b) throw ValidationError("bad sheaf edge endpoints");
    if (e.p.index >= n) throw ValidationError("bad sheaf edge process");
    if (e.b < e.a) std::swap(e.a, e.b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  F.edges = std::move(edges);
  if (names.empty()) {
    for (size_t i = 0; i < count; ++i) names.push_back("c" + std::to_string(i));
  }
  if (names.size() != count) throw ValidationError("one name per configuration");
  F.config_names = std::move(names);
  for (size_t i = 0; i < count; ++i) F.configs.push_back(NodeId{static_cast<uint32_t>(i)});
  F.edge_stalks = detail::derive_edge_stalks(F);
  return F;
}

// The task sheaf of a slice: stalk(g) = Delta(inputs(g)), one edge per
// causal-consistency edge, restriction by projection.
inline TaskSheaf build_sheaf(const SystemFrame& frame, const SystemSlice& slice, const Task& task) {
  const Universe& u = frame.universe();
  if (task.process_count() != u.process_count())
    throw ArityError("task and universe disagree on process count");
  TaskSheaf F;
  F.n = u.process_count();
  F.kind = task.kind();
  F.configs = slice.configs;
  for (NodeId id : F.configs) {
    ConfigId cfg = frame.graph().node(id).config;
    F.config_ids.push_back(cfg);
    F.config_names.push_back(u.render_config(cfg));
    ValueVector in = u.project_inputs(cfg);
    F.stalks.push_back(task.delta(in));  // throws if the input is outside the task
    F.inputs.push_back(std::move(in));
  }
  for (const SliceEdge& e : slice.edges) {
    SheafEdge se;
    se.a = static_cast<uint32_t>(F.config_index(e.a));
    se.b = static_cast<uint32_t>(F.config_index(e.b));
    se.p = e.p;
    F.edges.push_back(se);
  }
  std::sort(F.edges.begin(), F.edges.end());
  F.edge_stalks = detail::derive_edge_stalks(F);
  return F;
}

// A section as one stalk choice per configuration (vertex assignment only;
// edge values are forced by restriction and carry nothing extra).
struct Section {
  std::vector<uint32_t> choice;  // index into stalks[i], parallel to configs
};

inline const ValueVector& section_value(const TaskSheaf& F, const Section& s, size_t ci) {
  return F.stalks.at(ci).at(s.choice.at(ci));
}

// Both section invariants: every edge agrees under restriction, and the
// agreed value lies in the edge stalk.
inline bool section_respects(const TaskSheaf& F, const Section& s) {
  if (s.choice.size() != F.stalks.size()) return false;
  for (size_t i = 0; i < F.stalks.size(); ++i)
    if (s.choice[i] >= F.stalks[i].size()) return false;
  for (size_t ei = 0; ei < F.edges.size(); ++ei) {
    const SheafEdge& e = F.edges[ei];
    const Value& va = section_value(F, s, e.a)[e.p.index];
    const Value& vb = section_value(F, s, e.b)[e.p.index];
    if (!(va == vb)) return false;
    if (!std::binary_search(F.edge_stalks[ei].begin(), F.edge_stalks[ei].end(), va)) return false;
  }
  return true;
}

struct SearchStats {
  uint64_t nodes = 0;  // assignments attempted
};

namespace detail {

// The one documented ordering everything section-related uses: variables in
// decreasing constraint order (smaller stalk first, ties by position), stalk
// elements in their lexicographic (stored) order. find_section returns the
// lexicographically smallest section under exactly this ordering, and
// enumerate_sections yields all of them in it.
inline std::vector<size_t> variable_order(const TaskSheaf& F) {
  std::vector<size_t> order(F.stalks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return F.stalks[a].size() < F.stalks[b].size();
  });
  return order;
}

struct Arcs {
  // per config: incident (edge index, other endpoint)
  std::vector<std::vector<std::pair<size_t, size_t>>> incident;
  explicit Arcs(const TaskSheaf& F) : incident(F.stalks.size()) {
    for (size_t ei = 0; ei < F.edges.size(); ++ei) {
      incident[F.edges[ei].a].emplace_back(ei, F.edges[ei].b);
      incident[F.edges[ei].b].emplace_back(ei, F.edges[ei].a);
    }
  }
};

using Domains = std::vector<std::vector<uint32_t>>;

// Drop values of dom[x] with no matching partner in dom[y]; true if changed.
inline bool revise(const TaskSheaf& F, Domains& dom, size_t x, size_t y, ProcessId p) {
  bool changed = false;
  auto& dx = dom[x];
  size_t keep = 0;
  for (size_t i = 0; i < dx.size(); ++i) {
    const Value& vx = F.stalks[x][dx[i]][p.index];
    bool supported = false;
    for (uint32_t jy : dom[y]) {
      if (F.stalks[y][jy][p.index] == vx) {
        supported = true;
        break;
      }
    }
    if (supported)
      dx[keep++] = dx[i];
    else
      changed = true;
  }
  dx.resize(keep);
  return changed;
}

// AC-3 from an initial work set of directed arcs (x revised against y).
// False as soon as a domain empties.
inline bool ac3(const TaskSheaf& F, const Arcs& arcs, Domains& dom,
                std::deque<std::pair<size_t, size_t>> work) {
  std::set<std::pair<size_t, size_t>> queued(work.begin(), work.end());
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    queued.erase({x, y});
    ProcessId p;
    bool found = false;
    for (auto [ei, other] : arcs.incident[x]) {
      if (other == y) {
        p = F.edges[ei].p;
        found = true;
        // a pair of configs may share several edges with different labels;
        // revise against each
        bool changed = revise(F, dom, x, y, p);
        if (dom[x].empty()) return false;
        if (changed) {
          for (auto [ej, z] : arcs.incident[x]) {
            if (z == y) continue;
            if (queued.insert({z, x}).second) work.emplace_back(z, x);
          }
        }
      }
    }
    (void)found;
  }
  return true;
}

inline std::deque<std::pair<size_t, size_t>> all_arcs(const TaskSheaf& F) {
  std::deque<std::pair<size_t, size_t>> work;
  std::set<std::pair<size_t, size_t>> seen;
  for (const SheafEdge& e : F.edges) {
    if (seen.insert({e.a, e.b}).second) work.emplace_back(e.a, e.b);
    if (seen.insert({e.b, e.a}).second) work.emplace_back(e.b, e.a);
  }
  return work;
}

}  // namespace detail

// Exact decider: backtracking over configurations in the documented order
// with arc-consistency propagation. NONE is a result, not an error.
inline std::optional<Section> find_section(const TaskSheaf& F, SearchStats* stats = nullptr) {
  size_t count = F.stalks.size();
  detail::Arcs arcs(F);
  detail::Domains dom(count);
  for (size_t i = 0; i < count; ++i) {
    dom[i].resize(F.stalks[i].size());
    for (uint32_t j = 0; j < F.stalks[i].size(); ++j) dom[i][j] = j;
  }
  if (!detail::ac3(F, arcs, dom, detail::all_arcs(F))) return std::nullopt;
  std::vector<size_t> order = detail::variable_order(F);
  SearchStats local;
  SearchStats& st = stats ? *stats : local;

  std::vector<uint32_t> choice(count, 0);
  std::function<bool(size_t, detail::Domains&)> assign = [&](size_t k, detail::Domains& cur) -> bool {
    if (k == count) return true;
    size_t ci = order[k];
    std::vector<uint32_t> candidates = cur[ci];
    for (uint32_t x : candidates) {
      ++st.nodes;
      detail::Domains next = cur;
      next[ci] = {x};
      std::deque<std::pair<size_t, size_t>> work;
      for (auto [ei, other] : arcs.incident[ci]) work.emplace_back(other, ci);
      if (detail::ac3(F, arcs, next, std::move(work)) && assign(k + 1, next)) {
        choice[ci] = x;  // every config gets its own turn, so this covers all of them
        return true;
      }
    }
    return false;
  };
  if (!assign(0, dom)) return std::nullopt;
  Section s;
  s.choice = std::move(choice);
  return s;
}

inline constexpr size_t kDefaultOracleBound = 1000000;

// Brute-force enumeration in the same documented order; the first element,
// if any, equals find_section's result. Guarded by the oracle bound on the
// stalk-size product, and truncated (search stops) at `limit` sections.
inline std::vector<Section> enumerate_sections(const TaskSheaf& F, size_t limit,
                                               size_t oracle_bound = kDefaultOracleBound) {
  size_t count = F.stalks.size();
  double product = 1;
  for (const auto& stalk : F.stalks) {
    product *= static_cast<double>(stalk.size());
    if (product > static_cast<double>(oracle_bound))
      throw ValidationError("stalk-size product exceeds the enumeration oracle bound");
  }
  std::vector<size_t> order = detail::variable_order(F);
  std::vector<size_t> pos(count, SIZE_MAX);  // config -> rank in order
  for (size_t k = 0; k < count; ++k) pos[order[k]] = k;
  detail::Arcs arcs(F);
  std::vector<Section> out;
  std::vector<uint32_t> choice(count, 0);
  std::function<bool(size_t)> rec = [&](size_t k) -> bool {
    if (out.size() >= limit) return false;
    if (k == count) {
      Section s;
      s.choice = choice;
      out.push_back(std::move(s));
      return out.size() < limit;
    }
    size_t ci = order[k];
    for (uint32_t x = 0; x < F.stalks[ci].size(); ++x) {
      bool ok = true;
      for (auto [ei, other] : arcs.incident[ci]) {
        if (pos[other] > k) continue;  // partner not assigned yet
        const SheafEdge& e = F.edges[ei];
        uint32_t xo = choice[other];
        const Value& mine = F.stalks[ci][x][e.p.index];
        const Value& theirs = F.stalks[other][xo][e.p.index];
        if (!(mine == theirs)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      choice[ci] = x;
      if (!rec(k + 1)) return false;
    }
    return true;
  };
  rec(0);
  return out;
}

enum class Orientation { low_to_high, high_to_low };

// Scalar form of the coboundary operator: one row per oriented edge, n
// coordinate columns per configuration (column ci*n + p). The operator view
// counts whole-config columns; multiply by n to get these dimensions.
struct CoboundaryMatrix {
  size_t rows = 0, cols = 0;
  uint32_t n = 0;
  RatMatrix entries;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

inline CoboundaryMatrix coboundary_matrix(const TaskSheaf& F,
                                          Orientation orientation = Orientation::low_to_high) {
  if (F.kind != ValueKind::rational)
    throw ValidationError("coboundary matrix undefined for symbolic tasks");
  CoboundaryMatrix M;
  M.n = F.n;
  M.rows = F.edges.size();
  M.cols = F.stalks.size() * F.n;
  M.entries.assign(M.rows, std::vector<Rat>(M.cols, Rat(0)));
  for (size_t ei = 0; ei < F.edges.size(); ++ei) {
    const SheafEdge& e = F.edges[ei];
    uint32_t from = e.a, to = e.b;
    if (orientation == Orientation::high_to_low) std::swap(from, to);
    M.entries[ei][size_t(to) * F.n + e.p.index] = 1;
    M.entries[ei][size_t(from) * F.n + e.p.index] = -1;
    M.row_labels.push_back(F.config_names[from] + "->" + F.config_names[to] + " [" +
                           process_name(e.p) + "]");
  }
  for (size_t ci = 0; ci < F.stalks.size(); ++ci)
    for (uint32_t p = 0; p < F.n; ++p)
      M.col_labels.push_back(F.config_names[ci] + ":" + process_name(ProcessId{p}));
  return M;
}

// Exact basis of { x : Mx = 0 }, reduced form (one vector per free column).
inline std::vector<std::vector<Rat>> kernel(const CoboundaryMatrix& M) {
  return nullspace_basis(M.entries, M.cols);
}

inline std::vector<Rat> flatten_section(const TaskSheaf& F, const Section& s) {
  if (F.kind != ValueKind::rational)
    throw ValidationError("cannot flatten a symbolic section");
  std::vector<Rat> x;
  x.reserve(F.stalks.size() * F.n);
  for (size_t ci = 0; ci < F.stalks.size(); ++ci) {
    const ValueVector& v = section_value(F, s, ci);
    for (uint32_t p = 0; p < F.n; ++p) x.push_back(v[p].rat());
  }
  return x;
}

inline bool in_kernel(const CoboundaryMatrix& M, const std::vector<Rat>& x) {
  for (const Rat& y : mat_apply(M.entries, x))
    if (y != 0) return false;
  return true;
}

enum class KernelVerdict { sections_impossible, inconclusive };

struct KernelCheck {
  KernelVerdict verdict = KernelVerdict::inconclusive;
  bool consistent = true;                          // pinned affine system solvable
  std::vector<std::optional<ValueVector>> forced;  // per config, when every coordinate is pinned down
  std::vector<bool> attainable;                    // per config, projection meets the stalk
  std::string detail;
};

// The paper's linear relaxation as a refuter. Pins every singleton stalk to
// its forced vector, solves Mx = 0 with those pins exactly, and asks whether
// each configuration's projection of the solution set still meets its stalk.
// Misses everywhere at some config (or an inconsistent pin system) refute
// sections; anything else is inconclusive and the CSP decides.
//
// The system is block diagonal per process coordinate (every row touches a
// single p), and each block consists solely of difference rows x_b - x_a = 0
// plus pin rows x_c = v. Its solution set is therefore: constant on each
// connected component, with pinned components fixed. Solved by union-find
// with per-component pins; this is exact, not a further relaxation (the rref
// route in linalg.hpp computes the same answers and cross-checks it in the
// tests). A coordinate is forced iff its component carries a pin.
inline KernelCheck kernel_section_check(const TaskSheaf& F) {
  if (F.kind != ValueKind::rational)
    throw ValidationError("kernel check undefined for symbolic tasks");
  size_t count = F.stalks.size();
  KernelCheck out;
  out.forced.assign(count, std::nullopt);
  out.attainable.assign(count, true);
  // forced_coord[ci][p]: the unique value of coordinate (ci, p), if unique
  std::vector<std::vector<std::optional<Rat>>> forced_coord(
      count, std::vector<std::optional<Rat>>(F.n));
  for (uint32_t p = 0; p < F.n; ++p) {
    std::vector<size_t> parent(count);
    for (size_t i = 0; i < count; ++i) parent[i] = i;
    auto find = [&parent](size_t i) {
      while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
      }
      return i;
    };
    std::vector<std::optional<Rat>> pin(count);
    bool consistent = true;
    for (const SheafEdge& e : F.edges) {
      if (e.p.index != p) continue;
      size_t ra = find(e.a), rb = find(e.b);
      if (ra == rb) continue;
      if (pin[rb].has_value()) {
        if (pin[ra].has_value()) {
          if (*pin[ra] != *pin[rb]) {
            consistent = false;
            break;
          }
        } else {
          pin[ra] = pin[rb];
        }
      }
      parent[rb] = ra;
    }
    if (consistent) {
      for (size_t ci = 0; ci < count; ++ci) {
        if (F.stalks[ci].size() != 1) continue;
        const Rat& v = F.stalks[ci][0][p].rat();
        size_t r = find(ci);
        if (pin[r].has_value()) {
          if (*pin[r] != v) {
            consistent = false;
            break;
          }
        } else {
          pin[r] = v;
        }
      }
    }
    if (!consistent) {
      out.consistent = false;
      out.verdict = KernelVerdict::sections_impossible;
      out.detail = "pinned coboundary system inconsistent on coordinate " +
                   std::string(1, char('a' + p));
      return out;
    }
    for (size_t ci = 0; ci < count; ++ci) forced_coord[ci][p] = pin[find(ci)];
  }
  bool all_attainable = true;
  size_t first_missed = count;
  for (size_t ci = 0; ci < count; ++ci) {
    bool fully_forced = true;
    for (uint32_t p = 0; p < F.n; ++p)
      if (!forced_coord[ci][p].has_value()) fully_forced = false;
    if (fully_forced) {
      ValueVector v;
      for (uint32_t p = 0; p < F.n; ++p) v.push_back(Value::rational(*forced_coord[ci][p]));
      out.forced[ci] = std::move(v);
    }
    bool hit = false;
    for (const ValueVector& s : F.stalks[ci]) {
      bool match = true;
      for (uint32_t p = 0; p < F.n; ++p) {
        if (forced_coord[ci][p].has_value() && s[p].rat() != *forced_coord[ci][p]) {
          match = false;
          break;
        }
      }
      if (match) {
        hit = true;
        break;
      }
    }
    out.attainable[ci] = hit;
    if (!hit && first_missed == count) {
      all_attainable = false;
      first_missed = ci;
    }
  }
  if (!all_attainable) {
    out.verdict = KernelVerdict::sections_impossible;
    out.detail = "no stalk element of " + F.config_names[first_missed] +
                 " lies in the kernel's projection";
  } else {
    out.verdict = KernelVerdict::inconclusive;
    out.detail = "kernel projection meets every stalk";
  }
  return out;
}

// Plain-text exchange format: dimensions, labelled index lists, then one
// triplet per nonzero entry.
inline void export_matrix(std::ostream& os, const CoboundaryMatrix& M) {
  os << "coboundary-matrix rows " << M.rows << " cols " << M.cols << " n " << M.n << "\n";
  for (size_t i = 0; i < M.row_labels.size(); ++i)
    os << "row " << i << " " << M.row_labels[i] << "\n";
  for (size_t j = 0; j < M.col_labels.size(); ++j)
    os << "col " << j << " " << M.col_labels[j] << "\n";
  for (size_t i = 0; i < M.rows; ++i)
    for (size_t j = 0; j < M.cols; ++j)
      if (M.entries[i][j] != 0)
        os << "entry " << i << " " << j << " " << render_rational(M.entries[i][j]) << "\n";
}

inline void export_kernel(std::ostream& os, const std::vector<std::vector<Rat>>& basis) {
  os << "kernel-basis dim " << basis.size() << "\n";
  for (size_t k = 0; k < basis.size(); ++k) {
    os << "vector " << k;
    for (const Rat& q : basis[k]) os << " " << render_rational(q);
    os << "\n";
  }
}

// { "<config rendering>": [output vector], ... }
inline nlohmann::json section_to_json(const TaskSheaf& F, const Section& s) {
  nlohmann::json j = nlohmann::json::object();
  for (size_t ci = 0; ci < F.stalks.size(); ++ci)
    j[F.config_names[ci]] = vector_to_json(section_value(F, s, ci));
  return j;
}

}  // namespace tasksheaf
