#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "tasksheaf/errors.hpp"
#include "tasksheaf/value.hpp"

namespace tasksheaf {

struct ProcessId {
  uint32_t index = 0;
  friend auto operator<=>(const ProcessId&, const ProcessId&) = default;
};

// Interned handles. Equality of handles is equality of the underlying
// structure; that is the whole point of the Universe below.
struct ViewId {
  uint32_t raw = UINT32_MAX;
  bool valid() const { return raw != UINT32_MAX; }
  friend auto operator<=>(const ViewId&, const ViewId&) = default;
};

struct ConfigId {
  uint32_t raw = UINT32_MAX;
  bool valid() const { return raw != UINT32_MAX; }
  friend auto operator<=>(const ConfigId&, const ConfigId&) = default;
};

inline std::string process_name(ProcessId p) {
  if (p.index < 26) return std::string(1, static_cast<char>('a' + p.index));
  return "p" + std::to_string(p.index);
}

// Compact word for one round's arrival set. Two-process systems get the
// usual glyphs; anything wider falls back to explicit pairs.
inline std::string render_arrival_word(uint32_t n,
                                       const std::vector<std::pair<uint32_t, uint32_t>>& arrivals) {
  if (n == 2) {
    bool ab = std::find(arrivals.begin(), arrivals.end(), std::make_pair(0u, 1u)) != arrivals.end();
    bool ba = std::find(arrivals.begin(), arrivals.end(), std::make_pair(1u, 0u)) != arrivals.end();
    if (ab && ba) return "↔";
    if (ab) return "→";
    if (ba) return "←";
    return "−";
  }
  std::string out = "{";
  for (size_t i = 0; i < arrivals.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(arrivals[i].first) + ">" + std::to_string(arrivals[i].second);
  }
  return out + "}";
}

// Append-only registry of full-information local views and configurations.
// Structurally equal objects get the same id, so indistinguishability checks
// and deduplication are id comparisons. Views are round-aware: the depth is
// part of the structure, never tracked on the side.
//
// Mutation (interning) takes the write lock; every accessor takes a read
// lock only for the index lookup. Records are immutable once appended and a
// deque never moves them, so returned references stay valid without a lock.
class Universe {
 public:
  explicit Universe(uint32_t process_count) : n_(process_count) {
    if (process_count < 2) throw ValidationError("a system needs at least two processes");
  }

  Universe(const Universe&) = delete;
  Universe& operator=(const Universe&) = delete;

  uint32_t process_count() const { return n_; }

  // Depth-0 view: process p knows exactly its own input.
  ViewId input_view(ProcessId p, const Value& input) {
    check_process(p);
    std::unique_lock lock(mu_);
    auto key = std::make_pair(p.index, input);
    auto it = input_index_.find(key);
    if (it != input_index_.end()) return ViewId{it->second};
    ViewRec rec;
    rec.pid = p;
    rec.depth = 0;
    rec.input = input;
    uint32_t id = static_cast<uint32_t>(views_.size());
    views_.push_back(std::move(rec));
    input_index_.emplace(std::move(key), id);
    return ViewId{id};
  }

  // One synchronous round after `prev`: `received[s]` holds the view sender s
  // delivered this round, or nullopt if nothing arrived from s. The owner's
  // slot must stay empty; the owner keeps its past through `prev`.
  ViewId step_view(ViewId prev, const std::vector<std::optional<ViewId>>& received) {
    std::unique_lock lock(mu_);
    const ViewRec& pv = vraw(prev);
    if (received.size() != n_) throw ArityError("received vector has wrong width");
    if (received[pv.pid.index].has_value())
      throw ValidationError("self slot of a received vector must be empty");
    std::vector<uint32_t> key;
    key.reserve(n_ + 1);
    key.push_back(prev.raw);
    for (uint32_t s = 0; s < n_; ++s) {
      if (!received[s].has_value()) {
        key.push_back(UINT32_MAX);
        continue;
      }
      const ViewRec& sv = vraw(*received[s]);
      if (sv.pid.index != s) throw ValidationError("received view not owned by its sender slot");
      if (sv.depth != pv.depth) throw ValidationError("received view from a different round");
      key.push_back(received[s]->raw);
    }
    auto it = step_index_.find(key);
    if (it != step_index_.end()) return ViewId{it->second};
    ViewRec rec;
    rec.pid = pv.pid;
    rec.depth = pv.depth + 1;
    rec.input = pv.input;
    rec.prev = prev;
    rec.received = received;
    uint32_t id = static_cast<uint32_t>(views_.size());
    views_.push_back(std::move(rec));
    step_index_.emplace(std::move(key), id);
    return ViewId{id};
  }

  // A configuration is one view per process, all at the same depth.
  ConfigId config_of(const std::vector<ViewId>& views) {
    std::unique_lock lock(mu_);
    if (views.size() != n_) throw ArityError("configuration needs one view per process");
    uint32_t depth = vraw(views[0]).depth;
    std::vector<uint32_t> key;
    key.reserve(n_);
    for (uint32_t p = 0; p < n_; ++p) {
      const ViewRec& vr = vraw(views[p]);
      if (vr.pid.index != p) throw ValidationError("view in slot " + std::to_string(p) + " owned by another process");
      if (vr.depth != depth) throw ValidationError("configuration mixes depths");
      key.push_back(views[p].raw);
    }
    auto it = config_index_.find(key);
    if (it != config_index_.end()) return ConfigId{it->second};
    ConfigRec rec;
    rec.depth = depth;
    rec.views = views;
    uint32_t id = static_cast<uint32_t>(configs_.size());
    configs_.push_back(std::move(rec));
    config_index_.emplace(std::move(key), id);
    return ConfigId{id};
  }

  ProcessId view_process(ViewId v) const {
    std::shared_lock lock(mu_);
    return vraw(v).pid;
  }
  uint32_t view_depth(ViewId v) const {
    std::shared_lock lock(mu_);
    return vraw(v).depth;
  }
  // The depth-0 input this view grew from. Cached at every depth: the input
  // stays recoverable without walking the chain.
  const Value& view_input(ViewId v) const {
    std::shared_lock lock(mu_);
    return vraw(v).input;
  }
  ViewId view_prev(ViewId v) const {
    std::shared_lock lock(mu_);
    const ViewRec& r = vraw(v);
    if (r.depth == 0) throw ValidationError("depth-0 view has no predecessor");
    return r.prev;
  }
  const std::vector<std::optional<ViewId>>& view_received(ViewId v) const {
    std::shared_lock lock(mu_);
    return vraw(v).received;
  }

  uint32_t config_depth(ConfigId c) const {
    std::shared_lock lock(mu_);
    return craw(c).depth;
  }
  const std::vector<ViewId>& config_views(ConfigId c) const {
    std::shared_lock lock(mu_);
    return craw(c).views;
  }

  ViewId project_local(ConfigId c, ProcessId p) const {
    check_process(p);
    std::shared_lock lock(mu_);
    return craw(c).views[p.index];
  }

  ValueVector project_inputs(ConfigId c) const {
    std::shared_lock lock(mu_);
    const ConfigRec& rec = craw(c);
    ValueVector out;
    out.reserve(n_);
    for (ViewId v : rec.views) out.push_back(vraw(v).input);
    return out;
  }

  // c ~_p d: process p cannot tell the two configurations apart.
  bool indistinguishable(ConfigId c, ConfigId d, ProcessId p) const {
    check_process(p);
    std::shared_lock lock(mu_);
    return craw(c).views[p.index] == craw(d).views[p.index];
  }

  // "(0,1→)" for two processes: inputs, then one glyph per elapsed round.
  // Wider systems get explicit arrival sets: "(0,1,2 {0>1,2>1},{})".
  std::string render_config(ConfigId c) const {
    std::shared_lock lock(mu_);
    const ConfigRec& rec = craw(c);
    std::string inputs;
    for (uint32_t p = 0; p < n_; ++p) {
      if (p) inputs += ",";
      inputs += vraw(rec.views[p]).input.render();
    }
    std::vector<std::string> words;
    std::vector<ViewId> cur = rec.views;
    for (uint32_t d = rec.depth; d > 0; --d) {
      std::vector<std::pair<uint32_t, uint32_t>> arrivals;
      for (uint32_t r = 0; r < n_; ++r) {
        const ViewRec& vr = vraw(cur[r]);
        for (uint32_t s = 0; s < n_; ++s)
          if (vr.received[s].has_value()) arrivals.emplace_back(s, r);
      }
      std::sort(arrivals.begin(), arrivals.end());
      words.push_back(render_arrival_word(n_, arrivals));
      for (uint32_t p = 0; p < n_; ++p) cur[p] = vraw(cur[p]).prev;
    }
    std::reverse(words.begin(), words.end());
    std::string out = "(" + inputs;
    if (!words.empty()) {
      if (n_ == 2) {
        for (const auto& w : words) out += w;
      } else {
        out += " ";
        for (size_t i = 0; i < words.size(); ++i) {
          if (i) out += ",";
          out += words[i];
        }
      }
    }
    return out + ")";
  }

  size_t view_count() const {
    std::shared_lock lock(mu_);
    return views_.size();
  }
  size_t config_count() const {
    std::shared_lock lock(mu_);
    return configs_.size();
  }

 private:
  struct ViewRec {
    ProcessId pid;
    uint32_t depth = 0;
    Value input;
    ViewId prev;
    std::vector<std::optional<ViewId>> received;  // empty at depth 0
  };
  struct ConfigRec {
    uint32_t depth = 0;
    std::vector<ViewId> views;
  };

  void check_process(ProcessId p) const {
    if (p.index >= n_) throw ValidationError("unknown process " + std::to_string(p.index));
  }
  const ViewRec& vraw(ViewId v) const {
    if (v.raw >= views_.size()) throw ValidationError("unknown view id");
    return views_[v.raw];
  }
  const ConfigRec& craw(ConfigId c) const {
    if (c.raw >= configs_.size()) throw ValidationError("unknown configuration id");
    return configs_[c.raw];
  }

  uint32_t n_;
  mutable std::shared_mutex mu_;
  std::deque<ViewRec> views_;
  std::deque<ConfigRec> configs_;
  std::map<std::pair<uint32_t, Value>, uint32_t> input_index_;
  std::map<std::vector<uint32_t>, uint32_t> step_index_;
  std::map<std::vector<uint32_t>, uint32_t> config_index_;
};

}  // namespace tasksheaf
