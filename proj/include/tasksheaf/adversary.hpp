#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tasksheaf/domain.hpp"
#include "tasksheaf/errors.hpp"

namespace tasksheaf {

// One round's communication pattern: the ordered pairs (sender, receiver)
// whose message arrives this round. A process always remembers itself, so
// self loops carry no information and are rejected.
class RoundDigraph {
 public:
  RoundDigraph() = default;

  static RoundDigraph of(std::vector<std::pair<uint32_t, uint32_t>> arrivals) {
    std::sort(arrivals.begin(), arrivals.end());
    arrivals.erase(std::unique(arrivals.begin(), arrivals.end()), arrivals.end());
    RoundDigraph g;
    g.arrivals_ = std::move(arrivals);
    return g;
  }

  const std::vector<std::pair<uint32_t, uint32_t>>& arrivals() const { return arrivals_; }

  bool delivers(uint32_t from, uint32_t to) const {
    return std::binary_search(arrivals_.begin(), arrivals_.end(), std::make_pair(from, to));
  }

  void check_width(uint32_t n) const {
    for (auto [s, r] : arrivals_) {
      if (s >= n || r >= n) throw ValidationError("arrival endpoint out of range");
      if (s == r) throw ValidationError("explicit self loop in round digraph");
    }
  }

  std::string render(uint32_t n) const { return render_arrival_word(n, arrivals_); }

  friend bool operator==(const RoundDigraph& a, const RoundDigraph& b) {
    return a.arrivals_ == b.arrivals_;
  }
  friend bool operator!=(const RoundDigraph& a, const RoundDigraph& b) { return !(a == b); }
  friend bool operator<(const RoundDigraph& a, const RoundDigraph& b) {
    return a.arrivals_ < b.arrivals_;
  }

 private:
  std::vector<std::pair<uint32_t, uint32_t>> arrivals_;  // sorted, unique
};

inline RoundDigraph round_both() { return RoundDigraph::of({{0, 1}, {1, 0}}); }
inline RoundDigraph round_right() { return RoundDigraph::of({{0, 1}}); }
inline RoundDigraph round_left() { return RoundDigraph::of({{1, 0}}); }
inline RoundDigraph round_silent() { return RoundDigraph::of({}); }

// A message adversary as a finite safety automaton over round digraphs.
// Deterministic and dead-end free by construction: every state owns at least
// one letter, and a (state, letter) pair fixes the successor. Executions are
// exactly the labelled paths from the initial state.
class Adversary {
 public:
  struct Transition {
    uint32_t from = 0;
    RoundDigraph letter;
    uint32_t to = 0;
  };

  Adversary(uint32_t process_count, std::vector<std::string> state_names, uint32_t initial,
            std::vector<Transition> transitions)
      : n_(process_count),
        names_(std::move(state_names)),
        initial_(initial),
        transitions_(std::move(transitions)) {
    if (n_ < 2) throw ValidationError("adversary needs at least two processes");
    if (names_.empty()) throw ValidationError("adversary needs at least one state");
    std::set<std::string> seen;
    for (const auto& name : names_) {
      if (name.empty()) throw ValidationError("empty state name");
      if (!seen.insert(name).second) throw ValidationError("duplicate state name '" + name + "'");
    }
    if (initial_ >= names_.size()) throw ValidationError("initial state out of range");
    by_state_.resize(names_.size());
    std::set<std::pair<uint32_t, std::vector<std::pair<uint32_t, uint32_t>>>> det;
    for (const auto& t : transitions_) {
      if (t.from >= names_.size() || t.to >= names_.size())
        throw ValidationError("transition endpoint out of range");
      t.letter.check_width(n_);
      if (!det.insert({t.from, t.letter.arrivals()}).second)
        throw ValidationError("state '" + names_[t.from] + "' has two transitions on one letter");
      by_state_[t.from].emplace_back(t.letter, t.to);
    }
    for (uint32_t s = 0; s < names_.size(); ++s) {
      if (by_state_[s].empty())
        throw ValidationError("state '" + names_[s] + "' is a dead end (no outgoing letter)");
      std::sort(by_state_[s].begin(), by_state_[s].end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
    }
  }

  uint32_t process_count() const { return n_; }
  uint32_t state_count() const { return static_cast<uint32_t>(names_.size()); }
  uint32_t initial_state() const { return initial_; }

  const std::string& state_name(uint32_t s) const {
    if (s >= names_.size()) throw ValidationError("unknown adversary state");
    return names_[s];
  }

  uint32_t state_by_name(const std::string& name) const {
    for (uint32_t s = 0; s < names_.size(); ++s)
      if (names_[s] == name) return s;
    throw ValidationError("unknown adversary state '" + name + "'");
  }

  // Letters allowed at s with their successors, sorted by letter.
  const std::vector<std::pair<RoundDigraph, uint32_t>>& allowed_rounds(uint32_t s) const {
    if (s >= by_state_.size()) throw ValidationError("unknown adversary state");
    return by_state_[s];
  }

  const std::vector<Transition>& transitions() const { return transitions_; }

 private:
  uint32_t n_;
  std::vector<std::string> names_;
  uint32_t initial_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::pair<RoundDigraph, uint32_t>>> by_state_;
};

// Two processes; each round delivers at least one of the two messages.
inline Adversary builtin_lossy_link() {
  uint32_t live = 0;
  return Adversary(2, {"live"}, live,
                   {{live, round_right(), live},
                    {live, round_left(), live},
                    {live, round_both(), live}});
}

// Two processes; at most one message ever, and only from a to b. Runs look
// like any number of silent rounds, possibly one delivery, silence after.
inline Adversary builtin_tilted_single_shot() {
  uint32_t pending = 0, spent = 1;
  return Adversary(2, {"pending", "spent"}, pending,
                   {{pending, round_silent(), pending},
                    {pending, round_right(), spent},
                    {spent, round_silent(), spent}});
}

// Every message arrives every round.
inline Adversary builtin_reliable(uint32_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> all;
  for (uint32_t s = 0; s < n; ++s)
    for (uint32_t r = 0; r < n; ++r)
      if (s != r) all.emplace_back(s, r);
  return Adversary(n, {"live"}, 0, {{0, RoundDigraph::of(std::move(all)), 0}});
}

inline Adversary adversary_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("adversary document must be a JSON object");
  for (const char* key : {"n", "states", "initial", "letters"})
    if (!j.contains(key)) throw ParseError(std::string("adversary document missing '") + key + "'");
  if (!j["n"].is_number_unsigned()) throw ParseError("'n' must be a nonnegative integer");
  uint32_t n = j["n"].get<uint32_t>();
  if (!j["states"].is_array()) throw ParseError("'states' must be an array of names");
  std::vector<std::string> names;
  for (const auto& s : j["states"]) {
    if (!s.is_string()) throw ParseError("state names must be strings");
    names.push_back(s.get<std::string>());
  }
  auto index_of = [&](const std::string& name) -> uint32_t {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ParseError("unknown state name '" + name + "'");
    return static_cast<uint32_t>(it - names.begin());
  };
  if (!j["initial"].is_string()) throw ParseError("'initial' must be a state name");
  uint32_t initial = index_of(j["initial"].get<std::string>());
  if (!j["letters"].is_array()) throw ParseError("'letters' must be an array");
  std::vector<Adversary::Transition> transitions;
  for (const auto& t : j["letters"]) {
    if (!t.is_object() || !t.contains("from") || !t.contains("arrivals") || !t.contains("to"))
      throw ParseError("each letter needs 'from', 'arrivals' and 'to'");
    if (!t["from"].is_string() || !t["to"].is_string())
      throw ParseError("'from' and 'to' must be state names");
    if (!t["arrivals"].is_array()) throw ParseError("'arrivals' must be an array of [from,to] pairs");
    std::vector<std::pair<uint32_t, uint32_t>> arrivals;
    for (const auto& a : t["arrivals"]) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number_unsigned() || !a[1].is_number_unsigned())
        throw ParseError("each arrival must be a [sender, receiver] pair of indices");
      arrivals.emplace_back(a[0].get<uint32_t>(), a[1].get<uint32_t>());
    }
    transitions.push_back(
        {index_of(t["from"].get<std::string>()), RoundDigraph::of(std::move(arrivals)),
         index_of(t["to"].get<std::string>())});
  }
  return Adversary(n, std::move(names), initial, std::move(transitions));
}

inline nlohmann::json adversary_to_json(const Adversary& adv) {
  nlohmann::json j;
  j["n"] = adv.process_count();
  j["states"] = nlohmann::json::array();
  for (uint32_t s = 0; s < adv.state_count(); ++s) j["states"].push_back(adv.state_name(s));
  j["initial"] = adv.state_name(adv.initial_state());
  auto letters = nlohmann::json::array();
  for (const auto& t : adv.transitions()) {
    nlohmann::json lt;
    lt["from"] = adv.state_name(t.from);
    auto arr = nlohmann::json::array();
    for (auto [s, r] : t.letter.arrivals()) arr.push_back({s, r});
    lt["arrivals"] = std::move(arr);
    lt["to"] = adv.state_name(t.to);
    letters.push_back(std::move(lt));
  }
  j["letters"] = std::move(letters);
  return j;
}

inline Adversary load_adversary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open adversary file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad JSON in '" + path + "': " + e.what());
  }
  return adversary_from_json(j);
}

inline void save_adversary(const Adversary& adv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write adversary file '" + path + "'");
  out << adversary_to_json(adv).dump(2) << "\n";
}

}  // namespace tasksheaf
