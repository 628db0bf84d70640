#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tasksheaf/sheaf.hpp"
#include "tasksheaf/verifier.hpp"

namespace tasksheaf {

// Reads a section back as a decision map: every process decides its
// coordinate of the section value at the first slice configuration it can
// see. Edge agreement makes the per-view values well defined.
inline DecisionMap extract_decision_map(const Universe& u, const TaskSheaf& F, const Section& s) {
  if (F.config_ids.size() != F.stalks.size())
    throw ValidationError("sheaf carries no configuration identities to extract from");
  DecisionMap dm(F.n, F.kind);
  for (size_t ci = 0; ci < F.stalks.size(); ++ci) {
    const ValueVector& out = section_value(F, s, ci);
    for (uint32_t p = 0; p < F.n; ++p)
      dm.set(u.project_local(F.config_ids[ci], ProcessId{p}), out[p]);
  }
  return dm;
}

struct SynthesisStats {
  std::vector<size_t> layer_sizes;
  uint64_t cuts_examined = 0;
  uint64_t slices_built = 0;
  uint64_t csp_nodes = 0;
  uint64_t kernel_refutations = 0;
  size_t max_stalk = 0;
  size_t largest_slice = 0;
};

enum class SynthesisOutcome { synthesized, no_section };

struct SynthesisReport {
  SynthesisOutcome outcome = SynthesisOutcome::no_section;
  uint32_t depth = 0;  // depth of the winning cut; the bound when no section
  uint32_t max_depth = 0;
  CutStrategy strategy = CutStrategy::uniform;
  std::vector<std::string> cut_names;
  std::optional<DecisionMap> map;
  nlohmann::json section;  // config rendering -> output vector, when synthesized
  bool verifier_passed = false;
  std::string verifier_detail;
  SynthesisStats stats;
};

namespace detail {

struct CutOutcome {
  bool kernel_refuted = false;
  std::optional<Section> section;
  std::optional<TaskSheaf> sheaf;
  uint64_t csp_nodes = 0;
  size_t slice_size = 0;
  size_t max_stalk = 0;
};

inline CutOutcome evaluate_cut(const SystemFrame& frame, const Task& task,
                               const ExecutionCut& cut) {
  CutOutcome out;
  SystemSlice slice = build_slice(frame, cut);
  TaskSheaf F = build_sheaf(frame, slice, task);
  out.slice_size = F.stalks.size();
  for (const auto& stalk : F.stalks) out.max_stalk = std::max(out.max_stalk, stalk.size());
  if (task.kind() == ValueKind::rational) {
    bool has_pins = false;
    for (const auto& stalk : F.stalks)
      if (stalk.size() == 1) has_pins = true;
    // cheap necessary condition; only worth running when something is pinned
    if (has_pins &&
        kernel_section_check(F).verdict == KernelVerdict::sections_impossible) {
      out.kernel_refuted = true;
      return out;
    }
  }
  SearchStats st;
  std::optional<Section> sec = find_section(F, &st);
  out.csp_nodes = st.nodes;
  if (sec.has_value()) {
    out.section = std::move(sec);
    out.sheaf = std::move(F);
  }
  return out;
}

}  // namespace detail

// Iterative deepening: explore one more layer, enumerate the cuts whose
// deepest member sits at the new horizon, refute or solve each sheaf, and
// stop at the first section in the documented cut order. The winning section
// becomes a decision map and must pass the exhaustive verifier before being
// reported. NoSectionUpTo is exactly that: no claim beyond the bound.
//
// Workers share nothing but the sealed frame; outcomes are merged in cut
// order and statistics only aggregate cuts up to the winner, so report and
// verdict are independent of the job count.
inline SynthesisReport synthesize(Universe& u, const Adversary& adv, const Task& task,
                                  const std::vector<ValueVector>& inputs, uint32_t max_depth,
                                  CutStrategy strategy = CutStrategy::uniform,
                                  unsigned jobs = 1) {
  if (adv.process_count() != u.process_count() || task.process_count() != u.process_count())
    throw ArityError("process counts disagree");
  if (inputs.empty()) throw ValidationError("no input vectors to synthesize over");
  for (const ValueVector& in : inputs) task.delta(in);  // unknown inputs fail here

  SynthesisReport rep;
  rep.max_depth = max_depth;
  rep.strategy = strategy;
  ExecutionGraph graph(u, adv, inputs);

  auto finish_stats = [&]() {
    rep.stats.layer_sizes.clear();
    for (uint32_t d = 0; d <= graph.frontier_depth(); ++d)
      rep.stats.layer_sizes.push_back(graph.layer(d).size());
  };

  for (uint32_t k = 0; k <= max_depth; ++k) {
    graph.expand_to(k);
    SystemFrame frame(graph);
    std::vector<ExecutionCut> cuts = cuts_at_depth(frame, k, strategy);
    std::vector<detail::CutOutcome> outcomes(cuts.size());
    std::optional<size_t> winner;
    size_t chunk = jobs <= 1 ? 1 : std::max<size_t>(64, size_t(jobs) * 8);
    size_t begin = 0;
    while (begin < cuts.size() && !winner.has_value()) {
      size_t end = std::min(cuts.size(), begin + chunk);
      if (jobs <= 1) {
        for (size_t i = begin; i < end; ++i) outcomes[i] = detail::evaluate_cut(frame, task, cuts[i]);
      } else {
        std::atomic<size_t> next{begin};
        std::exception_ptr err;
        std::mutex err_mu;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) {
          pool.emplace_back([&] {
            while (true) {
              size_t i = next.fetch_add(1);
              if (i >= end) return;
              try {
                outcomes[i] = detail::evaluate_cut(frame, task, cuts[i]);
              } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                return;
              }
            }
          });
        }
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
      }
      for (size_t i = begin; i < end; ++i) {
        if (outcomes[i].section.has_value()) {
          winner = i;
          break;
        }
      }
      begin = end;
    }

    size_t counted = winner.has_value() ? *winner + 1 : cuts.size();
    for (size_t i = 0; i < counted; ++i) {
      const detail::CutOutcome& o = outcomes[i];
      ++rep.stats.cuts_examined;
      ++rep.stats.slices_built;
      rep.stats.csp_nodes += o.csp_nodes;
      if (o.kernel_refuted) ++rep.stats.kernel_refutations;
      rep.stats.max_stalk = std::max(rep.stats.max_stalk, o.max_stalk);
      rep.stats.largest_slice = std::max(rep.stats.largest_slice, o.slice_size);
    }

    if (winner.has_value()) {
      detail::CutOutcome& o = outcomes[*winner];
      const TaskSheaf& F = *o.sheaf;
      DecisionMap dm = extract_decision_map(u, F, *o.section);
      Verdict verdict = verify_decision_map(u, adv, task, dm, k, inputs);
      rep.outcome = SynthesisOutcome::synthesized;
      rep.depth = k;
      for (NodeId m : cuts[*winner].members)
        rep.cut_names.push_back(u.render_config(graph.node(m).config));
      rep.section = section_to_json(F, *o.section);
      rep.map = std::move(dm);
      rep.verifier_passed = verdict.pass;
      rep.verifier_detail = verdict.pass ? verdict.detail
                                         : std::string(failure_name(verdict.failure)) + ": " +
                                               verdict.detail;
      finish_stats();
      return rep;
    }
  }
  rep.outcome = SynthesisOutcome::no_section;
  rep.depth = max_depth;
  finish_stats();
  return rep;
}

inline nlohmann::json report_to_json(const Universe& u, const SynthesisReport& rep) {
  nlohmann::json j;
  j["verdict"] = rep.outcome == SynthesisOutcome::synthesized ? "synthesized" : "no-section-up-to";
  j["depth"] = rep.depth;
  j["max_depth"] = rep.max_depth;
  j["strategy"] = strategy_name(rep.strategy);
  if (rep.outcome == SynthesisOutcome::synthesized) {
    j["cut"] = rep.cut_names;
    j["section"] = rep.section;
    j["decision_map"] = decision_map_to_json(u, *rep.map);
    j["verifier"] = {{"passed", rep.verifier_passed}, {"detail", rep.verifier_detail}};
  }
  j["statistics"] = {{"layers", rep.stats.layer_sizes},
                     {"cuts_examined", rep.stats.cuts_examined},
                     {"slices_built", rep.stats.slices_built},
                     {"csp_nodes", rep.stats.csp_nodes},
                     {"kernel_refutations", rep.stats.kernel_refutations},
                     {"max_stalk", rep.stats.max_stalk},
                     {"largest_slice", rep.stats.largest_slice}};
  return j;
}

}  // namespace tasksheaf
