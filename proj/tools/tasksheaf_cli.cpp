// Command-line frontend: build frames, synthesize decision maps, verify them
// against the exhaustive run oracle, and export coboundary matrices.
//
// Exit codes: 0 success (frame built / map synthesized and verified / verify
// pass / matrix written), 2 negative answer (no section up to the bound, or
// verify fail), 1 anything malformed or an internal failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tasksheaf/tasksheaf.hpp"

namespace {

using namespace tasksheaf;

Adversary resolve_adversary(const std::string& spec, uint32_t n) {
  if (spec == "lossy-link") return builtin_lossy_link();
  if (spec == "tilted") return builtin_tilted_single_shot();
  if (spec == "reliable") return builtin_reliable(n);
  return load_adversary(spec);
}

std::vector<Rat> parse_rational_list(const std::string& csv) {
  std::vector<Rat> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_rational(tok));
  }
  if (out.empty()) throw ParseError("empty rational list");
  return out;
}

struct TaskOptions {
  std::string spec = "consensus";
  std::string eps = "1/4";
  std::string grid = "0,1/4,1/2,3/4,1";
  std::string values = "0,1";
  std::string mode = "paper-exact";
};

Task resolve_task(const TaskOptions& opt, uint32_t n) {
  if (opt.spec == "consensus") {
    std::vector<Value> vals;
    for (const Rat& q : parse_rational_list(opt.values)) vals.push_back(Value::rational(q));
    return builtin_consensus(n, vals);
  }
  if (opt.spec == "eps-agreement")
    return builtin_epsilon_agreement(n, parse_rational(opt.eps), parse_rational_list(opt.grid),
                                     {}, agreement_mode_by_name(opt.mode));
  if (opt.spec == "tilted-consensus") {
    if (n != 2) throw ValidationError("tilted-consensus is a two-process task");
    return builtin_tilted_consensus();
  }
  return load_task(opt.spec);
}

Value value_token(const std::string& tok, std::optional<ValueKind> kind) {
  if (kind.has_value() && *kind == ValueKind::symbolic) return Value::symbol(tok);
  if (!kind.has_value()) {
    try {
      return Value::rational(parse_rational(tok));
    } catch (const ParseError&) {
      return Value::symbol(tok);
    }
  }
  return Value::rational(parse_rational(tok));
}

// "binary" | inline "0,1;1,0" | path to a JSON array of arrays
std::vector<ValueVector> resolve_inputs(const std::string& spec, uint32_t n,
                                        std::optional<ValueKind> kind) {
  std::vector<ValueVector> out;
  if (spec == "binary") {
    if (kind.has_value() && *kind == ValueKind::symbolic)
      throw ValidationError("binary inputs need a rational-valued task");
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
      ValueVector v;
      for (uint32_t p = 0; p < n; ++p) v.push_back(rat_value((mask >> p) & 1));
      out.push_back(std::move(v));
    }
    return out;
  }
  if (spec.find(';') != std::string::npos || spec.find(',') != std::string::npos) {
    std::stringstream rows(spec);
    std::string row;
    while (std::getline(rows, row, ';')) {
      ValueVector v;
      std::stringstream cols(row);
      std::string tok;
      while (std::getline(cols, tok, ',')) v.push_back(value_token(tok, kind));
      if (v.size() != n) throw ValidationError("input vector width disagrees with process count");
      out.push_back(std::move(v));
    }
    if (out.empty()) throw ParseError("no input vectors in inline list");
    return out;
  }
  std::ifstream in(spec);
  if (!in) throw ParseError("cannot open input file: " + spec);
  nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_array()) throw ParseError("input file must hold an array of vectors");
  ValueKind k = kind.value_or(ValueKind::rational);
  for (const auto& row : j) out.push_back(vector_from_json(k, row));
  for (const ValueVector& v : out)
    if (v.size() != n) throw ValidationError("input vector width disagrees with process count");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  return out;
}

int cmd_frame(const std::string& adversary, const std::string& inputs, uint32_t n, uint32_t depth,
              const std::string& dot) {
  Adversary adv = resolve_adversary(adversary, n);
  Universe u(adv.process_count());
  ExecutionGraph graph(u, adv, resolve_inputs(inputs, adv.process_count(), std::nullopt));
  graph.expand_to(depth);
  SystemFrame frame(graph);
  std::vector<size_t> per_layer_edges(depth + 1, 0);
  std::vector<size_t> per_process(adv.process_count(), 0);
  for (const IndistEdge& e : frame.edges()) {
    per_layer_edges[graph.node(e.g).depth] += 1;
    per_process[e.p.index] += 1;
  }
  for (uint32_t d = 0; d <= depth; ++d)
    std::cout << "layer " << d << ": " << graph.layer(d).size() << " configurations, "
              << per_layer_edges[d] << " indistinguishability edges\n";
  std::cout << "indistinguishability edges by process:";
  for (uint32_t p = 0; p < adv.process_count(); ++p)
    std::cout << " " << process_name(ProcessId{p}) << "=" << per_process[p];
  std::cout << " (total " << frame.edges().size() << ")\n";
  if (!dot.empty()) {
    auto out = open_out(dot);
    write_frame_dot(out, frame, 0, depth);
    std::cout << "frame DOT written to " << dot << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& adversary, const TaskOptions& topt, const std::string& inputs,
              uint32_t n, uint32_t max_depth, const std::string& strategy, unsigned jobs,
              const std::string& report_path, const std::string& map_path,
              const std::string& dot) {
  Task task = resolve_task(topt, n);
  Adversary adv = resolve_adversary(adversary, task.process_count());
  std::vector<ValueVector> ins = inputs.empty()
                                     ? task.inputs()
                                     : resolve_inputs(inputs, task.process_count(), task.kind());
  Universe u(task.process_count());
  CutStrategy strat = strategy_by_name(strategy);
  SynthesisReport rep = synthesize(u, adv, task, ins, max_depth, strat, jobs);

  if (!report_path.empty()) {
    auto out = open_out(report_path);
    out << report_to_json(u, rep).dump(2) << "\n";
  }
  if (rep.outcome == SynthesisOutcome::synthesized) {
    std::cout << "synthesized: decision map over the depth-" << rep.depth << " cut ("
              << rep.cut_names.size() << " configurations, strategy " << strategy_name(rep.strategy)
              << ")\n";
    std::cout << "verifier: " << (rep.verifier_passed ? "pass" : "FAIL") << " ("
              << rep.verifier_detail << ")\n";
    if (!map_path.empty()) {
      auto out = open_out(map_path);
      out << decision_map_to_json(u, *rep.map).dump(2) << "\n";
      std::cout << "decision map written to " << map_path << "\n";
    }
    if (!dot.empty()) {
      // rebuild the winning slice for rendering; same deterministic pipeline
      ExecutionGraph graph(u, adv, ins);
      graph.expand_to(rep.depth);
      SystemFrame frame(graph);
      std::vector<ExecutionCut> cuts = cuts_at_depth(frame, rep.depth, strat);
      bool drawn = false;
      for (const ExecutionCut& cut : cuts) {
        std::vector<std::string> names;
        for (NodeId m : cut.members) names.push_back(u.render_config(graph.node(m).config));
        if (names == rep.cut_names) {
          auto out = open_out(dot);
          write_slice_dot(out, frame, build_slice(frame, cut));
          std::cout << "slice DOT written to " << dot << "\n";
          drawn = true;
          break;
        }
      }
      if (!drawn) throw InternalError("winning cut disappeared on rebuild");
    }
    if (!rep.verifier_passed) {
      std::cerr << "error: synthesized map failed verification; refusing to report success\n";
      return 1;
    }
    return 0;
  }
  std::cout << "no section up to depth " << rep.max_depth << " (strategy "
            << strategy_name(rep.strategy) << ", " << rep.stats.cuts_examined
            << " cuts examined)\n";
  return 2;
}

int cmd_verify(const std::string& adversary, const TaskOptions& topt, const std::string& map_path,
               const std::string& inputs, uint32_t n, uint32_t depth) {
  Task task = resolve_task(topt, n);
  Adversary adv = resolve_adversary(adversary, task.process_count());
  Universe u(task.process_count());
  std::ifstream in(map_path);
  if (!in) throw ParseError("cannot open decision map: " + map_path);
  DecisionMap dm = decision_map_from_json(u, nlohmann::json::parse(in));
  std::vector<ValueVector> ins = inputs.empty()
                                     ? task.inputs()
                                     : resolve_inputs(inputs, task.process_count(), task.kind());
  Verdict v = verify_decision_map(u, adv, task, dm, depth, ins);
  if (v.pass) {
    std::cout << "pass: all runs to depth " << depth << " decide and outputs respect the task\n";
    return 0;
  }
  std::cout << "fail (" << failure_name(v.failure) << "): " << v.detail << "\n";
  if (v.witness.has_value())
    std::cout << "witness: " << v.witness->render(task.process_count()) << "\n";
  return 2;
}

int cmd_matrix(const std::string& adversary, const TaskOptions& topt, const std::string& inputs,
               uint32_t n, uint32_t depth, const std::string& out_path) {
  Task task = resolve_task(topt, n);
  if (task.kind() != ValueKind::rational)
    throw ValidationError("coboundary matrices need a rational-valued task");
  Adversary adv = resolve_adversary(adversary, task.process_count());
  std::vector<ValueVector> ins = inputs.empty()
                                     ? task.inputs()
                                     : resolve_inputs(inputs, task.process_count(), task.kind());
  Universe u(task.process_count());
  ExecutionGraph graph(u, adv, ins);
  graph.expand_to(depth);
  SystemFrame frame(graph);
  std::vector<ExecutionCut> cuts = cuts_at_depth(frame, depth, CutStrategy::uniform);
  SystemSlice slice = build_slice(frame, cuts.at(0));
  TaskSheaf F = build_sheaf(frame, slice, task);
  CoboundaryMatrix M = coboundary_matrix(F);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_out(out_path);
    os = &file;
  }
  *os << "# uniform depth-" << depth << " slice: " << F.edges.size() << " edges x "
      << F.stalks.size() << " configurations (operator view); scalar view is " << M.rows << " x "
      << M.cols << " with one column per process coordinate\n";
  export_matrix(*os, M);
  export_kernel(*os, kernel(M));
  KernelCheck kc = kernel_section_check(F);
  *os << "pinned-solve " << (kc.verdict == KernelVerdict::sections_impossible ? "sections-impossible"
                                                                              : "inconclusive")
      << " " << kc.detail << "\n";
  for (size_t ci = 0; ci < F.stalks.size(); ++ci) {
    *os << "config " << F.config_names[ci] << " forced ";
    if (kc.forced[ci].has_value())
      *os << render_vector(*kc.forced[ci]);
    else
      *os << "none";
    *os << " attainable " << (kc.attainable[ci] ? "yes" : "no") << "\n";
  }
  if (!out_path.empty()) std::cout << "matrix written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"task sheaf workbench: message-adversary frames, sections, decision maps"};
  app.require_subcommand(1);

  std::string adversary = "lossy-link";
  std::string inputs;
  uint32_t n = 2;
  uint32_t depth = 0;
  uint32_t max_depth = 2;
  std::string strategy = "uniform";
  unsigned jobs = 1;
  std::string report_path, map_path, dot_path, out_path;
  TaskOptions topt;

  auto add_adversary = [&](CLI::App* sub) {
    sub->add_option("--adversary", adversary,
                    "builtin (lossy-link, tilted, reliable) or JSON file");
    sub->add_option("-n,--processes", n, "process count for builtins that scale");
  };
  auto add_task = [&](CLI::App* sub) {
    sub->add_option("--task", topt.spec,
                    "builtin (consensus, eps-agreement, tilted-consensus) or JSON file");
    sub->add_option("--eps", topt.eps, "agreement tolerance (eps-agreement)");
    sub->add_option("--grid", topt.grid, "comma-separated output grid (eps-agreement)");
    sub->add_option("--values", topt.values, "comma-separated values (consensus)");
    sub->add_option("--mode", topt.mode, "eps-agreement flavor: paper-exact or strict");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--inputs", inputs,
                    "binary, inline \"0,1;1,0\", or JSON file (default: the task's input set)");
  };

  CLI::App* frame = app.add_subcommand("frame", "build a frame and report layer shapes");
  add_adversary(frame);
  frame->add_option("--inputs", inputs, "binary, inline \"0,1;1,0\", or JSON file")->required();
  frame->add_option("--depth", depth, "expansion depth")->required();
  frame->add_option("--dot", dot_path, "write the frame as DOT");

  CLI::App* solve = app.add_subcommand("solve", "synthesize a verified decision map");
  add_adversary(solve);
  add_task(solve);
  add_inputs(solve);
  solve->add_option("--max-depth", max_depth, "deepest cut horizon to try")->required();
  solve->add_option("--strategy", strategy, "cut enumeration: uniform or antichain");
  solve->add_option("--jobs", jobs, "parallel cut evaluations (result is identical for any value)");
  solve->add_option("--report", report_path, "write the full report as JSON");
  solve->add_option("--out", map_path, "write the decision map as JSON");
  solve->add_option("--dot", dot_path, "write the winning slice as DOT");

  CLI::App* verify = app.add_subcommand("verify", "check a decision map against all runs");
  add_adversary(verify);
  add_task(verify);
  add_inputs(verify);
  verify->add_option("--map", map_path, "decision map JSON")->required();
  verify->add_option("--depth", depth, "run horizon")->required();

  CLI::App* matrix = app.add_subcommand("matrix", "export the coboundary matrix and kernel");
  add_adversary(matrix);
  add_task(matrix);
  add_inputs(matrix);
  matrix->add_option("--depth", depth, "uniform slice depth")->required();
  matrix->add_option("--out", out_path, "write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (frame->parsed()) return cmd_frame(adversary, inputs, n, depth, dot_path);
    if (solve->parsed())
      return cmd_solve(adversary, topt, inputs, n, max_depth, strategy, jobs, report_path,
                       map_path, dot_path);
    if (verify->parsed()) return cmd_verify(adversary, topt, map_path, inputs, n, depth);
    if (matrix->parsed()) return cmd_matrix(adversary, topt, inputs, n, depth, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
