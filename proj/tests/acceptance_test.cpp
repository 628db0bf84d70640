// Acceptance gate: ten end-to-end checks, one per shipping criterion. Each
// prints "[criterion N] PASS|FAIL: summary" so the gate can be read off the
// log without decoding the framework output.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include <gtest/gtest.h>

#include "tasksheaf/tasksheaf.hpp"

namespace tasksheaf {
namespace {

class Criterion : public ::testing::Test {
 protected:
  // call first, so the verdict line prints even when an ASSERT bails out
  void describe(int number, const std::string& summary) {
    number_ = number;
    summary_ = summary;
    start_ = std::chrono::steady_clock::now();
  }

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  void TearDown() override {
    std::cout << "[criterion " << number_ << "] " << (HasFailure() ? "FAIL" : "PASS") << ": "
              << summary_ << std::endl;
  }

 private:
  int number_ = 0;
  std::string summary_;
  std::chrono::steady_clock::time_point start_;
};

ValueVector rv(std::initializer_list<long> xs) {
  ValueVector v;
  for (long x : xs) v.push_back(rat_value(x));
  return v;
}

Task quarter_agreement() {
  return builtin_epsilon_agreement(2, Rat(1, 4),
                                   {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)});
}

Task binary_consensus() { return builtin_consensus(2, {rat_value(0), rat_value(1)}); }

TaskSheaf uniform_sheaf(Universe& u, const Adversary& adv, const Task& task, uint32_t depth) {
  ExecutionGraph g(u, adv, task.inputs());
  g.expand_to(depth);
  SystemFrame frame(g);
  SystemSlice slice = build_slice(frame, cuts_at_depth(frame, depth, CutStrategy::uniform).at(0));
  return build_sheaf(frame, slice, task);
}

TEST_F(Criterion, LayerZeroFrameIsTheIndistinguishabilitySquare) {
  describe(1, "layer-0 lossy-link frame: 4 configurations, per-process square");
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  ExecutionGraph g(u, adv, binary_consensus().inputs());
  SystemFrame frame(g);
  EXPECT_EQ(g.layer(0).size(), 4u);
  std::set<std::tuple<std::string, std::string, std::string>> got;
  for (const IndistEdge& e : frame.edges())
    got.insert({u.render_config(g.node(e.g).config), u.render_config(g.node(e.h).config),
                process_name(e.p)});
  std::set<std::tuple<std::string, std::string, std::string>> want{
      {"(0,0)", "(0,1)", "a"},
      {"(1,0)", "(1,1)", "a"},
      {"(0,0)", "(1,0)", "b"},
      {"(0,1)", "(1,1)", "b"}};
  EXPECT_EQ(got, want);
  EXPECT_LT(elapsed_ms(), 1000.0);
}

TEST_F(Criterion, DepthOneUniformSliceIsTwelveByTwelve) {
  describe(2, "depth-1 lossy-link uniform slice: 12 configurations, 12 consistency edges");
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  ExecutionGraph g(u, adv, binary_consensus().inputs());
  g.expand_to(1);
  SystemFrame frame(g);
  SystemSlice slice = build_slice(frame, cuts_at_depth(frame, 1, CutStrategy::uniform).at(0));
  EXPECT_EQ(slice.configs.size(), 12u);
  EXPECT_EQ(slice.edges.size(), 12u);
  EXPECT_LT(elapsed_ms(), 1000.0);
}

TEST_F(Criterion, DepthZeroAgreementRefutedByThePinnedKernel) {
  describe(3, "depth-0 agreement: pinned kernel forces (0,1)/(1,0) outside the outputs");
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  TaskSheaf F = uniform_sheaf(u, adv, quarter_agreement(), 0);
  KernelCheck k = kernel_section_check(F);
  EXPECT_EQ(k.verdict, KernelVerdict::sections_impossible);
  EXPECT_TRUE(k.consistent);
  EXPECT_EQ(k.forced[1], rv({0, 1}));
  EXPECT_EQ(k.forced[2], rv({1, 0}));
  EXPECT_FALSE(k.attainable[1]);
  EXPECT_FALSE(k.attainable[2]);
  CoboundaryMatrix M = coboundary_matrix(F);
  EXPECT_EQ(M.rows, 4u);
  EXPECT_EQ(M.cols, 8u);
  EXPECT_EQ(kernel(M).size(), 4u);
  EXPECT_LT(elapsed_ms(), 1000.0);
}

TEST_F(Criterion, AgreementSynthesizedAndVerifiedAtDepthTwo) {
  describe(4, "quarter agreement on lossy link: synthesized at depth 2, verifier passes");
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task task = quarter_agreement();
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 2);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::synthesized);
  EXPECT_EQ(rep.depth, 2u);
  EXPECT_TRUE(rep.verifier_passed) << rep.verifier_detail;
  ASSERT_TRUE(rep.map.has_value());
  Verdict v = verify_decision_map(u, adv, task, *rep.map, 2, task.inputs());
  EXPECT_TRUE(v.pass) << v.detail;
  EXPECT_LT(elapsed_ms(), 60000.0);
}

TEST_F(Criterion, ConsensusHasNoSectionUpToDepthThree) {
  describe(5, "binary consensus on lossy link: no section up to depth 3");
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task task = binary_consensus();
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 3);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::no_section);
  EXPECT_EQ(rep.depth, 3u);
  EXPECT_LT(elapsed_ms(), 600000.0);
}

TEST_F(Criterion, TiltedConsensusRefutedAtEveryTestedBound) {
  describe(6, "tilted consensus on the single-shot adversary: no section for bounds 0..4");
  Universe u(2);
  Adversary adv = builtin_tilted_single_shot();
  Task task = builtin_tilted_consensus();
  for (uint32_t bound = 0; bound <= 4; ++bound) {
    SynthesisReport rep = synthesize(u, adv, task, task.inputs(), bound);
    EXPECT_EQ(rep.outcome, SynthesisOutcome::no_section) << "bound " << bound;
    EXPECT_EQ(rep.depth, bound);
  }
  // same verdict over every antichain cut with horizon 3 (65536 of them)
  SynthesisReport anti = synthesize(u, adv, task, task.inputs(), 3, CutStrategy::antichain);
  EXPECT_EQ(anti.outcome, SynthesisOutcome::no_section);
  EXPECT_EQ(anti.stats.cuts_examined, 65536u);
  EXPECT_LT(elapsed_ms(), 300000.0);
}

TEST_F(Criterion, DeciderAgreesWithEnumerationOnRandomSheaves) {
  describe(7, "200 random sheaves: decider and enumeration agree, sections respect edges");
  std::mt19937 rng(96024818);
  std::uniform_int_distribution<uint32_t> npick(2, 3);
  std::uniform_int_distribution<size_t> cpick(2, 10);
  std::uniform_int_distribution<int> spick(1, 8), num(0, 4), edge(0, 9);
  int found = 0, refused = 0;
  for (int trial = 0; trial < 200; ++trial) {
    uint32_t n = npick(rng);
    size_t count = cpick(rng);
    double product = 1;
    std::vector<std::vector<ValueVector>> stalks(count);
    for (auto& stalk : stalks) {
      int want = spick(rng);
      while (product * want > 1000000.0 && want > 1) --want;  // keep enumeration affordable
      std::set<ValueVector> seen;
      while (static_cast<int>(seen.size()) < want) {
        ValueVector v;
        for (uint32_t p = 0; p < n; ++p) v.push_back(Value::rational(Rat(num(rng), 4)));
        seen.insert(v);
      }
      stalk.assign(seen.begin(), seen.end());
      product *= static_cast<double>(stalk.size());
    }
    std::vector<SheafEdge> edges;
    std::uniform_int_distribution<uint32_t> ppick(0, n - 1);
    for (uint32_t i = 0; i < count; ++i)
      for (uint32_t j = i + 1; j < count; ++j)
        if (edge(rng) < 4) edges.push_back({i, j, ProcessId{ppick(rng)}});
    TaskSheaf F = make_sheaf(n, ValueKind::rational, std::move(stalks), std::move(edges));
    std::optional<Section> sec = find_section(F);
    std::vector<Section> first = enumerate_sections(F, 1);
    ASSERT_EQ(sec.has_value(), !first.empty()) << "existence mismatch, trial " << trial;
    if (sec.has_value()) {
      ++found;
      EXPECT_TRUE(section_respects(F, *sec)) << "trial " << trial;
      EXPECT_EQ(sec->choice, first[0].choice) << "trial " << trial;
    } else {
      ++refused;
    }
  }
  // the generator must exercise both answers
  EXPECT_GT(found, 10);
  EXPECT_GT(refused, 10);
}

TEST_F(Criterion, FoundSectionsFlattenIntoTheKernel) {
  describe(8, "every found section lies in the kernel of its coboundary matrix");
  Universe u(2);
  Adversary lossy = builtin_lossy_link();
  Task agree = quarter_agreement();
  TaskSheaf F2 = uniform_sheaf(u, lossy, agree, 2);
  std::optional<Section> sec = find_section(F2);
  ASSERT_TRUE(sec.has_value());
  EXPECT_TRUE(in_kernel(coboundary_matrix(F2), flatten_section(F2, *sec)));
  EXPECT_TRUE(in_kernel(coboundary_matrix(F2, Orientation::high_to_low),
                        flatten_section(F2, *sec)));

  Adversary reliable = builtin_reliable(2);
  TaskSheaf F1 = uniform_sheaf(u, reliable, binary_consensus(), 1);
  CoboundaryMatrix M1 = coboundary_matrix(F1);
  for (const Section& s : enumerate_sections(F1, 100))
    EXPECT_TRUE(in_kernel(M1, flatten_section(F1, s)));

  std::mt19937 rng(31415926);
  std::uniform_int_distribution<size_t> cpick(2, 6);
  std::uniform_int_distribution<int> num(0, 2), spick(1, 3), coin(0, 1);
  int flattened = 0;
  for (int trial = 0; trial < 50; ++trial) {
    size_t count = cpick(rng);
    std::vector<std::vector<ValueVector>> stalks(count);
    for (auto& stalk : stalks) {
      std::set<ValueVector> seen;
      int want = spick(rng);
      while (static_cast<int>(seen.size()) < want)
        seen.insert({rat_value(num(rng)), rat_value(num(rng))});
      stalk.assign(seen.begin(), seen.end());
    }
    std::vector<SheafEdge> edges;
    for (uint32_t i = 0; i < count; ++i)
      for (uint32_t j = i + 1; j < count; ++j)
        if (coin(rng)) edges.push_back({i, j, ProcessId{static_cast<uint32_t>(coin(rng))}});
    TaskSheaf F = make_sheaf(2, ValueKind::rational, std::move(stalks), std::move(edges));
    std::optional<Section> s = find_section(F);
    if (!s.has_value()) continue;
    ++flattened;
    EXPECT_TRUE(in_kernel(coboundary_matrix(F), flatten_section(F, *s))) << "trial " << trial;
  }
  EXPECT_GT(flattened, 5);
}

TEST_F(Criterion, StructuralPropertiesHoldOnBuiltObjects) {
  describe(9, "indist transitivity, consistency covers indist and causal pairs, "
              "input persistence, constants in the kernel");
  Universe u(2);
  struct Setup {
    Adversary adv;
    uint32_t depth;
  };
  std::vector<Setup> setups;
  setups.push_back({builtin_lossy_link(), 2});
  setups.push_back({builtin_tilted_single_shot(), 3});
  setups.push_back({builtin_reliable(2), 2});
  std::vector<ValueVector> binary{rv({0, 0}), rv({0, 1}), rv({1, 0}), rv({1, 1})};

  for (const Setup& setup : setups) {
    ExecutionGraph g(u, setup.adv, binary);
    g.expand_to(setup.depth);
    SystemFrame frame(g);

    // per-process transitivity of the indistinguishability edges
    std::set<std::tuple<uint32_t, uint32_t, uint32_t>> rel;
    for (const IndistEdge& e : frame.edges()) {
      rel.insert({e.g.raw, e.h.raw, e.p.index});
      rel.insert({e.h.raw, e.g.raw, e.p.index});
    }
    for (const auto& [x, y, p] : rel)
      for (const auto& [y2, z, p2] : rel) {
        if (y2 != y || p2 != p || z == x) continue;
        EXPECT_TRUE(rel.count({x, z, p})) << "transitivity gap at process " << p;
      }

    // input persistence along every parent edge
    for (uint32_t d = 1; d <= setup.depth; ++d)
      for (NodeId id : g.layer(d)) {
        const ExecNode& node = g.node(id);
        for (const auto& in : node.parents)
          EXPECT_EQ(u.project_inputs(node.config), u.project_inputs(g.node(in.parent).config));
      }

    // consistency edges cover indistinguishability and causal pairs on slices
    std::vector<ExecutionCut> cuts = cuts_at_depth(frame, setup.depth, CutStrategy::antichain);
    cuts.resize(std::min<size_t>(cuts.size(), 12));
    cuts.push_back(cuts_at_depth(frame, setup.depth, CutStrategy::uniform).at(0));
    for (const ExecutionCut& cut : cuts) {
      SystemSlice slice = build_slice(frame, cut);
      std::set<std::tuple<uint32_t, uint32_t, uint32_t>> have;
      for (const SliceEdge& e : slice.edges) have.insert({e.a.raw, e.b.raw, e.p.index});
      for (size_t i = 0; i < slice.configs.size(); ++i)
        for (size_t j = i + 1; j < slice.configs.size(); ++j) {
          NodeId x = slice.configs[i], y = slice.configs[j];
          bool causal = frame.reaches(x, y) || frame.reaches(y, x);
          for (uint32_t p = 0; p < 2; ++p) {
            bool indist = u.project_local(g.node(x).config, ProcessId{p}) ==
                          u.project_local(g.node(y).config, ProcessId{p});
            if (indist || causal)
              EXPECT_TRUE(have.count({x.raw, y.raw, p}))
                  << "missing consistency edge for process " << p;
          }
        }
    }
  }

  // constant vectors sit in every kernel
  Task agree = quarter_agreement();
  Adversary lossy = builtin_lossy_link();
  for (uint32_t depth = 0; depth <= 2; ++depth) {
    TaskSheaf F = uniform_sheaf(u, lossy, agree, depth);
    CoboundaryMatrix M = coboundary_matrix(F);
    EXPECT_TRUE(in_kernel(M, std::vector<Rat>(M.cols, Rat(1))));
    EXPECT_TRUE(in_kernel(M, std::vector<Rat>(M.cols, Rat(7, 3))));
  }
}

int run_pipeline(const std::string& args, std::string& output) {
  std::string cmd = std::string(TASKSHEAF_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  char buf[4096];
  output.clear();
  while (size_t got = fread(buf, 1, sizeof buf, pipe)) output.append(buf, got);
  int status = pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(Criterion, PipelineRoundTripAndMutationCatch) {
  describe(10, "solve output verifies; a single mutated decision fails with a witness");
  std::string dir = testing::TempDir();
  std::string map = dir + "acceptance_map.json";
  std::string out;
  int code = run_pipeline("solve --task eps-agreement --max-depth 2 --out " + map, out);
  ASSERT_EQ(code, 0) << out;
  ASSERT_NE(out.find("synthesized"), std::string::npos) << out;

  code = run_pipeline("verify --task eps-agreement --map " + map + " --depth 2", out);
  EXPECT_EQ(code, 0) << out;
  EXPECT_NE(out.find("pass:"), std::string::npos) << out;

  std::ifstream in(map);
  nlohmann::json dm = nlohmann::json::parse(in);
  dm["entries"][0]["value"] = "5";
  std::string mutated = dir + "acceptance_map_bad.json";
  {
    std::ofstream f(mutated);
    f << dm.dump(2) << "\n";
  }
  code = run_pipeline("verify --task eps-agreement --map " + mutated + " --depth 2", out);
  EXPECT_EQ(code, 2) << out;
  EXPECT_NE(out.find("fail ("), std::string::npos) << out;
  EXPECT_NE(out.find("witness: "), std::string::npos) << out;

  std::remove(map.c_str());
  std::remove(mutated.c_str());
}

}  // namespace
}  // namespace tasksheaf
