#include "tasksheaf/synthesis.hpp"

#include <gtest/gtest.h>

namespace tasksheaf {
namespace {

ValueVector rv(std::initializer_list<long> xs) {
  ValueVector v;
  for (long x : xs) v.push_back(rat_value(x));
  return v;
}

Task quarter_agreement() {
  return builtin_epsilon_agreement(2, Rat(1, 4),
                                   {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)});
}

TEST(Synthesis, AgreementSynthesizedAtDepthTwo) {
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task task = quarter_agreement();
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 3);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::synthesized);
  EXPECT_EQ(rep.depth, 2u);
  EXPECT_EQ(rep.max_depth, 3u);
  EXPECT_EQ(rep.strategy, CutStrategy::uniform);
  EXPECT_EQ(rep.cut_names.size(), 36u);
  ASSERT_TRUE(rep.map.has_value());
  EXPECT_EQ(rep.map->size(), 36u);
  EXPECT_TRUE(rep.verifier_passed);
  EXPECT_EQ(rep.verifier_detail, "all runs to depth 2 decide correctly");
  EXPECT_EQ(rep.section.size(), 36u);
  EXPECT_EQ(rep.stats.layer_sizes, (std::vector<size_t>{4, 12, 36}));
  EXPECT_EQ(rep.stats.cuts_examined, 3u);
  EXPECT_EQ(rep.stats.slices_built, 3u);
  EXPECT_EQ(rep.stats.csp_nodes, 36u);
  EXPECT_EQ(rep.stats.kernel_refutations, 1u);
  EXPECT_EQ(rep.stats.max_stalk, 13u);
  EXPECT_EQ(rep.stats.largest_slice, 36u);
  // the synthesized map survives an independent re-verification
  Verdict again = verify_decision_map(u, adv, task, *rep.map, rep.depth, task.inputs());
  EXPECT_TRUE(again.pass);
}

TEST(Synthesis, ConsensusHasNoSectionUpToTheBound) {
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task task = builtin_consensus(2, {rat_value(0), rat_value(1)});
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 1);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::no_section);
  EXPECT_EQ(rep.depth, 1u);
  EXPECT_EQ(rep.map, std::nullopt);
  EXPECT_FALSE(rep.verifier_passed);
  EXPECT_TRUE(rep.cut_names.empty());
  EXPECT_EQ(rep.stats.cuts_examined, 2u);
  nlohmann::json j = report_to_json(u, rep);
  EXPECT_EQ(j["verdict"], "no-section-up-to");
  EXPECT_EQ(j["depth"], 1);
  EXPECT_FALSE(j.contains("cut"));
  EXPECT_FALSE(j.contains("decision_map"));
  EXPECT_TRUE(j.contains("statistics"));
}

TEST(Synthesis, ReportsAreIndependentOfJobCount) {
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task agree = quarter_agreement();
  SynthesisReport solo = synthesize(u, adv, agree, agree.inputs(), 3, CutStrategy::uniform, 1);
  SynthesisReport pool = synthesize(u, adv, agree, agree.inputs(), 3, CutStrategy::uniform, 4);
  EXPECT_EQ(report_to_json(u, solo), report_to_json(u, pool));
  Task cons = builtin_consensus(2, {rat_value(0), rat_value(1)});
  SynthesisReport s1 = synthesize(u, adv, cons, cons.inputs(), 2, CutStrategy::uniform, 1);
  SynthesisReport s4 = synthesize(u, adv, cons, cons.inputs(), 2, CutStrategy::uniform, 4);
  EXPECT_EQ(report_to_json(u, s1), report_to_json(u, s4));
}

TEST(Synthesis, SingleShotAdversaryDefeatsTiltedConsensus) {
  Universe u(2);
  Adversary adv = builtin_tilted_single_shot();
  Task task = builtin_tilted_consensus();
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 4);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::no_section);
  EXPECT_EQ(rep.depth, 4u);
  EXPECT_EQ(rep.stats.cuts_examined, 5u);
  EXPECT_EQ(rep.stats.layer_sizes, (std::vector<size_t>{4, 8, 12, 16, 20}));
}

TEST(Synthesis, AntichainCutsRefuteLevelByLevel) {
  Universe u(2);
  Adversary adv = builtin_tilted_single_shot();
  Task task = builtin_tilted_consensus();
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 2, CutStrategy::antichain);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::no_section);
  EXPECT_EQ(rep.depth, 2u);
  // 1 antichain at depth 0, 15 at depth 1, 609 at depth 2
  EXPECT_EQ(rep.stats.cuts_examined, 625u);
  nlohmann::json j = report_to_json(u, rep);
  EXPECT_EQ(j["strategy"], "antichain");
}

TEST(Synthesis, AntichainStrategyCanSynthesize) {
  Universe u(2);
  Adversary adv = builtin_reliable(2);
  Task task = builtin_consensus(2, {rat_value(0), rat_value(1)});
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 1, CutStrategy::antichain);
  EXPECT_EQ(rep.outcome, SynthesisOutcome::synthesized);
  EXPECT_EQ(rep.depth, 1u);
  EXPECT_TRUE(rep.verifier_passed) << rep.verifier_detail;
  ASSERT_TRUE(rep.map.has_value());
  Verdict v = verify_decision_map(u, adv, task, *rep.map, 1, task.inputs());
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(Synthesis, SynthesizedJsonCarriesTheWholeStory) {
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task task = quarter_agreement();
  SynthesisReport rep = synthesize(u, adv, task, task.inputs(), 2);
  nlohmann::json j = report_to_json(u, rep);
  EXPECT_EQ(j["verdict"], "synthesized");
  EXPECT_EQ(j["depth"], 2);
  EXPECT_EQ(j["max_depth"], 2);
  EXPECT_EQ(j["strategy"], "uniform");
  EXPECT_EQ(j["cut"].size(), 36u);
  EXPECT_EQ(j["section"].size(), 36u);
  EXPECT_TRUE(j["verifier"]["passed"].get<bool>());
  EXPECT_EQ(j["statistics"]["layers"], nlohmann::json::array({4, 12, 36}));
  EXPECT_EQ(j["statistics"]["kernel_refutations"], 1);
  // the map reloads in a fresh universe and still verifies
  Universe fresh(2);
  DecisionMap back = decision_map_from_json(fresh, j["decision_map"]);
  Verdict v = verify_decision_map(fresh, adv, task, back, 2, task.inputs());
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(Synthesis, ExtractNeedsConfigIdentities) {
  TaskSheaf F = make_sheaf(2, ValueKind::rational, {{rv({0, 0})}}, {});
  Universe u(2);
  Section s;
  s.choice = {0};
  EXPECT_THROW(extract_decision_map(u, F, s), ValidationError);
}

TEST(Synthesis, RejectsIllFormedRequests) {
  Universe u(2);
  Adversary adv = builtin_lossy_link();
  Task task = builtin_consensus(2, {rat_value(0), rat_value(1)});
  EXPECT_THROW(synthesize(u, adv, task, {}, 1), ValidationError);
  EXPECT_THROW(synthesize(u, adv, task, {rv({5, 5})}, 1), ValidationError);
  EXPECT_THROW(synthesize(u, builtin_reliable(3), task, task.inputs(), 1), ArityError);
}

}  // namespace
}  // namespace tasksheaf
