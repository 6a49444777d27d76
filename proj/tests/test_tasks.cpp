#include "epikit/tasks.hpp"

#include <gtest/gtest.h>

using namespace epikit;

namespace {

std::size_t schedule_index(const inputless_task& t, const char* text)
{
    const auto sc = parse_schedule(text);
    const auto& all = t.schedules();
    return static_cast<std::size_t>(std::find(all.begin(), all.end(), sc) - all.begin());
}

std::vector<output_tuple> allowed(const inputless_task& t, const char* text)
{
    std::vector<output_tuple> out;
    for (std::size_t k : t.delta(schedule_index(t, text))) {
        out.push_back(t.tuples()[k]);
    }
    return out;
}

} // namespace

TEST(OutputFrame, RelationIsCoordinateEquality)
{
    const output_frame of(2, {{0, 1}, {1, 0}, {1, 1}});
    EXPECT_TRUE(of.frame().related(0, 1, 2));
    EXPECT_FALSE(of.frame().related(1, 1, 2));
    EXPECT_TRUE(is_proper(of.frame()));
    EXPECT_THROW(output_frame(2, {{0, 1}, {0, 1}}), std::invalid_argument);
    EXPECT_THROW(output_frame(2, {{0}}), std::invalid_argument);
    EXPECT_THROW(output_frame(2, {}), std::invalid_argument);
}

TEST(Task, DeltaShapeChecked)
{
    EXPECT_THROW(inputless_task("x", 1, 1, {{0, 1}}, {{0}}), std::invalid_argument);
    EXPECT_THROW(inputless_task("x", 1, 1, {{0, 1}}, {{0}, {0}, {5}}), std::out_of_range);
}

TEST(Task, EmptyDeltaReported)
{
    const inputless_task t("x", 1, 1, {{0, 1}, {1, 0}}, {{0}, {}, {1}});
    EXPECT_EQ(t.unsatisfiable_schedules(), (std::vector<std::size_t>{1}));
    EXPECT_THROW(task_action_model(t), std::invalid_argument);
}

TEST(Task, AllTuplesEverywhereIsTrivial)
{
    const auto tuples = detail::binary_tuples(3, 1, 2);
    const auto t = inputless_task::from_predicate("free", 2, 1, tuples, [](const auto&, const auto&) { return true; });
    const auto am = task_action_model(t);
    for (const auto& pre : am.preconditions()) {
        EXPECT_EQ(pre.states().size(), 13U);
    }
    EXPECT_EQ(output_model(t).model.state_count(), 78U);
}

TEST(Testset, OneBitTwoProcesses)
{
    const auto t = testset_task(1, 1);
    EXPECT_EQ(t.tuples(), (std::vector<output_tuple>{{0, 1}, {1, 0}}));
    EXPECT_EQ(allowed(t, "0|1"), (std::vector<output_tuple>{{1, 0}}));
    EXPECT_EQ(allowed(t, "1|0"), (std::vector<output_tuple>{{0, 1}}));
    EXPECT_EQ(allowed(t, "0,1"), (std::vector<output_tuple>{{0, 1}, {1, 0}}));
}

TEST(TwoTestset, TuplesAndRing)
{
    const auto t = two_testset_task(1);
    EXPECT_EQ(t.tuples().size(), 6U);
    for (const auto& tup : t.tuples()) {
        const auto ones = std::count(tup.begin(), tup.end(), 1);
        EXPECT_TRUE(ones == 1 || ones == 2);
    }
    EXPECT_TRUE(is_proper(t.output().frame()));
    EXPECT_EQ(task_action_model(t).frame(), t.output().frame());
}

TEST(TwoTestset, DeltaBySchedule)
{
    const auto t = two_testset_task(1);
    // sequential: the solo process and its successor win, the last loses
    EXPECT_EQ(allowed(t, "0|1|2"), (std::vector<output_tuple>{{1, 1, 0}}));
    EXPECT_EQ(allowed(t, "2|0|1"), (std::vector<output_tuple>{{1, 0, 1}}));
    // solo then a pair: only the solo winner is pinned
    EXPECT_EQ(allowed(t, "0|1,2"), (std::vector<output_tuple>{{1, 0, 0}, {1, 0, 1}, {1, 1, 0}}));
    // a pair first: both win, the third loses
    EXPECT_EQ(allowed(t, "0,1|2"), (std::vector<output_tuple>{{1, 1, 0}}));
    // fully concurrent: no constraint
    EXPECT_EQ(allowed(t, "0,1,2").size(), 6U);
}

TEST(TwoTestset, TupleEnablingFacts)
{
    const auto t = two_testset_task(1);
    const auto am = task_action_model(t);
    const std::size_t t100 = *t.output().find({1, 0, 0});
    const std::size_t t011 = *t.output().find({0, 1, 1});
    // (0,1,1) is never enabled when process 0 runs solo first
    for (const char* sc : {"0|1|2", "0|2|1", "0|1,2"}) {
        EXPECT_FALSE(am.pre(t011).enabled_in(schedule_index(t, sc)));
    }
    // (1,0,0) is not enabled everywhere: any schedule where 1 or 2 is solo excludes it
    EXPECT_FALSE(am.pre(t100).enabled_in(schedule_index(t, "1|0|2")));
    EXPECT_FALSE(am.pre(t100).enabled_in(schedule_index(t, "0|1|2")));
    EXPECT_TRUE(am.pre(t100).enabled_in(schedule_index(t, "0|1,2")));
    EXPECT_TRUE(am.pre(t100).enabled_in(schedule_index(t, "0,1,2")));
    EXPECT_EQ(am.pre(t100).states().size(), 2U);
}

TEST(TwoTestset, OutputModelSize)
{
    // 6 sequential x 1 + 3 solo-then-pair x 3 + 3 pair-first x 1 + 1 concurrent x 6
    EXPECT_EQ(output_model(two_testset_task(1)).model.state_count(), 24U);
}

TEST(TwoTestset, DeltaNeverEmpty)
{
    for (std::size_t rounds = 1; rounds <= 2; ++rounds) {
        EXPECT_TRUE(two_testset_task(rounds).unsatisfiable_schedules().empty());
    }
}

TEST(TwoTestset, SoloIsTransitiveOverRounds)
{
    const auto t = two_testset_task(2);
    // 0 is alone in round 1, then reads 2, which had read 1: no longer solo,
    // and no pair excludes anyone, so every tuple is allowed.
    EXPECT_EQ(allowed(t, "0|1,2 ; 2|0|1").size(), 6U);
    // 0 stays alone in both rounds: must win
    const auto solo = allowed(t, "0|1,2 ; 0|1,2");
    EXPECT_EQ(solo.size(), 3U);
    for (const auto& tup : solo) {
        EXPECT_EQ(tup[0], 1);
    }
}

TEST(Snapshot, DeltaIsTheViewTuple)
{
    const auto t = snapshot_task(2, 1);
    const auto d = allowed(t, "0|1,2");
    ASSERT_EQ(d.size(), 1U);
    EXPECT_EQ(t.value_text(d[0][0]), "{0}");
    EXPECT_EQ(t.value_text(d[0][1]), "{0,1,2}");
    EXPECT_EQ(t.value_text(d[0][2]), "{0,1,2}");
    EXPECT_EQ(output_model(t).model.state_count(), 13U);
    for (std::size_t k = 0; k < t.schedules().size(); ++k) {
        EXPECT_EQ(t.delta(k).size(), 1U);
    }
}

TEST(Builtin, NamesAndDimensions)
{
    EXPECT_EQ(builtin_task("two-testset", 2, 1).name(), "two_testset");
    EXPECT_THROW(builtin_task("two_testset", 3, 1), std::invalid_argument);
    EXPECT_THROW(builtin_task("consensus", 2, 1), std::invalid_argument);
    EXPECT_EQ(builtin_task("snapshot", 1, 2).schedules().size(), 9U);
}
