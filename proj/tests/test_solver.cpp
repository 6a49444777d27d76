#include "epikit/simengine.hpp"
#include "epikit/solver.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace epikit;

namespace {

// Exhaustive search over decision maps using simulator classes only.
bool brute_solvable(const inputless_task& t, const abstraction& g = {})
{
    const auto runs = sim::run_all(t.schedules(), g);
    const std::size_t procs = t.process_count();
    std::vector<std::map<local_state, std::size_t>> cls(procs);
    std::vector<std::vector<std::size_t>> var(runs.size(), std::vector<std::size_t>(procs));
    std::size_t vars = 0;
    std::vector<std::vector<std::int64_t>> domain;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        for (agent_id a = 0; a < procs; ++a) {
            auto [it, fresh] = cls[a].try_emplace(runs[k].final_states[a], vars);
            if (fresh) {
                ++vars;
                std::set<std::int64_t> vals;
                for (const auto& tup : t.tuples()) {
                    vals.insert(tup[a]);
                }
                domain.emplace_back(vals.begin(), vals.end());
            }
            var[k][a] = it->second;
        }
    }
    std::size_t width = 0;
    for (const auto& d : domain) {
        width = std::max(width, d.size());
    }
    bool found = false;
    epikit::testing::for_each_map(vars, width, [&](const std::vector<std::size_t>& pick) {
        if (found) {
            return;
        }
        for (std::size_t x = 0; x < vars; ++x) {
            if (pick[x] >= domain[x].size()) {
                return;
            }
        }
        for (std::size_t k = 0; k < runs.size(); ++k) {
            output_tuple tup;
            for (agent_id a = 0; a < procs; ++a) {
                tup.push_back(domain[var[k][a]][pick[var[k][a]]]);
            }
            const auto idx = t.output().find(tup);
            if (!idx || !t.allows(k, *idx)) {
                return;
            }
        }
        found = true;
    });
    return found;
}

decision_map constant_map(const inputless_task& t, std::int64_t v)
{
    const auto states = protocol_final_states(t.schedules());
    decision_map dm{t.n(), t.rounds(), std::vector<std::vector<decision_entry>>(t.process_count())};
    for (agent_id a = 0; a < t.process_count(); ++a) {
        std::set<local_state> seen;
        for (const auto& row : states) {
            if (seen.insert(row[a]).second) {
                dm.agents[a].push_back({row[a], v});
            }
        }
    }
    return dm;
}

// The frame morphism from the protocol model into the output model induced by dm.
frame_morphism induced_morphism(const inputless_task& t, const decision_map& dm, const product_update_result& out)
{
    const auto states = protocol_final_states(t.schedules());
    frame_morphism h;
    for (std::size_t k = 0; k < states.size(); ++k) {
        output_tuple tup;
        for (agent_id a = 0; a < t.process_count(); ++a) {
            tup.push_back(*dm.value_for(a, states[k][a]));
        }
        h.push_back(*out.state_of(k, *t.output().find(tup)));
    }
    return h;
}

} // namespace

TEST(Solve, SnapshotSolvableWithoutBacktracking)
{
    const auto t = snapshot_task(2, 1);
    const auto v = solve(t, 2, 1);
    ASSERT_TRUE(v.solvable);
    EXPECT_EQ(v.stats.backtracks, 0U);
    const auto& dm = *v.certificate;
    // each class decides its own view
    for (agent_id a = 0; a < 3; ++a) {
        for (const auto& e : dm.agents[a]) {
            const std::string& text = e.state.text;
            agent_set seen;
            for (std::size_t i = 2; i < text.size(); ++i) {
                if (text[i - 1] == '[' || text[i - 1] == ',') {
                    seen.push_back(static_cast<agent_id>(text[i] - '0'));
                }
            }
            EXPECT_EQ(t.value_text(e.value), to_string(seen)) << text;
        }
    }
    const auto chk = check_certificate(t, 2, 1, dm);
    EXPECT_TRUE(chk.ok());
    ASSERT_TRUE(chk.simplicial.has_value());
    EXPECT_TRUE(is_chromatic_simplicial(*chk.simplicial, frame_to_complex(protocol_action_model(2, 1).frame()),
                                        frame_to_complex(t.output().frame())));
}

TEST(Solve, SnapshotTwoRounds)
{
    const auto t = snapshot_task(2, 2);
    const auto v = solve(t, 2, 2);
    ASSERT_TRUE(v.solvable);
    EXPECT_TRUE(verify_certificate(t, 2, 2, *v.certificate));
}

TEST(Solve, TestsetUnsolvable)
{
    for (std::size_t rounds = 1; rounds <= 2; ++rounds) {
        const auto t = testset_task(1, rounds);
        EXPECT_FALSE(solve(t, 1, rounds).solvable);
        EXPECT_FALSE(brute_solvable(t));
    }
}

TEST(Solve, TwoTestsetUnsolvableMatchesBruteForce)
{
    const auto t = two_testset_task(1);
    EXPECT_FALSE(solve(t, 2, 1).solvable);
    EXPECT_FALSE(brute_solvable(t)); // 2^12 maps
    EXPECT_FALSE(solve(two_testset_task(2), 2, 2).solvable);
}

TEST(Solve, DimensionMismatch)
{
    EXPECT_THROW(solve(testset_task(1, 1), 2, 1), std::invalid_argument);
}

// Random small tasks: the pruned search agrees with exhaustive enumeration.
TEST(Solve, AgreesWithBruteForceOnRandomTasks)
{
    std::mt19937 rng(53);
    std::size_t yes = 0, no = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = trial % 3 == 0 ? 2 : 1;
        const std::size_t rounds = n == 1 && trial % 2 ? 2 : 1;
        auto tuples = detail::binary_tuples(n + 1, 0, n + 1);
        std::bernoulli_distribution coin(trial % 5 == 0 ? 0.8 : 0.45);
        const auto t = inputless_task::from_predicate("rand", n, rounds, tuples,
                                                      [&](const schedule&, const output_tuple&) { return coin(rng); });
        if (!t.unsatisfiable_schedules().empty()) {
            continue;
        }
        const auto v = solve(t, n, rounds);
        EXPECT_EQ(v.solvable, brute_solvable(t));
        (v.solvable ? yes : no) += 1;
        if (v.solvable) {
            EXPECT_TRUE(verify_certificate(t, n, rounds, *v.certificate));
        }
    }
    EXPECT_GT(yes, 5U);
    EXPECT_GT(no, 5U);
}

TEST(Certificate, PerturbedSnapshotCertificateRejected)
{
    const auto t = snapshot_task(2, 1);
    const auto dm = *solve(t, 2, 1).certificate;
    std::set<std::int64_t> values;
    for (const auto& tup : t.tuples()) {
        values.insert(tup.begin(), tup.end());
    }
    std::size_t tried = 0;
    for (agent_id a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < dm.agents[a].size(); ++i) {
            for (std::int64_t v : values) {
                if (v == dm.agents[a][i].value) {
                    continue;
                }
                auto bad = dm;
                bad.agents[a][i].value = v;
                const auto chk = check_certificate(t, 2, 1, bad);
                EXPECT_FALSE(chk.ok());
                EXPECT_FALSE(chk.violations.empty());
                ++tried;
            }
        }
    }
    EXPECT_GT(tried, 0U);
}

TEST(Certificate, ConstantOneRejectedForTwoTestset)
{
    const auto t = two_testset_task(1);
    const auto chk = check_certificate(t, 2, 1, constant_map(t, 1));
    EXPECT_FALSE(chk.ok());
    EXPECT_EQ(chk.violations.size(), t.schedules().size()); // (1,1,1) is never an output
}

TEST(Certificate, MalformedMapsThrow)
{
    const auto t = snapshot_task(1, 1);
    auto dm = *solve(t, 1, 1).certificate;

    auto partial = dm;
    partial.agents[0].pop_back();
    EXPECT_THROW(check_certificate(t, 1, 1, partial), certificate_error);

    auto extra = dm;
    extra.agents[1].push_back({{"nowhere"}, 1});
    EXPECT_THROW(check_certificate(t, 1, 1, extra), certificate_error);

    auto dup = dm;
    dup.agents[1].push_back(dup.agents[1].front());
    EXPECT_THROW(check_certificate(t, 1, 1, dup), certificate_error);

    auto shape = dm;
    shape.rounds = 2;
    EXPECT_THROW(check_certificate(t, 1, 1, shape), certificate_error);
}

TEST(Certificate, InducedMorphismLosesKnowledgeOnly)
{
    const auto t = snapshot_task(2, 1);
    const auto dm = *solve(t, 2, 1).certificate;
    const auto out = output_model(t);
    const auto pm = protocol_model(2, 1);
    const auto h = induced_morphism(t, dm, out);
    ASSERT_TRUE(is_model_morphism(h, pm.model, out.model));
    for (const auto& atom : pm.model.ap()) {
        for (agent_id a = 0; a < 3; ++a) {
            EXPECT_TRUE(knowledge_loss_check(h, pm.model, out.model, formula::atom(atom), a));
        }
    }
}

TEST(Dominance, CoarseProtocolCertificateLiftsToFullInformation)
{
    const auto g = view_set_abstraction();
    for (std::size_t rounds = 1; rounds <= 2; ++rounds) {
        const auto t = snapshot_task(2, rounds);
        const auto coarse = solve(t, 2, rounds, g);
        ASSERT_TRUE(coarse.solvable);
        EXPECT_TRUE(verify_certificate(t, 2, rounds, *coarse.certificate, g));
        const auto lifted = lift_certificate(t, *coarse.certificate, g);
        EXPECT_TRUE(verify_certificate(t, 2, rounds, lifted));
        EXPECT_TRUE(solve(t, 2, rounds).solvable);
    }
}

TEST(Dominance, ConstantProtocolCannotSolveSnapshot)
{
    const auto t = snapshot_task(1, 1);
    EXPECT_FALSE(solve(t, 1, 1, constant_abstraction()).solvable);
    EXPECT_TRUE(solve(t, 1, 1).solvable);
}

TEST(Report, TestsetConflictCoreIsAllThreeSchedules)
{
    const auto rep = make_solve_report(testset_task(1, 1), 1, 1);
    EXPECT_FALSE(rep.result.solvable);
    EXPECT_EQ(rep.conflict_core, (std::vector<std::string>{"0|1", "1|0", "0,1"}));
}

TEST(Report, TwoTestsetCounts)
{
    const auto rep = make_solve_report(two_testset_task(1), 2, 1);
    EXPECT_EQ(rep.state_count, 13U);
    EXPECT_EQ(rep.class_counts, (std::vector<std::size_t>{4, 4, 4}));
    EXPECT_FALSE(rep.conflict_core.empty());
    // the core is itself unsolvable and every proper sub-selection is solvable
    const auto t = two_testset_task(1);
    const auto frame = protocol_action_model(2, 1).frame();
    std::vector<std::size_t> core;
    for (const auto& text : rep.conflict_core) {
        const auto sc = parse_schedule(text);
        core.push_back(static_cast<std::size_t>(std::find(t.schedules().begin(), t.schedules().end(), sc)
                                                - t.schedules().begin()));
    }
    EXPECT_FALSE(detail::decision_search(t, frame, core).run().has_value());
    for (std::size_t i = 0; i < core.size(); ++i) {
        auto fewer = core;
        fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
        EXPECT_TRUE(detail::decision_search(t, frame, fewer).run().has_value());
    }
}

TEST(Report, SnapshotZeroBacktracks)
{
    const auto rep = make_solve_report(snapshot_task(2, 1), 2, 1);
    EXPECT_TRUE(rep.result.solvable);
    EXPECT_EQ(rep.result.stats.backtracks, 0U);
    EXPECT_TRUE(rep.conflict_core.empty());
}
