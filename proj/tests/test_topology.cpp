#include "epikit/schedules.hpp"
#include "epikit/tasks.hpp"
#include "epikit/topology.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace epikit;

namespace {

kripke_frame two_process_frame() { return new_frame(3, 2, {{0, 0, 1}, {0, 1, 1}}); }

kripke_frame random_proper_frame(std::mt19937& rng, std::size_t states, std::size_t agents)
{
    for (;;) {
        auto f = epikit::testing::random_frame(rng, states, agents);
        if (is_proper(f)) {
            return f;
        }
    }
}

} // namespace

TEST(Complex, Validation)
{
    const std::vector<vertex> vs = {{0, "a"}, {1, "b"}, {1, "c"}};
    EXPECT_NO_THROW(chromatic_complex(vs, {{0, 1}, {0, 2}}));
    EXPECT_THROW(chromatic_complex(vs, {}), std::invalid_argument);
    EXPECT_THROW(chromatic_complex(vs, {{0, 1}, {2}}), std::invalid_argument);     // not pure
    EXPECT_THROW(chromatic_complex(vs, {{1, 2}}), std::invalid_argument);          // two vertices of colour 1
    EXPECT_THROW(chromatic_complex(vs, {{0, 1}, {1, 0}}), std::invalid_argument);  // duplicate facet
    EXPECT_THROW(chromatic_complex(vs, {{0, 1}}), std::invalid_argument);          // vertex 2 unused
    EXPECT_THROW(chromatic_complex(vs, {{0, 9}}), std::out_of_range);
}

TEST(FrameToComplex, SingletonIsOneSimplex)
{
    const auto cx = frame_to_complex(indiscernible_frame(1, 3));
    EXPECT_EQ(cx.vertices().size(), 3U);
    EXPECT_EQ(cx.facets().size(), 1U);
    EXPECT_EQ(cx.dimension(), 2U);
}

TEST(FrameToComplex, TwoProcessPath)
{
    const auto cx = frame_to_complex(two_process_frame());
    EXPECT_EQ(cx.vertices().size(), 4U);
    EXPECT_EQ(cx.facets().size(), 3U);
    // facets 0-1 share the p vertex, facets 1-2 the q vertex, 0-2 nothing
    EXPECT_EQ(cx.facets()[0][0], cx.facets()[1][0]);
    EXPECT_EQ(cx.facets()[1][1], cx.facets()[2][1]);
    EXPECT_NE(cx.facets()[0][0], cx.facets()[2][0]);
    EXPECT_NE(cx.facets()[0][1], cx.facets()[2][1]);
}

TEST(FrameToComplex, ThreeProcessSubdivision)
{
    const auto cx = frame_to_complex(protocol_action_model(2, 1).frame());
    EXPECT_EQ(cx.facets().size(), 13U);
    EXPECT_EQ(cx.dimension(), 2U);
    for (agent_id a = 0; a < 3; ++a) {
        EXPECT_EQ(cx.vertex_count(a), 4U);
    }
}

TEST(FrameToComplex, CountsMatchFrame)
{
    std::mt19937 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_proper_frame(rng, 1 + trial % 9, 3);
        const auto cx = frame_to_complex(f);
        EXPECT_EQ(cx.facets().size(), f.state_count());
        for (agent_id a = 0; a < 3; ++a) {
            EXPECT_EQ(cx.vertex_count(a), f.class_count(a));
        }
        // shared a-vertex iff a-related
        for (state_id u = 0; u < f.state_count(); ++u) {
            for (state_id v = 0; v < f.state_count(); ++v) {
                for (agent_id a = 0; a < 3; ++a) {
                    EXPECT_EQ(cx.facets()[u][a] == cx.facets()[v][a], f.related(a, u, v));
                }
            }
        }
    }
}

TEST(FrameToComplex, ImproperRejected)
{
    EXPECT_THROW(frame_to_complex(indiscernible_frame(2, 2)), std::invalid_argument);
    EXPECT_THROW(roundtrip_check(indiscernible_frame(2, 2)), std::invalid_argument);
}

TEST(ComplexToFrame, SingleFacetAndPath)
{
    const chromatic_complex single({{0, ""}, {1, ""}}, {{0, 1}});
    EXPECT_EQ(complex_to_frame(single).state_count(), 1U);
    const auto path = complex_to_frame(frame_to_complex(two_process_frame()));
    EXPECT_TRUE(are_isomorphic(path, two_process_frame()));
}

TEST(ComplexToFrame, TwoTestsetRing)
{
    const auto task = two_testset_task(1);
    const auto cx = frame_to_complex(task.output().frame());
    ASSERT_EQ(cx.facets().size(), 6U);
    // Facets sharing an edge (two colours) form a single 6-cycle.
    std::vector<std::size_t> degree(6, 0);
    for (std::size_t x = 0; x < 6; ++x) {
        for (std::size_t y = 0; y < 6; ++y) {
            std::size_t shared = 0;
            for (std::size_t c = 0; c < 3; ++c) {
                shared += x != y && cx.facets()[x][c] == cx.facets()[y][c];
            }
            degree[x] += shared == 2;
        }
    }
    EXPECT_EQ(degree, std::vector<std::size_t>(6, 2));
    std::vector<bool> seen(6, false);
    std::size_t at = 0, prev = 6, steps = 0;
    do {
        seen[at] = true;
        for (std::size_t y = 0; y < 6; ++y) {
            std::size_t shared = 0;
            for (std::size_t c = 0; c < 3; ++c) {
                shared += at != y && cx.facets()[at][c] == cx.facets()[y][c];
            }
            if (shared == 2 && y != prev) {
                prev = at;
                at = y;
                break;
            }
        }
        ++steps;
    } while (at != 0 && steps < 10);
    EXPECT_EQ(steps, 6U);
    EXPECT_EQ(std::count(seen.begin(), seen.end(), true), 6);
    EXPECT_TRUE(are_isomorphic(complex_to_frame(cx), task.output().frame()));
}

TEST(Roundtrip, ProtocolAndRandomFrames)
{
    EXPECT_TRUE(roundtrip_check(indiscernible_frame(1, 3)));
    EXPECT_TRUE(roundtrip_check(protocol_action_model(2, 1).frame()));
    EXPECT_TRUE(roundtrip_check(protocol_action_model(2, 2).frame()));
    std::mt19937 rng(43);
    for (int trial = 0; trial < 40; ++trial) {
        EXPECT_TRUE(roundtrip_check(random_proper_frame(rng, 1 + (trial * 5) % 200, 3)));
    }
}

TEST(SimplicialMap, IdentityAndProjection)
{
    const auto f = two_process_frame();
    const auto id = morphism_to_simplicial(identity_morphism(f), f, f);
    EXPECT_EQ(id, identity_morphism(kripke_frame(4, 1, {{0, 1, 2, 3}})));

    const auto p = product(f, f);
    const auto proj = morphism_to_simplicial(p.left, p.frame, f);
    EXPECT_TRUE(is_chromatic_simplicial(proj, frame_to_complex(p.frame), frame_to_complex(f)));
    // 4 classes per agent collapse onto 2
    std::set<std::size_t> image(proj.begin(), proj.end());
    EXPECT_EQ(image.size(), 4U);
}

TEST(SimplicialMap, RejectsNonMorphism)
{
    const auto f = two_process_frame();
    EXPECT_THROW(morphism_to_simplicial({0, 2, 2}, f, f), std::invalid_argument);
}

TEST(SimplicialMap, RespectsComposition)
{
    std::mt19937 rng(47);
    std::size_t checked = 0;
    for (int trial = 0; trial < 60 && checked < 200; ++trial) {
        const auto f = random_proper_frame(rng, 4, 2);
        const auto g = random_proper_frame(rng, 3, 2);
        const auto h = random_proper_frame(rng, 2, 2);
        std::vector<frame_morphism> fg, gh;
        epikit::testing::for_each_map(4, 3, [&](const auto& m) {
            if (is_morphism(m, f, g)) {
                fg.push_back(m);
            }
        });
        epikit::testing::for_each_map(3, 2, [&](const auto& m) {
            if (is_morphism(m, g, h)) {
                gh.push_back(m);
            }
        });
        for (const auto& x : fg) {
            for (const auto& y : gh) {
                EXPECT_EQ(morphism_to_simplicial(compose(y, x), f, h),
                          compose(morphism_to_simplicial(y, g, h), morphism_to_simplicial(x, f, g)));
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 20U);
}

TEST(SimplicialModel, RoundTripAndLocality)
{
    // atom "a0" true exactly where agent 0 is in class 0: local to agent 0
    const auto f = two_process_frame();
    const kripke_model m(f, {"a0", "b1"}, {{0}, {0, 1}, {1}});
    const auto sm = model_to_simplicial(m);
    const auto back = simplicial_to_model(sm);
    EXPECT_EQ(back.frame(), f);
    EXPECT_EQ(back.valuation(), m.valuation());
    // an atom true at a single state of a 2-state class for every agent is not local
    const kripke_model bad(f, {"x"}, {{}, {0}, {}});
    EXPECT_THROW(model_to_simplicial(bad), std::invalid_argument);
}
