#pragma once

// Helpers shared by the test executables: seeded random frames and
// brute-force reference implementations that avoid the library's own
// algorithms.

#include "epikit/kernel.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace epikit::testing {

inline kripke_frame random_frame(std::mt19937& rng, std::size_t states, std::size_t agents)
{
    std::vector<std::vector<std::size_t>> parts(agents, std::vector<std::size_t>(states));
    for (auto& p : parts) {
        std::uniform_int_distribution<std::size_t> pick(0, states == 0 ? 0 : states - 1);
        for (auto& label : p) {
            label = pick(rng);
        }
    }
    return kripke_frame(states, agents, std::move(parts));
}

/// Relatedness straight from the raw labels, for comparing against canonical frames.
inline bool raw_related(const std::vector<std::vector<std::size_t>>& parts, std::size_t a, std::size_t u, std::size_t v)
{
    return parts[a][u] == parts[a][v];
}

/// Calls `visit` with every total map from a `from`-element set into a `to`-element set.
inline void for_each_map(std::size_t from, std::size_t to, const std::function<void(const std::vector<std::size_t>&)>& visit)
{
    if (to == 0 && from > 0) {
        return;
    }
    std::vector<std::size_t> m(from, 0);
    while (true) {
        visit(m);
        std::size_t i = 0;
        while (i < from && ++m[i] == to) {
            m[i++] = 0;
        }
        if (i == from) {
            return;
        }
    }
}

/// Pairwise morphism test, written without class tables.
inline bool brute_morphism(const std::vector<std::size_t>& f, const kripke_frame& from, const kripke_frame& to)
{
    for (std::size_t a = 0; a < from.agent_count(); ++a) {
        for (std::size_t u = 0; u < from.state_count(); ++u) {
            for (std::size_t v = 0; v < from.state_count(); ++v) {
                if (from.related(a, u, v) && !to.related(a, f[u], f[v])) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Isomorphism by trying every permutation; only for tiny frames.
inline bool brute_isomorphic(const kripke_frame& f, const kripke_frame& g)
{
    if (f.state_count() != g.state_count() || f.agent_count() != g.agent_count()) {
        return false;
    }
    std::vector<std::size_t> perm(f.state_count());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        perm[i] = i;
    }
    do {
        bool ok = true;
        for (std::size_t a = 0; a < f.agent_count() && ok; ++a) {
            for (std::size_t u = 0; u < perm.size() && ok; ++u) {
                for (std::size_t v = 0; v < perm.size() && ok; ++v) {
                    ok = f.related(a, u, v) == g.related(a, perm[u], perm[v]);
                }
            }
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

/// Ordered set partitions of {0..k-1}, by listing every surjection onto
/// {0..m-1} for each m. Independent of the library's recursive generator.
inline std::set<std::vector<std::vector<std::size_t>>> ordered_partitions_by_surjection(std::size_t k)
{
    std::set<std::vector<std::vector<std::size_t>>> out;
    for (std::size_t m = 1; m <= k; ++m) {
        for_each_map(k, m, [&](const std::vector<std::size_t>& f) {
            std::vector<std::vector<std::size_t>> blocks(m);
            for (std::size_t x = 0; x < k; ++x) {
                blocks[f[x]].push_back(x);
            }
            if (std::none_of(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); })) {
                out.insert(blocks);
            }
        });
    }
    return out;
}

} // namespace epikit::testing
