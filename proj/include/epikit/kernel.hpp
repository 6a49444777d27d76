#pragma once

// Kripke frames with S5 (equivalence) accessibility, frame morphisms,
// categorical products and isomorphism search.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epikit {

using agent_id = std::size_t;
using state_id = std::size_t;

/// A total map between state sets, `map[u]` is the image of state `u`.
using frame_morphism = std::vector<state_id>;

/// Finite multi-agent Kripke frame. Every agent's accessibility relation is an
/// equivalence, stored as one dense class label per state. Labels are renumbered
/// in order of first occurrence, so two frames with the same relations compare equal.
class kripke_frame {
public:
    kripke_frame() = default;

    kripke_frame(std::size_t state_count, std::size_t agent_count,
                 std::vector<std::vector<std::size_t>> partitions)
        : state_count_(state_count), labels_(std::move(partitions))
    {
        if (agent_count == 0) {
            throw std::invalid_argument("kripke_frame: agent_count must be positive");
        }
        if (labels_.size() != agent_count) {
            throw std::invalid_argument("kripke_frame: expected " + std::to_string(agent_count)
                                        + " partitions, got " + std::to_string(labels_.size()));
        }
        for (std::size_t a = 0; a < agent_count; ++a) {
            if (labels_[a].size() != state_count) {
                throw std::invalid_argument("kripke_frame: partition of agent " + std::to_string(a)
                                            + " labels " + std::to_string(labels_[a].size())
                                            + " states, expected " + std::to_string(state_count));
            }
        }
        canonicalize();
    }

    std::size_t state_count() const noexcept { return state_count_; }
    std::size_t agent_count() const noexcept { return labels_.size(); }

    std::size_t class_of(agent_id a, state_id s) const { return labels_.at(a).at(s); }
    std::size_t class_count(agent_id a) const { return members_.at(a).size(); }

    bool related(agent_id a, state_id u, state_id v) const
    {
        return labels_[a][u] == labels_[a][v];
    }

    /// States of class `c` of agent `a`, in increasing order.
    const std::vector<state_id>& members(agent_id a, std::size_t c) const
    {
        return members_.at(a).at(c);
    }

    const std::vector<std::vector<std::size_t>>& partitions() const noexcept { return labels_; }

    friend bool operator==(const kripke_frame& x, const kripke_frame& y)
    {
        return x.state_count_ == y.state_count_ && x.labels_ == y.labels_;
    }

private:
    void canonicalize()
    {
        members_.assign(labels_.size(), {});
        for (std::size_t a = 0; a < labels_.size(); ++a) {
            std::map<std::size_t, std::size_t> renumber;
            for (std::size_t s = 0; s < state_count_; ++s) {
                auto [it, fresh] = renumber.try_emplace(labels_[a][s], renumber.size());
                if (fresh) {
                    members_[a].emplace_back();
                }
                labels_[a][s] = it->second;
                members_[a][it->second].push_back(s);
            }
        }
    }

    std::size_t state_count_ = 0;
    std::vector<std::vector<std::size_t>> labels_;
    std::vector<std::vector<std::vector<state_id>>> members_;
};

inline kripke_frame new_frame(std::size_t state_count, std::size_t agent_count,
                              std::vector<std::vector<std::size_t>> partitions)
{
    return kripke_frame(state_count, agent_count, std::move(partitions));
}

/// Frame with `state_count` states where every agent relates all states.
inline kripke_frame indiscernible_frame(std::size_t state_count, std::size_t agent_count)
{
    return kripke_frame(state_count, agent_count,
                        std::vector<std::vector<std::size_t>>(agent_count,
                                                              std::vector<std::size_t>(state_count, 0)));
}

/// True iff no two distinct states are related for every agent.
inline bool is_proper(const kripke_frame& frame)
{
    std::map<std::vector<std::size_t>, state_id> seen;
    for (state_id s = 0; s < frame.state_count(); ++s) {
        std::vector<std::size_t> key(frame.agent_count());
        for (agent_id a = 0; a < frame.agent_count(); ++a) {
            key[a] = frame.class_of(a, s);
        }
        if (!seen.emplace(std::move(key), s).second) {
            return false;
        }
    }
    return true;
}

inline frame_morphism identity_morphism(const kripke_frame& frame)
{
    frame_morphism f(frame.state_count());
    for (state_id s = 0; s < f.size(); ++s) {
        f[s] = s;
    }
    return f;
}

/// Checks `u ~a v => f(u) ~a f(v)` for all states and agents.
/// Throws std::out_of_range when `f` points outside `to`.
inline bool is_morphism(const frame_morphism& f, const kripke_frame& from, const kripke_frame& to)
{
    if (f.size() != from.state_count()) {
        throw std::invalid_argument("is_morphism: map is not total on the domain frame");
    }
    for (state_id image : f) {
        if (image >= to.state_count()) {
            throw std::out_of_range("is_morphism: image " + std::to_string(image)
                                    + " outside codomain of " + std::to_string(to.state_count())
                                    + " states");
        }
    }
    if (from.agent_count() != to.agent_count()) {
        return false;
    }
    for (agent_id a = 0; a < from.agent_count(); ++a) {
        for (std::size_t c = 0; c < from.class_count(a); ++c) {
            const auto& cls = from.members(a, c);
            const std::size_t target = to.class_of(a, f[cls.front()]);
            for (state_id s : cls) {
                if (to.class_of(a, f[s]) != target) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// `g o f`
inline frame_morphism compose(const frame_morphism& g, const frame_morphism& f)
{
    frame_morphism out(f.size());
    for (state_id s = 0; s < f.size(); ++s) {
        out[s] = g.at(f[s]);
    }
    return out;
}

struct frame_product {
    kripke_frame frame;
    frame_morphism left;  ///< projection onto the first factor
    frame_morphism right; ///< projection onto the second factor

    /// Index of the pair (s, t); pairs are ordered first-factor major.
    state_id pair_index(state_id s, state_id t, std::size_t right_count) const
    {
        return s * right_count + t;
    }
};

inline frame_product product(const kripke_frame& f, const kripke_frame& g)
{
    if (f.agent_count() != g.agent_count()) {
        throw std::invalid_argument("product: agent counts differ ("
                                    + std::to_string(f.agent_count()) + " vs "
                                    + std::to_string(g.agent_count()) + ")");
    }
    const std::size_t count = f.state_count() * g.state_count();
    std::vector<std::vector<std::size_t>> parts(f.agent_count(), std::vector<std::size_t>(count));
    frame_morphism left(count), right(count);
    for (state_id s = 0; s < f.state_count(); ++s) {
        for (state_id t = 0; t < g.state_count(); ++t) {
            const state_id p = s * g.state_count() + t;
            left[p] = s;
            right[p] = t;
            for (agent_id a = 0; a < f.agent_count(); ++a) {
                parts[a][p] = f.class_of(a, s) * g.class_count(a) + g.class_of(a, t);
            }
        }
    }
    return {kripke_frame(count, f.agent_count(), std::move(parts)), std::move(left), std::move(right)};
}

/// Sub-frame on the listed states (relation restricted), in the given order.
inline kripke_frame restrict_frame(const kripke_frame& frame, const std::vector<state_id>& keep)
{
    std::vector<std::vector<std::size_t>> parts(frame.agent_count(), std::vector<std::size_t>(keep.size()));
    for (agent_id a = 0; a < frame.agent_count(); ++a) {
        for (std::size_t i = 0; i < keep.size(); ++i) {
            parts[a][i] = frame.class_of(a, keep[i]);
        }
    }
    return kripke_frame(keep.size(), frame.agent_count(), std::move(parts));
}

namespace detail {

// Colour refinement over states: a state's colour is refined by the multiset of
// colours of its classmates, per agent. Isomorphisms preserve the stable colouring,
// so refining the disjoint union of both frames yields comparable colours.
inline std::vector<std::size_t> refine_colours(const kripke_frame& frame)
{
    const std::size_t n = frame.state_count();
    std::vector<std::size_t> colour(n, 0);
    std::size_t distinct = 1;
    for (;;) {
        std::map<std::vector<std::size_t>, std::size_t> palette;
        std::vector<std::size_t> next(n);
        for (state_id s = 0; s < n; ++s) {
            std::vector<std::size_t> sig{colour[s]};
            for (agent_id a = 0; a < frame.agent_count(); ++a) {
                std::vector<std::size_t> mates;
                for (state_id t : frame.members(a, frame.class_of(a, s))) {
                    mates.push_back(colour[t]);
                }
                std::sort(mates.begin(), mates.end());
                sig.push_back(mates.size());
                sig.insert(sig.end(), mates.begin(), mates.end());
            }
            next[s] = palette.try_emplace(std::move(sig), palette.size()).first->second;
        }
        colour = std::move(next);
        if (palette.size() == distinct) {
            return colour;
        }
        distinct = palette.size();
    }
}

inline kripke_frame disjoint_union(const kripke_frame& f, const kripke_frame& g)
{
    const std::size_t count = f.state_count() + g.state_count();
    std::vector<std::vector<std::size_t>> parts(f.agent_count(), std::vector<std::size_t>(count));
    for (agent_id a = 0; a < f.agent_count(); ++a) {
        for (state_id s = 0; s < f.state_count(); ++s) {
            parts[a][s] = f.class_of(a, s);
        }
        for (state_id t = 0; t < g.state_count(); ++t) {
            parts[a][f.state_count() + t] = f.class_count(a) + g.class_of(a, t);
        }
    }
    return kripke_frame(count, f.agent_count(), std::move(parts));
}

class iso_search {
public:
    iso_search(const kripke_frame& f, const kripke_frame& g) : f_(f), g_(g) {}

    std::optional<frame_morphism> run()
    {
        const auto joint = refine_colours(disjoint_union(f_, g_));
        colour_f_.assign(joint.begin(), joint.begin() + static_cast<std::ptrdiff_t>(f_.state_count()));
        colour_g_.assign(joint.begin() + static_cast<std::ptrdiff_t>(f_.state_count()), joint.end());
        std::vector<std::size_t> hf = colour_f_, hg = colour_g_;
        std::sort(hf.begin(), hf.end());
        std::sort(hg.begin(), hg.end());
        if (hf != hg) {
            return std::nullopt;
        }
        order_ = bfs_order();
        map_.assign(f_.state_count(), npos);
        used_.assign(g_.state_count(), false);
        class_map_.assign(f_.agent_count(), {});
        class_used_.assign(f_.agent_count(), {});
        for (agent_id a = 0; a < f_.agent_count(); ++a) {
            class_map_[a].assign(f_.class_count(a), npos);
            class_used_[a].assign(g_.class_count(a), false);
        }
        if (extend(0)) {
            return map_;
        }
        return std::nullopt;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<state_id> bfs_order() const
    {
        std::vector<state_id> order;
        std::vector<bool> seen(f_.state_count(), false);
        for (state_id root = 0; root < f_.state_count(); ++root) {
            if (seen[root]) {
                continue;
            }
            seen[root] = true;
            order.push_back(root);
            for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
                const state_id s = order[head];
                for (agent_id a = 0; a < f_.agent_count(); ++a) {
                    for (state_id t : f_.members(a, f_.class_of(a, s))) {
                        if (!seen[t]) {
                            seen[t] = true;
                            order.push_back(t);
                        }
                    }
                }
            }
        }
        return order;
    }

    bool extend(std::size_t depth)
    {
        if (depth == order_.size()) {
            return true;
        }
        const state_id u = order_[depth];
        // Candidates: restrict to a g-class already paired with one of u's classes.
        const std::vector<state_id>* pool = nullptr;
        for (agent_id a = 0; a < f_.agent_count() && pool == nullptr; ++a) {
            const std::size_t mapped = class_map_[a][f_.class_of(a, u)];
            if (mapped != npos) {
                pool = &g_.members(a, mapped);
            }
        }
        std::vector<state_id> all;
        if (pool == nullptr) {
            all.resize(g_.state_count());
            for (state_id v = 0; v < all.size(); ++v) {
                all[v] = v;
            }
            pool = &all;
        }
        for (state_id v : *pool) {
            if (used_[v] || colour_g_[v] != colour_f_[u] || !compatible(u, v)) {
                continue;
            }
            std::vector<agent_id> fresh;
            assign(u, v, fresh);
            if (extend(depth + 1)) {
                return true;
            }
            unassign(u, v, fresh);
        }
        return false;
    }

    bool compatible(state_id u, state_id v) const
    {
        for (agent_id a = 0; a < f_.agent_count(); ++a) {
            const std::size_t cu = f_.class_of(a, u);
            const std::size_t cv = g_.class_of(a, v);
            if (f_.members(a, cu).size() != g_.members(a, cv).size()) {
                return false;
            }
            const std::size_t mapped = class_map_[a][cu];
            if (mapped == npos ? class_used_[a][cv] : mapped != cv) {
                return false;
            }
        }
        return true;
    }

    void assign(state_id u, state_id v, std::vector<agent_id>& fresh)
    {
        map_[u] = v;
        used_[v] = true;
        for (agent_id a = 0; a < f_.agent_count(); ++a) {
            const std::size_t cu = f_.class_of(a, u);
            if (class_map_[a][cu] == npos) {
                class_map_[a][cu] = g_.class_of(a, v);
                class_used_[a][g_.class_of(a, v)] = true;
                fresh.push_back(a);
            }
        }
    }

    void unassign(state_id u, state_id v, const std::vector<agent_id>& fresh)
    {
        map_[u] = npos;
        used_[v] = false;
        for (agent_id a : fresh) {
            const std::size_t cu = f_.class_of(a, u);
            class_used_[a][class_map_[a][cu]] = false;
            class_map_[a][cu] = npos;
        }
    }

    const kripke_frame& f_;
    const kripke_frame& g_;
    std::vector<std::size_t> colour_f_, colour_g_;
    std::vector<state_id> order_;
    frame_morphism map_;
    std::vector<bool> used_;
    std::vector<std::vector<std::size_t>> class_map_;
    std::vector<std::vector<bool>> class_used_;
};

} // namespace detail

/// Searches for a bijection `f` with `u ~a v <=> f(u) ~a f(v)`. Exponential in
/// the worst case; colour refinement and class-size signatures prune heavily on
/// the frames this library builds.
inline std::optional<frame_morphism> find_isomorphism(const kripke_frame& f, const kripke_frame& g)
{
    if (f.state_count() != g.state_count() || f.agent_count() != g.agent_count()) {
        return std::nullopt;
    }
    for (agent_id a = 0; a < f.agent_count(); ++a) {
        std::vector<std::size_t> sf, sg;
        for (std::size_t c = 0; c < f.class_count(a); ++c) {
            sf.push_back(f.members(a, c).size());
        }
        for (std::size_t c = 0; c < g.class_count(a); ++c) {
            sg.push_back(g.members(a, c).size());
        }
        std::sort(sf.begin(), sf.end());
        std::sort(sg.begin(), sg.end());
        if (sf != sg) {
            return std::nullopt;
        }
    }
    return detail::iso_search(f, g).run();
}

inline bool are_isomorphic(const kripke_frame& f, const kripke_frame& g)
{
    return find_isomorphism(f, g).has_value();
}

} // namespace epikit
