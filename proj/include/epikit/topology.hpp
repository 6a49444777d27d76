#pragma once

// Pure chromatic simplicial complexes and their equivalence with proper Kripke
// frames: states are facets, and two facets share their i-coloured vertex iff
// the states are i-indistinguishable.

#include "epikit/kernel.hpp"
#include "epikit/logic.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epikit {

struct vertex {
    agent_id color = 0;
    std::string label; ///< payload only; not part of the structure

    friend bool operator==(const vertex& x, const vertex& y) { return x.color == y.color && x.label == y.label; }
};

/// Pure chromatic complex stored by its facets. Each facet lists one vertex per
/// colour, ordered by colour; faces are implied.
class chromatic_complex {
public:
    chromatic_complex() = default;

    chromatic_complex(std::vector<vertex> vertices, std::vector<std::vector<std::size_t>> facets)
        : vertices_(std::move(vertices)), facets_(std::move(facets))
    {
        if (facets_.empty()) {
            throw std::invalid_argument("chromatic_complex: no facets");
        }
        colors_ = facets_.front().size();
        std::vector<bool> used(vertices_.size(), false);
        for (auto& f : facets_) {
            if (f.size() != colors_) {
                throw std::invalid_argument("chromatic_complex: not pure (facet sizes differ)");
            }
            for (std::size_t v : f) {
                if (v >= vertices_.size()) {
                    throw std::out_of_range("chromatic_complex: vertex index " + std::to_string(v) + " out of range");
                }
                used[v] = true;
            }
            std::sort(f.begin(), f.end(), [&](std::size_t x, std::size_t y) {
                return vertices_[x].color < vertices_[y].color;
            });
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (vertices_[f[i]].color != i) {
                    throw std::invalid_argument("chromatic_complex: facet is not properly coloured by 0.."
                                                + std::to_string(colors_ - 1));
                }
            }
            if (!index_.emplace(f, index_.size()).second) {
                throw std::invalid_argument("chromatic_complex: duplicate facet");
            }
        }
        if (std::find(used.begin(), used.end(), false) != used.end()) {
            throw std::invalid_argument("chromatic_complex: not pure (vertex outside every facet)");
        }
    }

    const std::vector<vertex>& vertices() const noexcept { return vertices_; }
    const std::vector<std::vector<std::size_t>>& facets() const noexcept { return facets_; }
    std::size_t color_count() const noexcept { return colors_; }
    std::size_t dimension() const noexcept { return colors_ - 1; }

    /// Index of the facet with exactly these vertices (any order), if present.
    std::optional<std::size_t> find_facet(std::vector<std::size_t> vs) const
    {
        std::sort(vs.begin(), vs.end(), [&](std::size_t x, std::size_t y) {
            return vertices_.at(x).color < vertices_.at(y).color;
        });
        auto it = index_.find(vs);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t vertex_count(agent_id color) const
    {
        return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(),
                                                      [&](const vertex& v) { return v.color == color; }));
    }

private:
    std::vector<vertex> vertices_;
    std::vector<std::vector<std::size_t>> facets_;
    std::size_t colors_ = 0;
    std::map<std::vector<std::size_t>, std::size_t> index_;
};

/// Optional vertex payload: `(agent, class) -> label`.
using vertex_labeler = std::function<std::string(agent_id, std::size_t)>;

namespace detail {

inline std::vector<std::size_t> vertex_offsets(const kripke_frame& frame)
{
    std::vector<std::size_t> offset(frame.agent_count() + 1, 0);
    for (agent_id a = 0; a < frame.agent_count(); ++a) {
        offset[a + 1] = offset[a] + frame.class_count(a);
    }
    return offset;
}

} // namespace detail

/// Facet k corresponds to state k. Vertices are (agent, class) pairs, agent
/// major, numbered so that vertex `offset(a) + c` is class c of agent a.
inline chromatic_complex frame_to_complex(const kripke_frame& frame, const vertex_labeler& label = {})
{
    if (!is_proper(frame)) {
        throw std::invalid_argument("frame_to_complex: frame is not proper");
    }
    if (frame.state_count() == 0) {
        throw std::invalid_argument("frame_to_complex: empty frame");
    }
    const auto offset = detail::vertex_offsets(frame);
    std::vector<vertex> vs;
    for (agent_id a = 0; a < frame.agent_count(); ++a) {
        for (std::size_t c = 0; c < frame.class_count(a); ++c) {
            vs.push_back({a, label ? label(a, c) : std::to_string(a) + ":" + std::to_string(c)});
        }
    }
    std::vector<std::vector<std::size_t>> facets(frame.state_count());
    for (state_id s = 0; s < frame.state_count(); ++s) {
        for (agent_id a = 0; a < frame.agent_count(); ++a) {
            facets[s].push_back(offset[a] + frame.class_of(a, s));
        }
    }
    return chromatic_complex(std::move(vs), std::move(facets));
}

/// State k is facet k; u ~a v iff the facets share their a-coloured vertex.
inline kripke_frame complex_to_frame(const chromatic_complex& cx)
{
    std::vector<std::vector<std::size_t>> parts(cx.color_count(), std::vector<std::size_t>(cx.facets().size()));
    for (std::size_t k = 0; k < cx.facets().size(); ++k) {
        for (agent_id a = 0; a < cx.color_count(); ++a) {
            parts[a][k] = cx.facets()[k][a];
        }
    }
    return kripke_frame(cx.facets().size(), cx.color_count(), std::move(parts));
}

inline bool roundtrip_check(const kripke_frame& frame)
{
    if (!is_proper(frame)) {
        throw std::invalid_argument("roundtrip_check: frame is not proper");
    }
    return are_isomorphic(frame, complex_to_frame(frame_to_complex(frame)));
}

/// Vertex map between complexes; `map[v]` is the image of vertex v. Same
/// representation as frame_morphism, so `compose` applies to both.
using simplicial_map = std::vector<std::size_t>;

/// Colour-preserving and every facet lands on a facet.
inline bool is_chromatic_simplicial(const simplicial_map& f, const chromatic_complex& from, const chromatic_complex& to)
{
    if (f.size() != from.vertices().size()) {
        return false;
    }
    for (std::size_t v = 0; v < f.size(); ++v) {
        if (f[v] >= to.vertices().size() || to.vertices()[f[v]].color != from.vertices()[v].color) {
            return false;
        }
    }
    for (const auto& facet : from.facets()) {
        std::vector<std::size_t> image;
        for (std::size_t v : facet) {
            image.push_back(f[v]);
        }
        if (!to.find_facet(std::move(image))) {
            return false;
        }
    }
    return true;
}

/// Image of a Kripke morphism between proper frames, on the complexes built
/// by frame_to_complex: vertex (a, class of s) goes to (a, class of f(s)).
inline simplicial_map morphism_to_simplicial(const frame_morphism& f, const kripke_frame& from, const kripke_frame& to)
{
    if (!is_proper(from) || !is_proper(to)) {
        throw std::invalid_argument("morphism_to_simplicial: frames must be proper");
    }
    if (!is_morphism(f, from, to)) {
        throw std::invalid_argument("morphism_to_simplicial: map is not a Kripke morphism");
    }
    const auto off_from = detail::vertex_offsets(from);
    const auto off_to = detail::vertex_offsets(to);
    simplicial_map out(off_from.back());
    for (agent_id a = 0; a < from.agent_count(); ++a) {
        for (std::size_t c = 0; c < from.class_count(a); ++c) {
            const state_id rep = from.members(a, c).front();
            out[off_from[a] + c] = off_to[a] + to.class_of(a, f[rep]);
        }
    }
    if (!is_chromatic_simplicial(out, frame_to_complex(from), frame_to_complex(to))) {
        throw std::logic_error("morphism_to_simplicial: image is not chromatic simplicial");
    }
    return out;
}

/// Pure chromatic complex with atoms attached to vertices; a facet's valuation
/// is the union over its vertices.
struct simplicial_model {
    chromatic_complex complex;
    std::vector<std::string> ap;
    std::vector<std::vector<std::size_t>> vertex_atoms;

    std::vector<std::size_t> facet_atoms(std::size_t facet) const
    {
        std::vector<std::size_t> out;
        for (std::size_t v : complex.facets().at(facet)) {
            out.insert(out.end(), vertex_atoms.at(v).begin(), vertex_atoms.at(v).end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

/// Moves each atom onto the vertices whose whole class satisfies it. Throws
/// when some state's valuation is not the union of its vertices' atoms, i.e.
/// the valuation is not local to the processes.
inline simplicial_model model_to_simplicial(const kripke_model& m, const vertex_labeler& label = {})
{
    const kripke_frame& fr = m.frame();
    simplicial_model out{frame_to_complex(fr, label), m.ap(), {}};
    for (agent_id a = 0; a < fr.agent_count(); ++a) {
        for (std::size_t c = 0; c < fr.class_count(a); ++c) {
            std::vector<std::size_t> common = m.atoms_at(fr.members(a, c).front());
            for (state_id s : fr.members(a, c)) {
                std::vector<std::size_t> keep;
                std::set_intersection(common.begin(), common.end(), m.atoms_at(s).begin(), m.atoms_at(s).end(),
                                      std::back_inserter(keep));
                common = std::move(keep);
            }
            out.vertex_atoms.push_back(std::move(common));
        }
    }
    for (state_id s = 0; s < fr.state_count(); ++s) {
        if (out.facet_atoms(s) != m.atoms_at(s)) {
            throw std::invalid_argument("model_to_simplicial: valuation at state " + m.state_name(s)
                                        + " is not determined by its vertices");
        }
    }
    return out;
}

inline kripke_model simplicial_to_model(const simplicial_model& sm)
{
    std::vector<std::vector<std::size_t>> valuation;
    for (std::size_t k = 0; k < sm.complex.facets().size(); ++k) {
        valuation.push_back(sm.facet_atoms(k));
    }
    return kripke_model(complex_to_frame(sm.complex), sm.ap, std::move(valuation));
}

} // namespace epikit
