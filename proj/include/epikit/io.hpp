#pragma once

// JSON and DOT serialisation. All output is canonically ordered so files are
// byte-stable across runs.

#include "epikit/kernel.hpp"
#include "epikit/logic.hpp"
#include "epikit/schedules.hpp"
#include "epikit/simengine.hpp"
#include "epikit/solver.hpp"
#include "epikit/tasks.hpp"
#include "epikit/topology.hpp"

#include <json.hpp>

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

namespace epikit::io {

using json = nlohmann::ordered_json;

// frames and models

inline json to_json(const kripke_frame& f)
{
    return {{"states", f.state_count()}, {"agents", f.agent_count()}, {"partitions", f.partitions()}};
}

inline kripke_frame frame_from_json(const json& j)
{
    return kripke_frame(j.at("states").get<std::size_t>(), j.at("agents").get<std::size_t>(),
                        j.at("partitions").get<std::vector<std::vector<std::size_t>>>());
}

inline json to_json(const kripke_model& m)
{
    json j = to_json(m.frame());
    j["ap"] = m.ap();
    j["valuation"] = m.valuation();
    if (!m.state_labels().empty()) {
        j["labels"] = m.state_labels();
    }
    return j;
}

inline kripke_model model_from_json(const json& j)
{
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        labels = j.at("labels").get<std::vector<std::string>>();
    }
    return kripke_model(frame_from_json(j), j.at("ap").get<std::vector<std::string>>(),
                        j.at("valuation").get<std::vector<std::vector<std::size_t>>>(), std::move(labels));
}

// complexes

inline json to_json(const chromatic_complex& cx)
{
    json vs = json::array();
    for (const auto& v : cx.vertices()) {
        vs.push_back({{"color", v.color}, {"label", v.label}});
    }
    return {{"vertices", vs}, {"facets", cx.facets()}};
}

inline chromatic_complex complex_from_json(const json& j)
{
    std::vector<vertex> vs;
    for (const auto& v : j.at("vertices")) {
        vs.push_back({v.at("color").get<agent_id>(), v.value("label", std::string{})});
    }
    return chromatic_complex(std::move(vs), j.at("facets").get<std::vector<std::vector<std::size_t>>>());
}

// schedules

inline json to_json(const schedule& sc)
{
    json rounds = json::array();
    for (const auto& r : sc.rounds()) {
        rounds.push_back(r.classes());
    }
    return {{"rounds", rounds}};
}

inline schedule schedule_from_json(const json& j)
{
    std::vector<block_action> rounds;
    for (const auto& r : j.at("rounds")) {
        rounds.emplace_back(r.get<std::vector<std::vector<agent_id>>>());
    }
    return schedule(std::move(rounds));
}

// tasks

inline json to_json(const inputless_task& t)
{
    json j = {{"name", t.name()}, {"n", t.n()}, {"N", t.rounds()}, {"tuples", t.tuples()}, {"delta", t.delta()}};
    if (!t.value_labels().empty()) {
        json labels = json::object();
        for (const auto& [v, text] : t.value_labels()) {
            labels[std::to_string(v)] = text;
        }
        j["value_labels"] = labels;
    }
    return j;
}

inline inputless_task task_from_json(const json& j)
{
    std::map<std::int64_t, std::string> labels;
    if (j.contains("value_labels")) {
        for (const auto& [k, v] : j.at("value_labels").items()) {
            labels[std::stoll(k)] = v.get<std::string>();
        }
    }
    return inputless_task(j.value("name", std::string("custom")), j.at("n").get<std::size_t>(),
                          j.at("N").get<std::size_t>(), j.at("tuples").get<std::vector<output_tuple>>(),
                          j.at("delta").get<std::vector<std::vector<std::size_t>>>(), std::move(labels));
}

// solver

inline json to_json(const decision_map& dm)
{
    json agents = json::array();
    for (const auto& entries : dm.agents) {
        json a = json::array();
        for (const auto& e : entries) {
            a.push_back({{"state", e.state.text}, {"value", e.value}});
        }
        agents.push_back(a);
    }
    return {{"n", dm.n}, {"N", dm.rounds}, {"agents", agents}};
}

inline decision_map decision_map_from_json(const json& j)
{
    decision_map dm;
    dm.n = j.at("n").get<std::size_t>();
    dm.rounds = j.at("N").get<std::size_t>();
    for (const auto& a : j.at("agents")) {
        dm.agents.emplace_back();
        for (const auto& e : a) {
            dm.agents.back().push_back({{e.at("state").get<std::string>()}, e.at("value").get<std::int64_t>()});
        }
    }
    return dm;
}

inline json to_json(const solve_report& rep)
{
    json j = {{"task", rep.task},
              {"n", rep.n},
              {"N", rep.rounds},
              {"verdict", rep.result.solvable ? "solvable" : "unsolvable"},
              {"states", rep.state_count},
              {"class_counts", rep.class_counts},
              {"search", {{"variables", rep.result.stats.variables},
                          {"nodes", rep.result.stats.nodes},
                          {"backtracks", rep.result.stats.backtracks}}},
              {"class_inventory", rep.class_inventory}};
    if (rep.result.certificate) {
        j["certificate"] = to_json(*rep.result.certificate);
    } else {
        j["conflict_core"] = rep.conflict_core;
    }
    return j;
}

// simulation

inline json to_json(const snapshot& snap)
{
    json out = json::array();
    for (const auto& [id, st] : snap) {
        out.push_back({{"id", id}, {"state", st.text}});
    }
    return out;
}

inline json to_json(const sim::run_record& rec)
{
    json rounds = json::array();
    for (std::size_t r = 0; r < rec.rounds.size(); ++r) {
        const auto& rr = rec.rounds[r];
        json written = json::array(), snaps = json::array(), memory = json::array();
        for (const auto& w : rr.written) {
            written.push_back(w.text);
        }
        for (const auto& s : rr.snapshots) {
            snaps.push_back(to_json(s));
        }
        for (const auto& cell : rr.memory.cells()) {
            memory.push_back(cell ? json(cell->text) : json(nullptr));
        }
        rounds.push_back({{"block", rec.sched.round(r).to_string()},
                          {"written", written},
                          {"snapshots", snaps},
                          {"memory", memory}});
    }
    json finals = json::array();
    for (const auto& s : rec.final_states) {
        finals.push_back(s.text);
    }
    return {{"schedule", rec.sched.to_string()}, {"rounds", rounds}, {"final", finals}};
}

// DOT

namespace detail {

inline std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace detail

/// One node per state, one undirected edge per related pair of distinct
/// states, labelled with the agents that relate them.
inline std::string to_dot(const kripke_frame& f, const std::vector<std::string>& state_labels = {})
{
    std::ostringstream os;
    os << "graph frame {\n";
    for (state_id s = 0; s < f.state_count(); ++s) {
        os << "  s" << s << " [label=" << detail::quote(state_labels.empty() ? std::to_string(s) : state_labels.at(s))
           << "];\n";
    }
    for (state_id u = 0; u < f.state_count(); ++u) {
        for (state_id v = u + 1; v < f.state_count(); ++v) {
            std::string agents;
            for (agent_id a = 0; a < f.agent_count(); ++a) {
                if (f.related(a, u, v)) {
                    agents += (agents.empty() ? "" : ",") + std::to_string(a);
                }
            }
            if (!agents.empty()) {
                os << "  s" << u << " -- s" << v << " [label=" << detail::quote(agents) << "];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

/// Facet-adjacency graph: one node per facet, an edge wherever two facets
/// share vertices, labelled with the shared colours.
inline std::string to_dot(const chromatic_complex& cx, const std::vector<std::string>& facet_labels = {})
{
    std::ostringstream os;
    os << "graph complex {\n";
    const auto& facets = cx.facets();
    for (std::size_t k = 0; k < facets.size(); ++k) {
        os << "  f" << k << " [label=" << detail::quote(facet_labels.empty() ? std::to_string(k) : facet_labels.at(k))
           << "];\n";
    }
    for (std::size_t x = 0; x < facets.size(); ++x) {
        for (std::size_t y = x + 1; y < facets.size(); ++y) {
            std::string colors;
            for (std::size_t c = 0; c < cx.color_count(); ++c) {
                if (facets[x][c] == facets[y][c]) {
                    colors += (colors.empty() ? "" : ",") + std::to_string(c);
                }
            }
            if (!colors.empty()) {
                os << "  f" << x << " -- f" << y << " [label=" << detail::quote(colors) << "];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

} // namespace epikit::io
