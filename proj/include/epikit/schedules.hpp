#pragma once

// Block scheduling actions of the iterated immediate snapshot (IIS) model,
// process views, full-information local states, and the IIS action and input
// models built from them.

#include "epikit/kernel.hpp"
#include "epikit/logic.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epikit {

/// Sorted set of process ids.
using agent_set = std::vector<agent_id>;

inline std::string to_string(const agent_set& s)
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += (i ? "," : "") + std::to_string(s[i]);
    }
    return out + "}";
}

/// Ordered partition [s_0, ..., s_k] of the ids {0, ..., n}. Each concurrency
/// class writes, then snapshots, before the next class runs.
class block_action {
public:
    block_action() = default;

    explicit block_action(std::vector<std::vector<agent_id>> classes) : classes_(std::move(classes))
    {
        if (classes_.empty()) {
            throw std::invalid_argument("block_action: no concurrency classes");
        }
        std::size_t total = 0;
        for (auto& c : classes_) {
            if (c.empty()) {
                throw std::invalid_argument("block_action: empty concurrency class");
            }
            std::sort(c.begin(), c.end());
            total += c.size();
        }
        std::vector<bool> seen(total, false);
        for (const auto& c : classes_) {
            for (agent_id a : c) {
                if (a >= total || seen[a]) {
                    throw std::invalid_argument("block_action: classes must partition {0.." + std::to_string(total - 1)
                                                + "}");
                }
                seen[a] = true;
            }
        }
        position_.assign(total, 0);
        for (std::size_t k = 0; k < classes_.size(); ++k) {
            for (agent_id a : classes_[k]) {
                position_[a] = k;
            }
        }
    }

    std::size_t process_count() const noexcept { return position_.size(); }
    const std::vector<std::vector<agent_id>>& classes() const noexcept { return classes_; }

    /// Index of the concurrency class containing `a`.
    std::size_t position(agent_id a) const { return position_.at(a); }

    /// `0|1,2` style text.
    std::string to_string() const
    {
        std::string out;
        for (std::size_t k = 0; k < classes_.size(); ++k) {
            if (k) {
                out += '|';
            }
            for (std::size_t i = 0; i < classes_[k].size(); ++i) {
                out += (i ? "," : "") + std::to_string(classes_[k][i]);
            }
        }
        return out;
    }

    friend bool operator==(const block_action& x, const block_action& y) { return x.classes_ == y.classes_; }

    /// Canonical order: more classes first, then lexicographic on the classes.
    friend bool canonical_less(const block_action& x, const block_action& y)
    {
        if (x.classes_.size() != y.classes_.size()) {
            return x.classes_.size() > y.classes_.size();
        }
        return x.classes_ < y.classes_;
    }

private:
    std::vector<std::vector<agent_id>> classes_;
    std::vector<std::size_t> position_;
};

/// sc_1 (.) sc_2 (.) ... (.) sc_N: one block action per IIS round.
class schedule {
public:
    schedule() = default;

    explicit schedule(std::vector<block_action> rounds) : rounds_(std::move(rounds))
    {
        if (rounds_.empty()) {
            throw std::invalid_argument("schedule: at least one round required");
        }
        for (const auto& r : rounds_) {
            if (r.process_count() != rounds_.front().process_count()) {
                throw std::invalid_argument("schedule: rounds disagree on the process count");
            }
        }
    }

    std::size_t round_count() const noexcept { return rounds_.size(); }
    std::size_t process_count() const noexcept { return rounds_.front().process_count(); }
    const block_action& round(std::size_t r) const { return rounds_.at(r); }
    const std::vector<block_action>& rounds() const noexcept { return rounds_; }

    /// `0|1,2;0,1,2` style text.
    std::string to_string() const
    {
        std::string out;
        for (std::size_t r = 0; r < rounds_.size(); ++r) {
            out += (r ? ";" : "") + rounds_[r].to_string();
        }
        return out;
    }

    friend bool operator==(const schedule& x, const schedule& y) { return x.rounds_ == y.rounds_; }

private:
    std::vector<block_action> rounds_;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

} // namespace detail

inline block_action parse_block_action(std::string_view text)
{
    std::vector<std::vector<agent_id>> classes;
    for (auto cls : detail::split(text, '|')) {
        classes.emplace_back();
        for (auto id : detail::split(cls, ',')) {
            if (id.empty() || !std::all_of(id.begin(), id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
                throw std::invalid_argument("block action: bad process id '" + std::string(id) + "' in '"
                                            + std::string(text) + "'");
            }
            classes.back().push_back(std::stoul(std::string(id)));
        }
    }
    return block_action(std::move(classes));
}

/// Parses `0|1,2 ; 0,1,2`: rounds split by `;`, classes by `|`, ids by `,`.
inline schedule parse_schedule(std::string_view text)
{
    std::vector<block_action> rounds;
    for (auto r : detail::split(text, ';')) {
        rounds.push_back(parse_block_action(r));
    }
    return schedule(std::move(rounds));
}

namespace detail {

inline void ordered_partitions(std::uint64_t remaining, std::vector<std::vector<agent_id>>& prefix,
                               std::vector<block_action>& out)
{
    if (remaining == 0) {
        out.emplace_back(prefix);
        return;
    }
    // Every non-empty subset of `remaining` may be the next class.
    for (std::uint64_t sub = remaining; sub != 0; sub = (sub - 1) & remaining) {
        std::vector<agent_id> cls;
        for (agent_id a = 0; a < 64; ++a) {
            if (sub >> a & 1U) {
                cls.push_back(a);
            }
        }
        prefix.push_back(std::move(cls));
        ordered_partitions(remaining & ~sub, prefix, out);
        prefix.pop_back();
    }
}

} // namespace detail

/// All ordered partitions of {0..n} in canonical order.
inline std::vector<block_action> enum_block_actions(std::size_t n)
{
    if (n >= 63) {
        throw std::invalid_argument("enum_block_actions: too many processes");
    }
    std::vector<block_action> out;
    std::vector<std::vector<agent_id>> prefix;
    detail::ordered_partitions((std::uint64_t{1} << (n + 1)) - 1, prefix, out);
    std::sort(out.begin(), out.end(), [](const block_action& x, const block_action& y) { return canonical_less(x, y); });
    return out;
}

/// IIS_N for n+1 processes: all N-round schedules, first round most significant.
inline std::vector<schedule> enum_schedules(std::size_t n, std::size_t rounds)
{
    if (rounds == 0) {
        throw std::invalid_argument("enum_schedules: at least one round required");
    }
    const auto acts = enum_block_actions(n);
    std::vector<schedule> out;
    std::vector<std::size_t> digit(rounds, 0);
    for (;;) {
        std::vector<block_action> rs;
        for (std::size_t d : digit) {
            rs.push_back(acts[d]);
        }
        out.emplace_back(std::move(rs));
        std::size_t r = rounds;
        while (r > 0 && ++digit[r - 1] == acts.size()) {
            digit[--r] = 0;
        }
        if (r == 0) {
            return out;
        }
    }
}

/// Processes scheduled before or together with `a`: s_0 u ... u s_j where a is in s_j.
inline agent_set view1(agent_id a, const block_action& act)
{
    if (a >= act.process_count()) {
        throw std::out_of_range("view1: process " + std::to_string(a) + " not in block action");
    }
    agent_set out;
    for (std::size_t k = 0; k <= act.position(a); ++k) {
        out.insert(out.end(), act.classes()[k].begin(), act.classes()[k].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// One-round indistinguishability: equal views.
inline bool indist_1(agent_id a, const block_action& x, const block_action& y)
{
    return view1(a, x) == view1(a, y);
}

/// Local state of a process. Equality is structural on the canonical text.
struct local_state {
    std::string text;

    friend auto operator<=>(const local_state&, const local_state&) = default;
};

/// Values read by one snapshot, keyed by writer id (ascending).
using snapshot = std::vector<std::pair<agent_id, local_state>>;

inline local_state initial_state(agent_id a) { return {std::to_string(a)}; }

/// Full-information update: own id plus everything read.
inline local_state full_information_state(agent_id a, const snapshot& snap)
{
    std::string text = std::to_string(a) + "[";
    for (std::size_t i = 0; i < snap.size(); ++i) {
        text += (i ? "," : "") + std::to_string(snap[i].first) + ":" + snap[i].second.text;
    }
    return {text + "]"};
}

/// Protocol local-state update `(round, process, old state, snapshot) -> new state`.
/// The new state is also the value written in the next round. An empty
/// function means full information.
using abstraction = std::function<local_state(std::size_t round, agent_id, const local_state& old, const snapshot&)>;

inline local_state apply_abstraction(const abstraction& g, std::size_t round, agent_id a, const local_state& old,
                                     const snapshot& snap)
{
    return g ? g(round, a, old, snap) : full_information_state(a, snap);
}

/// Keeps only the set of ids seen in the latest snapshot.
inline abstraction view_set_abstraction()
{
    return [](std::size_t, agent_id a, const local_state&, const snapshot& snap) {
        agent_set seen;
        for (const auto& [j, v] : snap) {
            seen.push_back(j);
        }
        return local_state{std::to_string(a) + to_string(seen)};
    };
}

/// Forgets everything; no process ever learns anything.
inline abstraction constant_abstraction()
{
    return [](std::size_t, agent_id, const local_state&, const snapshot&) { return local_state{"*"}; };
}

/// Final local state of every process, computed from views: in round r process
/// i reads the round r-1 states of exactly view1(i, round_r).
inline std::vector<local_state> final_states(const schedule& sc, const abstraction& g = {})
{
    const std::size_t procs = sc.process_count();
    std::vector<local_state> state(procs);
    for (agent_id a = 0; a < procs; ++a) {
        state[a] = initial_state(a);
    }
    for (std::size_t r = 0; r < sc.round_count(); ++r) {
        std::vector<local_state> next(procs);
        for (agent_id a = 0; a < procs; ++a) {
            snapshot snap;
            for (agent_id j : view1(a, sc.round(r))) {
                snap.emplace_back(j, state[j]);
            }
            next[a] = apply_abstraction(g, r + 1, a, state[a], snap);
        }
        state = std::move(next);
    }
    return state;
}

inline local_state full_info_view(agent_id a, const schedule& sc)
{
    return final_states(sc).at(a);
}

/// Ids whose data reached `a`, directly or through other processes' states.
inline agent_set heard_of(agent_id a, const schedule& sc)
{
    const std::size_t procs = sc.process_count();
    std::vector<std::uint64_t> heard(procs);
    for (agent_id j = 0; j < procs; ++j) {
        heard[j] = std::uint64_t{1} << j;
    }
    for (const auto& act : sc.rounds()) {
        std::vector<std::uint64_t> next(procs);
        for (agent_id i = 0; i < procs; ++i) {
            next[i] = heard[i];
            for (agent_id j : view1(i, act)) {
                next[i] |= heard[j];
            }
        }
        heard = std::move(next);
    }
    agent_set out;
    for (agent_id j = 0; j < procs; ++j) {
        if (heard.at(a) >> j & 1U) {
            out.push_back(j);
        }
    }
    return out;
}

inline std::string schedule_atom(const schedule& sc) { return "sched_" + sc.to_string(); }
inline std::string id_atom(agent_id a) { return "id_" + std::to_string(a); }

/// Final states of every process for every schedule of IIS_N, `[schedule][agent]`.
inline std::vector<std::vector<local_state>> protocol_final_states(const std::vector<schedule>& schedules,
                                                                   const abstraction& g = {})
{
    std::vector<std::vector<local_state>> out;
    out.reserve(schedules.size());
    for (const auto& sc : schedules) {
        out.push_back(final_states(sc, g));
    }
    return out;
}

/// N-round action model of a protocol: one point per schedule, u ~i v iff i
/// ends in the same local state. Point k is enabled exactly at input state k.
inline action_model protocol_action_model(std::size_t n, std::size_t rounds, const abstraction& g = {})
{
    const auto schedules = enum_schedules(n, rounds);
    const auto states = protocol_final_states(schedules, g);
    std::vector<std::vector<std::size_t>> parts(n + 1, std::vector<std::size_t>(schedules.size()));
    for (agent_id a = 0; a <= n; ++a) {
        std::map<local_state, std::size_t> ids;
        for (std::size_t k = 0; k < schedules.size(); ++k) {
            parts[a][k] = ids.try_emplace(states[k][a], ids.size()).first->second;
        }
    }
    std::vector<precondition> pre;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < schedules.size(); ++k) {
        pre.push_back(precondition::enabled_at({k}));
        labels.push_back(schedules[k].to_string());
    }
    return action_model(kripke_frame(schedules.size(), n + 1, std::move(parts)), std::move(pre), std::move(labels));
}

/// The IIS step as a standalone action: one point per block action, related
/// for i iff i's views agree, enabled everywhere (each round uses fresh memory).
inline action_model step_action_model(std::size_t n)
{
    const auto acts = enum_block_actions(n);
    std::vector<std::vector<std::size_t>> parts(n + 1, std::vector<std::size_t>(acts.size()));
    for (agent_id i = 0; i <= n; ++i) {
        std::map<agent_set, std::size_t> ids;
        for (std::size_t b = 0; b < acts.size(); ++b) {
            parts[i][b] = ids.try_emplace(view1(i, acts[b]), ids.size()).first->second;
        }
    }
    std::vector<std::string> labels;
    for (const auto& act : acts) {
        labels.push_back(act.to_string());
    }
    return action_model(kripke_frame(acts.size(), n + 1, std::move(parts)),
                        std::vector<precondition>(acts.size()), std::move(labels));
}

/// One IIS round taken after `prior`: points are pairs (prior point, block
/// action), enabled only after their own prior point. Process i confuses
/// (a, b) with (a', b') iff its views in b and b' agree and every process it
/// reads was in the same prior class. Composing `prior` with this model adds
/// one full-information round.
inline action_model informed_step_action_model(std::size_t n, const action_model& prior)
{
    if (prior.frame().agent_count() != n + 1) {
        throw std::invalid_argument("informed_step_action_model: agent count mismatch");
    }
    const auto acts = enum_block_actions(n);
    const std::size_t count = prior.point_count() * acts.size();
    std::vector<std::vector<std::size_t>> parts(n + 1, std::vector<std::size_t>(count));
    std::vector<precondition> pre;
    std::vector<std::string> labels;
    for (agent_id i = 0; i <= n; ++i) {
        std::map<std::vector<std::size_t>, std::size_t> ids;
        for (std::size_t a = 0; a < prior.point_count(); ++a) {
            for (std::size_t b = 0; b < acts.size(); ++b) {
                std::vector<std::size_t> key;
                for (agent_id j : view1(i, acts[b])) {
                    key.push_back(j);
                    key.push_back(prior.frame().class_of(j, a));
                }
                parts[i][a * acts.size() + b] = ids.try_emplace(std::move(key), ids.size()).first->second;
            }
        }
    }
    for (std::size_t a = 0; a < prior.point_count(); ++a) {
        for (const auto& act : acts) {
            pre.push_back(precondition::enabled_at({a}));
            labels.push_back(act.to_string());
        }
    }
    return action_model(kripke_frame(count, n + 1, std::move(parts)), std::move(pre), std::move(labels));
}

/// Input model for N-round IIS: one state per schedule, no process can tell
/// any two apart. Atoms: `sched_<schedule>` per schedule, then `id_<i>`.
inline kripke_model input_model(std::size_t n, std::size_t rounds)
{
    const auto schedules = enum_schedules(n, rounds);
    std::vector<std::string> ap;
    std::vector<std::string> labels;
    for (const auto& sc : schedules) {
        ap.push_back(schedule_atom(sc));
        labels.push_back(sc.to_string());
    }
    for (agent_id a = 0; a <= n; ++a) {
        ap.push_back(id_atom(a));
    }
    std::vector<std::vector<std::size_t>> valuation(schedules.size());
    for (std::size_t k = 0; k < schedules.size(); ++k) {
        valuation[k].push_back(k);
        for (agent_id a = 0; a <= n; ++a) {
            valuation[k].push_back(schedules.size() + a);
        }
    }
    return kripke_model(indiscernible_frame(schedules.size(), n + 1), std::move(ap), std::move(valuation),
                        std::move(labels));
}

/// Protocol model I[A]: the input model updated with the protocol action model.
/// Only the pairs (k, k) survive; states are relabelled with their schedule.
inline product_update_result protocol_model(std::size_t n, std::size_t rounds, const abstraction& g = {})
{
    const kripke_model input = input_model(n, rounds);
    auto out = product_update(input, protocol_action_model(n, rounds, g));
    std::vector<std::string> labels;
    for (const auto& [s, t] : out.pairs) {
        labels.push_back(input.state_name(s));
    }
    out.model = kripke_model(out.model.frame(), out.model.ap(), out.model.valuation(), std::move(labels));
    return out;
}

} // namespace epikit
