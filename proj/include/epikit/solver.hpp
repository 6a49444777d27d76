#pragma once

// Solvability of inputless tasks in N-round IIS. A protocol solves the task
// iff there is a Kripke morphism from the protocol model I[A] to the output
// model I[T] that respects Delta. Output-model relatedness is per-process
// value equality, so such a morphism is exactly a per-process function from
// view classes to output values (a decision map); the search runs over those.

#include "epikit/kernel.hpp"
#include "epikit/logic.hpp"
#include "epikit/schedules.hpp"
#include "epikit/simengine.hpp"
#include "epikit/tasks.hpp"
#include "epikit/topology.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epikit {

struct decision_entry {
    local_state state; ///< the process's final local state naming the view class
    std::int64_t value = 0;

    friend bool operator==(const decision_entry&, const decision_entry&) = default;
};

/// Per process, one entry per view class of the protocol model.
struct decision_map {
    std::size_t n = 0;
    std::size_t rounds = 1;
    std::vector<std::vector<decision_entry>> agents;

    std::optional<std::int64_t> value_for(agent_id a, const local_state& s) const
    {
        for (const auto& e : agents.at(a)) {
            if (e.state == s) {
                return e.value;
            }
        }
        return std::nullopt;
    }

    friend bool operator==(const decision_map&, const decision_map&) = default;
};

struct search_stats {
    std::size_t nodes = 0;
    std::size_t backtracks = 0;
    std::size_t variables = 0;
};

struct verdict {
    bool solvable = false;
    std::optional<decision_map> certificate;
    search_stats stats;
};

class certificate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Backtracking over (process, view class) variables with generalised arc
// consistency on each schedule's table of allowed tuples. Pruning never removes
// a value that occurs in some full solution, so exhausting the tree is a proof
// that no decision map exists.
class decision_search {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    decision_search(const inputless_task& task, const kripke_frame& protocol, const std::vector<std::size_t>& active)
        : agents_(protocol.agent_count())
    {
        const auto& tuples = task.tuples();
        values_.assign(agents_, {});
        tuple_value_.assign(tuples.size(), std::vector<std::size_t>(agents_));
        for (agent_id a = 0; a < agents_; ++a) {
            std::map<std::int64_t, std::size_t> ids;
            for (std::size_t t = 0; t < tuples.size(); ++t) {
                auto [it, fresh] = ids.try_emplace(tuples[t][a], values_[a].size());
                if (fresh) {
                    values_[a].push_back(tuples[t][a]);
                }
                tuple_value_[t][a] = it->second;
            }
        }

        // Variables ordered by the first active schedule that mentions them,
        // ties broken by process index.
        var_of_.assign(agents_, {});
        for (agent_id a = 0; a < agents_; ++a) {
            var_of_[a].assign(protocol.class_count(a), npos);
        }
        for (std::size_t p = 0; p < active.size(); ++p) {
            const std::size_t sched = active[p];
            sched_vars_.emplace_back(agents_);
            for (agent_id a = 0; a < agents_; ++a) {
                const std::size_t c = protocol.class_of(a, sched);
                if (var_of_[a][c] == npos) {
                    var_of_[a][c] = var_agent_.size();
                    var_agent_.push_back(a);
                    var_class_.push_back(c);
                    var_scheds_.emplace_back();
                }
                sched_vars_[p][a] = var_of_[a][c];
                var_scheds_[var_of_[a][c]].push_back(p);
            }
            sched_tuples_.push_back(task.delta(sched));
        }

        dom_.resize(var_agent_.size());
        dom_size_.resize(var_agent_.size());
        for (std::size_t x = 0; x < var_agent_.size(); ++x) {
            dom_[x].assign(values_[var_agent_[x]].size(), 1);
            dom_size_[x] = dom_[x].size();
        }
        alive_.resize(active.size());
        alive_count_.resize(active.size());
        for (std::size_t p = 0; p < active.size(); ++p) {
            alive_[p].assign(sched_tuples_[p].size(), 1);
            alive_count_[p] = sched_tuples_[p].size();
        }
        queued_.assign(active.size(), 0);
        weight_.assign(active.size(), 1);
        stats_.variables = var_agent_.size();
    }

    /// Value index per variable of the first solution, or nullopt.
    std::optional<std::vector<std::size_t>> run()
    {
        for (std::size_t p = 0; p < alive_.size(); ++p) {
            enqueue(p);
        }
        if (!propagate() || !dfs()) {
            return std::nullopt;
        }
        return solution_;
    }

    const search_stats& stats() const noexcept { return stats_; }
    std::size_t variable(agent_id a, std::size_t cls) const { return var_of_.at(a).at(cls); }
    std::int64_t value(std::size_t var, std::size_t idx) const { return values_[var_agent_[var]][idx]; }

private:
    struct trail_entry {
        bool domain; // true: dom_[i][j] removed; false: alive_[i][j] killed
        std::size_t i;
        std::size_t j;
    };

    void enqueue(std::size_t p)
    {
        if (!queued_[p]) {
            queued_[p] = 1;
            queue_.push_back(p);
        }
    }

    bool remove_value(std::size_t x, std::size_t v)
    {
        dom_[x][v] = 0;
        --dom_size_[x];
        trail_.push_back({true, x, v});
        for (std::size_t p : var_scheds_[x]) {
            enqueue(p);
        }
        return dom_size_[x] > 0;
    }

    bool revise(std::size_t p)
    {
        const auto& vars = sched_vars_[p];
        const auto& tuples = sched_tuples_[p];
        for (std::size_t k = 0; k < tuples.size(); ++k) {
            if (!alive_[p][k]) {
                continue;
            }
            for (agent_id a = 0; a < agents_; ++a) {
                if (!dom_[vars[a]][tuple_value_[tuples[k]][a]]) {
                    alive_[p][k] = 0;
                    --alive_count_[p];
                    trail_.push_back({false, p, k});
                    break;
                }
            }
        }
        if (alive_count_[p] == 0) {
            ++weight_[p];
            return false;
        }
        for (agent_id a = 0; a < agents_; ++a) {
            const std::size_t x = vars[a];
            std::vector<char> supported(dom_[x].size(), 0);
            for (std::size_t k = 0; k < tuples.size(); ++k) {
                if (alive_[p][k]) {
                    supported[tuple_value_[tuples[k]][a]] = 1;
                }
            }
            for (std::size_t v = 0; v < dom_[x].size(); ++v) {
                if (dom_[x][v] && !supported[v] && !remove_value(x, v)) {
                    ++weight_[p];
                    return false;
                }
            }
        }
        return true;
    }

    // dom/wdeg: smallest domain relative to the accumulated failure weight of
    // the schedules still linking the variable to other open variables. Ties go
    // to the lowest variable index, so the search stays deterministic.
    std::size_t pick_variable() const
    {
        std::size_t best = npos;
        double best_score = 0;
        for (std::size_t y = 0; y < dom_.size(); ++y) {
            if (dom_size_[y] <= 1) {
                continue;
            }
            std::size_t w = 0;
            for (std::size_t p : var_scheds_[y]) {
                for (std::size_t z : sched_vars_[p]) {
                    if (z != y && dom_size_[z] > 1) {
                        w += weight_[p];
                        break;
                    }
                }
            }
            const double score = static_cast<double>(dom_size_[y]) / static_cast<double>(std::max<std::size_t>(w, 1));
            if (best == npos || score < best_score) {
                best = y;
                best_score = score;
            }
        }
        return best;
    }

    bool propagate()
    {
        while (!queue_.empty()) {
            const std::size_t p = queue_.back();
            queue_.pop_back();
            queued_[p] = 0;
            if (!revise(p)) {
                for (std::size_t q : queue_) {
                    queued_[q] = 0;
                }
                queue_.clear();
                return false;
            }
        }
        return true;
    }

    void undo(std::size_t mark)
    {
        while (trail_.size() > mark) {
            const trail_entry e = trail_.back();
            trail_.pop_back();
            if (e.domain) {
                dom_[e.i][e.j] = 1;
                ++dom_size_[e.i];
            } else {
                alive_[e.i][e.j] = 1;
                ++alive_count_[e.i];
            }
        }
    }

    bool dfs()
    {
        ++stats_.nodes;
        const std::size_t x = pick_variable();
        if (x == npos) {
            solution_.assign(dom_.size(), 0);
            for (std::size_t y = 0; y < dom_.size(); ++y) {
                for (std::size_t v = 0; v < dom_[y].size(); ++v) {
                    if (dom_[y][v]) {
                        solution_[y] = v;
                    }
                }
            }
            return true;
        }
        for (std::size_t v = 0; v < dom_[x].size(); ++v) {
            if (!dom_[x][v]) {
                continue;
            }
            const std::size_t mark = trail_.size();
            bool ok = true;
            for (std::size_t w = 0; w < dom_[x].size() && ok; ++w) {
                if (w != v && dom_[x][w]) {
                    ok = remove_value(x, w);
                }
            }
            if (ok && propagate() && dfs()) {
                return true;
            }
            queue_.clear();
            std::fill(queued_.begin(), queued_.end(), 0);
            undo(mark);
            ++stats_.backtracks;
        }
        return false;
    }

    std::size_t agents_;
    std::vector<std::vector<std::int64_t>> values_;
    std::vector<std::vector<std::size_t>> tuple_value_;
    std::vector<std::vector<std::size_t>> var_of_;
    std::vector<agent_id> var_agent_;
    std::vector<std::size_t> var_class_;
    std::vector<std::vector<std::size_t>> var_scheds_;
    std::vector<std::vector<std::size_t>> sched_vars_;
    std::vector<std::vector<std::size_t>> sched_tuples_;

    std::vector<std::vector<char>> dom_;
    std::vector<std::size_t> dom_size_;
    std::vector<std::vector<char>> alive_;
    std::vector<std::size_t> alive_count_;
    std::vector<char> queued_;
    std::vector<std::size_t> weight_;
    std::vector<std::size_t> queue_;
    std::vector<trail_entry> trail_;
    std::vector<std::size_t> solution_;
    search_stats stats_;
};

inline void check_dimensions(const inputless_task& task, std::size_t n, std::size_t rounds)
{
    if (task.n() != n || task.rounds() != rounds) {
        throw std::invalid_argument("task '" + task.name() + "' is defined for n=" + std::to_string(task.n())
                                    + ", rounds=" + std::to_string(task.rounds()) + "; asked for n="
                                    + std::to_string(n) + ", rounds=" + std::to_string(rounds));
    }
}

inline std::vector<std::size_t> all_indices(std::size_t count)
{
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = k;
    }
    return out;
}

} // namespace detail

/// Outcome of checking a decision map through the simulator.
struct certificate_check {
    bool respects_delta = false;
    bool model_morphism = false;
    /// Schedules whose induced tuple is not allowed.
    std::vector<std::size_t> violations;
    /// Simplicial map from the protocol complex to the output complex
    /// (projection of the morphism onto the output frame), when both frames are proper.
    std::optional<simplicial_map> simplicial;

    bool ok() const noexcept { return respects_delta && model_morphism; }
};

/// Re-derives every process's final state by simulation (not from views),
/// reads its decision from `dm`, and checks each schedule's tuple against
/// Delta. Also checks the induced map is a Kripke model morphism into the
/// output model and projects it to a chromatic simplicial map.
/// Throws certificate_error if `dm` misses a reachable state or names an unreachable one.
inline certificate_check check_certificate(const inputless_task& task, std::size_t n, std::size_t rounds,
                                           const decision_map& dm, const abstraction& g = {},
                                           std::size_t threads = 1)
{
    detail::check_dimensions(task, n, rounds);
    if (dm.n != n || dm.rounds != rounds || dm.agents.size() != n + 1) {
        throw certificate_error("decision map dimensions do not match the task");
    }
    const auto& schedules = task.schedules();
    const auto runs = sim::run_all(schedules, g, threads);

    std::vector<std::map<local_state, std::int64_t>> lookup(n + 1);
    for (agent_id a = 0; a <= n; ++a) {
        for (const auto& e : dm.agents[a]) {
            if (!lookup[a].emplace(e.state, e.value).second) {
                throw certificate_error("decision map lists state " + e.state.text + " twice for process "
                                        + std::to_string(a));
            }
        }
    }

    certificate_check out;
    std::vector<std::vector<std::size_t>> parts(n + 1, std::vector<std::size_t>(schedules.size()));
    std::vector<std::map<local_state, std::size_t>> class_ids(n + 1);
    std::vector<std::size_t> chosen(schedules.size(), product_update_result::npos);
    for (std::size_t k = 0; k < schedules.size(); ++k) {
        output_tuple t;
        for (agent_id a = 0; a <= n; ++a) {
            const local_state& s = runs[k].final_states[a];
            auto it = lookup[a].find(s);
            if (it == lookup[a].end()) {
                throw certificate_error("decision map is partial: no value for process " + std::to_string(a)
                                        + " in state " + s.text);
            }
            t.push_back(it->second);
            parts[a][k] = class_ids[a].try_emplace(s, class_ids[a].size()).first->second;
        }
        auto idx = task.output().find(t);
        if (idx && task.allows(k, *idx)) {
            chosen[k] = *idx;
        } else {
            out.violations.push_back(k);
        }
    }
    for (agent_id a = 0; a <= n; ++a) {
        if (class_ids[a].size() != lookup[a].size()) {
            throw certificate_error("decision map names states of process " + std::to_string(a)
                                    + " that no run reaches");
        }
    }
    out.respects_delta = out.violations.empty();
    if (!out.respects_delta) {
        return out;
    }

    const kripke_model input = input_model(n, rounds);
    const kripke_model protocol(kripke_frame(schedules.size(), n + 1, std::move(parts)), input.ap(),
                                input.valuation(), input.state_labels());
    const auto target = output_model(task);
    frame_morphism h(schedules.size());
    for (std::size_t k = 0; k < schedules.size(); ++k) {
        h[k] = *target.state_of(k, chosen[k]);
    }
    out.model_morphism = is_model_morphism(h, protocol, target.model) && preserves_valuation(h, protocol, target.model);
    if (out.model_morphism && is_proper(protocol.frame())) {
        out.simplicial = morphism_to_simplicial(compose(target.projection_right(), h), protocol.frame(),
                                                task.output().frame());
    }
    return out;
}

inline bool verify_certificate(const inputless_task& task, std::size_t n, std::size_t rounds, const decision_map& dm,
                               const abstraction& g = {})
{
    return check_certificate(task, n, rounds, dm, g).ok();
}

/// Every Solvable verdict has passed check_certificate before it is returned.
inline verdict solve(const inputless_task& task, std::size_t n, std::size_t rounds, const abstraction& g = {})
{
    detail::check_dimensions(task, n, rounds);
    const auto schedules = task.schedules();
    const auto states = protocol_final_states(schedules, g);
    const action_model protocol = protocol_action_model(n, rounds, g);
    const kripke_frame& frame = protocol.frame();

    detail::decision_search search(task, frame, detail::all_indices(schedules.size()));
    const auto solution = search.run();
    verdict out;
    out.stats = search.stats();
    if (!solution) {
        return out;
    }
    decision_map dm{n, rounds, std::vector<std::vector<decision_entry>>(n + 1)};
    for (agent_id a = 0; a <= n; ++a) {
        for (std::size_t c = 0; c < frame.class_count(a); ++c) {
            const std::size_t x = search.variable(a, c);
            dm.agents[a].push_back({states[frame.members(a, c).front()][a], search.value(x, (*solution)[x])});
        }
    }
    if (!check_certificate(task, n, rounds, dm, g).ok()) {
        throw std::logic_error("solve: certificate failed independent verification");
    }
    out.solvable = true;
    out.certificate = std::move(dm);
    return out;
}

/// Turns a decision map for a coarser protocol into one for the full
/// information protocol: a full-information class is sent to the value of the
/// abstracted state it determines.
inline decision_map lift_certificate(const inputless_task& task, const decision_map& coarse, const abstraction& g)
{
    const auto& schedules = task.schedules();
    const auto fine = protocol_final_states(schedules);
    const auto abstracted = protocol_final_states(schedules, g);
    decision_map out{coarse.n, coarse.rounds, std::vector<std::vector<decision_entry>>(coarse.n + 1)};
    for (agent_id a = 0; a <= coarse.n; ++a) {
        std::map<local_state, std::int64_t> seen;
        for (std::size_t k = 0; k < schedules.size(); ++k) {
            auto v = coarse.value_for(a, abstracted[k][a]);
            if (!v) {
                throw certificate_error("lift_certificate: coarse map misses state " + abstracted[k][a].text);
            }
            if (seen.emplace(fine[k][a], *v).second) {
                out.agents[a].push_back({fine[k][a], *v});
            }
        }
    }
    return out;
}

struct solve_report {
    std::string task;
    std::size_t n = 0;
    std::size_t rounds = 1;
    verdict result;
    std::size_t state_count = 0;
    std::vector<std::size_t> class_counts;
    /// Per process, the local state naming each view class, in class order.
    std::vector<std::vector<std::string>> class_inventory;
    /// For an unsolvable task: schedules that alone admit no decision map and
    /// lose that property when any one of them is dropped.
    std::vector<std::string> conflict_core;
};

/// Smallest-by-inclusion schedule set (greedy, canonical order) that is
/// already unsolvable. Empty if the full task is solvable.
inline std::vector<std::size_t> conflict_core(const inputless_task& task, const kripke_frame& protocol)
{
    std::vector<std::size_t> core = detail::all_indices(task.schedules().size());
    if (detail::decision_search(task, protocol, core).run()) {
        return {};
    }
    for (std::size_t i = 0; i < core.size();) {
        std::vector<std::size_t> trial = core;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (!detail::decision_search(task, protocol, trial).run()) {
            core = std::move(trial);
        } else {
            ++i;
        }
    }
    return core;
}

inline solve_report make_solve_report(const inputless_task& task, std::size_t n, std::size_t rounds,
                                      const abstraction& g = {})
{
    solve_report rep;
    rep.task = task.name();
    rep.n = n;
    rep.rounds = rounds;
    rep.result = solve(task, n, rounds, g);
    const action_model protocol = protocol_action_model(n, rounds, g);
    const auto states = protocol_final_states(task.schedules(), g);
    rep.state_count = protocol.point_count();
    for (agent_id a = 0; a <= n; ++a) {
        rep.class_counts.push_back(protocol.frame().class_count(a));
        rep.class_inventory.emplace_back();
        for (std::size_t c = 0; c < protocol.frame().class_count(a); ++c) {
            rep.class_inventory[a].push_back(states[protocol.frame().members(a, c).front()][a].text);
        }
    }
    if (!rep.result.solvable) {
        for (std::size_t k : conflict_core(task, protocol.frame())) {
            rep.conflict_core.push_back(task.schedules()[k].to_string());
        }
    }
    return rep;
}

} // namespace epikit
