#pragma once

// Inputless tasks <G0, Gout, Delta>: the output frame, the relation Delta from
// schedules to allowed output tuples, the task action model and the output
// model, plus the built-in task library.

#include "epikit/kernel.hpp"
#include "epikit/logic.hpp"
#include "epikit/schedules.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epikit {

/// One decided value per process.
using output_tuple = std::vector<std::int64_t>;

inline std::string to_string(const output_tuple& t)
{
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += (i ? "," : "") + std::to_string(t[i]);
    }
    return out + ")";
}

/// Output tuples and the frame they induce: u ~i v iff both tuples give
/// process i the same value.
class output_frame {
public:
    output_frame() = default;

    output_frame(std::size_t processes, std::vector<output_tuple> tuples) : tuples_(std::move(tuples))
    {
        if (tuples_.empty()) {
            throw std::invalid_argument("output_frame: no output tuples");
        }
        std::set<output_tuple> seen;
        for (const auto& t : tuples_) {
            if (t.size() != processes) {
                throw std::invalid_argument("output_frame: tuple " + to_string(t) + " has wrong arity");
            }
            if (!seen.insert(t).second) {
                throw std::invalid_argument("output_frame: duplicate tuple " + to_string(t));
            }
        }
        std::vector<std::vector<std::size_t>> parts(processes, std::vector<std::size_t>(tuples_.size()));
        for (agent_id a = 0; a < processes; ++a) {
            std::map<std::int64_t, std::size_t> ids;
            for (std::size_t k = 0; k < tuples_.size(); ++k) {
                parts[a][k] = ids.try_emplace(tuples_[k][a], ids.size()).first->second;
            }
        }
        frame_ = kripke_frame(tuples_.size(), processes, std::move(parts));
    }

    const std::vector<output_tuple>& tuples() const noexcept { return tuples_; }
    const kripke_frame& frame() const noexcept { return frame_; }

    std::optional<std::size_t> find(const output_tuple& t) const
    {
        auto it = std::find(tuples_.begin(), tuples_.end(), t);
        if (it == tuples_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - tuples_.begin());
    }

private:
    std::vector<output_tuple> tuples_;
    kripke_frame frame_;
};

using task_predicate = std::function<bool(const schedule&, const output_tuple&)>;

class inputless_task {
public:
    inputless_task() = default;

    /// `delta[k]` lists the tuple indices allowed for schedule k of IIS_N.
    inputless_task(std::string name, std::size_t n, std::size_t rounds, std::vector<output_tuple> tuples,
                   std::vector<std::vector<std::size_t>> delta, std::map<std::int64_t, std::string> value_labels = {})
        : name_(std::move(name)), n_(n), rounds_(rounds), schedules_(enum_schedules(n, rounds)),
          output_(n + 1, std::move(tuples)), delta_(std::move(delta)), labels_(std::move(value_labels))
    {
        if (delta_.size() != schedules_.size()) {
            throw std::invalid_argument("inputless_task: delta lists " + std::to_string(delta_.size())
                                        + " schedules, IIS has " + std::to_string(schedules_.size()));
        }
        for (auto& allowed : delta_) {
            std::sort(allowed.begin(), allowed.end());
            allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
            if (!allowed.empty() && allowed.back() >= output_.tuples().size()) {
                throw std::out_of_range("inputless_task: tuple index out of range in delta");
            }
        }
    }

    /// Enumerates Delta eagerly from a predicate over (schedule, tuple).
    static inputless_task from_predicate(std::string name, std::size_t n, std::size_t rounds,
                                         std::vector<output_tuple> tuples, const task_predicate& allowed,
                                         std::map<std::int64_t, std::string> value_labels = {})
    {
        const auto schedules = enum_schedules(n, rounds);
        std::vector<std::vector<std::size_t>> delta(schedules.size());
        for (std::size_t k = 0; k < schedules.size(); ++k) {
            for (std::size_t t = 0; t < tuples.size(); ++t) {
                if (allowed(schedules[k], tuples[t])) {
                    delta[k].push_back(t);
                }
            }
        }
        return inputless_task(std::move(name), n, rounds, std::move(tuples), std::move(delta),
                              std::move(value_labels));
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t process_count() const noexcept { return n_ + 1; }
    std::size_t rounds() const noexcept { return rounds_; }
    const std::vector<schedule>& schedules() const noexcept { return schedules_; }
    const output_frame& output() const noexcept { return output_; }
    const std::vector<output_tuple>& tuples() const noexcept { return output_.tuples(); }
    const std::vector<std::size_t>& delta(std::size_t sched) const { return delta_.at(sched); }
    const std::vector<std::vector<std::size_t>>& delta() const noexcept { return delta_; }

    bool allows(std::size_t sched, std::size_t tuple) const
    {
        const auto& d = delta_.at(sched);
        return std::binary_search(d.begin(), d.end(), tuple);
    }

    /// Schedules with an empty Delta; any of them makes the task unsolvable.
    std::vector<std::size_t> unsatisfiable_schedules() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < delta_.size(); ++k) {
            if (delta_[k].empty()) {
                out.push_back(k);
            }
        }
        return out;
    }

    std::string value_text(std::int64_t v) const
    {
        auto it = labels_.find(v);
        return it == labels_.end() ? std::to_string(v) : it->second;
    }

    const std::map<std::int64_t, std::string>& value_labels() const noexcept { return labels_; }

private:
    std::string name_;
    std::size_t n_ = 0;
    std::size_t rounds_ = 1;
    std::vector<schedule> schedules_;
    output_frame output_;
    std::vector<std::vector<std::size_t>> delta_;
    std::map<std::int64_t, std::string> labels_;
};

/// Action model whose frame is the output frame; tuple t is enabled exactly
/// at the input states (schedules) whose Delta contains t.
inline action_model task_action_model(const inputless_task& task)
{
    const auto empty = task.unsatisfiable_schedules();
    if (!empty.empty()) {
        std::string list;
        for (std::size_t k : empty) {
            list += (list.empty() ? "" : ", ") + task.schedules()[k].to_string();
        }
        throw std::invalid_argument("task_action_model: Delta is empty for schedule(s) " + list);
    }
    std::vector<std::vector<state_id>> enabled(task.tuples().size());
    for (std::size_t k = 0; k < task.schedules().size(); ++k) {
        for (std::size_t t : task.delta(k)) {
            enabled[t].push_back(k);
        }
    }
    std::vector<precondition> pre;
    std::vector<std::string> labels;
    for (std::size_t t = 0; t < task.tuples().size(); ++t) {
        pre.push_back(precondition::enabled_at(std::move(enabled[t])));
        labels.push_back(to_string(task.tuples()[t]));
    }
    return action_model(task.output().frame(), std::move(pre), std::move(labels));
}

/// I[T]: states are pairs (schedule, tuple) with tuple in Delta(schedule).
inline product_update_result output_model(const inputless_task& task)
{
    return product_update(input_model(task.n(), task.rounds()), task_action_model(task));
}

namespace detail {

inline std::vector<output_tuple> binary_tuples(std::size_t processes, std::size_t min_ones, std::size_t max_ones)
{
    std::vector<output_tuple> out;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << processes); ++bits) {
        output_tuple t(processes);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < processes; ++i) {
            // Process 0 is the most significant digit, so tuples come out lexicographically.
            t[i] = static_cast<std::int64_t>(bits >> (processes - 1 - i) & 1U);
            ones += static_cast<std::size_t>(t[i]);
        }
        if (ones >= min_ones && ones <= max_ones) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

inline std::int64_t set_code(const agent_set& s)
{
    std::int64_t code = 0;
    for (agent_id a : s) {
        code |= std::int64_t{1} << a;
    }
    return code;
}

} // namespace detail

/// Exactly one process outputs 1; a process that hears from nobody else must
/// output 1.
inline inputless_task testset_task(std::size_t n, std::size_t rounds)
{
    return inputless_task::from_predicate(
        "testset", n, rounds, detail::binary_tuples(n + 1, 1, 1), [](const schedule& sc, const output_tuple& t) {
            for (agent_id i = 0; i < t.size(); ++i) {
                if (heard_of(i, sc) == agent_set{i} && t[i] != 1) {
                    return false;
                }
            }
            return true;
        });
}

/// Three processes; one or two output 1. A process that hears from nobody
/// else outputs 1; two processes that never hear from the third both output 1
/// and the third outputs 0.
inline inputless_task two_testset_task(std::size_t rounds)
{
    return inputless_task::from_predicate(
        "two_testset", 2, rounds, detail::binary_tuples(3, 1, 2), [](const schedule& sc, const output_tuple& t) {
            std::vector<agent_set> heard;
            for (agent_id i = 0; i < 3; ++i) {
                heard.push_back(heard_of(i, sc));
            }
            for (agent_id i = 0; i < 3; ++i) {
                if (heard[i] == agent_set{i} && t[i] != 1) {
                    return false;
                }
            }
            for (agent_id i = 0; i < 3; ++i) {
                for (agent_id j = i + 1; j < 3; ++j) {
                    const agent_id k = 3 - i - j;
                    auto excludes_k = [&](const agent_set& s) { return std::find(s.begin(), s.end(), k) == s.end(); };
                    if (excludes_k(heard[i]) && excludes_k(heard[j]) && (t[i] != 1 || t[j] != 1 || t[k] != 0)) {
                        return false;
                    }
                }
            }
            return true;
        });
}

/// Each process outputs the set of processes it saw in the last round; the
/// only allowed tuple for a schedule is its own view tuple.
inline inputless_task snapshot_task(std::size_t n, std::size_t rounds)
{
    auto view_tuple = [](const schedule& sc) {
        output_tuple t;
        for (agent_id i = 0; i < sc.process_count(); ++i) {
            t.push_back(detail::set_code(view1(i, sc.round(sc.round_count() - 1))));
        }
        return t;
    };
    std::vector<output_tuple> tuples;
    std::map<std::int64_t, std::string> labels;
    for (const auto& act : enum_block_actions(n)) {
        const output_tuple t = view_tuple(schedule({act}));
        if (std::find(tuples.begin(), tuples.end(), t) == tuples.end()) {
            tuples.push_back(t);
        }
        for (agent_id i = 0; i <= n; ++i) {
            labels[t[i]] = to_string(view1(i, act));
        }
    }
    return inputless_task::from_predicate(
        "snapshot", n, rounds, std::move(tuples),
        [view_tuple](const schedule& sc, const output_tuple& t) { return view_tuple(sc) == t; }, std::move(labels));
}

/// `testset`, `two_testset` (or `two-testset`), `snapshot`.
inline inputless_task builtin_task(const std::string& name, std::size_t n, std::size_t rounds)
{
    if (name == "testset") {
        return testset_task(n, rounds);
    }
    if (name == "two_testset" || name == "two-testset") {
        if (n != 2) {
            throw std::invalid_argument("two_testset is defined for exactly 3 processes (n = 2)");
        }
        return two_testset_task(rounds);
    }
    if (name == "snapshot") {
        return snapshot_task(n, rounds);
    }
    throw std::invalid_argument("unknown task '" + name + "' (expected testset, two_testset or snapshot)");
}

} // namespace epikit
