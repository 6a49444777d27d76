#pragma once

// Operational simulator of the iterated immediate snapshot model. Each round
// runs on a fresh single-writer memory array; per concurrency class all members
// write, then all members take an atomic snapshot. The simulator never consults
// views, so it serves as an independent oracle for the action-model relation.

#include "epikit/schedules.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace epikit::sim {

/// One shared array mem_r: cell i is written at most once, by process i only.
class memory_array {
public:
    explicit memory_array(std::size_t processes) : cells_(processes) {}

    void write(agent_id writer, local_state value)
    {
        auto& cell = cells_.at(writer);
        if (cell) {
            throw std::logic_error("memory_array: cell " + std::to_string(writer) + " written twice in one round");
        }
        cell = std::move(value);
    }

    snapshot take_snapshot() const
    {
        snapshot out;
        for (agent_id j = 0; j < cells_.size(); ++j) {
            if (cells_[j]) {
                out.emplace_back(j, *cells_[j]);
            }
        }
        return out;
    }

    const std::vector<std::optional<local_state>>& cells() const noexcept { return cells_; }

private:
    std::vector<std::optional<local_state>> cells_;
};

struct round_record {
    /// `written[i]`: value process i wrote into this round's array.
    std::vector<local_state> written;
    /// `snapshots[i]`: what process i read.
    std::vector<snapshot> snapshots;
    /// Array contents once the round finished.
    memory_array memory{0};
};

struct run_record {
    schedule sched;
    std::vector<round_record> rounds;
    std::vector<local_state> final_states;
};

inline run_record run(const schedule& sc, const abstraction& g = {})
{
    const std::size_t procs = sc.process_count();
    run_record rec;
    rec.sched = sc;
    std::vector<local_state> state(procs);
    for (agent_id a = 0; a < procs; ++a) {
        state[a] = initial_state(a);
    }
    for (std::size_t r = 0; r < sc.round_count(); ++r) {
        round_record rr;
        rr.written.resize(procs);
        rr.snapshots.resize(procs);
        memory_array mem(procs);
        for (const auto& cls : sc.round(r).classes()) {
            for (agent_id a : cls) {
                rr.written[a] = state[a];
                mem.write(a, state[a]);
            }
            for (agent_id a : cls) {
                rr.snapshots[a] = mem.take_snapshot();
            }
        }
        for (agent_id a = 0; a < procs; ++a) {
            state[a] = apply_abstraction(g, r + 1, a, state[a], rr.snapshots[a]);
        }
        rr.memory = std::move(mem);
        rec.rounds.push_back(std::move(rr));
    }
    rec.final_states = std::move(state);
    return rec;
}

/// Process `a` ends in the same local state after `u` and after `v`.
inline bool oracle_indist(agent_id a, const schedule& u, const schedule& v, const abstraction& g = {})
{
    if (u.process_count() != v.process_count() || u.round_count() != v.round_count()) {
        throw std::invalid_argument("oracle_indist: schedules of different shape");
    }
    return run(u, g).final_states.at(a) == run(v, g).final_states.at(a);
}

/// Runs every schedule, splitting the batch over at most `threads` workers.
/// Results come back in input order.
inline std::vector<run_record> run_all(const std::vector<schedule>& schedules, const abstraction& g = {},
                                       std::size_t threads = 1)
{
    std::vector<run_record> out(schedules.size());
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, schedules.size()));
    if (threads == 1) {
        for (std::size_t k = 0; k < schedules.size(); ++k) {
            out[k] = run(schedules[k], g);
        }
        return out;
    }
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t k = w; k < schedules.size(); k += threads) {
                out[k] = run(schedules[k], g);
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    return out;
}

/// Stable, line-oriented trace of a run.
inline std::string format_trace(const run_record& rec)
{
    std::ostringstream os;
    os << "schedule " << rec.sched.to_string() << '\n';
    for (std::size_t r = 0; r < rec.rounds.size(); ++r) {
        const auto& rr = rec.rounds[r];
        os << "round " << r + 1 << " " << rec.sched.round(r).to_string() << '\n';
        for (const auto& cls : rec.sched.round(r).classes()) {
            for (agent_id a : cls) {
                os << "  write " << a << " " << rr.written[a].text << '\n';
            }
            for (agent_id a : cls) {
                os << "  snapshot " << a << " {";
                for (std::size_t i = 0; i < rr.snapshots[a].size(); ++i) {
                    os << (i ? "," : "") << rr.snapshots[a][i].first;
                }
                os << "}\n";
            }
        }
    }
    for (agent_id a = 0; a < rec.final_states.size(); ++a) {
        os << "final " << a << " " << rec.final_states[a].text << '\n';
    }
    return os.str();
}

} // namespace epikit::sim
