// epikit command-line front end.
//
// Exit codes: 0 success (or Solvable / formula true), 2 Unsolvable (or formula
// false), 1 any error.

#include "epikit/epikit.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace epikit;
using io::json;

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_negative = 2;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct options {
    std::size_t n = 2;
    std::size_t rounds = 1;
    std::size_t max_n = 5;
    std::optional<std::size_t> run_n; // run takes n from the schedule
    std::string task;
    std::string task_file;
    std::string schedule_text;
    std::string formula_text;
    std::string state;
    std::string model_file;
    std::string kind;
    std::string input;
    std::string dot;
    std::string json_out;
    std::string certificate;
    std::string verify;
    std::string report;
    bool want_dot = false;
    bool want_json = false;
    bool want_report = false;
};

std::size_t worker_count()
{
    std::size_t hw = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EPIKIT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) {
                return std::min<std::size_t>(static_cast<std::size_t>(v), hw);
            }
        } catch (const std::exception&) {
        }
        throw usage_error(std::string("EPIKIT_THREADS must be a positive integer, got '") + env + "'");
    }
    return hw;
}

double fubini(std::size_t k)
{
    // a(m) = sum_{i=1..m} C(m,i) a(m-i)
    std::vector<double> a(k + 1, 0.0);
    a[0] = 1;
    for (std::size_t m = 1; m <= k; ++m) {
        double binom = 1;
        for (std::size_t i = 1; i <= m; ++i) {
            binom = binom * static_cast<double>(m - i + 1) / static_cast<double>(i);
            a[m] += binom * a[m - i];
        }
    }
    return a[k];
}

void check_size(std::size_t n, std::size_t rounds, std::size_t max_n)
{
    if (rounds == 0) {
        throw usage_error("--rounds must be at least 1");
    }
    if (n > max_n) {
        std::ostringstream msg;
        msg.precision(4);
        const double actions = fubini(n + 1);
        msg << "refusing n=" << n << " (cap " << max_n << "): " << n + 1 << " processes give " << actions
            << " block actions and about " << std::pow(actions, static_cast<double>(rounds)) << " schedules for "
            << rounds << " round(s); pass --max-n-override " << n << " to proceed";
        throw usage_error(msg.str());
    }
}

void check_size(const options& o) { check_size(o.n, o.rounds, o.max_n); }

void write_output(const std::string& target, const std::string& text)
{
    if (target.empty() || target == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + target + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + target + "' failed");
    }
}

json read_json(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

inputless_task load_task(const options& o)
{
    if (!o.task.empty() && !o.task_file.empty()) {
        throw usage_error("give either --task or --task-file, not both");
    }
    if (!o.task_file.empty()) {
        auto t = io::task_from_json(read_json(o.task_file));
        check_size(t.n(), t.rounds(), o.max_n);
        return t;
    }
    if (o.task.empty()) {
        throw usage_error("a task is required (--task testset|two-testset|snapshot or --task-file)");
    }
    check_size(o);
    return builtin_task(o.task, o.n, o.rounds);
}

bool has_task(const options& o) { return !o.task.empty() || !o.task_file.empty(); }

// Kripke model selected by --kind (input | protocol | output) or loaded from --model-file.
kripke_model select_model(const options& o)
{
    if (!o.model_file.empty()) {
        return io::model_from_json(read_json(o.model_file));
    }
    const std::string kind = o.kind.empty() ? (has_task(o) ? "output" : "protocol") : o.kind;
    if (kind == "input") {
        check_size(o);
        return input_model(o.n, o.rounds);
    }
    if (kind == "protocol") {
        check_size(o);
        return protocol_model(o.n, o.rounds).model;
    }
    if (kind == "output") {
        const auto task = load_task(o);
        return output_model(task).model;
    }
    throw usage_error("unknown --kind '" + kind + "' (expected input, protocol or output)");
}

int cmd_schedules(const options& o)
{
    check_size(o);
    const auto all = enum_schedules(o.n, o.rounds);
    if (o.want_json) {
        json arr = json::array();
        for (const auto& sc : all) {
            arr.push_back(io::to_json(sc));
        }
        write_output(o.json_out, dump(arr));
        return exit_ok;
    }
    std::string text;
    for (const auto& sc : all) {
        text += sc.to_string() + "\n";
    }
    std::cout << text;
    return exit_ok;
}

int cmd_run(const options& o)
{
    if (o.schedule_text.empty()) {
        throw usage_error("run needs --schedule");
    }
    const schedule sc = parse_schedule(o.schedule_text);
    if (o.run_n && *o.run_n + 1 != sc.process_count()) {
        throw usage_error("--n " + std::to_string(*o.run_n) + " does not match the schedule, which has "
                          + std::to_string(sc.process_count()) + " processes");
    }
    check_size(sc.process_count() - 1, sc.round_count(), o.max_n);
    const auto rec = sim::run(sc);
    if (o.want_json) {
        write_output(o.json_out, dump(io::to_json(rec)));
    } else {
        std::cout << sim::format_trace(rec);
    }
    return exit_ok;
}

// Protocol complex, or the output complex when a task is given.
int cmd_complex(const options& o)
{
    chromatic_complex cx;
    std::vector<std::string> labels;
    if (has_task(o)) {
        const auto task = load_task(o);
        cx = frame_to_complex(task.output().frame(), [&](agent_id a, std::size_t c) {
            const auto& fr = task.output().frame();
            return std::to_string(a) + ":" + task.value_text(task.tuples()[fr.members(a, c).front()][a]);
        });
        for (const auto& t : task.tuples()) {
            labels.push_back(to_string(t));
        }
    } else {
        check_size(o);
        const auto pm = protocol_model(o.n, o.rounds);
        const auto states = protocol_final_states(enum_schedules(o.n, o.rounds));
        const auto& fr = pm.model.frame();
        cx = frame_to_complex(fr, [&](agent_id a, std::size_t c) { return states[fr.members(a, c).front()][a].text; });
        labels = pm.model.state_labels();
    }
    bool wrote = false;
    if (o.want_dot) {
        write_output(o.dot, io::to_dot(cx, labels));
        wrote = true;
    }
    if (o.want_json) {
        write_output(o.json_out, dump(io::to_json(cx)));
        wrote = true;
    }
    if (!wrote) {
        std::cout << "facets " << cx.facets().size() << "\n";
        for (agent_id a = 0; a < cx.color_count(); ++a) {
            std::cout << "vertices[" << a << "] " << cx.vertex_count(a) << "\n";
        }
    }
    return exit_ok;
}

int cmd_model(const options& o)
{
    const kripke_model m = select_model(o);
    bool wrote = false;
    if (o.want_dot) {
        write_output(o.dot, io::to_dot(m.frame(), m.state_labels()));
        wrote = true;
    }
    if (o.want_json) {
        write_output(o.json_out, dump(io::to_json(m)));
        wrote = true;
    }
    if (!wrote) {
        std::cout << "states " << m.state_count() << "\n";
        for (agent_id a = 0; a < m.frame().agent_count(); ++a) {
            std::cout << "classes[" << a << "] " << m.frame().class_count(a) << "\n";
        }
        std::cout << "atoms " << m.ap().size() << "\n";
    }
    return exit_ok;
}

state_id resolve_state(const kripke_model& m, const std::string& text)
{
    if (auto s = m.find_state(text)) {
        return *s;
    }
    try {
        if (auto s = m.find_state(parse_schedule(text).to_string())) {
            return *s;
        }
    } catch (const std::invalid_argument&) {
    }
    if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        const auto idx = std::stoull(text);
        if (idx < m.state_count()) {
            return idx;
        }
    }
    throw usage_error("unknown state '" + text + "'");
}

int cmd_mc(const options& o)
{
    if (o.formula_text.empty() || o.state.empty()) {
        throw usage_error("mc needs --state and --formula");
    }
    const kripke_model m = select_model(o);
    const state_id s = resolve_state(m, o.state);
    const formula f = [&] {
        try {
            return parse_formula(o.formula_text, m.ap());
        } catch (const parse_error& e) {
            throw usage_error(std::string("formula: ") + e.what());
        }
    }();
    const auto truth = eval_all(m, f);
    std::cout << (truth[s] ? "true" : "false") << "\n";
    if (!truth[s] && f.type() == formula::kind::knows) {
        const agent_id a = f.agent();
        const auto inner = eval_all(m, f.left());
        for (state_id t : m.frame().members(a, m.frame().class_of(a, s))) {
            if (!inner[t]) {
                std::cout << "witness " << m.state_name(t) << "\n";
                break;
            }
        }
    }
    return truth[s] ? exit_ok : exit_negative;
}

int cmd_check(const options& o)
{
    const auto task = load_task(o);
    const std::size_t threads = worker_count();

    if (!o.verify.empty()) {
        const auto dm = io::decision_map_from_json(read_json(o.verify));
        const auto res = check_certificate(task, task.n(), task.rounds(), dm, {}, threads);
        if (res.ok()) {
            std::cout << "certificate valid\n";
            return exit_ok;
        }
        std::cout << "certificate invalid\n";
        for (std::size_t k : res.violations) {
            std::cout << "violation " << task.schedules()[k].to_string() << "\n";
        }
        return exit_negative;
    }

    const auto rep = make_solve_report(task, task.n(), task.rounds());
    std::cout << (rep.result.solvable ? "Solvable" : "Unsolvable") << "\n";
    std::cout << "states " << rep.state_count << " nodes " << rep.result.stats.nodes << " backtracks "
              << rep.result.stats.backtracks << "\n";
    if (!rep.result.solvable) {
        for (const auto& sc : rep.conflict_core) {
            std::cout << "core " << sc << "\n";
        }
    }
    if (!o.certificate.empty()) {
        if (!rep.result.certificate) {
            throw std::runtime_error("no certificate to write: task is unsolvable");
        }
        write_output(o.certificate, dump(io::to_json(*rep.result.certificate)));
    }
    if (o.want_report) {
        write_output(o.report, dump(io::to_json(rep)));
    }
    return rep.result.solvable ? exit_ok : exit_negative;
}

// Re-serialises a JSON file (type detected from its keys) or a built-in object.
int cmd_export(const options& o)
{
    std::optional<std::string> dot_text;
    json out;
    if (!o.input.empty()) {
        const json in = read_json(o.input);
        if (in.contains("facets")) {
            const auto cx = io::complex_from_json(in);
            out = io::to_json(cx);
            dot_text = io::to_dot(cx);
        } else if (in.contains("valuation")) {
            const auto m = io::model_from_json(in);
            out = io::to_json(m);
            dot_text = io::to_dot(m.frame(), m.state_labels());
        } else if (in.contains("partitions")) {
            const auto f = io::frame_from_json(in);
            out = io::to_json(f);
            dot_text = io::to_dot(f);
        } else if (in.contains("delta")) {
            out = io::to_json(io::task_from_json(in));
        } else if (in.contains("rounds") && in.at("rounds").is_array()) {
            out = io::to_json(io::schedule_from_json(in));
        } else if (in.contains("agents") && in.contains("N")) {
            out = io::to_json(io::decision_map_from_json(in));
        } else {
            throw usage_error("cannot tell what '" + o.input + "' contains");
        }
    } else {
        const std::string kind = o.kind.empty() ? "protocol" : o.kind;
        if (kind == "input" || kind == "protocol" || kind == "output") {
            const auto m = select_model(o);
            out = io::to_json(m);
            dot_text = io::to_dot(m.frame(), m.state_labels());
        } else if (kind == "frame") {
            options p = o;
            p.kind = has_task(o) ? "output" : "protocol";
            const auto m = select_model(p);
            out = io::to_json(m.frame());
            dot_text = io::to_dot(m.frame(), m.state_labels());
        } else if (kind == "complex") {
            return cmd_complex(o);
        } else if (kind == "task") {
            out = io::to_json(load_task(o));
        } else if (kind == "schedule") {
            if (o.schedule_text.empty()) {
                throw usage_error("--kind schedule needs --schedule");
            }
            out = io::to_json(parse_schedule(o.schedule_text));
        } else {
            throw usage_error("unknown --kind '" + kind
                              + "' (expected input, protocol, output, frame, complex, task or schedule)");
        }
    }
    if (o.want_dot) {
        if (!dot_text) {
            throw usage_error("this object has no DOT form");
        }
        write_output(o.dot, *dot_text);
    }
    if (o.want_json || !o.want_dot) {
        write_output(o.json_out, dump(out));
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    options o;
    CLI::App app{"epikit: epistemic models of iterated immediate snapshot"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "epikit 0.1.0");

    auto add_size = [&](CLI::App* sub) {
        sub->add_option("--n", o.n, "processes are 0..n")->check(CLI::NonNegativeNumber);
        sub->add_option("--rounds", o.rounds, "number of IIS rounds")->check(CLI::PositiveNumber);
        sub->add_option("--max-n-override", o.max_n, "raise the cap on n (default 5)");
    };
    auto add_task = [&](CLI::App* sub) {
        sub->add_option("--task", o.task, "testset | two-testset | snapshot");
        sub->add_option("--task-file", o.task_file, "task JSON file")->check(CLI::ExistingFile);
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--kind", o.kind, "input | protocol | output");
        sub->add_option("--model-file", o.model_file, "model JSON file")->check(CLI::ExistingFile);
    };
    auto add_outputs = [&](CLI::App* sub, bool dot) {
        sub->add_option("--json", o.json_out, "write JSON (to PATH, or stdout)")
                         ->expected(0, 1)
                         ->default_str("-");
        if (dot) {
            sub->add_option("--dot", o.dot, "write DOT (to PATH, or stdout)")->expected(0, 1)->default_str("-");
        }
    };

    auto* schedules = app.add_subcommand("schedules", "list IIS schedules in canonical order");
    add_size(schedules);
    add_outputs(schedules, false);

    auto* run = app.add_subcommand("run", "simulate one schedule and print the trace");
    run->add_option("--schedule", o.schedule_text, "e.g. '0|1,2 ; 0,1,2'")->required();
    run->add_option("--n", o.run_n, "optional; must match the schedule");
    run->add_option("--max-n-override", o.max_n, "raise the cap on n (default 5)");
    add_outputs(run, false);

    auto* complex = app.add_subcommand("complex", "protocol complex, or output complex of a task");
    add_size(complex);
    add_task(complex);
    add_outputs(complex, true);

    auto* model = app.add_subcommand("model", "input, protocol or output Kripke model");
    add_size(model);
    add_task(model);
    add_model(model);
    add_outputs(model, true);

    auto* mc = app.add_subcommand("mc", "model-check a formula at a state");
    add_size(mc);
    add_task(mc);
    add_model(mc);
    mc->add_option("--state", o.state, "state name (schedule text) or index")->required();
    mc->add_option("--formula", o.formula_text, "p, !f, (f & g), (f | g), (f -> g), K[i] f")->required();

    auto* check = app.add_subcommand("check", "decide solvability of a task");
    add_size(check);
    add_task(check);
    check->add_option("--certificate", o.certificate, "write the decision map to PATH");
    check->add_option("--verify", o.verify, "verify a decision map from PATH instead of solving")
        ->check(CLI::ExistingFile);
    check->add_option("--report", o.report, "write the JSON report (to PATH, or stdout)")
                       ->expected(0, 1)
                       ->default_str("-");

    auto* exp = app.add_subcommand("export", "serialise an object as JSON or DOT");
    add_size(exp);
    add_task(exp);
    exp->add_option("--kind", o.kind, "input | protocol | output | frame | complex | task | schedule");
    exp->add_option("--model-file", o.model_file, "model JSON file")->check(CLI::ExistingFile);
    exp->add_option("--input", o.input, "re-serialise this JSON file")->check(CLI::ExistingFile);
    exp->add_option("--schedule", o.schedule_text, "schedule for --kind schedule");
    add_outputs(exp, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_error;
    }

    CLI::App* active = app.get_subcommands().front();
    auto given = [&](const char* name) {
        try {
            return active->get_option(name)->count() > 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    };
    o.want_json = given("--json");
    o.want_dot = given("--dot");
    o.want_report = given("--report");

    try {
        if (active == schedules) return cmd_schedules(o);
        if (active == run) return cmd_run(o);
        if (active == complex) return cmd_complex(o);
        if (active == model) return cmd_model(o);
        if (active == mc) return cmd_mc(o);
        if (active == check) return cmd_check(o);
        if (active == exp) return cmd_export(o);
    } catch (const std::exception& e) {
        std::cerr << "epikit: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
