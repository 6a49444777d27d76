#pragma once

// Epistemic formulas, Kripke models, action models and the restricted modal
// product (product update).

#include "epikit/kernel.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace epikit {

class action_model;

class formula {
public:
    enum class kind { top, bottom, atom, negation, conjunction, disjunction, implication, knows, after };

    static formula top() { return formula(make(kind::top)); }
    static formula bottom() { return formula(make(kind::bottom)); }

    static formula atom(std::string name)
    {
        auto n = make(kind::atom);
        n->name = std::move(name);
        return formula(std::move(n));
    }

    static formula negation(formula f) { return unary(kind::negation, std::move(f)); }
    static formula conjunction(formula l, formula r) { return binary(kind::conjunction, std::move(l), std::move(r)); }
    static formula disjunction(formula l, formula r) { return binary(kind::disjunction, std::move(l), std::move(r)); }
    static formula implication(formula l, formula r) { return binary(kind::implication, std::move(l), std::move(r)); }

    static formula knows(agent_id a, formula f)
    {
        auto n = make(kind::knows);
        n->agent = a;
        n->left = std::move(f).node_;
        return formula(std::move(n));
    }

    /// `[(action, point)] f`
    static formula after(std::shared_ptr<const action_model> action, std::size_t point, formula f)
    {
        auto n = make(kind::after);
        n->action = std::move(action);
        n->point = point;
        n->left = std::move(f).node_;
        return formula(std::move(n));
    }

    /// Disjunction of all listed formulas; `bottom` when empty.
    static formula any_of(const std::vector<formula>& fs)
    {
        if (fs.empty()) {
            return bottom();
        }
        formula acc = fs.front();
        for (std::size_t i = 1; i < fs.size(); ++i) {
            acc = disjunction(acc, fs[i]);
        }
        return acc;
    }

    kind type() const noexcept { return node_->type; }
    const std::string& name() const noexcept { return node_->name; }
    agent_id agent() const noexcept { return node_->agent; }
    std::size_t point() const noexcept { return node_->point; }
    const std::shared_ptr<const action_model>& action() const noexcept { return node_->action; }
    formula left() const { return formula(node_->left); }
    formula right() const { return formula(node_->right); }

    /// Identity of the shared node; used to memoise evaluation.
    const void* id() const noexcept { return node_.get(); }

    std::size_t depth() const
    {
        switch (type()) {
        case kind::top:
        case kind::bottom:
        case kind::atom:
            return 0;
        case kind::negation:
            return left().depth();
        case kind::knows:
        case kind::after:
            return left().depth() + 1;
        default:
            return std::max(left().depth(), right().depth());
        }
    }

    std::string to_string() const
    {
        switch (type()) {
        case kind::top: return "true";
        case kind::bottom: return "false";
        case kind::atom: return name();
        case kind::negation: return "!" + left().to_string();
        case kind::conjunction: return "(" + left().to_string() + " & " + right().to_string() + ")";
        case kind::disjunction: return "(" + left().to_string() + " | " + right().to_string() + ")";
        case kind::implication: return "(" + left().to_string() + " -> " + right().to_string() + ")";
        case kind::knows: return "K[" + std::to_string(agent()) + "] " + left().to_string();
        case kind::after: return "[#" + std::to_string(point()) + "] " + left().to_string();
        }
        return {};
    }

    friend bool operator==(const formula& x, const formula& y)
    {
        if (x.node_ == y.node_) {
            return true;
        }
        const node& a = *x.node_;
        const node& b = *y.node_;
        if (a.type != b.type || a.name != b.name || a.agent != b.agent || a.point != b.point
            || a.action != b.action) {
            return false;
        }
        auto same = [](const std::shared_ptr<const node>& l, const std::shared_ptr<const node>& r) {
            return (l == nullptr && r == nullptr)
                   || (l != nullptr && r != nullptr && formula(l) == formula(r));
        };
        return same(a.left, b.left) && same(a.right, b.right);
    }

private:
    struct node {
        kind type = kind::top;
        std::string name;
        agent_id agent = 0;
        std::size_t point = 0;
        std::shared_ptr<const action_model> action;
        std::shared_ptr<const node> left;
        std::shared_ptr<const node> right;
    };

    explicit formula(std::shared_ptr<const node> n) : node_(std::move(n)) {}

    static std::shared_ptr<node> make(kind k)
    {
        auto n = std::make_shared<node>();
        n->type = k;
        return n;
    }

    static formula unary(kind k, formula f)
    {
        auto n = make(k);
        n->left = std::move(f).node_;
        return formula(std::move(n));
    }

    static formula binary(kind k, formula l, formula r)
    {
        auto n = make(k);
        n->left = std::move(l).node_;
        n->right = std::move(r).node_;
        return formula(std::move(n));
    }

    std::shared_ptr<const node> node_;
};

/// Kripke model with a closed-world valuation: an atom is true at a state iff
/// its index is listed for that state.
class kripke_model {
public:
    kripke_model() = default;

    kripke_model(kripke_frame frame, std::vector<std::string> ap,
                 std::vector<std::vector<std::size_t>> valuation,
                 std::vector<std::string> state_labels = {})
        : frame_(std::move(frame)), ap_(std::move(ap)), valuation_(std::move(valuation)),
          labels_(std::move(state_labels))
    {
        if (valuation_.size() != frame_.state_count()) {
            throw std::invalid_argument("kripke_model: valuation covers " + std::to_string(valuation_.size())
                                        + " states, frame has " + std::to_string(frame_.state_count()));
        }
        if (!labels_.empty() && labels_.size() != frame_.state_count()) {
            throw std::invalid_argument("kripke_model: state label count mismatch");
        }
        for (std::size_t i = 0; i < ap_.size(); ++i) {
            if (!index_.emplace(ap_[i], i).second) {
                throw std::invalid_argument("kripke_model: duplicate atom '" + ap_[i] + "'");
            }
        }
        for (auto& atoms : valuation_) {
            std::sort(atoms.begin(), atoms.end());
            atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
            if (!atoms.empty() && atoms.back() >= ap_.size()) {
                throw std::out_of_range("kripke_model: atom index " + std::to_string(atoms.back())
                                        + " outside AP of size " + std::to_string(ap_.size()));
            }
        }
    }

    const kripke_frame& frame() const noexcept { return frame_; }
    const std::vector<std::string>& ap() const noexcept { return ap_; }
    const std::vector<std::vector<std::size_t>>& valuation() const noexcept { return valuation_; }
    const std::vector<std::size_t>& atoms_at(state_id s) const { return valuation_.at(s); }
    std::size_t state_count() const noexcept { return frame_.state_count(); }

    std::optional<std::size_t> atom_index(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    bool holds(std::size_t atom, state_id s) const
    {
        const auto& atoms = valuation_.at(s);
        return std::binary_search(atoms.begin(), atoms.end(), atom);
    }

    bool holds(const std::string& name, state_id s) const
    {
        auto idx = atom_index(name);
        return idx && holds(*idx, s);
    }

    /// Display name of a state: its label when present, else its index.
    std::string state_name(state_id s) const
    {
        return labels_.empty() ? std::to_string(s) : labels_.at(s);
    }

    const std::vector<std::string>& state_labels() const noexcept { return labels_; }

    std::optional<state_id> find_state(const std::string& name) const
    {
        for (state_id s = 0; s < labels_.size(); ++s) {
            if (labels_[s] == name) {
                return s;
            }
        }
        return std::nullopt;
    }

private:
    kripke_frame frame_;
    std::vector<std::string> ap_;
    std::vector<std::vector<std::size_t>> valuation_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Precondition of an action point: either a formula, or the explicit set of
/// states (of the model the action is applied to) where the point is enabled.
class precondition {
public:
    precondition() : formula_(formula::top()) {}

    static precondition of(formula f)
    {
        precondition p;
        p.formula_ = std::move(f);
        return p;
    }

    static precondition enabled_at(std::vector<state_id> states)
    {
        precondition p;
        std::sort(states.begin(), states.end());
        states.erase(std::unique(states.begin(), states.end()), states.end());
        p.states_ = std::move(states);
        return p;
    }

    bool is_state_set() const noexcept { return states_.has_value(); }
    const formula& as_formula() const noexcept { return formula_; }
    const std::vector<state_id>& states() const { return states_.value(); }

    bool enabled_in(state_id s) const
    {
        return std::binary_search(states_->begin(), states_->end(), s);
    }

    bool is_trivially_true() const noexcept
    {
        return !states_ && formula_.type() == formula::kind::top;
    }

private:
    formula formula_;
    std::optional<std::vector<state_id>> states_;
};

class action_model {
public:
    action_model() = default;

    action_model(kripke_frame frame, std::vector<precondition> pre, std::vector<std::string> point_labels = {})
        : frame_(std::move(frame)), pre_(std::move(pre)), labels_(std::move(point_labels))
    {
        if (pre_.size() != frame_.state_count()) {
            throw std::invalid_argument("action_model: one precondition per point required");
        }
        if (!labels_.empty() && labels_.size() != frame_.state_count()) {
            throw std::invalid_argument("action_model: point label count mismatch");
        }
    }

    const kripke_frame& frame() const noexcept { return frame_; }
    std::size_t point_count() const noexcept { return frame_.state_count(); }
    const precondition& pre(std::size_t point) const { return pre_.at(point); }
    const std::vector<precondition>& preconditions() const noexcept { return pre_; }
    const std::vector<std::string>& point_labels() const noexcept { return labels_; }

    std::string point_name(std::size_t p) const
    {
        return labels_.empty() ? std::to_string(p) : labels_.at(p);
    }

private:
    kripke_frame frame_;
    std::vector<precondition> pre_;
    std::vector<std::string> labels_;
};

/// Truth set of `f` over all states of `model`, indexed by state.
inline std::vector<bool> eval_all(const kripke_model& model, const formula& f);

inline bool eval(const kripke_model& model, state_id s, const formula& f)
{
    if (s >= model.state_count()) {
        throw std::out_of_range("eval: state " + std::to_string(s) + " out of range");
    }
    return eval_all(model, f)[s];
}

struct product_update_result {
    kripke_model model;
    /// `pairs[k]` is the (state, point) pair that became state `k`.
    std::vector<std::pair<state_id, std::size_t>> pairs;
    /// `index[s * point_count + t]` is the new state of (s, t), or `npos`.
    std::vector<std::size_t> index;
    std::size_t point_count = 0;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::optional<state_id> state_of(state_id s, std::size_t t) const
    {
        const std::size_t k = index.at(s * point_count + t);
        if (k == npos) {
            return std::nullopt;
        }
        return k;
    }

    /// The model morphism (s, t) -> s back onto the updated model.
    frame_morphism projection() const
    {
        frame_morphism f(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            f[k] = pairs[k].first;
        }
        return f;
    }

    /// (s, t) -> t, onto the action points.
    frame_morphism projection_right() const
    {
        frame_morphism f(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            f[k] = pairs[k].second;
        }
        return f;
    }
};

namespace detail {

inline std::vector<bool> precondition_truth(const kripke_model& model, const precondition& pre)
{
    if (!pre.is_state_set()) {
        return eval_all(model, pre.as_formula());
    }
    std::vector<bool> out(model.state_count(), false);
    for (state_id s : pre.states()) {
        if (s < out.size()) {
            out[s] = true;
        }
    }
    return out;
}

} // namespace detail

/// Restricted modal product M (x) A: pairs (s, t) with pre(t) true at s,
/// related componentwise, valuation copied from s.
inline product_update_result product_update(const kripke_model& m, const action_model& a)
{
    if (m.frame().agent_count() != a.frame().agent_count()) {
        throw std::invalid_argument("product_update: agent counts differ");
    }
    const std::size_t points = a.point_count();
    std::vector<std::vector<bool>> enabled(points);
    std::map<const void*, std::size_t> by_formula;
    for (std::size_t t = 0; t < points; ++t) {
        const precondition& pre = a.pre(t);
        if (!pre.is_state_set()) {
            auto [it, fresh] = by_formula.try_emplace(pre.as_formula().id(), t);
            if (!fresh) {
                enabled[t] = enabled[it->second];
                continue;
            }
        }
        enabled[t] = detail::precondition_truth(m, pre);
    }

    product_update_result out;
    out.point_count = points;
    out.index.assign(m.state_count() * points, product_update_result::npos);
    for (state_id s = 0; s < m.state_count(); ++s) {
        for (std::size_t t = 0; t < points; ++t) {
            if (enabled[t][s]) {
                out.index[s * points + t] = out.pairs.size();
                out.pairs.emplace_back(s, t);
            }
        }
    }

    const std::size_t count = out.pairs.size();
    const std::size_t agents = m.frame().agent_count();
    std::vector<std::vector<std::size_t>> parts(agents, std::vector<std::size_t>(count));
    std::vector<std::vector<std::size_t>> valuation(count);
    std::vector<std::string> labels;
    const bool labelled = !m.state_labels().empty() || !a.point_labels().empty();
    for (std::size_t k = 0; k < count; ++k) {
        const auto [s, t] = out.pairs[k];
        for (agent_id ag = 0; ag < agents; ++ag) {
            parts[ag][k] = m.frame().class_of(ag, s) * a.frame().class_count(ag) + a.frame().class_of(ag, t);
        }
        valuation[k] = m.atoms_at(s);
        if (labelled) {
            labels.push_back("(" + m.state_name(s) + "," + a.point_name(t) + ")");
        }
    }
    out.model = kripke_model(kripke_frame(count, agents, std::move(parts)), m.ap(), std::move(valuation),
                             std::move(labels));
    return out;
}

namespace detail {

class evaluator {
public:
    explicit evaluator(const kripke_model& model) : model_(model) {}

    const std::vector<bool>& truth(const formula& f)
    {
        if (auto it = memo_.find(f.id()); it != memo_.end()) {
            return it->second;
        }
        return memo_.emplace(f.id(), compute(f)).first->second;
    }

private:
    std::vector<bool> compute(const formula& f)
    {
        const std::size_t n = model_.state_count();
        using k = formula::kind;
        switch (f.type()) {
        case k::top:
            return std::vector<bool>(n, true);
        case k::bottom:
            return std::vector<bool>(n, false);
        case k::atom: {
            auto idx = model_.atom_index(f.name());
            if (!idx) {
                throw std::invalid_argument("unknown atom '" + f.name() + "'");
            }
            std::vector<bool> out(n);
            for (state_id s = 0; s < n; ++s) {
                out[s] = model_.holds(*idx, s);
            }
            return out;
        }
        case k::negation: {
            std::vector<bool> out = truth(f.left());
            out.flip();
            return out;
        }
        case k::conjunction:
        case k::disjunction:
        case k::implication: {
            const std::vector<bool> l = truth(f.left());
            const std::vector<bool>& r = truth(f.right());
            std::vector<bool> out(n);
            for (state_id s = 0; s < n; ++s) {
                out[s] = f.type() == k::conjunction   ? (l[s] && r[s])
                         : f.type() == k::disjunction ? (l[s] || r[s])
                                                      : (!l[s] || r[s]);
            }
            return out;
        }
        case k::knows: {
            const agent_id a = f.agent();
            if (a >= model_.frame().agent_count()) {
                throw std::out_of_range("agent " + std::to_string(a) + " out of range");
            }
            const std::vector<bool>& inner = truth(f.left());
            std::vector<bool> out(n);
            for (std::size_t c = 0; c < model_.frame().class_count(a); ++c) {
                const auto& cls = model_.frame().members(a, c);
                const bool all = std::all_of(cls.begin(), cls.end(), [&](state_id s) { return inner[s]; });
                for (state_id s : cls) {
                    out[s] = all;
                }
            }
            return out;
        }
        case k::after: {
            const action_model& act = *f.action();
            if (f.point() >= act.point_count()) {
                throw std::out_of_range("action point " + std::to_string(f.point()) + " out of range");
            }
            const auto updated = product_update(model_, act);
            const std::vector<bool> inner = eval_all(updated.model, f.left());
            std::vector<bool> out(n);
            for (state_id s = 0; s < n; ++s) {
                auto k2 = updated.state_of(s, f.point());
                out[s] = !k2 || inner[*k2];
            }
            return out;
        }
        }
        throw std::logic_error("eval: unhandled formula kind");
    }

    const kripke_model& model_;
    std::unordered_map<const void*, std::vector<bool>> memo_;
};

} // namespace detail

inline std::vector<bool> eval_all(const kripke_model& model, const formula& f)
{
    detail::evaluator ev(model);
    return ev.truth(f);
}

/// Sequential composition A;B. B's preconditions must be `true` or a set of
/// A's points; the pair (a, b) exists iff b is enabled after a, and inherits
/// a's precondition.
inline action_model compose_actions(const action_model& first, const action_model& second)
{
    if (first.frame().agent_count() != second.frame().agent_count()) {
        throw std::invalid_argument("compose_actions: agent counts differ");
    }
    for (const auto& pre : second.preconditions()) {
        if (!pre.is_state_set() && !pre.is_trivially_true()) {
            throw std::invalid_argument(
                "compose_actions: second action model may only use 'true' or point-set preconditions");
        }
    }
    const std::size_t agents = first.frame().agent_count();
    std::vector<std::pair<std::size_t, std::size_t>> points;
    for (std::size_t a = 0; a < first.point_count(); ++a) {
        for (std::size_t b = 0; b < second.point_count(); ++b) {
            const precondition& pre = second.pre(b);
            if (!pre.is_state_set() || pre.enabled_in(a)) {
                points.emplace_back(a, b);
            }
        }
    }
    std::vector<std::vector<std::size_t>> parts(agents, std::vector<std::size_t>(points.size()));
    std::vector<precondition> pre;
    std::vector<std::string> labels;
    const bool labelled = !first.point_labels().empty() || !second.point_labels().empty();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto [a, b] = points[k];
        for (agent_id ag = 0; ag < agents; ++ag) {
            parts[ag][k] = first.frame().class_of(ag, a) * second.frame().class_count(ag)
                           + second.frame().class_of(ag, b);
        }
        pre.push_back(first.pre(a));
        if (labelled) {
            labels.push_back(first.point_name(a) + ";" + second.point_name(b));
        }
    }
    return action_model(kripke_frame(points.size(), agents, std::move(parts)), std::move(pre), std::move(labels));
}

/// Kripke model morphism: frame morphism with L(f(s)) a subset of L(s),
/// atoms compared by name.
inline bool is_model_morphism(const frame_morphism& f, const kripke_model& from, const kripke_model& to)
{
    if (!is_morphism(f, from.frame(), to.frame())) {
        return false;
    }
    for (state_id s = 0; s < f.size(); ++s) {
        for (std::size_t atom : to.atoms_at(f[s])) {
            if (!from.holds(to.ap()[atom], s)) {
                return false;
            }
        }
    }
    return true;
}

/// True iff L(f(s)) = L(s) for every state (by atom name).
inline bool preserves_valuation(const frame_morphism& f, const kripke_model& from, const kripke_model& to)
{
    for (state_id s = 0; s < f.size(); ++s) {
        std::vector<std::string> l, r;
        for (std::size_t atom : from.atoms_at(s)) {
            l.push_back(from.ap()[atom]);
        }
        for (std::size_t atom : to.atoms_at(f.at(s))) {
            r.push_back(to.ap()[atom]);
        }
        std::sort(l.begin(), l.end());
        std::sort(r.begin(), r.end());
        if (l != r) {
            return false;
        }
    }
    return true;
}

/// For every state s: M', f(s) |= K_a phi implies M, s |= K_a phi.
/// `f` must be a model morphism from `from` to `to`.
inline bool knowledge_loss_check(const frame_morphism& f, const kripke_model& from, const kripke_model& to,
                                 const formula& phi, agent_id agent)
{
    if (!is_model_morphism(f, from, to)) {
        throw std::invalid_argument("knowledge_loss_check: map is not a Kripke model morphism");
    }
    const formula k = formula::knows(agent, phi);
    const std::vector<bool> here = eval_all(from, k);
    const std::vector<bool> there = eval_all(to, k);
    for (state_id s = 0; s < f.size(); ++s) {
        if (there[f[s]] && !here[s]) {
            return false;
        }
    }
    return true;
}

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position)
    {
    }
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

// Grammar:
//   f ::= imp
//   imp ::= disj ('->' imp)?
//   disj ::= conj ('|' conj)*
//   conj ::= unary ('&' unary)*
//   unary ::= '!' unary | 'K[' int ']' unary | '(' f ')' | 'true' | 'false' | atom
// Atom names may contain ',', '|' and ';' (schedule atoms); the longest prefix
// naming a known atom wins, so `p|q` still splits when `p` and `q` are atoms.
class formula_parser {
public:
    formula_parser(std::string_view text, const std::vector<std::string>& ap) : text_(text)
    {
        for (const auto& a : ap) {
            atoms_.emplace(a, true);
        }
    }

    formula parse()
    {
        formula f = implication();
        skip();
        if (pos_ != text_.size()) {
            throw parse_error("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        return f;
    }

private:
    static bool atom_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool atom_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ',' || c == '|' || c == ';'
               || c == '.';
    }

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(std::string_view tok)
    {
        skip();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    formula implication()
    {
        formula l = disjunction();
        if (accept("->")) {
            return formula::implication(l, implication());
        }
        return l;
    }

    formula disjunction()
    {
        formula l = conjunction();
        while (accept("|")) {
            l = formula::disjunction(l, conjunction());
        }
        return l;
    }

    formula conjunction()
    {
        formula l = unary();
        while (accept("&")) {
            l = formula::conjunction(l, unary());
        }
        return l;
    }

    formula unary()
    {
        skip();
        if (pos_ >= text_.size()) {
            throw parse_error("unexpected end of formula", pos_);
        }
        if (accept("!")) {
            return formula::negation(unary());
        }
        if (accept("(")) {
            formula f = implication();
            if (!accept(")")) {
                throw parse_error("expected ')'", pos_);
            }
            return f;
        }
        if (text_.substr(pos_, 2) == "K[") {
            pos_ += 2;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            if (start == pos_ || pos_ >= text_.size() || text_[pos_] != ']') {
                throw parse_error("expected agent index in K[...]", start);
            }
            const agent_id a = std::stoul(std::string(text_.substr(start, pos_ - start)));
            ++pos_;
            return formula::knows(a, unary());
        }
        if (!atom_start(text_[pos_])) {
            throw parse_error("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && atom_char(text_[end])) {
            ++end;
        }
        for (std::size_t len = end - start; len > 0; --len) {
            const std::string candidate(text_.substr(start, len));
            if (atoms_.count(candidate) != 0) {
                pos_ = start + len;
                return formula::atom(candidate);
            }
        }
        // Not a known atom: keywords, then the run up to the first operator char.
        std::size_t plain = start;
        while (plain < end && text_[plain] != '|' && text_[plain] != ',' && text_[plain] != ';') {
            ++plain;
        }
        const std::string word(text_.substr(start, plain - start));
        if (word == "true" || word == "false") {
            pos_ = plain;
            return word == "true" ? formula::top() : formula::bottom();
        }
        throw parse_error("unknown atom '" + std::string(text_.substr(start, end - start)) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::unordered_map<std::string, bool> atoms_;
};

} // namespace detail

/// Parses the text syntax `p`, `!f`, `(f & g)`, `(f | g)`, `(f -> g)`,
/// `K[i] f`, `true`, `false` against the atoms of `ap`.
inline formula parse_formula(std::string_view text, const std::vector<std::string>& ap)
{
    return detail::formula_parser(text, ap).parse();
}

} // namespace epikit
