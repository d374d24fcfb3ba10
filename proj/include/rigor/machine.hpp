#pragma once

// Interval machine: a flow-graph program over interval variables and stacks.
//
// Program text, one instruction per line, optional "label:" prefix:
//   input X Y            header, exactly once, before any instruction
//   T <- [c1,c2]         constant (c1 <= c2, representable in the backend)
//   T <- A               copy
//   T <- add A B         also sub, mul, div
//   T <- left A          also right, abs
//   T <- pop S
//   push S X
//   br le A B Lyes Lno   also eq, lt, subset; A, B variables or [c1,c2]
//   br empty S Lyes Lno
//   goto L
//   stop Y1 Y2           exactly once
// "#" starts a comment. goto is not a node; it only routes edges.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rigor/expr.hpp"
#include "rigor/interval.hpp"

namespace rigor {

enum class MachineOp { add, sub, mul, div, left, right, abs };
enum class MachinePredicate { eq, lt, le, subset };

// Branch operand: a variable name or a literal interval.
struct MachineOperand {
    std::string var;
    std::optional<std::pair<Rational, Rational>> literal;
};

struct MachineNode {
    enum class Kind { assign_const, assign_var, assign_op, pop, push, branch, empty_test, stop };

    Kind kind;
    std::size_t line = 0;
    std::string target;                   // assignments and pop
    std::pair<Rational, Rational> value;  // assign_const
    MachineOp op = MachineOp::add;        // assign_op
    std::vector<std::string> args;        // assign_var / assign_op sources, push source, stop outputs
    MachinePredicate pred = MachinePredicate::eq;
    std::vector<MachineOperand> operands;  // branch
    std::string stack;                     // push, pop, empty_test
    std::size_t next = 0;                  // successor of non-branching nodes
    std::size_t yes = 0;
    std::size_t no = 0;
};

struct MachineProgram {
    std::vector<std::string> inputs;
    std::vector<MachineNode> nodes;
    std::size_t entry = 0;
    BackendKind backend = BackendKind::f64;
};

// Throws SyntaxError for malformed lines and ValidationError for programs that
// break the structural rules (START/STOP multiplicity, unknown or duplicate
// labels, stack/variable name clash, unreachable nodes, falling off the end,
// c1 > c2, constants not representable in the backend).
MachineProgram parse_program(std::string_view source, BackendKind backend = BackendKind::f64);

// Straight-line program computing e from the variables in params, with x^n
// expanded into repeated products. Throws ValidationError for operations the
// machine lacks (elementary functions, step) or for constants the backend
// cannot represent.
std::string compile_expression(const Expr& e, const std::vector<std::string>& params,
                               BackendKind backend = BackendKind::f64);

template <class B>
struct MachineState {
    static constexpr std::size_t start = static_cast<std::size_t>(-1);

    std::size_t node = start;  // last executed node; start before the first step
    std::map<std::string, Interval<B>> vars;
    std::map<std::string, std::vector<Interval<B>>> stacks;
    std::size_t steps = 0;
};

template <class B>
struct MachineOutcome {
    enum class Kind { halted, undefined, budget_exceeded };

    Kind kind;
    std::vector<Interval<B>> outputs;  // halted, in stop order
    std::string reason;                // undefined
    std::size_t node = 0;              // undefined: offending node
};

namespace detail {

template <class B>
Interval<B> machine_constant(const std::pair<Rational, Rational>& c) {
    return Interval<B>(B::from_rational(c.first, Rounding::down), B::from_rational(c.second, Rounding::up));
}

struct MachineFault {
    std::string reason;
};

template <class B>
const Interval<B>& machine_read(const MachineState<B>& state, const std::string& name) {
    auto it = state.vars.find(name);
    if (it == state.vars.end()) throw MachineFault{"variable '" + name + "' has no value"};
    return it->second;
}

template <class B>
Interval<B> machine_operand(const MachineState<B>& state, const MachineOperand& operand) {
    if (operand.literal) return machine_constant<B>(*operand.literal);
    return machine_read(state, operand.var);
}

// Executes one node and returns the next node index.
template <class B>
std::size_t machine_step(const MachineProgram& p, std::size_t index, MachineState<B>& state) {
    const MachineNode& n = p.nodes[index];
    using K = MachineNode::Kind;
    switch (n.kind) {
        case K::assign_const:
            state.vars.insert_or_assign(n.target, machine_constant<B>(n.value));
            return n.next;
        case K::assign_var:
            state.vars.insert_or_assign(n.target, machine_read(state, n.args[0]));
            return n.next;
        case K::assign_op: {
            const Interval<B>& a = machine_read(state, n.args[0]);
            Interval<B> r;
            switch (n.op) {
                case MachineOp::add: r = add(a, machine_read(state, n.args[1])); break;
                case MachineOp::sub: r = sub(a, machine_read(state, n.args[1])); break;
                case MachineOp::mul: r = mul(a, machine_read(state, n.args[1])); break;
                case MachineOp::div: {
                    const Interval<B>& d = machine_read(state, n.args[1]);
                    if (d.contains_zero()) throw MachineFault{"division by an interval containing zero"};
                    r = div(a, d);
                    break;
                }
                case MachineOp::left: r = left(a); break;
                case MachineOp::right: r = right(a); break;
                case MachineOp::abs: r = abs(a); break;
            }
            state.vars.insert_or_assign(n.target, std::move(r));
            return n.next;
        }
        case K::pop: {
            auto it = state.stacks.find(n.stack);
            if (it == state.stacks.end()) throw MachineFault{"pop from stack '" + n.stack + "' that does not exist"};
            if (it->second.empty()) throw MachineFault{"pop from empty stack '" + n.stack + "'"};
            state.vars.insert_or_assign(n.target, it->second.back());
            it->second.pop_back();
            return n.next;
        }
        case K::push:
            state.stacks[n.stack].push_back(machine_read(state, n.args[0]));
            return n.next;
        case K::branch: {
            const Interval<B> a = machine_operand(state, n.operands[0]);
            const Interval<B> b = machine_operand(state, n.operands[1]);
            bool taken = false;
            switch (n.pred) {
                case MachinePredicate::eq: taken = eq(a, b); break;
                case MachinePredicate::lt: taken = lt(a, b); break;
                case MachinePredicate::le: taken = le(a, b); break;
                case MachinePredicate::subset: taken = subset(a, b); break;
            }
            return taken ? n.yes : n.no;
        }
        case K::empty_test: {
            auto it = state.stacks.find(n.stack);
            if (it == state.stacks.end()) throw MachineFault{"emptiness test on stack '" + n.stack + "' that does not exist"};
            return it->second.empty() ? n.yes : n.no;
        }
        case K::stop:
            return index;
    }
    throw MachineFault{"unknown node"};
}

}  // namespace detail

/// Runs p on the given inputs, executing at most step_budget nodes. observer,
/// when set, sees the initial state and the state after every executed node.
template <class B>
MachineOutcome<B> run(const MachineProgram& p, const std::vector<Interval<B>>& inputs, std::size_t step_budget,
                      const std::function<void(const MachineState<B>&)>& observer = {}) {
    using Outcome = MachineOutcome<B>;
    if (inputs.size() != p.inputs.size()) {
        throw ValidationError("program expects " + std::to_string(p.inputs.size()) + " inputs, got " +
                              std::to_string(inputs.size()));
    }
    MachineState<B> state;
    for (std::size_t i = 0; i < inputs.size(); ++i) state.vars.insert_or_assign(p.inputs[i], inputs[i]);
    if (observer) observer(state);

    std::size_t pc = p.entry;
    while (true) {
        if (state.steps >= step_budget) return Outcome{Outcome::Kind::budget_exceeded, {}, {}, pc};
        const MachineNode& n = p.nodes[pc];
        try {
            if (n.kind == MachineNode::Kind::stop) {
                std::vector<Interval<B>> outputs;
                for (const auto& name : n.args) outputs.push_back(detail::machine_read(state, name));
                ++state.steps;
                state.node = pc;
                if (observer) observer(state);
                return Outcome{Outcome::Kind::halted, std::move(outputs), {}, pc};
            }
            const std::size_t next = detail::machine_step(p, pc, state);
            ++state.steps;
            state.node = pc;
            if (observer) observer(state);
            pc = next;
        } catch (const detail::MachineFault& fault) {
            return Outcome{Outcome::Kind::undefined, {}, fault.reason, pc};
        } catch (const Overflow& e) {
            return Outcome{Outcome::Kind::undefined, {}, e.what(), pc};
        }
    }
}

/// Initial state followed by the state after every executed node.
template <class B>
std::pair<std::vector<MachineState<B>>, MachineOutcome<B>> trace(const MachineProgram& p,
                                                                 const std::vector<Interval<B>>& inputs,
                                                                 std::size_t step_budget) {
    std::vector<MachineState<B>> states;
    auto outcome = run<B>(p, inputs, step_budget, [&](const MachineState<B>& s) { states.push_back(s); });
    return {std::move(states), std::move(outcome)};
}

}  // namespace rigor
