// rigor: command-line front end.
//
// Exit codes: 0 success / solution found / halted, 2 usage or input error,
// 3 no solution, 4 failure / undefined, 5 budget exhausted.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rigor/algorithms.hpp"
#include "rigor/machine.hpp"
#include "rigor/serialize.hpp"

namespace {

using namespace rigor;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNoSolution = 3;
constexpr int kFailure = 4;
constexpr int kBudget = 5;

struct Config {
    std::string backend = "f64";
    std::string tol = "1e-9";
    bool json = false;
    bool hex = false;
    bool naive_pow = false;
    std::string x, y, z;
    std::vector<std::string> binds;
};

struct Args {
    std::string expr;
    std::string eps;
    std::size_t max_steps = 1000000;
    bool covering = false;
    std::string width = "1e-12";
    std::size_t max_iter = 1000;
    std::string a, b;
    std::size_t n = 16;
    std::string file;
    std::vector<std::string> inputs;
    bool trace = false;
};

Rational number(const std::string& text, const char* what) {
    auto q = parse_rational(text);
    if (!q) throw ValidationError(std::string("malformed ") + what + " '" + text + "'");
    return *q;
}

template <class B>
typename B::scalar positive(const std::string& text, const char* what) {
    const Rational q = number(text, what);
    if (q <= 0) throw ValidationError(std::string(what) + " must be positive");
    typename B::scalar s = B::from_rational(q, Rounding::down);
    if (!(s > 0)) throw ValidationError(std::string(what) + " underflows in the active backend");
    return s;
}

template <class B>
EvalContext<B> context(const Config& cfg) {
    EvalContext<B> ctx;
    ctx.tol = positive<B>(cfg.tol, "tolerance");
    ctx.pow_mode = cfg.naive_pow ? PowMode::naive : PowMode::tight;
    auto bind = [&](const std::string& name, const std::string& text) {
        ctx.bindings.insert_or_assign(name, parse_interval_text<B>(text));
    };
    if (!cfg.x.empty()) bind("x", cfg.x);
    if (!cfg.y.empty()) bind("y", cfg.y);
    if (!cfg.z.empty()) bind("z", cfg.z);
    for (const auto& b : cfg.binds) {
        const auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("binding must look like name=[a,b]: '" + b + "'");
        bind(b.substr(0, eq), b.substr(eq + 1));
    }
    return ctx;
}

// The expression and the single variable it is a function of.
template <class B>
std::pair<Expr, std::string> univariate(const std::string& source, const EvalContext<B>& ctx) {
    if (ctx.bindings.size() != 1) throw ValidationError("expected exactly one variable binding, e.g. -x \"[0,1]\"");
    const std::string var = ctx.bindings.begin()->first;
    return {parse(source, {var}), var};
}

template <class B>
std::string show(const Interval<B>& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

template <class B>
void emit(const Config& cfg, const Json& j, const std::string& human) {
    if (cfg.json) {
        std::cout << j.dump() << '\n';
    } else {
        std::cout << human;
    }
}

template <class B>
int cmd_eval(const Config& cfg, const Args& args) {
    const auto ctx = context<B>(cfg);
    std::vector<std::string> vars;
    for (const auto& [name, v] : ctx.bindings) vars.push_back(name);
    const Interval<B> r = eval_iv(parse(args.expr, vars), ctx);
    emit<B>(cfg, Json{{"result", to_json(r, cfg.hex)}}, show(r) + '\n');
    return kOk;
}

template <class B>
int cmd_range(const Config& cfg, const Args& args) {
    const auto ctx = context<B>(cfg);
    const auto [f, var] = univariate(args.expr, ctx);
    const Interval<B> domain = ctx.bindings.begin()->second;
    const auto eps = positive<B>(args.eps, "eps");
    const auto r = bsa_range<B>(extension<B>(f, var, ctx), domain, eps, args.max_steps);

    static const char* names[] = {"success", "failure", "budget"};
    const char* status = names[static_cast<int>(r.status)];
    Json j{{"status", status}};
    std::ostringstream human;
    human << "status: " << status << '\n';
    if (r.range) {
        j["range"] = to_json(*r.range, cfg.hex);
        human << "range: " << *r.range << '\n';
    }
    j["pieces"] = r.covering.pieces.size();
    j["bisections"] = r.bisections;
    j["evaluations"] = r.evaluations;
    human << "pieces: " << r.covering.pieces.size() << '\n' << "bisections: " << r.bisections << '\n';
    if (!r.reason.empty()) {
        j["reason"] = r.reason;
        human << "reason: " << r.reason << '\n';
    }
    if (args.covering) j["covering"] = to_json(r.covering, cfg.hex);
    emit<B>(cfg, j, human.str());
    switch (r.status) {
        case BsaStatus::success: return kOk;
        case BsaStatus::failure: return kFailure;
        case BsaStatus::budget: return kBudget;
    }
    return kFailure;
}

template <class B>
int cmd_solve(const Config& cfg, const Args& args) {
    const auto ctx = context<B>(cfg);
    const auto [f, var] = univariate(args.expr, ctx);
    const Interval<B> domain = ctx.bindings.begin()->second;
    const auto width = positive<B>(args.width, "width");
    const auto r = interval_newton<B>(f, var, domain, width, args.max_iter, ctx);

    static const char* names[] = {"solution_found", "no_solution", "failure", "budget"};
    const char* status = names[static_cast<int>(r.status)];
    Json j{{"status", status}, {"iterations", r.iterations}};
    std::ostringstream human;
    human << "status: " << status << '\n';
    if (r.enclosure) {
        j["enclosure"] = to_json(*r.enclosure, cfg.hex);
        human << "enclosure: " << *r.enclosure << '\n';
    }
    human << "iterations: " << r.iterations << '\n';
    if (!r.reason.empty()) {
        j["reason"] = r.reason;
        human << "reason: " << r.reason << '\n';
    }
    emit<B>(cfg, j, human.str());
    switch (r.status) {
        case NewtonStatus::solution_found: return kOk;
        case NewtonStatus::no_solution: return kNoSolution;
        case NewtonStatus::failure: return kFailure;
        case NewtonStatus::budget: return kBudget;
    }
    return kFailure;
}

template <class B>
int cmd_integrate(const Config& cfg, const Args& args) {
    const auto ctx = context<B>(cfg);
    const Expr f = parse(args.expr);
    const auto vars = free_variables(f);
    if (vars.size() > 1) throw ValidationError("integrand must have at most one free variable");
    const std::string var = vars.empty() ? "x" : *vars.begin();
    auto endpoint = [](const std::string& text) {
        const Rational q = number(text, "integration bound");
        if (!B::exact && !is_double_representable(q)) {
            throw ValidationError("integration bound " + text + " is not representable in binary64");
        }
        return B::from_rational(q, Rounding::down);
    };
    if (args.n < 1) throw ValidationError("--n must be at least 1");
    const Interval<B> j = itra<B>(extension<B>(f, var, ctx), endpoint(args.a), endpoint(args.b), args.n);
    emit<B>(cfg, Json{{"result", to_json(j, cfg.hex)}, {"n", args.n}}, show(j) + '\n');
    return kOk;
}

template <class B>
int cmd_brouwer(const Config& cfg, const Args& args) {
    const auto ctx = context<B>(cfg);
    const auto [f, var] = univariate(args.expr, ctx);
    const auto r = brouwer_check<B>(f, var, ctx.bindings.begin()->second, ctx);
    const char* verdict = r.verdict == BrouwerVerdict::fixed_point_exists ? "fixed_point_exists" : "inconclusive";
    emit<B>(cfg, Json{{"verdict", verdict}, {"image", to_json(r.image, cfg.hex)}},
            std::string("verdict: ") + verdict + "\nimage: " + show(r.image) + '\n');
    return kOk;
}

template <class B>
int cmd_machine(const Config& cfg, const Args& args) {
    std::ifstream in(args.file);
    if (!in) throw ValidationError("cannot read program file '" + args.file + "'");
    std::stringstream text;
    text << in.rdbuf();
    const MachineProgram p = parse_program(text.str(), B::exact ? BackendKind::rat : BackendKind::f64);
    std::vector<Interval<B>> inputs;
    for (const auto& s : args.inputs) inputs.push_back(parse_interval_text<B>(s));

    std::function<void(const MachineState<B>&)> observer;
    if (args.trace) observer = [&](const MachineState<B>& s) { std::cout << to_json(s, cfg.hex).dump() << '\n'; };
    const auto r = run<B>(p, inputs, args.max_steps, observer);

    using Kind = typename MachineOutcome<B>::Kind;
    switch (r.kind) {
        case Kind::halted: {
            Json outs = Json::array();
            std::string human;
            for (const auto& o : r.outputs) {
                outs.push_back(to_json(o, cfg.hex));
                human += (human.empty() ? "" : " ") + show(o);
            }
            emit<B>(cfg, Json{{"status", "halted"}, {"outputs", outs}}, human + '\n');
            return kOk;
        }
        case Kind::undefined:
            emit<B>(cfg, Json{{"status", "undefined"}, {"node", r.node}, {"reason", r.reason}},
                    "undefined at node " + std::to_string(r.node) + ": " + r.reason + '\n');
            return kFailure;
        case Kind::budget_exceeded:
            emit<B>(cfg, Json{{"status", "budget"}}, "step budget exceeded\n");
            return kBudget;
    }
    return kFailure;
}

template <class B>
int dispatch(const std::string& command, const Config& cfg, const Args& args) {
    if (command == "eval") return cmd_eval<B>(cfg, args);
    if (command == "range") return cmd_range<B>(cfg, args);
    if (command == "solve") return cmd_solve<B>(cfg, args);
    if (command == "integrate") return cmd_integrate<B>(cfg, args);
    if (command == "brouwer") return cmd_brouwer<B>(cfg, args);
    return cmd_machine<B>(cfg, args);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Validated numerics with interval arithmetic"};
    app.require_subcommand(1);
    Config cfg;
    Args args;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--backend", cfg.backend, "Endpoint backend")
            ->check(CLI::IsMember({"f64", "rat"}))
            ->envname("RIGOR_BACKEND");
        sub->add_option("--tol", cfg.tol, "Tolerance for elementary functions")->capture_default_str();
        sub->add_flag("--json", cfg.json, "Machine-readable output");
        sub->add_flag("--hex", cfg.hex, "Add hexfloat endpoints to JSON (f64)");
    };
    auto variables = [&](CLI::App* sub) {
        sub->add_option("-x", cfg.x, "Interval for x, e.g. \"[1,2]\"");
        sub->add_option("-y", cfg.y, "Interval for y");
        sub->add_option("-z", cfg.z, "Interval for z");
        sub->add_option("--bind", cfg.binds, "Binding name=[a,b]");
        sub->add_flag("--naive-pow", cfg.naive_pow, "Evaluate x^n as repeated products");
    };

    auto* eval = app.add_subcommand("eval", "Natural interval extension of an expression");
    eval->add_option("expr", args.expr)->required();
    common(eval);
    variables(eval);

    auto* range = app.add_subcommand("range", "Range enclosure by binary subdivision");
    range->add_option("expr", args.expr)->required();
    range->add_option("--eps", args.eps, "Target enclosure width")->required();
    range->add_option("--max-steps", args.max_steps, "Bisection budget")->capture_default_str();
    range->add_flag("--covering", args.covering, "Include the covering in JSON output");
    common(range);
    variables(range);

    auto* solve = app.add_subcommand("solve", "Interval Newton root enclosure");
    solve->add_option("expr", args.expr)->required();
    solve->add_option("--width", args.width, "Target enclosure width")->capture_default_str();
    solve->add_option("--max-iter", args.max_iter, "Iteration budget")->capture_default_str();
    common(solve);
    variables(solve);

    auto* integrate = app.add_subcommand("integrate", "Interval trapezoid quadrature");
    integrate->add_option("expr", args.expr)->required();
    integrate->add_option("a", args.a)->required();
    integrate->add_option("b", args.b)->required();
    integrate->add_option("--n", args.n, "Number of subintervals")->capture_default_str();
    common(integrate);
    integrate->add_flag("--naive-pow", cfg.naive_pow, "Evaluate x^n as repeated products");

    auto* brouwer = app.add_subcommand("brouwer", "Fixed-point check f(I) inside int I");
    brouwer->add_option("expr", args.expr)->required();
    common(brouwer);
    variables(brouwer);

    auto* machine = app.add_subcommand("machine", "Interval machine programs");
    machine->require_subcommand(1);
    auto* machine_run = machine->add_subcommand("run", "Run a .ivm program");
    machine_run->add_option("file", args.file)->required();
    machine_run->add_option("--in", args.inputs, "Input intervals in input order");
    machine_run->add_option("--max-steps", args.max_steps, "Step budget")->capture_default_str();
    machine_run->add_flag("--trace", args.trace, "Print every state as a JSON line");
    common(machine_run);

    // CLI11 splits "[a,b]" given to a multi-value option into elements; a
    // leading space keeps interval literals whole (parsing ignores it).
    std::vector<std::string> raw(argv + 1, argv + argc);
    for (auto& a : raw) {
        if (a.size() > 1 && a.front() == '[' && a.back() == ']') a.insert(a.begin(), ' ');
    }
    std::reverse(raw.begin(), raw.end());

    try {
        app.parse(raw);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    std::string command;
    for (auto* sub : {eval, range, solve, integrate, brouwer, machine}) {
        if (sub->parsed()) command = sub->get_name();
    }

    try {
        if (cfg.backend == "rat") return dispatch<Rat>(command, cfg, args);
        return dispatch<F64>(command, cfg, args);
    } catch (const NotBisectable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const SingularDerivative& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}
