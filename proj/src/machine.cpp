#include "rigor/machine.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace rigor {

namespace {

struct Token {
    std::string text;
    std::size_t column;
    bool literal = false;  // "[c1,c2]"
};

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (c == '[') {
            const std::size_t close = line.find(']', i);
            if (close == std::string_view::npos) throw SyntaxError("unterminated interval literal", line_no, start + 1);
            std::string text;
            for (std::size_t k = i; k <= close; ++k) {
                if (!std::isspace(static_cast<unsigned char>(line[k]))) text += line[k];
            }
            out.push_back({text, start + 1, true});
            i = close + 1;
            continue;
        }
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#' &&
               line[i] != '[') {
            ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)), start + 1});
    }
    return out;
}

const std::set<std::string, std::less<>>& keywords() {
    static const std::set<std::string, std::less<>> k = {"input", "add",   "sub", "mul",   "div", "left",
                                                          "right", "abs",   "pop", "push",  "br",  "goto",
                                                          "stop",  "empty", "eq",  "lt",    "le",  "subset"};
    return k;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

// A routing-only item (goto) or a real node, before edges are resolved.
struct Item {
    bool is_goto = false;
    std::string goto_label;
    std::size_t goto_column = 0;
    MachineNode node;
    std::string yes_label;
    std::string no_label;
};

class ProgramParser {
public:
    ProgramParser(std::string_view source, BackendKind backend) : source_(source), backend_(backend) {}

    MachineProgram run() {
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= source_.size()) {
            std::size_t end = source_.find('\n', pos);
            if (end == std::string_view::npos) end = source_.size();
            ++line_no;
            parse_line(source_.substr(pos, end - pos), line_no);
            pos = end + 1;
        }
        if (!saw_input_) throw ValidationError("program has no input (START) line");
        return resolve();
    }

private:
    std::string_view source_;
    BackendKind backend_;
    bool saw_input_ = false;
    MachineProgram program_;
    std::vector<Item> items_;
    std::map<std::string, std::size_t> labels_;  // label -> item index
    std::vector<std::pair<std::string, std::size_t>> pending_labels_;

    std::string name(const Token& t, std::size_t line_no) {
        if (t.literal || !is_identifier(t.text)) throw SyntaxError("expected a name, got '" + t.text + "'", line_no, t.column);
        if (keywords().count(t.text)) throw SyntaxError("'" + t.text + "' is a reserved word", line_no, t.column);
        return t.text;
    }

    std::pair<Rational, Rational> literal(const Token& t, std::size_t line_no) {
        const std::string body = t.text.substr(1, t.text.size() - 2);
        const std::size_t comma = body.find(',');
        if (comma == std::string::npos) throw SyntaxError("interval literal needs two endpoints", line_no, t.column);
        const auto c1 = parse_rational(body.substr(0, comma));
        const auto c2 = parse_rational(body.substr(comma + 1));
        if (!c1 || !c2) throw SyntaxError("malformed interval literal '" + t.text + "'", line_no, t.column);
        if (*c2 < *c1) throw ValidationError("line " + std::to_string(line_no) + ": constant " + t.text + " has c1 > c2");
        if (backend_ == BackendKind::f64 && !(is_double_representable(*c1) && is_double_representable(*c2))) {
            throw ValidationError("line " + std::to_string(line_no) + ": constant " + t.text +
                                  " is not representable in binary64");
        }
        return {*c1, *c2};
    }

    static void expect_count(const std::vector<Token>& t, std::size_t first, std::size_t count, std::size_t line_no,
                             std::string_view what) {
        if (t.size() - first != count) {
            const std::size_t col = t.size() > first ? t[first].column : 1;
            throw SyntaxError(std::string(what) + " takes " + std::to_string(count - 1) + " operands", line_no, col);
        }
    }

    void add_node(Item item) {
        for (auto& [label, line] : pending_labels_) labels_[label] = items_.size();
        pending_labels_.clear();
        items_.push_back(std::move(item));
    }

    void parse_line(std::string_view line, std::size_t line_no) {
        std::vector<Token> t = tokenize(line, line_no);
        std::size_t i = 0;
        if (!t.empty() && !t[0].literal && t[0].text.size() > 1 && t[0].text.back() == ':') {
            const Token label{t[0].text.substr(0, t[0].text.size() - 1), t[0].column};
            const std::string l = name(label, line_no);
            if (labels_.count(l) || std::any_of(pending_labels_.begin(), pending_labels_.end(),
                                                 [&](const auto& p) { return p.first == l; })) {
                throw ValidationError("line " + std::to_string(line_no) + ": duplicate label '" + l + "'");
            }
            pending_labels_.emplace_back(l, line_no);
            i = 1;
        }
        if (i == t.size()) return;

        const Token& head = t[i];
        Item item;
        item.node.line = line_no;
        MachineNode& n = item.node;
        using K = MachineNode::Kind;

        if (head.text == "input") {
            if (saw_input_) throw ValidationError("line " + std::to_string(line_no) + ": duplicate input (START) line");
            if (i != 0) throw SyntaxError("the input line cannot carry a label", line_no, t[0].column);
            if (!items_.empty()) throw ValidationError("line " + std::to_string(line_no) + ": input must precede all instructions");
            saw_input_ = true;
            for (std::size_t k = i + 1; k < t.size(); ++k) {
                std::string v = name(t[k], line_no);
                if (std::find(program_.inputs.begin(), program_.inputs.end(), v) != program_.inputs.end()) {
                    throw ValidationError("line " + std::to_string(line_no) + ": duplicate input '" + v + "'");
                }
                program_.inputs.push_back(std::move(v));
            }
            return;
        }
        if (!saw_input_) throw ValidationError("line " + std::to_string(line_no) + ": instruction before the input line");

        if (head.text == "goto") {
            expect_count(t, i, 2, line_no, "goto");
            item.is_goto = true;
            item.goto_label = name(t[i + 1], line_no);
            item.goto_column = t[i + 1].column;
        } else if (head.text == "stop") {
            n.kind = K::stop;
            for (std::size_t k = i + 1; k < t.size(); ++k) n.args.push_back(name(t[k], line_no));
        } else if (head.text == "push") {
            expect_count(t, i, 3, line_no, "push");
            n.kind = K::push;
            n.stack = name(t[i + 1], line_no);
            n.args = {name(t[i + 2], line_no)};
        } else if (head.text == "br") {
            if (t.size() - i < 2) throw SyntaxError("br needs a predicate", line_no, head.column);
            const std::string& pred = t[i + 1].text;
            if (pred == "empty") {
                expect_count(t, i + 1, 4, line_no, "br empty");
                n.kind = K::empty_test;
                n.stack = name(t[i + 2], line_no);
                item.yes_label = name(t[i + 3], line_no);
                item.no_label = name(t[i + 4], line_no);
            } else {
                static const std::map<std::string, MachinePredicate, std::less<>> preds = {
                    {"eq", MachinePredicate::eq},
                    {"lt", MachinePredicate::lt},
                    {"le", MachinePredicate::le},
                    {"subset", MachinePredicate::subset}};
                auto it = preds.find(pred);
                if (it == preds.end()) throw SyntaxError("unknown predicate '" + pred + "'", line_no, t[i + 1].column);
                expect_count(t, i + 1, 5, line_no, "br " + pred);
                n.kind = K::branch;
                n.pred = it->second;
                for (std::size_t k = i + 2; k < i + 4; ++k) {
                    MachineOperand op;
                    if (t[k].literal) {
                        op.literal = literal(t[k], line_no);
                    } else {
                        op.var = name(t[k], line_no);
                    }
                    n.operands.push_back(std::move(op));
                }
                item.yes_label = name(t[i + 4], line_no);
                item.no_label = name(t[i + 5], line_no);
            }
        } else if (t.size() - i >= 2 && t[i + 1].text == "<-") {
            n.target = name(head, line_no);
            const std::size_t r = i + 2;
            if (r == t.size()) throw SyntaxError("assignment needs a right-hand side", line_no, t[i + 1].column);
            static const std::map<std::string, std::pair<MachineOp, std::size_t>, std::less<>> ops = {
                {"add", {MachineOp::add, 2}},   {"sub", {MachineOp::sub, 2}},     {"mul", {MachineOp::mul, 2}},
                {"div", {MachineOp::div, 2}},   {"left", {MachineOp::left, 1}},   {"right", {MachineOp::right, 1}},
                {"abs", {MachineOp::abs, 1}}};
            if (t[r].literal) {
                expect_count(t, r, 1, line_no, "constant assignment");
                n.kind = K::assign_const;
                n.value = literal(t[r], line_no);
            } else if (t[r].text == "pop") {
                expect_count(t, r, 2, line_no, "pop");
                n.kind = K::pop;
                n.stack = name(t[r + 1], line_no);
            } else if (auto it = ops.find(t[r].text); it != ops.end()) {
                expect_count(t, r, it->second.second + 1, line_no, t[r].text);
                n.kind = K::assign_op;
                n.op = it->second.first;
                for (std::size_t k = r + 1; k < t.size(); ++k) n.args.push_back(name(t[k], line_no));
            } else {
                expect_count(t, r, 1, line_no, "copy");
                n.kind = K::assign_var;
                n.args = {name(t[r], line_no)};
            }
        } else {
            throw SyntaxError("unrecognized instruction '" + head.text + "'", line_no, head.column);
        }
        add_node(std::move(item));
    }

    std::size_t label_item(const std::string& label, std::size_t line_no) const {
        auto it = labels_.find(label);
        if (it == labels_.end()) {
            throw ValidationError("line " + std::to_string(line_no) + ": unknown label '" + label + "'");
        }
        return it->second;
    }

    MachineProgram resolve() {
        // Labels on trailing lines point past the last instruction.
        for (auto& [label, line] : pending_labels_) labels_[label] = items_.size();

        std::vector<std::size_t> node_of(items_.size(), 0);
        std::size_t count = 0;
        for (std::size_t k = 0; k < items_.size(); ++k) {
            if (!items_[k].is_goto) node_of[k] = count++;
        }

        // Follows goto chains from item k to the node that runs next.
        auto target = [&](std::size_t k, std::size_t line_no) {
            std::size_t hops = 0;
            while (k < items_.size() && items_[k].is_goto) {
                if (++hops > items_.size()) {
                    throw ValidationError("line " + std::to_string(line_no) + ": goto cycle with no instruction");
                }
                k = label_item(items_[k].goto_label, items_[k].node.line);
            }
            if (k == items_.size()) {
                throw ValidationError("line " + std::to_string(line_no) + ": control falls off the end of the program");
            }
            return node_of[k];
        };

        MachineProgram p = std::move(program_);
        p.backend = backend_;
        std::size_t stops = 0;
        for (std::size_t k = 0; k < items_.size(); ++k) {
            Item& item = items_[k];
            if (item.is_goto) {
                label_item(item.goto_label, item.node.line);
                continue;
            }
            MachineNode n = item.node;
            using K = MachineNode::Kind;
            if (n.kind == K::stop) {
                ++stops;
            } else if (n.kind == K::branch || n.kind == K::empty_test) {
                n.yes = target(label_item(item.yes_label, n.line), n.line);
                n.no = target(label_item(item.no_label, n.line), n.line);
            } else {
                n.next = target(k + 1, n.line);
            }
            p.nodes.push_back(std::move(n));
        }
        if (stops == 0) throw ValidationError("program has no stop (STOP) line");
        if (stops > 1) throw ValidationError("program has more than one stop (STOP) line");
        p.entry = target(0, 1);

        check_names(p);
        check_reachable(p);
        return p;
    }

    static void check_names(const MachineProgram& p) {
        std::set<std::string> vars(p.inputs.begin(), p.inputs.end());
        std::set<std::string> stacks;
        for (const auto& n : p.nodes) {
            if (!n.target.empty()) vars.insert(n.target);
            for (const auto& a : n.args) vars.insert(a);
            for (const auto& o : n.operands) {
                if (!o.literal) vars.insert(o.var);
            }
            if (!n.stack.empty()) stacks.insert(n.stack);
        }
        for (const auto& s : stacks) {
            if (vars.count(s)) throw ValidationError("'" + s + "' names both a stack and a variable");
        }
    }

    static void check_reachable(const MachineProgram& p) {
        std::vector<bool> seen(p.nodes.size(), false);
        std::vector<std::size_t> todo{p.entry};
        while (!todo.empty()) {
            const std::size_t k = todo.back();
            todo.pop_back();
            if (seen[k]) continue;
            seen[k] = true;
            const MachineNode& n = p.nodes[k];
            using K = MachineNode::Kind;
            if (n.kind == K::stop) continue;
            if (n.kind == K::branch || n.kind == K::empty_test) {
                todo.push_back(n.yes);
                todo.push_back(n.no);
            } else {
                todo.push_back(n.next);
            }
        }
        for (std::size_t k = 0; k < seen.size(); ++k) {
            if (!seen[k]) {
                throw ValidationError("line " + std::to_string(p.nodes[k].line) +
                                      ": instruction is not reachable from the input line");
            }
        }
    }
};

// ---- compilation from expressions --------------------------------------------

class Compiler {
public:
    explicit Compiler(BackendKind backend) : backend_(backend) {}

    std::string operator()(const Expr& e, const std::vector<std::string>& params) {
        out_ << "input";
        for (const auto& p : params) out_ << ' ' << p;
        out_ << '\n';
        const std::string result = emit(e);
        out_ << "stop " << result << '\n';
        return out_.str();
    }

private:
    BackendKind backend_;
    std::ostringstream out_;
    std::size_t temps_ = 0;

    std::string fresh() { return "_t" + std::to_string(temps_++); }

    std::string constant(const Rational& v) {
        if (backend_ == BackendKind::f64 && !is_double_representable(v)) {
            throw ValidationError("constant " + to_string(v) + " is not representable in binary64");
        }
        const std::string t = fresh();
        out_ << t << " <- [" << to_string(v) << ',' << to_string(v) << "]\n";
        return t;
    }

    std::string binary(const char* op, const std::string& a, const std::string& b) {
        const std::string t = fresh();
        out_ << t << " <- " << op << ' ' << a << ' ' << b << '\n';
        return t;
    }

    std::string emit(const Expr& e) {
        switch (e.kind()) {
            case ExprKind::constant:
                return constant(e.literal().value);
            case ExprKind::variable:
                return e.name();
            case ExprKind::neg: {
                const std::string x = emit(e.arg(0));
                return binary("sub", constant(Rational(0)), x);
            }
            case ExprKind::add:
            case ExprKind::sub:
            case ExprKind::mul:
            case ExprKind::div: {
                const std::string a = emit(e.arg(0));
                const std::string b = emit(e.arg(1));
                const char* op = e.kind() == ExprKind::add   ? "add"
                                 : e.kind() == ExprKind::sub ? "sub"
                                 : e.kind() == ExprKind::mul ? "mul"
                                                             : "div";
                return binary(op, a, b);
            }
            case ExprKind::pow: {
                // the base is still computed so its faults surface as in eval_iv
                const std::string x = emit(e.arg(0));
                if (e.exponent() == 0) return constant(Rational(1));
                std::string acc = x;
                for (unsigned k = 1; k < e.exponent(); ++k) acc = binary("mul", acc, x);
                return acc;
            }
            default:
                throw ValidationError("the interval machine has no instruction for '" + print(e) + "'");
        }
    }
};

}  // namespace

MachineProgram parse_program(std::string_view source, BackendKind backend) {
    return ProgramParser(source, backend).run();
}

std::string compile_expression(const Expr& e, const std::vector<std::string>& params, BackendKind backend) {
    return Compiler(backend)(e, params);
}

}  // namespace rigor
