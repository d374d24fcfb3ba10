#pragma once

// JSON encodings. Intervals are {"lo": "...", "hi": "..."} with endpoints
// as strings: shortest round-trip decimals on F64, "p/q" on Rat. F64 may also
// carry "lo_hex"/"hi_hex" hexfloats; readers prefer them when present.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rigor/algorithms.hpp"
#include "rigor/interval.hpp"
#include "rigor/machine.hpp"

namespace rigor {

using Json = nlohmann::ordered_json;

// Endpoint strings as written by to_json: decimal or hexfloat on F64 (read
// to nearest, so printed values come back bit-exact), decimal or p/q on Rat.
// Throws SyntaxError when malformed.
double parse_f64_endpoint(std::string_view text);
Rational parse_rat_endpoint(std::string_view text);

template <class B>
Json to_json(const Interval<B>& x, bool hex = false) {
    Json j;
    j["lo"] = B::to_string(x.lo());
    j["hi"] = B::to_string(x.hi());
    if constexpr (!B::exact) {
        if (hex) {
            j["lo_hex"] = B::to_hex(x.lo());
            j["hi_hex"] = B::to_hex(x.hi());
        }
    }
    return j;
}

template <class B>
Interval<B> interval_from_json(const Json& j) {
    auto field = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) {
            throw SyntaxError(std::string("interval JSON needs a string field '") + key + "'", 1, 1);
        }
        return j[key].template get<std::string>();
    };
    if constexpr (B::exact) {
        return Interval<B>(parse_rat_endpoint(field("lo")), parse_rat_endpoint(field("hi")));
    } else {
        const bool hex = j.contains("lo_hex") && j.contains("hi_hex");
        return Interval<B>(parse_f64_endpoint(field(hex ? "lo_hex" : "lo")),
                           parse_f64_endpoint(field(hex ? "hi_hex" : "hi")));
    }
}

template <class B>
Json to_json(const Covering<B>& cov, bool hex = false) {
    Json pieces = Json::array();
    for (const auto& p : cov.pieces) {
        pieces.push_back(Json{{"piece", to_json(p.piece, hex)}, {"enclosure", to_json(p.enclosure, hex)}});
    }
    return Json{{"epsilon", B::to_string(cov.epsilon)}, {"domain", to_json(cov.domain, hex)}, {"pieces", pieces}};
}

// One trace line: {"step", "node", "vars", "stacks"}; node is null for the
// initial state.
template <class B>
Json to_json(const MachineState<B>& s, bool hex = false) {
    Json j;
    j["step"] = s.steps;
    if (s.node == MachineState<B>::start) {
        j["node"] = nullptr;
    } else {
        j["node"] = s.node;
    }
    Json vars = Json::object();
    for (const auto& [name, v] : s.vars) vars[name] = to_json(v, hex);
    Json stacks = Json::object();
    for (const auto& [name, st] : s.stacks) {
        Json items = Json::array();
        for (const auto& v : st) items.push_back(to_json(v, hex));
        stacks[name] = items;
    }
    j["vars"] = vars;
    j["stacks"] = stacks;
    return j;
}

// Interval text "[a,b]" or a single number "a". On F64 each endpoint is
// rounded outward when the decimal is not representable.
template <class B>
Interval<B> parse_interval_text(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (c != ' ' && c != '\t') s += c;
    }
    std::string lo = s;
    std::string hi = s;
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw SyntaxError("interval must end with ']'", 1, s.size());
        const std::size_t comma = s.find(',');
        if (comma == std::string::npos) throw SyntaxError("interval needs two endpoints separated by ','", 1, 1);
        lo = s.substr(1, comma - 1);
        hi = s.substr(comma + 1, s.size() - comma - 2);
    }
    const auto a = parse_rational(lo);
    const auto b = parse_rational(hi);
    if (!a || !b) throw SyntaxError("malformed interval '" + std::string(text) + "'", 1, 1);
    if (*b < *a) throw InvalidEndpoints("lower endpoint exceeds upper endpoint in '" + std::string(text) + "'");
    return enclose<B>(*a, *b);
}

}  // namespace rigor
