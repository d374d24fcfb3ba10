#include "rigor/serialize.hpp"

#include <charconv>

namespace rigor {

double parse_f64_endpoint(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    auto format = std::chars_format::general;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
        body.remove_prefix(2);
        format = std::chars_format::hex;
    }
    double value = 0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value, format);
    if (ec != std::errc() || end != body.data() + body.size() || body.empty()) {
        throw SyntaxError("malformed binary64 endpoint '" + std::string(text) + "'", 1, 1);
    }
    return negative ? -value : value;
}

Rational parse_rat_endpoint(std::string_view text) {
    auto q = parse_rational(text);
    if (!q) throw SyntaxError("malformed rational endpoint '" + std::string(text) + "'", 1, 1);
    return *q;
}

}  // namespace rigor
