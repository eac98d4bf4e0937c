#include "feedrank/decimal.hpp"

#include <charconv>

#include "feedrank/errors.hpp"

namespace feedrank {

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw InvalidInput("cannot format double");
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        throw InvalidInput("not a decimal number: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace feedrank
