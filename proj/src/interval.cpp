#include "kepler/interval.hpp"

#include <charconv>
#include <cstdio>
#include <system_error>

namespace kepler {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s == "inf") return detail::kInf;
    if (s == "-inf") return -detail::kInf;
    double v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::invalid_argument("not a decimal number: '" + s + "'");
    if (std::isnan(v)) throw std::invalid_argument("NaN is not a valid bound");
    return v;
}

std::string to_string(const Interval& x) {
    return "[" + format_double(x.lo()) + ", " + format_double(x.hi()) + "]";
}

} // namespace kepler
