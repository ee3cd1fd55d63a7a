#include "json_writer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace rephase::cli {

namespace {

void write_value(std::ostream& os, const Json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << Json(it.key()).dump() << ": ";
                write_value(os, it.value(), indent, depth + 1);
            }
            os << '\n' << close << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Short numeric arrays stay on one line.
            const bool flat = j.size() <= 8 && std::all_of(j.begin(), j.end(), [](const Json& e) {
                                  return e.is_number() || e.is_null();
                              });
            os << (flat ? "[" : "[\n");
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) os << (flat ? ", " : ",\n");
                if (!flat) os << pad;
                write_value(os, j[k], indent, depth + 1);
            }
            if (!flat) os << '\n' << close;
            os << ']';
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            os << buf;
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

void write_json(std::ostream& os, const Json& j, int indent) {
    write_value(os, j, indent, 0);
    os << '\n';
}

}  // namespace rephase::cli
