#pragma once

#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "ratekit/errors.hpp"

namespace ratekit {

/// Quarterly period identifier, serialized as "YYYYQn" (e.g. "2012Q1").
/// Ordering is (year, quarter), which coincides with lexicographic order of
/// the string form for 4-digit years.
struct Period {
    int year = 0;
    int quarter = 1;  // 1..4

    auto operator<=>(const Period&) const = default;

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04dQ%d", year, quarter);
        return buf;
    }

    /// Parses "YYYYQn". Throws ValueError on any malformed identifier.
    static Period parse(std::string_view text) {
        auto fail = [&] {
            throw ValueError("invalid period '" + std::string(text) +
                             "' (expected YYYYQn, e.g. 2012Q1)");
        };
        if (text.size() != 6) fail();
        int year = 0;
        for (int i = 0; i < 4; ++i) {
            char c = text[i];
            if (c < '0' || c > '9') fail();
            year = year * 10 + (c - '0');
        }
        if (text[4] != 'Q' && text[4] != 'q') fail();
        char q = text[5];
        if (q < '1' || q > '4') fail();
        return Period{year, q - '0'};
    }

    /// Next quarter in calendar order.
    Period next() const {
        return quarter == 4 ? Period{year + 1, 1} : Period{year, quarter + 1};
    }
};

}  // namespace ratekit
