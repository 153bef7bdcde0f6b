#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ratekit/errors.hpp"
#include "ratekit/panel.hpp"
#include "ratekit/period.hpp"

namespace ratekit {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_double(std::string_view field, std::size_t line_no,
                           const std::string& column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ValueError("line " + std::to_string(line_no) + ", column '" + column +
                         "': cannot parse '" + std::string(field) + "' as a number");
    return v;
}

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw InternalError("number formatting failed");
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parse a panel from CSV text.
///
/// Layout: a mandatory header row whose first field is `period`, then one
/// row per quarter. Full-line `#` comments and blank lines are skipped
/// anywhere. Fields are comma-separated with no quoting; periods use the
/// `YYYYQn` format. Structural invariants (ordering, duplicate columns,
/// finiteness) are enforced by the panel constructor.
inline FactorPanel parse_panel_csv(std::istream& in, const std::string& origin = "input") {
    std::vector<std::string> names;
    std::vector<Period> periods;
    std::vector<std::vector<double>> columns;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = detail::split_fields(sv);
        if (!have_header) {
            if (fields[0] != "period")
                throw ParseError(origin + ": line " + std::to_string(line_no) +
                                 ": header must start with 'period', got '" +
                                 std::string(fields[0]) + "'");
            if (fields.size() < 2)
                throw ParseError(origin + ": line " + std::to_string(line_no) +
                                 ": header declares no data columns");
            for (std::size_t j = 1; j < fields.size(); ++j) {
                if (fields[j].empty())
                    throw ParseError(origin + ": line " + std::to_string(line_no) +
                                     ": empty column name in header");
                names.emplace_back(fields[j]);
            }
            columns.resize(names.size());
            have_header = true;
            continue;
        }
        if (fields.size() != names.size() + 1)
            throw ParseError(origin + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(names.size() + 1) + " fields, got " +
                             std::to_string(fields.size()));
        try {
            periods.push_back(Period::parse(fields[0]));
        } catch (const ValueError& e) {
            throw ParseError(origin + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        for (std::size_t j = 0; j < names.size(); ++j)
            columns[j].push_back(detail::parse_double(fields[j + 1], line_no, names[j]));
    }
    if (!have_header)
        throw ParseError(origin + ": no header row found");
    if (periods.size() < 2)
        throw IntegrityError(origin + ": a panel needs at least 2 data rows, got " +
                             std::to_string(periods.size()));
    try {
        return FactorPanel(std::move(periods), std::move(names), std::move(columns));
    } catch (const IntegrityError& e) {
        throw IntegrityError(origin + ": " + e.what());
    } catch (const Error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

inline FactorPanel load_panel(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    return parse_panel_csv(in, path);
}

/// Load only the columns a schema names, attaching the documented unit
/// per column. Every schema entry must exist in the header.
inline FactorPanel load_panel(const std::string& path,
                              const std::vector<std::pair<std::string, std::string>>& schema) {
    FactorPanel all = load_panel(path);
    if (schema.empty())
        return all;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<std::string> units;
    for (const auto& [name, unit] : schema) {
        if (!all.has(name))
            throw ValueError(path + ": schema names column '" + name +
                             "', which the header does not carry");
        names.push_back(name);
        columns.push_back(all.raw_column(all.index_of(name)));
        units.push_back(unit);
    }
    return FactorPanel(all.periods(), std::move(names), std::move(columns), std::move(units));
}

inline void write_panel_csv(std::ostream& out, const FactorPanel& panel) {
    out << "period";
    for (const auto& n : panel.names()) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        out << panel.periods()[i].str();
        for (std::size_t j = 0; j < panel.cols(); ++j)
            out << ',' << detail::format_double(panel.raw_column(j)[i]);
        out << '\n';
    }
}

inline void save_panel(const std::string& path, const FactorPanel& panel) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open '" + path + "' for writing");
    write_panel_csv(out, panel);
    out.flush();
    if (!out)
        throw ParseError("write to '" + path + "' failed");
}

}  // namespace ratekit
