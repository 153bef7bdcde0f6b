#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ratekit/errors.hpp"
#include "ratekit/period.hpp"
#include "ratekit/series.hpp"

namespace ratekit {

/// Column-oriented collection of series sharing one period axis.
///
/// Invariants: at least one column, unique column names, every column as
/// long as the axis. Column order is preserved (it is meaningful to the
/// CSV round trip and to positional factor selection).
class FactorPanel {
public:
    FactorPanel(std::vector<Period> periods,
                std::vector<std::string> names,
                std::vector<std::vector<double>> columns,
                std::vector<std::string> units = {})
        : periods_(std::move(periods)), names_(std::move(names)),
          columns_(std::move(columns)), units_(std::move(units)) {
        if (names_.empty())
            throw ShapeError("panel: no columns");
        if (columns_.size() != names_.size())
            throw ShapeError("panel: " + std::to_string(columns_.size()) +
                             " columns for " + std::to_string(names_.size()) + " names");
        if (units_.empty()) units_.resize(names_.size());
        if (units_.size() != names_.size())
            throw ShapeError("panel: unit list does not match column list");
        for (std::size_t j = 0; j < names_.size(); ++j) {
            if (columns_[j].size() != periods_.size())
                throw ShapeError("panel: column '" + names_[j] + "' has " +
                                 std::to_string(columns_[j].size()) + " rows, axis has " +
                                 std::to_string(periods_.size()));
            for (std::size_t i = 0; i < j; ++i)
                if (names_[i] == names_[j])
                    throw IntegrityError("panel: duplicate column '" + names_[j] + "'");
        }
        // Reuse the Series validation for the axis itself (ordering, finiteness).
        if (!periods_.empty())
            Series("", "", periods_, std::vector<double>(periods_.size(), 0.0));
        for (std::size_t j = 0; j < names_.size(); ++j)
            Series(names_[j], units_[j], periods_, columns_[j]);
    }

    const std::vector<Period>& periods() const { return periods_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::string>& units() const { return units_; }
    std::size_t rows() const { return periods_.size(); }
    std::size_t cols() const { return names_.size(); }

    bool has(const std::string& name) const {
        for (const auto& n : names_)
            if (n == name) return true;
        return false;
    }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t j = 0; j < names_.size(); ++j)
            if (names_[j] == name) return j;
        throw ValueError("panel: no column '" + name + "'");
    }

    const std::vector<double>& raw_column(std::size_t j) const { return columns_.at(j); }

    Series column(const std::string& name) const {
        std::size_t j = index_of(name);
        return Series(names_[j], units_[j], periods_, columns_[j]);
    }

    Series column(std::size_t j) const {
        if (j >= cols())
            throw ValueError("panel: column index " + std::to_string(j) + " out of range");
        return Series(names_[j], units_[j], periods_, columns_[j]);
    }

    /// New panel restricted to the named columns, in the order given.
    FactorPanel select(const std::vector<std::string>& names) const {
        std::vector<std::string> sel_names;
        std::vector<std::vector<double>> sel_cols;
        std::vector<std::string> sel_units;
        for (const auto& n : names) {
            std::size_t j = index_of(n);
            sel_names.push_back(names_[j]);
            sel_cols.push_back(columns_[j]);
            sel_units.push_back(units_[j]);
        }
        return FactorPanel(periods_, std::move(sel_names), std::move(sel_cols),
                           std::move(sel_units));
    }

    /// Append a column; name must be fresh, length must match the axis.
    FactorPanel with_column(const Series& s) const {
        if (s.periods() != periods_)
            throw AlignmentError("panel: column '" + s.name() +
                                 "' does not share the period axis");
        auto names = names_;
        auto cols = columns_;
        auto units = units_;
        names.push_back(s.name());
        cols.push_back(s.values());
        units.push_back(s.unit());
        return FactorPanel(periods_, std::move(names), std::move(cols), std::move(units));
    }

    FactorPanel drop_first(std::size_t count) const {
        if (count > rows())
            throw AlignmentError("panel: cannot drop " + std::to_string(count) +
                                 " of " + std::to_string(rows()) + " rows");
        std::vector<Period> p(periods_.begin() + static_cast<std::ptrdiff_t>(count),
                              periods_.end());
        auto cols = columns_;
        for (auto& c : cols)
            c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(count));
        return FactorPanel(std::move(p), names_, std::move(cols), units_);
    }

private:
    std::vector<Period> periods_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::vector<std::string> units_;
};

}  // namespace ratekit
