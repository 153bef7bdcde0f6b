#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ratekit/errors.hpp"
#include "ratekit/period.hpp"

namespace ratekit {

/// One named quarterly time series with a documented unit.
///
/// Invariants (enforced at construction): periods strictly increasing with
/// no duplicates, one finite value per period. Instances are immutable in
/// practice; all transformations return new Series.
class Series {
public:
    Series(std::string name, std::string unit,
           std::vector<Period> periods, std::vector<double> values)
        : name_(std::move(name)), unit_(std::move(unit)),
          periods_(std::move(periods)), values_(std::move(values)) {
        if (values_.size() != periods_.size())
            throw IntegrityError("series '" + name_ + "': " +
                                 std::to_string(values_.size()) + " values for " +
                                 std::to_string(periods_.size()) + " periods");
        for (std::size_t i = 1; i < periods_.size(); ++i) {
            if (periods_[i] == periods_[i - 1])
                throw IntegrityError("series '" + name_ + "': duplicate period " +
                                     periods_[i].str());
            if (periods_[i] < periods_[i - 1])
                throw IntegrityError("series '" + name_ + "': periods not increasing at " +
                                     periods_[i].str());
        }
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!std::isfinite(values_[i]))
                throw IntegrityError("series '" + name_ + "': non-finite value at " +
                                     periods_[i].str());
    }

    const std::string& name() const { return name_; }
    const std::string& unit() const { return unit_; }
    const std::vector<Period>& periods() const { return periods_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_.at(i); }

    bool aligned_with(const Series& other) const {
        return periods_ == other.periods_;
    }

    /// Copy without the first `count` observations.
    Series drop_first(std::size_t count) const {
        if (count > size())
            throw AlignmentError("series '" + name_ + "': cannot drop " +
                                 std::to_string(count) + " of " +
                                 std::to_string(size()) + " observations");
        return Series(name_, unit_,
                      {periods_.begin() + static_cast<std::ptrdiff_t>(count), periods_.end()},
                      {values_.begin() + static_cast<std::ptrdiff_t>(count), values_.end()});
    }

    Series with_name(std::string name, std::string unit = "") const {
        return Series(std::move(name), std::move(unit), periods_, values_);
    }

private:
    std::string name_;
    std::string unit_;
    std::vector<Period> periods_;
    std::vector<double> values_;
};

namespace detail {
inline void require_aligned(const Series& a, const Series& b, const char* op) {
    if (!a.aligned_with(b))
        throw AlignmentError(std::string(op) + ": series '" + a.name() + "' and '" +
                             b.name() + "' do not share a period axis");
}
}  // namespace detail

/// Element-wise natural logarithm. Every value must be strictly positive.
inline Series log_series(const Series& s) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s.values()[i] > 0.0))
            throw DomainError("log of non-positive value in series '" + s.name() +
                              "' at " + s.periods()[i].str());
        out[i] = std::log(s.values()[i]);
    }
    return Series("log(" + s.name() + ")", "", s.periods(), std::move(out));
}

/// Element-wise exponential; inverse of log_series.
inline Series exp_series(const Series& s) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::exp(s.values()[i]);
    return Series("exp(" + s.name() + ")", "", s.periods(), std::move(out));
}

/// Element-wise a - b on a shared period axis.
inline Series diff_series(const Series& a, const Series& b) {
    detail::require_aligned(a, b, "diff_series");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.values()[i] - b.values()[i];
    return Series(a.name() + "-" + b.name(), "", a.periods(), std::move(out));
}

/// Element-wise log(y_i * w_i); both inputs strictly positive.
inline Series scale_product_log(const Series& y, const Series& w) {
    detail::require_aligned(y, w, "scale_product_log");
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y.values()[i] > 0.0) || !(w.values()[i] > 0.0))
            throw DomainError("scale_product_log: non-positive input at " +
                              y.periods()[i].str() + " (series '" + y.name() +
                              "', '" + w.name() + "')");
        out[i] = std::log(y.values()[i] * w.values()[i]);
    }
    return Series("log(" + y.name() + "*" + w.name() + ")", "", y.periods(), std::move(out));
}

}  // namespace ratekit
