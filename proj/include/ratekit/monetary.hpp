#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ratekit/errors.hpp"
#include "ratekit/linear_model.hpp"
#include "ratekit/series.hpp"

namespace ratekit {

/// The four built-in model shapes.
///
/// monetary_static:  log rate on the money/GDP/interest log-differentials,
///                   slope on the money differential pinned to one.
/// monetary_lagged:  same plus a one-quarter response lag.
/// internal_factors: log rate on inflation, state deficit, energy price
///                   and money supply in raw levels, plus a response lag.
/// inflation:        log inflation on exchange rate, state deficit and
///                   trade balance deficit.
enum class ModelKind { monetary_static, monetary_lagged, internal_factors, inflation };

inline const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::monetary_static: return "monetary_static";
        case ModelKind::monetary_lagged: return "monetary_lagged";
        case ModelKind::internal_factors: return "internal_factors";
        case ModelKind::inflation: return "inflation";
    }
    throw InternalError("model kind out of range");
}

inline ModelKind model_kind_from_name(std::string_view name) {
    if (name == "monetary_static") return ModelKind::monetary_static;
    if (name == "monetary_lagged") return ModelKind::monetary_lagged;
    if (name == "internal_factors") return ModelKind::internal_factors;
    if (name == "inflation") return ModelKind::inflation;
    throw SpecError("unknown model kind '" + std::string(name) + "'");
}

/// Coefficient bundle for one model. Only the leading coefficients a
/// kind uses are meaningful; the monetary kinds require b1 == 1 exactly.
struct MonetaryParams {
    ModelKind kind = ModelKind::monetary_static;
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double b4 = 0.0;
    double b5 = 0.0;
    double y0 = 0.0;
};

inline bool is_monetary_kind(ModelKind kind) {
    return kind == ModelKind::monetary_static || kind == ModelKind::monetary_lagged;
}

inline void validate(const MonetaryParams& p) {
    if (is_monetary_kind(p.kind) && p.b1 != 1.0)
        throw IntegrityError(std::string("params: ") + model_kind_name(p.kind) +
                             " requires b1 = 1 exactly");
}

/// Economic sign expectations for the monetary kinds (b2 < 0, b3 > 0).
/// Violations are reported, never enforced: fitted data may disagree
/// with the prior.
inline std::vector<std::string> sign_warnings(const MonetaryParams& p) {
    std::vector<std::string> out;
    if (!is_monetary_kind(p.kind)) return out;
    if (!(p.b2 < 0.0))
        out.push_back("b2 = " + std::to_string(p.b2) + " violates the expected sign b2 < 0");
    if (!(p.b3 > 0.0))
        out.push_back("b3 = " + std::to_string(p.b3) + " violates the expected sign b3 > 0");
    return out;
}

/// Per-period money-circulation velocity. Velocities are power products
/// of positive series, so every value must be strictly positive.
struct VelocitySeries {
    Series series;

    explicit VelocitySeries(Series s) : series(std::move(s)) {
        for (std::size_t i = 0; i < series.size(); ++i)
            if (!(series.values()[i] > 0.0))
                throw DomainError("velocity: non-positive value at " +
                                  series.periods()[i].str());
    }
};

/// Rescale so the first period reads exactly one; the level constant the
/// closed forms drop makes absolute velocities index-like anyway.
inline VelocitySeries normalized(const VelocitySeries& v) {
    const double base = v.series.values()[0];
    std::vector<double> vals(v.series.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = v.series.values()[i] / base;
    return VelocitySeries(Series(v.series.name(), "index, first period = 1",
                                 v.series.periods(), std::move(vals)));
}

// ---------------------------------------------------------------------------
// Built-in regression specs.
//
// Panel column conventions (documented in the README and shipped data):
//   monetary kinds:   response log_fx; factors m_diff, g_diff, r_diff
//   internal_factors: response log_fx; factors inflation, state_deficit,
//                     energy_price, money_supply
//   inflation:        response log_inflation; factors fx, state_deficit,
//                     trade_deficit
// ---------------------------------------------------------------------------

inline ModelSpec builtin_spec(ModelKind kind) {
    ModelSpec spec;
    spec.include_intercept = true;
    switch (kind) {
        case ModelKind::monetary_static:
            spec.response = "log_fx";
            spec.factors = {"m_diff", "g_diff", "r_diff"};
            spec.fixed_coefficients = {{"m_diff", 1.0}};
            return spec;
        case ModelKind::monetary_lagged:
            spec.response = "log_fx";
            spec.factors = {"m_diff", "g_diff", "r_diff"};
            spec.fixed_coefficients = {{"m_diff", 1.0}};
            spec.response_lags = {1};  // caller supplies the pre-sample response
            return spec;
        case ModelKind::internal_factors:
            spec.response = "log_fx";
            spec.factors = {"inflation", "state_deficit", "energy_price", "money_supply"};
            spec.response_lags = {1};
            return spec;
        case ModelKind::inflation:
            spec.response = "log_inflation";
            spec.factors = {"fx", "state_deficit", "trade_deficit"};
            return spec;
    }
    throw SpecError("unknown model kind");
}

namespace detail {

inline void require_monetary(const MonetaryParams& p, const char* op) {
    validate(p);
    if (!is_monetary_kind(p.kind))
        throw SpecError(std::string(op) + ": needs a monetary parameter set, got " +
                        model_kind_name(p.kind));
}

inline void require_positive(const Series& s, const char* op) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s.values()[i] > 0.0))
            throw DomainError(std::string(op) + ": series '" + s.name() +
                              "' non-positive at " + s.periods()[i].str());
}

}  // namespace detail

/// Money demand M = P * G^(-b2) * R^(-b3), up to the level constant fixed
/// to one. Linear in P: scaling prices scales demand identically.
inline Series money_demand(const Series& P, const Series& G, const Series& R,
                           const MonetaryParams& params) {
    detail::require_monetary(params, "money_demand");
    detail::require_aligned(P, G, "money_demand");
    detail::require_aligned(P, R, "money_demand");
    detail::require_positive(P, "money_demand");
    detail::require_positive(G, "money_demand");
    detail::require_positive(R, "money_demand");
    std::vector<double> out(P.size());
    for (std::size_t i = 0; i < P.size(); ++i)
        out[i] = P.values()[i] * std::pow(G.values()[i], -params.b2) *
                 std::pow(R.values()[i], -params.b3);
    return Series("money_demand", "index", P.periods(), std::move(out));
}

/// Velocity in the static closed form V = R^b3 / (P * G^(-b2-1)).
/// Satisfies V * M = G elementwise against money_demand by construction.
inline VelocitySeries velocity_static(const Series& P, const Series& G, const Series& R,
                                      const MonetaryParams& params) {
    detail::require_monetary(params, "velocity_static");
    detail::require_aligned(P, G, "velocity_static");
    detail::require_aligned(P, R, "velocity_static");
    detail::require_positive(P, "velocity_static");
    detail::require_positive(G, "velocity_static");
    detail::require_positive(R, "velocity_static");
    std::vector<double> out(P.size());
    for (std::size_t i = 0; i < P.size(); ++i)
        out[i] = std::pow(R.values()[i], params.b3) /
                 (P.values()[i] * std::pow(G.values()[i], -params.b2 - 1.0));
    return VelocitySeries(Series("velocity", "index", P.periods(), std::move(out)));
}

/// Velocity in the lagged closed form
/// V_i = P_{i-1}^b4 * P_i^{-1} * G_i^(b2+1) * R_i^b3.
/// P must carry one extra leading observation so every output period has
/// its lagged price; the output lives on G's axis.
inline VelocitySeries velocity_lagged(const Series& P, const Series& G, const Series& R,
                                      const MonetaryParams& params) {
    validate(params);
    if (params.kind != ModelKind::monetary_lagged)
        throw SpecError("velocity_lagged: needs monetary_lagged parameters, got " +
                        std::string(model_kind_name(params.kind)));
    detail::require_aligned(G, R, "velocity_lagged");
    if (P.size() != G.size() + 1)
        throw AlignmentError("velocity_lagged: price series needs one extra leading "
                             "observation (" + std::to_string(G.size() + 1) + " values), got " +
                             std::to_string(P.size()));
    for (std::size_t i = 0; i < G.size(); ++i)
        if (P.periods()[i + 1] != G.periods()[i])
            throw AlignmentError("velocity_lagged: price axis does not trail the GDP axis at " +
                                 G.periods()[i].str());
    detail::require_positive(P, "velocity_lagged");
    detail::require_positive(G, "velocity_lagged");
    detail::require_positive(R, "velocity_lagged");
    std::vector<double> out(G.size());
    for (std::size_t i = 0; i < G.size(); ++i)
        out[i] = std::pow(P.values()[i], params.b4) / P.values()[i + 1] *
                 std::pow(G.values()[i], params.b2 + 1.0) *
                 std::pow(R.values()[i], params.b3);
    return VelocitySeries(Series("velocity", "index", G.periods(), std::move(out)));
}

/// Price recursion P_i = P_{i-1}^b4 * M_i * G_i^b2 * R_i^b3 seeded with
/// P0. In log space the recursion is exactly linear in the logs of its
/// inputs, which is how it is tested.
inline Series price_recursion(double P0, const Series& M, const Series& G, const Series& R,
                              const MonetaryParams& params) {
    validate(params);
    if (params.kind != ModelKind::monetary_lagged)
        throw SpecError("price_recursion: needs monetary_lagged parameters, got " +
                        std::string(model_kind_name(params.kind)));
    if (!(P0 > 0.0))
        throw DomainError("price_recursion: seed price must be positive");
    detail::require_aligned(M, G, "price_recursion");
    detail::require_aligned(M, R, "price_recursion");
    detail::require_positive(M, "price_recursion");
    detail::require_positive(G, "price_recursion");
    detail::require_positive(R, "price_recursion");
    std::vector<double> out(M.size());
    double prev = P0;
    for (std::size_t i = 0; i < M.size(); ++i) {
        prev = std::pow(prev, params.b4) * M.values()[i] *
               std::pow(G.values()[i], params.b2) * std::pow(R.values()[i], params.b3);
        out[i] = prev;
    }
    return Series("price_level", "index", M.periods(), std::move(out));
}

/// One-step log-rate forecast from lagged-model parameters:
/// b0 + b1 f1 + b2 f2 + b3 f3 + b4 y_prev. The caller exponentiates for
/// a level forecast.
inline double forecast_exchange(const MonetaryParams& params, const Eigen::Vector3d& factors,
                                double y_prev) {
    validate(params);
    if (params.kind != ModelKind::monetary_lagged)
        throw SpecError("forecast_exchange: needs monetary_lagged parameters, got " +
                        std::string(model_kind_name(params.kind)));
    return params.b0 + params.b1 * factors[0] + params.b2 * factors[1] +
           params.b3 * factors[2] + params.b4 * y_prev;
}

/// Same forecast from a fitted lagged model: the design row is
/// [1, factors..., y_prev] in the fit's column order.
inline double forecast_exchange(const RegressionFit& f, const Eigen::VectorXd& latest_factors,
                                double y_prev) {
    if (latest_factors.size() + 2 != f.coefficients.size())
        throw ShapeError("forecast_exchange: " + std::to_string(latest_factors.size()) +
                         " factors for " + std::to_string(f.coefficients.size()) +
                         " coefficients (needs coefficients - 2)");
    Eigen::VectorXd row(f.coefficients.size());
    row[0] = 1.0;
    row.segment(1, latest_factors.size()) = latest_factors;
    row[row.size() - 1] = y_prev;
    return predict(f, row);
}

/// Residual diagnostics for the parity relation
/// s = a + (m - m*) - k (y - y*) + lambda (i - i*).
struct IdentityReport {
    Series residuals;
    double mean = 0.0;
    double variance = 0.0;  // population variance of the residuals
    double a = 0.0;
    double k = 0.0;
    double lambda = 0.0;
};

/// Evaluate the parity right side on a panel carrying columns
/// m, m_star, y, y_star, i, i_star, s and report the residual series
/// s - RHS with its first two moments. The premise that this residual is
/// random noise becomes inspectable instead of assumed.
inline IdentityReport monetary_identity_check(const FactorPanel& panel, double a, double k,
                                              double lambda) {
    for (const char* name : {"m", "m_star", "y", "y_star", "i", "i_star", "s"})
        if (!panel.has(name))
            throw SpecError(std::string("identity check: panel is missing column '") +
                            name + "'");
    const auto& m = panel.raw_column(panel.index_of("m"));
    const auto& ms = panel.raw_column(panel.index_of("m_star"));
    const auto& y = panel.raw_column(panel.index_of("y"));
    const auto& ys = panel.raw_column(panel.index_of("y_star"));
    const auto& i1 = panel.raw_column(panel.index_of("i"));
    const auto& is = panel.raw_column(panel.index_of("i_star"));
    const auto& s = panel.raw_column(panel.index_of("s"));
    std::vector<double> resid(panel.rows());
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        const double rhs = a + (m[t] - ms[t]) - k * (y[t] - ys[t]) + lambda * (i1[t] - is[t]);
        resid[t] = s[t] - rhs;
    }
    IdentityReport report{Series("parity_residual", "", panel.periods(), resid),
                          0.0, 0.0, a, k, lambda};
    double mean = 0.0;
    for (double v : resid) mean += v;
    mean /= static_cast<double>(resid.size());
    double var = 0.0;
    for (double v : resid) var += (v - mean) * (v - mean);
    var /= static_cast<double>(resid.size());
    report.mean = mean;
    report.variance = var;
    return report;
}

// ---------------------------------------------------------------------------
// Built-in reference parameter sets.
//
// These are constants consumed by the derived computations, never fitting
// targets; a checksum over their canonical decimal forms guards against
// transcription drift, and --version prints it so reports are traceable
// to the constants used.
// ---------------------------------------------------------------------------

struct GoldenValue {
    const char* name;
    const char* text;  // canonical decimal form
    double value;
};

struct GoldenParameterSet {
    const char* label;  // canonical name, addressable as golden:<label>
    const char* alias;  // ASCII alias for shells that mangle the label
    ModelKind kind;
    std::vector<GoldenValue> values;

    double value(std::string_view name) const {
        for (const auto& v : values)
            if (name == v.name) return v.value;
        throw ValueError(std::string("golden set ") + label + ": no value '" +
                         std::string(name) + "'");
    }

    bool has(std::string_view name) const {
        for (const auto& v : values)
            if (name == v.name) return true;
        return false;
    }

    MonetaryParams params() const {
        MonetaryParams p;
        p.kind = kind;
        p.b0 = value("b0");
        p.b1 = value("b1");
        p.b2 = value("b2");
        p.b3 = value("b3");
        if (has("b4")) p.b4 = value("b4");
        if (has("b5")) p.b5 = value("b5");
        if (has("y0")) p.y0 = value("y0");
        return p;
    }

    double reported_r2() const { return value("r2"); }
    double reported_sigma() const { return value("sigma"); }
};

inline const std::vector<GoldenParameterSet>& golden_sets() {
    static const std::vector<GoldenParameterSet> sets = {
        {"§5", "s5", ModelKind::monetary_static,
         {{"b0", "0.67707", 0.67707},
          {"b1", "1", 1.0},
          {"b2", "-1.15037", -1.15037},
          {"b3", "0.39375", 0.39375},
          {"r2", "0.76750", 0.76750},
          {"sigma", "0.031653", 0.031653}}},
        {"§6", "s6", ModelKind::monetary_lagged,
         {{"b0", "-1.61447", -1.61447},
          {"b1", "1", 1.0},
          {"b2", "-0.46690", -0.46690},
          {"b3", "0.21907", 0.21907},
          {"b4", "1.53031", 1.53031},
          {"y0", "2.068", 2.068},
          {"r2", "0.95280", 0.95280},
          {"sigma", "0.0070095", 0.0070095}}},
        {"§7", "s7", ModelKind::internal_factors,
         {{"b0", "3.8", 3.8},
          {"b1", "3.3", 3.3},
          {"b2", "-1.4e-7", -1.4e-7},
          {"b3", "5.1e-3", 5.1e-3},
          {"b4", "4.7e-8", 4.7e-8},
          {"b5", "-1.6e-1", -1.6e-1},
          {"y0", "6.68", 6.68},
          {"r2", "0.99", 0.99},
          {"sigma", "4.1e-4", 4.1e-4}}},
        {"§8", "s8", ModelKind::inflation,
         {{"b0", "-2.6e-1", -2.6e-1},
          {"b1", "3.3e-4", 3.3e-4},
          {"b2", "-4.7e-8", -4.7e-8},
          {"b3", "-1.8e-7", -1.8e-7},
          {"r2", "0.99", 0.99},
          {"sigma", "3.5e-5", 3.5e-5}}},
    };
    return sets;
}

/// Look up a set by canonical label, ASCII alias, or bare number
/// ("§5", "s5", "5" all name the first set).
inline const GoldenParameterSet& golden_set(std::string_view label) {
    for (const auto& set : golden_sets()) {
        if (label == set.label || label == set.alias) return set;
        if (label.size() == 1 && set.alias[0] == 's' && label[0] == set.alias[1]) return set;
    }
    throw SpecError("unknown golden parameter set '" + std::string(label) + "'");
}

/// Canonical serialization: one line per set, "label:name=text;...".
inline std::string golden_canonical_text() {
    std::string out;
    for (const auto& set : golden_sets()) {
        out += set.label;
        out += ':';
        for (const auto& v : set.values) {
            out += v.name;
            out += '=';
            out += v.text;
            out += ';';
        }
        out += '\n';
    }
    return out;
}

/// FNV-1a 64-bit over the canonical serialization.
inline std::uint64_t golden_checksum() {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : golden_canonical_text()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace ratekit
