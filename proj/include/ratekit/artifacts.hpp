#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ratekit/adequacy_filter.hpp"
#include "ratekit/errors.hpp"
#include "ratekit/linear_model.hpp"
#include "ratekit/monetary.hpp"
#include "ratekit/period.hpp"
#include "ratekit/series.hpp"

namespace ratekit {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting conventions: rates carry 2 decimals, coefficients 6
// significant digits, everything else shortest round-trip via the JSON
// layer.
// ---------------------------------------------------------------------------

inline std::string fmt_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

inline std::string fmt_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Conventional display name b<i> for a design column: the intercept is
/// b0 and factor columns count from b1 whether or not an intercept is
/// present.
inline std::string coefficient_display_name(const std::vector<std::string>& labels,
                                            std::size_t j) {
    const bool has_intercept = !labels.empty() && labels[0] == kInterceptLabel;
    return "b" + std::to_string(has_intercept ? j : j + 1);
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline Json state_to_json(const StateEstimate& s) {
    return Json{{"k", s.k},
                {"x", {s.x_hat[0], s.x_hat[1]}},
                {"P", {{s.P(0, 0), s.P(0, 1)}, {s.P(1, 0), s.P(1, 1)}}}};
}

inline Json fit_to_json(const RegressionFit& f, const std::string& model = "") {
    Json coeffs = Json::array();
    for (std::size_t j = 0; j < f.labels.size(); ++j) {
        coeffs.push_back(Json{{"name", coefficient_display_name(f.labels, j)},
                              {"label", f.labels[j]},
                              {"value", f.coefficients[static_cast<Eigen::Index>(j)]},
                              {"std_error", f.std_errors[static_cast<Eigen::Index>(j)]},
                              {"fixed", static_cast<bool>(f.fixed[j])}});
    }
    Json out{{"kind", "regression_fit"},
             {"n", f.n},
             {"free_columns", f.free_cols},
             {"coefficients", std::move(coeffs)},
             {"r_squared", f.r_squared},
             {"sigma", f.sigma},
             {"sigma_squared", f.sigma * f.sigma},
             // a divergent statistic (no factor-aligned variation) is
             // stored as null; JSON has no infinity literal
             {"fisher", std::isfinite(f.fisher) ? Json(f.fisher) : Json()},
             {"residuals", std::vector<double>(f.residuals.data(),
                                               f.residuals.data() + f.residuals.size())},
             {"fitted", std::vector<double>(f.fitted.data(),
                                            f.fitted.data() + f.fitted.size())},
             {"definitions",
              Json{{"sigma", "maximum-likelihood residual scale sqrt(SSR/n); "
                             "sigma_squared is the dispersion estimate"},
                   {"fisher", "quadratic-form ratio residual/explained scaled by p/(n-p); "
                              "small values indicate informative factors (reciprocal of "
                              "the textbook F arrangement)"},
                   {"diagnostics", "computed on the reduced system when coefficients "
                                   "are pinned, so r_squared keeps its variance-share "
                                   "meaning"}}}};
    if (!model.empty()) out["model"] = model;
    return out;
}

inline Json trajectory_to_json(const FilterTrajectory& traj, const NoiseConfig& noise,
                               const std::string& label1 = "state_1",
                               const std::string& label2 = "state_2") {
    Json steps = Json::array();
    for (std::size_t j = 0; j < traj.posteriors.size(); ++j) {
        steps.push_back(Json{{"k", traj.priors[j].k},
                             {"prior", state_to_json(traj.priors[j])},
                             {"posterior", state_to_json(traj.posteriors[j])},
                             {"gain_norm", traj.gains[j].norm()},
                             {"forecast", {traj.forecasts[j][0], traj.forecasts[j][1]}}});
    }
    Json periods = Json::array();
    for (const auto& p : traj.periods) periods.push_back(p.str());
    Json observed = Json::array();
    for (const auto& o : traj.observed) observed.push_back(Json{o[0], o[1]});
    return Json{{"kind", "filter_trajectory"},
                {"state_labels", {label1, label2}},
                {"warmup", FilterTrajectory::warmup},
                {"periods", std::move(periods)},
                {"observed", std::move(observed)},
                {"init", state_to_json(traj.init)},
                {"noise",
                 Json{{"q", {noise.q[0], noise.q[1]}},
                      {"r", std::vector<double>(noise.r.data(),
                                                noise.r.data() + noise.r.size())}}},
                {"steps", std::move(steps)},
                {"definitions",
                 Json{{"indexing", "the posterior at k is corrected by the period-(k+1) "
                                   "factor snapshot; forecast at step k targets period "
                                   "k+1 (0-based), so the first two periods carry none"},
                      {"r", "observation variances on the standardized factor scale"}}}};
}

inline Json monetary_params_to_json(const MonetaryParams& p) {
    return Json{{"model", model_kind_name(p.kind)}, {"b0", p.b0}, {"b1", p.b1},
                {"b2", p.b2},                       {"b3", p.b3}, {"b4", p.b4},
                {"b5", p.b5},                       {"y0", p.y0}};
}

inline MonetaryParams monetary_params_from_json(const Json& j) {
    try {
        MonetaryParams p;
        p.kind = model_kind_from_name(j.at("model").get<std::string>());
        p.b0 = j.value("b0", 0.0);
        p.b1 = j.value("b1", 0.0);
        p.b2 = j.value("b2", 0.0);
        p.b3 = j.value("b3", 0.0);
        p.b4 = j.value("b4", 0.0);
        p.b5 = j.value("b5", 0.0);
        p.y0 = j.value("y0", 0.0);
        validate(p);
        return p;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("params: ") + e.what());
    }
}

inline Json golden_to_json(const GoldenParameterSet& set) {
    Json values = Json::array();
    for (const auto& v : set.values)
        values.push_back(Json{{"name", v.name}, {"text", v.text}, {"value", v.value}});
    return Json{{"kind", "golden_set"},
                {"label", set.label},
                {"alias", set.alias},
                {"model", model_kind_name(set.kind)},
                {"values", std::move(values)}};
}

inline Json velocity_to_json(const VelocitySeries& v, const std::string& form,
                             const Json& params, bool was_normalized) {
    Json periods = Json::array();
    for (const auto& p : v.series.periods()) periods.push_back(p.str());
    return Json{{"kind", "velocity_series"},
                {"form", form},
                {"params", params},
                {"normalized", was_normalized},
                {"periods", std::move(periods)},
                {"values", v.series.values()}};
}

inline Json forecast_to_json(const MonetaryParams& params, const Eigen::Vector3d& factors,
                             double y_prev, double log_forecast) {
    return Json{{"kind", "exchange_forecast"},
                {"params", monetary_params_to_json(params)},
                {"factors", {factors[0], factors[1], factors[2]}},
                {"y_prev", y_prev},
                {"log_forecast", log_forecast},
                {"level_forecast", std::exp(log_forecast)}};
}

inline Json identity_to_json(const IdentityReport& r) {
    Json periods = Json::array();
    for (const auto& p : r.residuals.periods()) periods.push_back(p.str());
    return Json{{"kind", "identity_check"},
                {"a", r.a},
                {"k", r.k},
                {"lambda", r.lambda},
                {"periods", std::move(periods)},
                {"residuals", r.residuals.values()},
                {"mean", r.mean},
                {"variance", r.variance}};
}

// ---------------------------------------------------------------------------
// JSON deserialization of run inputs
// ---------------------------------------------------------------------------

inline ModelSpec model_spec_from_json(const Json& j) {
    try {
        ModelSpec spec;
        spec.response = j.at("response").get<std::string>();
        spec.factors = j.at("factors").get<std::vector<std::string>>();
        spec.include_intercept = j.value("include_intercept", true);
        spec.response_lags = j.value("response_lags", std::vector<int>{});
        spec.initial_response_values =
            j.value("initial_response_values", std::vector<double>{});
        if (j.contains("fixed_coefficients"))
            for (const auto& [key, val] : j.at("fixed_coefficients").items())
                spec.fixed_coefficients[key] = val.get<double>();
        return spec;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("model spec: ") + e.what());
    }
}

inline Json model_spec_to_json(const ModelSpec& spec) {
    Json fixed = Json::object();
    for (const auto& [key, val] : spec.fixed_coefficients) fixed[key] = val;
    return Json{{"response", spec.response},
                {"factors", spec.factors},
                {"include_intercept", spec.include_intercept},
                {"response_lags", spec.response_lags},
                {"fixed_coefficients", std::move(fixed)},
                {"initial_response_values", spec.initial_response_values}};
}

/// Optional overrides for the filter run; anything absent falls back to
/// the data-driven defaults.
struct FilterOverrides {
    std::optional<Eigen::Vector2d> q;
    std::optional<Eigen::VectorXd> r;
    std::optional<Eigen::Vector2d> init_x;
    std::optional<Eigen::Matrix2d> init_P;
};

inline FilterOverrides filter_overrides_from_json(const Json& j) {
    try {
        FilterOverrides o;
        if (j.contains("q")) {
            auto q = j.at("q").get<std::vector<double>>();
            if (q.size() != 2) throw ParseError("noise config: q needs exactly 2 entries");
            o.q = Eigen::Vector2d(q[0], q[1]);
        }
        if (j.contains("r")) {
            auto r = j.at("r").get<std::vector<double>>();
            o.r = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
        }
        if (j.contains("init_x")) {
            auto x = j.at("init_x").get<std::vector<double>>();
            if (x.size() != 2) throw ParseError("noise config: init_x needs 2 entries");
            o.init_x = Eigen::Vector2d(x[0], x[1]);
        }
        if (j.contains("init_P")) {
            auto P = j.at("init_P").get<std::vector<std::vector<double>>>();
            if (P.size() != 2 || P[0].size() != 2 || P[1].size() != 2)
                throw ParseError("noise config: init_P needs a 2x2 array");
            Eigen::Matrix2d m;
            m << P[0][0], P[0][1], P[1][0], P[1][1];
            o.init_P = m;
        }
        return o;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("noise config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Plain-text report rendering
// ---------------------------------------------------------------------------

namespace detail {

/// Pad-align a header row plus data rows; column 0 is left-aligned, the
/// rest right-aligned, two spaces between columns.
inline std::string render_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::size_t pad = width[c] - row[c].size();
            if (c == 0) {
                line += row[c];
                line.append(pad, ' ');
            } else {
                line += "  ";
                line.append(pad, ' ');
                line += row[c];
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        return line + "\n";
    };
    std::string out = emit(header);
    for (const auto& row : rows) out += emit(row);
    return out;
}

inline std::string render_trajectory(const Json& j) {
    const auto& steps = j.at("steps");
    if (steps.empty())
        throw ValueError("report: trajectory holds no filter steps");
    const auto periods = j.at("periods").get<std::vector<std::string>>();
    const auto& observed = j.at("observed");
    const std::size_t warmup = j.value("warmup", std::size_t{2});
    std::vector<std::string> labels{"state_1", "state_2"};
    if (j.contains("state_labels")) labels = j.at("state_labels").get<std::vector<std::string>>();

    // forecast at step k targets period k+1, so the first `warmup`
    // periods render blank forecast cells
    std::vector<std::pair<double, double>> forecast(periods.size(),
                                                    {0.0, 0.0});
    std::vector<bool> has_forecast(periods.size(), false);
    for (const auto& s : steps) {
        const std::size_t target = s.at("k").get<std::size_t>() + 1;
        if (target >= periods.size())
            throw ParseError("report: step targets period beyond the axis");
        forecast[target] = {s.at("forecast")[0].get<double>(),
                            s.at("forecast")[1].get<double>()};
        has_forecast[target] = true;
    }

    std::vector<std::string> header{"period", labels[0], labels[1],
                                    labels[0], labels[1]};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < periods.size(); ++i) {
        std::vector<std::string> row{periods[i],
                                     fmt_fixed(observed[i][0].get<double>(), 2),
                                     fmt_fixed(observed[i][1].get<double>(), 2)};
        if (has_forecast[i]) {
            row.push_back(fmt_fixed(forecast[i].first, 2));
            row.push_back(fmt_fixed(forecast[i].second, 2));
        } else {
            row.push_back("");
            row.push_back("");
        }
        rows.push_back(std::move(row));
    }
    std::string table = render_table(header, rows);

    // group banner over the observed and forecast column blocks, placed
    // from column geometry so that the titles never collide
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    const std::size_t obs_at = width[0] + 2;
    std::size_t fct_at = width[0] + width[1] + width[2] + 6;
    const std::string title_obs = "statistical data";
    const std::string title_fct = "forecast";
    fct_at = std::max(fct_at, obs_at + title_obs.size() + 2);
    std::string banner(fct_at + title_fct.size(), ' ');
    banner.replace(obs_at, title_obs.size(), title_obs);
    banner.replace(fct_at, title_fct.size(), title_fct);

    std::string out = "adequacy filter report\n";
    out += "periods: " + std::to_string(periods.size()) +
           ", warm-up: " + std::to_string(warmup) + "\n\n";
    out += banner + "\n" + table;
    return out;
}

inline std::string render_fit(const Json& j) {
    std::string out = "regression fit";
    if (j.contains("model")) out += ": " + j.at("model").get<std::string>();
    out += "\n";
    out += "observations: " + std::to_string(j.at("n").get<long>()) +
           ", free columns: " + std::to_string(j.at("free_columns").get<long>()) + "\n\n";
    std::vector<std::string> header{"name", "label", "coefficient", "std error"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : j.at("coefficients")) {
        rows.push_back({c.at("name").get<std::string>(), c.at("label").get<std::string>(),
                        fmt_sig(c.at("value").get<double>()),
                        c.at("fixed").get<bool>() ? std::string("fixed")
                                                  : fmt_sig(c.at("std_error").get<double>())});
    }
    out += render_table(header, rows);
    out += "\n";
    out += "R^2    = " + fmt_sig(j.at("r_squared").get<double>()) + "\n";
    out += "sigma  = " + fmt_sig(j.at("sigma").get<double>()) + "  (sigma^2 = " +
           fmt_sig(j.at("sigma_squared").get<double>()) + ")\n";
    const auto& fisher = j.at("fisher");
    out += "fisher = " +
           (fisher.is_null() ? std::string("inf (no factor-aligned variation)")
                             : fmt_sig(fisher.get<double>())) +
           "\n";
    return out;
}

inline std::string render_golden(const Json& j) {
    std::string out = "parameter set " + j.at("label").get<std::string>() + " (" +
                      j.at("model").get<std::string>() + ")\n\n";
    std::vector<std::string> header{"name", "value"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& v : j.at("values"))
        rows.push_back({v.at("name").get<std::string>(),
                        fmt_sig(v.at("value").get<double>())});
    out += render_table(header, rows);
    return out;
}

inline std::string render_velocity(const Json& j) {
    std::string out = "money-circulation velocity (" + j.at("form").get<std::string>() +
                      " form)\n";
    if (j.at("normalized").get<bool>()) out += "normalized: first period = 1\n";
    const auto& params = j.at("params");
    if (params.contains("label"))
        out += "params: " + params.at("label").get<std::string>() + "\n";
    out += "\n";
    const auto periods = j.at("periods").get<std::vector<std::string>>();
    const auto values = j.at("values").get<std::vector<double>>();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < periods.size(); ++i)
        rows.push_back({periods[i], fmt_sig(values[i])});
    out += render_table({"period", "velocity"}, rows);
    return out;
}

inline std::string render_forecast(const Json& j) {
    std::string out = "exchange-rate forecast\n\n";
    const auto& p = j.at("params");
    out += "model: " + p.at("model").get<std::string>() + "\n";
    for (const char* name : {"b0", "b1", "b2", "b3", "b4"})
        out += std::string(name) + " = " + fmt_sig(p.at(name).get<double>()) + "\n";
    const auto& f = j.at("factors");
    out += "factors: " + fmt_sig(f[0].get<double>()) + ", " + fmt_sig(f[1].get<double>()) +
           ", " + fmt_sig(f[2].get<double>()) + "\n";
    out += "previous log rate: " + fmt_sig(j.at("y_prev").get<double>()) + "\n\n";
    out += "log forecast:   " + fmt_sig(j.at("log_forecast").get<double>()) + "\n";
    out += "level forecast: " + fmt_fixed(j.at("level_forecast").get<double>(), 2) + "\n";
    return out;
}

inline std::string render_identity(const Json& j) {
    std::string out = "parity residual check\n";
    out += "a = " + fmt_sig(j.at("a").get<double>()) + ", k = " +
           fmt_sig(j.at("k").get<double>()) + ", lambda = " +
           fmt_sig(j.at("lambda").get<double>()) + "\n\n";
    const auto periods = j.at("periods").get<std::vector<std::string>>();
    const auto residuals = j.at("residuals").get<std::vector<double>>();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < periods.size(); ++i)
        rows.push_back({periods[i], fmt_sig(residuals[i])});
    out += render_table({"period", "residual"}, rows);
    out += "\nmean     = " + fmt_sig(j.at("mean").get<double>()) + "\n";
    out += "variance = " + fmt_sig(j.at("variance").get<double>()) + "\n";
    return out;
}

}  // namespace detail

/// Render any artifact this toolkit emits as an aligned plain-text
/// report. The artifact's "kind" field selects the layout.
inline std::string render_report(const Json& artifact) {
    std::string kind;
    try {
        kind = artifact.at("kind").get<std::string>();
    } catch (const Json::exception&) {
        throw ParseError("report: artifact has no 'kind' field");
    }
    try {
        if (kind == "filter_trajectory") return detail::render_trajectory(artifact);
        if (kind == "regression_fit") return detail::render_fit(artifact);
        if (kind == "golden_set") return detail::render_golden(artifact);
        if (kind == "velocity_series") return detail::render_velocity(artifact);
        if (kind == "exchange_forecast") return detail::render_forecast(artifact);
        if (kind == "identity_check") return detail::render_identity(artifact);
    } catch (const Json::exception& e) {
        throw ParseError("report: malformed '" + kind + "' artifact: " + e.what());
    }
    throw ParseError("report: unrecognized artifact kind '" + kind + "'");
}

}  // namespace ratekit
