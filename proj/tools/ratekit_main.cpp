// ratekit command-line front end: wires CSV ingestion, regression,
// filtering and the monetary closed forms into reproducible runs that
// emit machine-readable JSON artifacts plus aligned plain-text reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "ratekit/adequacy_filter.hpp"
#include "ratekit/artifacts.hpp"
#include "ratekit/csv.hpp"
#include "ratekit/errors.hpp"
#include "ratekit/linear_model.hpp"
#include "ratekit/monetary.hpp"
#include "ratekit/series.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string version_string() {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(ratekit::golden_checksum()));
    return std::string("ratekit ") + kVersion + "\ngolden-checksum: " + buf;
}

const char* error_class_name(ratekit::ErrorClass cls) {
    switch (cls) {
        case ratekit::ErrorClass::input: return "input";
        case ratekit::ErrorClass::spec: return "spec";
        case ratekit::ErrorClass::numerical: return "numerical";
        case ratekit::ErrorClass::internal: return "internal";
    }
    return "internal";
}

int exit_code_for(ratekit::ErrorClass cls) {
    switch (cls) {
        case ratekit::ErrorClass::input: return 2;
        case ratekit::ErrorClass::spec: return 3;
        case ratekit::ErrorClass::numerical: return 4;
        case ratekit::ErrorClass::internal: return 5;
    }
    return 5;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ratekit::ParseError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw ratekit::ParseError("write to '" + path + "' failed");
}

void write_json(const std::string& path, const ratekit::Json& artifact) {
    write_output(path, artifact.dump(2) + "\n");
}

ratekit::Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ratekit::ParseError("cannot open '" + path + "'");
    try {
        return ratekit::Json::parse(in);
    } catch (const ratekit::Json::exception& e) {
        throw ratekit::ParseError(path + ": " + e.what());
    }
}

/// Parse "name:unit,name:unit" into a schema; a bare name gets an empty
/// unit.
std::vector<std::pair<std::string, std::string>> parse_schema(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> schema;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            throw ratekit::ParseError("--columns: empty entry");
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            schema.emplace_back(item, "");
        else
            schema.emplace_back(item.substr(0, colon), item.substr(colon + 1));
    }
    if (schema.empty())
        throw ratekit::ParseError("--columns: no entries");
    return schema;
}

ratekit::FactorPanel load_input(const std::string& path, const std::string& columns) {
    if (columns.empty())
        return ratekit::load_panel(path);
    return ratekit::load_panel(path, parse_schema(columns));
}

ratekit::MonetaryParams load_params(const std::string& ref, ratekit::Json* golden_json) {
    if (ref.rfind("golden:", 0) == 0) {
        const auto& set = ratekit::golden_set(ref.substr(7));
        if (golden_json) {
            *golden_json = ratekit::monetary_params_to_json(set.params());
            (*golden_json)["label"] = set.label;
        }
        return set.params();
    }
    ratekit::Json j = read_json(ref);
    ratekit::MonetaryParams p = ratekit::monetary_params_from_json(j);
    if (golden_json) *golden_json = ratekit::monetary_params_to_json(p);
    return p;
}

void print_sign_warnings(const ratekit::MonetaryParams& p) {
    for (const auto& w : ratekit::sign_warnings(p)) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------

struct RegressArgs {
    std::string spec;
    std::string input;
    std::string columns;
    std::string out;
    std::vector<double> y0;
};

void run_regress(const RegressArgs& args) {
    ratekit::ModelSpec spec;
    std::string model_name;
    if (args.spec.rfind("builtin:", 0) == 0) {
        model_name = args.spec.substr(8);
        spec = ratekit::builtin_spec(ratekit::model_kind_from_name(model_name));
    } else {
        spec = ratekit::model_spec_from_json(read_json(args.spec));
        model_name = "custom";
    }
    if (!args.y0.empty()) spec.initial_response_values = args.y0;
    ratekit::FactorPanel panel = load_input(args.input, args.columns);
    ratekit::ModelFit result = ratekit::fit_model(spec, panel);
    write_json(args.out, ratekit::fit_to_json(result.fit, model_name));
}

struct FilterArgs {
    std::string input;
    std::string states;
    std::string config;
    std::string columns;
    std::string out;
};

void run_filter(const FilterArgs& args) {
    ratekit::FactorPanel panel = load_input(args.input, args.columns);
    ratekit::FactorPanel states = ratekit::load_panel(args.states);
    if (states.cols() != 2)
        throw ratekit::ShapeError(args.states + ": the states file needs exactly 2 value "
                                  "columns, got " + std::to_string(states.cols()));
    if (states.periods() != panel.periods())
        throw ratekit::AlignmentError(args.states +
                                      ": states do not share the panel's period axis");
    std::vector<Eigen::Vector2d> observed(states.rows());
    for (std::size_t i = 0; i < states.rows(); ++i)
        observed[i] = Eigen::Vector2d(states.raw_column(0)[i], states.raw_column(1)[i]);

    ratekit::FilterOverrides overrides;
    if (!args.config.empty())
        overrides = ratekit::filter_overrides_from_json(read_json(args.config));

    ratekit::NoiseConfig noise = ratekit::default_noise_config(panel, observed);
    if (overrides.q || overrides.r) {
        Eigen::Vector2d q = overrides.q.value_or(noise.q);
        Eigen::VectorXd r = overrides.r.value_or(noise.r);
        noise = ratekit::NoiseConfig(q, r);
    }
    ratekit::StateEstimate init = ratekit::default_init(observed);
    if (overrides.init_x || overrides.init_P) {
        init = ratekit::StateEstimate(overrides.init_x.value_or(init.x_hat),
                                      overrides.init_P.value_or(init.P), 0);
    }
    ratekit::FilterTrajectory traj = ratekit::run_filter(panel, observed, noise, init);
    write_json(args.out,
               ratekit::trajectory_to_json(traj, noise, states.names()[0], states.names()[1]));
}

struct VelocityArgs {
    std::string model;
    std::string params;
    std::string input;
    std::string columns;
    std::string out;
    bool normalize = false;
};

void run_velocity(const VelocityArgs& args) {
    ratekit::Json params_json;
    ratekit::MonetaryParams params = load_params(args.params, &params_json);
    print_sign_warnings(params);
    ratekit::FactorPanel panel = load_input(args.input, args.columns);
    for (const char* name : {"price", "gdp", "rate"})
        if (!panel.has(name))
            throw ratekit::SpecError(args.input + ": velocity needs column '" +
                                     std::string(name) + "'");
    ratekit::VelocitySeries v = [&] {
        if (args.model == "static")
            return ratekit::velocity_static(panel.column("price"), panel.column("gdp"),
                                            panel.column("rate"), params);
        // lagged: the full price column supplies the extra leading
        // observation; GDP and rate start one period later
        return ratekit::velocity_lagged(panel.column("price"),
                                        panel.column("gdp").drop_first(1),
                                        panel.column("rate").drop_first(1), params);
    }();
    if (args.normalize) v = ratekit::normalized(v);
    write_json(args.out, ratekit::velocity_to_json(v, args.model, params_json, args.normalize));
}

struct ForecastArgs {
    std::string params;
    std::string input;
    std::string columns;
    std::string out;
};

void run_forecast(const ForecastArgs& args) {
    ratekit::MonetaryParams params = load_params(args.params, nullptr);
    print_sign_warnings(params);
    ratekit::FactorPanel panel = load_input(args.input, args.columns);
    for (const char* name : {"m_diff", "g_diff", "r_diff", "log_fx"})
        if (!panel.has(name))
            throw ratekit::SpecError(args.input + ": forecast needs column '" +
                                     std::string(name) + "'");
    const std::size_t last = panel.rows() - 1;
    Eigen::Vector3d factors(panel.raw_column(panel.index_of("m_diff"))[last],
                            panel.raw_column(panel.index_of("g_diff"))[last],
                            panel.raw_column(panel.index_of("r_diff"))[last]);
    const double y_prev = panel.raw_column(panel.index_of("log_fx"))[last];
    const double log_forecast = ratekit::forecast_exchange(params, factors, y_prev);
    write_json(args.out, ratekit::forecast_to_json(params, factors, y_prev, log_forecast));
}

struct IdentityArgs {
    std::string input;
    std::string params;
    std::string columns;
    std::string out;
};

void run_identity(const IdentityArgs& args) {
    std::stringstream ss(args.params);
    std::vector<double> vals;
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ratekit::ParseError("--params: cannot parse '" + item + "' as a number");
        }
    }
    if (vals.size() != 3)
        throw ratekit::ParseError("--params: expected a,k,lambda (3 numbers), got " +
                                  std::to_string(vals.size()));
    ratekit::FactorPanel panel = load_input(args.input, args.columns);
    ratekit::IdentityReport report =
        ratekit::monetary_identity_check(panel, vals[0], vals[1], vals[2]);
    write_json(args.out, ratekit::identity_to_json(report));
}

struct ReportArgs {
    std::string artifact;
    std::string out;
};

void run_report(const ReportArgs& args) {
    ratekit::Json artifact;
    if (args.artifact.rfind("golden:", 0) == 0)
        artifact = ratekit::golden_to_json(ratekit::golden_set(args.artifact.substr(7)));
    else
        artifact = read_json(args.artifact);
    write_output(args.out, ratekit::render_report(artifact));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quarterly exchange/inflation rate toolkit"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    int seed = 0;
    app.add_option("--seed", seed,
                   "seed for commands that generate synthetic data "
                   "(reserved; every current command is deterministic)")
        ->capture_default_str();

    RegressArgs regress_args;
    auto* regress = app.add_subcommand("regress", "fit a linear model and emit a JSON report");
    regress->add_option("--spec", regress_args.spec,
                        "builtin:<kind> or a JSON model-spec file")->required();
    regress->add_option("--input", regress_args.input, "panel CSV")->required();
    regress->add_option("--columns", regress_args.columns, "name:unit,... column schema");
    regress->add_option("--y0", regress_args.y0,
                        "pre-sample response values for lagged specs (chronological)");
    regress->add_option("--out", regress_args.out, "output path (default stdout)");

    FilterArgs filter_args;
    auto* filter = app.add_subcommand("filter", "run the adequacy filter over a factor panel");
    filter->add_option("--input", filter_args.input, "factor panel CSV")->required();
    filter->add_option("--states", filter_args.states,
                       "CSV with the two observed state columns")->required();
    filter->add_option("--config", filter_args.config, "JSON noise/init overrides");
    filter->add_option("--columns", filter_args.columns, "name:unit,... column schema");
    filter->add_option("--out", filter_args.out, "output path (default stdout)");

    VelocityArgs velocity_args;
    auto* velocity = app.add_subcommand("velocity", "money-circulation velocity series");
    velocity->add_option("--model", velocity_args.model, "static or lagged")
        ->required()->check(CLI::IsMember({"static", "lagged"}));
    velocity->add_option("--params", velocity_args.params,
                         "golden:<label> or a JSON params file")->required();
    velocity->add_option("--input", velocity_args.input,
                         "CSV with price, gdp, rate columns")->required();
    velocity->add_option("--columns", velocity_args.columns, "name:unit,... column schema");
    velocity->add_flag("--normalize", velocity_args.normalize,
                       "rescale so the first period reads 1.0");
    velocity->add_option("--out", velocity_args.out, "output path (default stdout)");

    ForecastArgs forecast_args;
    auto* forecast = app.add_subcommand("forecast", "one-step exchange-rate forecast");
    forecast->add_option("--params", forecast_args.params,
                         "golden:<label> or a JSON params file (lagged kind)")->required();
    forecast->add_option("--input", forecast_args.input,
                         "CSV with m_diff, g_diff, r_diff, log_fx columns")->required();
    forecast->add_option("--columns", forecast_args.columns, "name:unit,... column schema");
    forecast->add_option("--out", forecast_args.out, "output path (default stdout)");

    IdentityArgs identity_args;
    auto* identity = app.add_subcommand("identity-check", "parity relation residual report");
    identity->add_option("--input", identity_args.input,
                         "CSV with m, m_star, y, y_star, i, i_star, s columns")->required();
    identity->add_option("--params", identity_args.params, "a,k,lambda")->required();
    identity->add_option("--columns", identity_args.columns, "name:unit,... column schema");
    identity->add_option("--out", identity_args.out, "output path (default stdout)");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "render an artifact as a plain-text table");
    report->add_option("artifact", report_args.artifact,
                       "artifact JSON path or golden:<label>")->required();
    report->add_option("--out", report_args.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (regress->parsed()) run_regress(regress_args);
        if (filter->parsed()) run_filter(filter_args);
        if (velocity->parsed()) run_velocity(velocity_args);
        if (forecast->parsed()) run_forecast(forecast_args);
        if (identity->parsed()) run_identity(identity_args);
        if (report->parsed()) run_report(report_args);
    } catch (const ratekit::Error& e) {
        std::cerr << "error[" << error_class_name(e.error_class()) << "]: " << e.what()
                  << "\n";
        return exit_code_for(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
