#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ratekit/errors.hpp"
#include "ratekit/panel.hpp"

namespace ratekit {

/// Relative singular-value cutoff below which a column set is treated as
/// rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Column label given to the intercept column.
inline constexpr const char* kInterceptLabel = "const";

/// Dense regressor matrix with named columns.
///
/// Invariants: one label per column, labels unique, entries finite; when
/// `intercept` is set, column 0 is identically one.
struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> labels;
    bool intercept = false;

    DesignMatrix(Eigen::MatrixXd entries, std::vector<std::string> names, bool with_intercept)
        : X(std::move(entries)), labels(std::move(names)), intercept(with_intercept) {
        if (static_cast<Eigen::Index>(labels.size()) != X.cols())
            throw ShapeError("design: " + std::to_string(labels.size()) + " labels for " +
                             std::to_string(X.cols()) + " columns");
        for (std::size_t j = 0; j < labels.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (labels[i] == labels[j])
                    throw IntegrityError("design: duplicate column '" + labels[j] + "'");
        if (!X.allFinite())
            throw IntegrityError("design: non-finite entry");
        if (intercept) {
            if (X.cols() == 0 || (X.col(0).array() != 1.0).any())
                throw IntegrityError("design: intercept column is not identically one");
        }
    }

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }

    Eigen::Index index_of(const std::string& label) const {
        for (std::size_t j = 0; j < labels.size(); ++j)
            if (labels[j] == label) return static_cast<Eigen::Index>(j);
        throw ValueError("design: no column '" + label + "'");
    }
};

/// Declarative description of one regression: which panel column responds,
/// which columns act as factors, whether an intercept is included, which
/// coefficients are pinned, and which lagged copies of the response enter
/// as regressors.
///
/// Lags are regressor columns with free coefficients, not autoregressive
/// terms on the left side. `initial_response_values` supplies the
/// pre-sample responses in chronological order (last element immediately
/// precedes the first observation) and must cover the largest lag.
struct ModelSpec {
    std::string response;
    std::vector<std::string> factors;
    bool include_intercept = true;
    std::vector<int> response_lags;
    std::map<std::string, double> fixed_coefficients;
    std::vector<double> initial_response_values;
};

struct DesignData {
    DesignMatrix design;
    Eigen::VectorXd response;
};

/// Assemble the regressor matrix and response vector for a spec.
///
/// Column order: intercept (if requested), factors in spec order, then lag
/// columns in spec order. Lag rows reaching before the sample use the
/// supplied initial values, so the row count equals the panel's.
inline DesignData build_design(const ModelSpec& spec, const FactorPanel& panel) {
    if (!panel.has(spec.response))
        throw SpecError("model: unknown response column '" + spec.response + "'");
    for (const auto& f : spec.factors) {
        if (!panel.has(f))
            throw SpecError("model: unknown factor column '" + f + "'");
        std::size_t uses = 0;
        for (const auto& g : spec.factors)
            if (g == f) ++uses;
        if (uses > 1)
            throw SpecError("model: factor '" + f + "' listed twice");
    }
    for (const auto& [label, value] : spec.fixed_coefficients) {
        (void)value;
        bool found = false;
        for (const auto& f : spec.factors)
            if (f == label) found = true;
        if (!found)
            throw SpecError("model: fixed coefficient for '" + label +
                            "', which is not a factor");
    }
    int max_lag = 0;
    for (int lag : spec.response_lags) {
        if (lag < 1)
            throw SpecError("model: lag order " + std::to_string(lag) + " is below 1");
        max_lag = std::max(max_lag, lag);
    }
    if (static_cast<int>(spec.initial_response_values.size()) < max_lag)
        throw SpecError("model: lag " + std::to_string(max_lag) + " needs " +
                        std::to_string(max_lag) + " initial response values, got " +
                        std::to_string(spec.initial_response_values.size()));

    const Eigen::Index n = static_cast<Eigen::Index>(panel.rows());
    const std::vector<double>& y_raw = panel.raw_column(panel.index_of(spec.response));
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_raw.data(), n);

    const Eigen::Index p = (spec.include_intercept ? 1 : 0) +
                           static_cast<Eigen::Index>(spec.factors.size()) +
                           static_cast<Eigen::Index>(spec.response_lags.size());
    if (p == 0)
        throw SpecError("model: no regressor columns");
    // Exactly determined systems can still be assembled (and solved);
    // fit() separately requires n > p before producing diagnostics.
    if (n < p)
        throw UnderdeterminedError("model: " + std::to_string(n) + " observations for " +
                                   std::to_string(p) + " coefficients");

    Eigen::MatrixXd X(n, p);
    std::vector<std::string> labels;
    Eigen::Index col = 0;
    if (spec.include_intercept) {
        X.col(col).setOnes();
        labels.push_back(kInterceptLabel);
        ++col;
    }
    for (const auto& f : spec.factors) {
        const std::vector<double>& c = panel.raw_column(panel.index_of(f));
        X.col(col) = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
        labels.push_back(f);
        ++col;
    }
    const auto& init = spec.initial_response_values;
    for (int lag : spec.response_lags) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const long j = static_cast<long>(i) - lag;
            X(i, col) = (j >= 0) ? y[j]
                                 : init[init.size() + static_cast<std::size_t>(j)];
        }
        labels.push_back(spec.response + "_lag" + std::to_string(lag));
        ++col;
    }
    return DesignData{DesignMatrix(std::move(X), std::move(labels), spec.include_intercept),
                      std::move(y)};
}

/// One fitted regression. `coefficients` follows the design's column
/// order with pinned values in place; `std_errors` is zero on pinned
/// columns. `fitted` is the full prediction (pinned contribution
/// included) and `residuals == response - fitted` holds bitwise.
///
/// `sigma` is the maximum-likelihood residual scale sqrt(SSR/n), reported
/// as a standard deviation; its square is the dispersion estimate.
/// `fisher` is +infinity when the model has no factor-aligned variation
/// to explain (an intercept-only fit).
struct RegressionFit {
    std::vector<std::string> labels;
    Eigen::VectorXd coefficients;
    std::vector<bool> fixed;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fixed_contribution;
    double r_squared = 0.0;
    double sigma = 0.0;
    double fisher = 0.0;
    Eigen::Index n = 0;
    Eigen::Index free_cols = 0;

    double coefficient(const std::string& label) const {
        for (std::size_t j = 0; j < labels.size(); ++j)
            if (labels[j] == label) return coefficients[static_cast<Eigen::Index>(j)];
        throw ValueError("fit: no coefficient '" + label + "'");
    }
};

namespace detail {

struct ProjectionSplit {
    double residual_part;   // <e, (I-P)e>
    double explained_part;  // <e, Pe>
};

/// Split ||e||^2 across the orthogonal projector P onto col(X) and its
/// complement. X must have full column rank (callers check).
inline ProjectionSplit project_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& e) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), X.cols());
    Eigen::VectorXd proj = q1 * (q1.transpose() * e);
    return ProjectionSplit{(e - proj).squaredNorm(), proj.squaredNorm()};
}

/// Throw unless the smallest singular value clears kRankTolerance times
/// the largest; the message lists the pivot-identified dependent columns.
inline void require_full_rank(const Eigen::MatrixXd& X,
                              const std::vector<std::string>& labels,
                              const std::string& context) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[sv.size() - 1] > kRankTolerance * sv[0]) return;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(kRankTolerance);
    const Eigen::Index rank = qr.rank();
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = rank; j < X.cols(); ++j) {
        if (!cols.empty()) cols += ", ";
        cols += "'" + labels[static_cast<std::size_t>(perm[j])] + "'";
    }
    throw SingularityError(context + ": rank-deficient columns (near-dependent: " +
                           (cols.empty() ? std::string("unidentified") : cols) + ")");
}

}  // namespace detail

/// The system actually solved when some coefficients are pinned: the
/// pinned contribution moves to the response side and only the free
/// columns remain.
struct ReducedSystem {
    DesignMatrix free_design;
    Eigen::VectorXd reduced_response;
    Eigen::VectorXd fixed_contribution;
    std::vector<Eigen::Index> free_index;
};

inline ReducedSystem reduce_system(const DesignMatrix& design, const Eigen::VectorXd& response,
                                   const std::map<std::string, double>& fixed) {
    if (response.size() != design.rows())
        throw ShapeError("fit: response length " + std::to_string(response.size()) +
                         " does not match " + std::to_string(design.rows()) + " design rows");
    for (const auto& [label, value] : fixed) {
        (void)value;
        design.index_of(label);  // throws ValueError on unknown label
    }
    Eigen::VectorXd offset = Eigen::VectorXd::Zero(design.rows());
    std::vector<Eigen::Index> free_index;
    std::vector<std::string> free_labels;
    bool free_intercept = false;
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
        auto it = fixed.find(design.labels[static_cast<std::size_t>(j)]);
        if (it != fixed.end()) {
            offset += it->second * design.X.col(j);
        } else {
            free_index.push_back(j);
            free_labels.push_back(design.labels[static_cast<std::size_t>(j)]);
            if (design.intercept && j == 0) free_intercept = true;
        }
    }
    if (free_index.empty())
        throw ValueError("fit: every coefficient is pinned, nothing to estimate");
    Eigen::MatrixXd Xf(design.rows(), static_cast<Eigen::Index>(free_index.size()));
    for (std::size_t j = 0; j < free_index.size(); ++j)
        Xf.col(static_cast<Eigen::Index>(j)) = design.X.col(free_index[j]);
    return ReducedSystem{DesignMatrix(std::move(Xf), std::move(free_labels), free_intercept),
                         response - offset, std::move(offset), std::move(free_index)};
}

/// Determination coefficient as a variance ratio:
/// sum((fitted - mean fitted)^2) / sum((observed - mean observed)^2).
inline double determination_ratio(const Eigen::VectorXd& fitted,
                                  const Eigen::VectorXd& observed) {
    if (fitted.size() != observed.size())
        throw ShapeError("determination_ratio: length mismatch");
    const double sst = (observed.array() - observed.mean()).square().sum();
    if (sst <= 0.0)
        throw DegenerateError("determination_ratio: observed response has zero variance");
    const double ssf = (fitted.array() - fitted.mean()).square().sum();
    return ssf / sst;
}

/// Sample correlation between fitted and observed values (the multiple
/// correlation coefficient). Its square equals determination_ratio for
/// any least-squares fit with an intercept.
inline double correlation_coefficient(const Eigen::VectorXd& fitted,
                                      const Eigen::VectorXd& observed) {
    if (fitted.size() != observed.size())
        throw ShapeError("correlation_coefficient: length mismatch");
    Eigen::ArrayXd f = fitted.array() - fitted.mean();
    Eigen::ArrayXd o = observed.array() - observed.mean();
    const double vf = f.square().sum();
    const double vo = o.square().sum();
    if (vf <= 0.0 || vo <= 0.0)
        throw DegenerateError("correlation_coefficient: zero variance input");
    return (f * o).sum() / std::sqrt(vf * vo);
}

/// Determination coefficient as the quadratic form
/// <y_c, X1 (X1^T X1)^{-1} X1^T y_c> / <y_c, y_c>, with X1 the
/// mean-centered non-intercept columns and y_c the centered response.
/// Agrees with determination_ratio on any intercept fit.
inline double r_squared_quadratic(const DesignMatrix& design, const Eigen::VectorXd& response) {
    if (response.size() != design.rows())
        throw ShapeError("r_squared_quadratic: response length mismatch");
    const Eigen::Index skip = design.intercept ? 1 : 0;
    const Eigen::Index k = design.cols() - skip;
    if (k <= 0)
        throw ShapeError("r_squared_quadratic: no factor columns");
    Eigen::MatrixXd X1 = design.X.rightCols(k);
    X1.rowwise() -= X1.colwise().mean();
    std::vector<std::string> labels(design.labels.begin() + skip, design.labels.end());
    detail::require_full_rank(X1, labels, "r_squared_quadratic");
    Eigen::VectorXd y_c = response.array() - response.mean();
    const double denom = y_c.squaredNorm();
    if (denom <= 0.0)
        throw DegenerateError("r_squared_quadratic: response has zero variance");
    return detail::project_split(X1, y_c).explained_part / denom;
}

/// Quadratic-form quality ratio for a residual vector against a design:
///
///   <e, (I-P)e> / <e, Pe> * p / (n - p),   P = X (X^T X)^{-1} X^T
///
/// with p the column count. Small values indicate factor-aligned
/// residual structure. Note the arrangement: residual-to-explained with
/// a p/(n-p) factor, the reciprocal of the textbook F layout; it is kept
/// this way so reported values match this toolkit's reference tables.
/// The ratio is invariant to rescaling e, so pre-standardizing residuals
/// changes nothing but their units.
inline double fisher_statistic(const DesignMatrix& design, const Eigen::VectorXd& residuals) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    if (residuals.size() != n)
        throw ShapeError("fisher_statistic: residual length mismatch");
    if (n <= p)
        throw UnderdeterminedError("fisher_statistic: needs more rows than columns");
    detail::require_full_rank(design.X, design.labels, "fisher_statistic");
    auto split = detail::project_split(design.X, residuals);
    const double scale = residuals.squaredNorm();
    if (scale <= 0.0 || split.explained_part <= 1e-13 * scale)
        throw DegenerateError(
            "fisher_statistic: factor-aligned component of the residuals vanishes");
    return split.residual_part / split.explained_part *
           (static_cast<double>(p) / static_cast<double>(n - p));
}

/// Least-squares fit with optional pinned coefficients.
///
/// Pinned coefficients are honored exactly: their contribution moves to
/// the response side and the free columns are solved by Householder QR
/// (the normal equations A = X^T X define the estimator, but A is never
/// formed; QR avoids squaring the condition number). Diagnostics are
/// computed on the reduced system, so R-squared keeps its variance-share
/// meaning and stays in [0, 1] for intercept fits.
///
/// The fit-level quality statistic uses the centered reduced response,
/// standardized by sigma, as the probe vector: its factor-aligned part is
/// the explained sum of squares, giving SSR/SSE * p/(n-p).
inline RegressionFit fit(const DesignMatrix& design, const Eigen::VectorXd& response,
                         const std::map<std::string, double>& fixed = {}) {
    const Eigen::Index n = design.rows();
    if (n <= design.cols())
        throw UnderdeterminedError("fit: " + std::to_string(n) + " observations for " +
                                   std::to_string(design.cols()) + " coefficients");
    ReducedSystem sys = reduce_system(design, response, fixed);
    const Eigen::MatrixXd& Xf = sys.free_design.X;
    const Eigen::Index pf = Xf.cols();

    detail::require_full_rank(Xf, sys.free_design.labels, "fit");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xf);
    Eigen::VectorXd b_free = qr.solve(sys.reduced_response);

    RegressionFit out;
    out.labels = design.labels;
    out.n = n;
    out.free_cols = pf;
    out.coefficients = Eigen::VectorXd::Zero(design.cols());
    out.fixed.assign(static_cast<std::size_t>(design.cols()), true);
    for (std::size_t j = 0; j < sys.free_index.size(); ++j) {
        out.coefficients[sys.free_index[j]] = b_free[static_cast<Eigen::Index>(j)];
        out.fixed[static_cast<std::size_t>(sys.free_index[j])] = false;
    }
    for (const auto& [label, value] : fixed)
        out.coefficients[design.index_of(label)] = value;

    Eigen::VectorXd fitted_red = Xf * b_free;
    out.residuals = sys.reduced_response - fitted_red;
    out.fitted = response - out.residuals;
    out.fixed_contribution = std::move(sys.fixed_contribution);
    out.sigma = std::sqrt(out.residuals.squaredNorm() / static_cast<double>(n));
    out.r_squared = determination_ratio(fitted_red, sys.reduced_response);

    // Unbiased residual variance for standard errors; n > cols guarantees
    // a positive degree-of-freedom count.
    const double s2 = out.residuals.squaredNorm() / static_cast<double>(n - pf);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xf, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    out.std_errors = Eigen::VectorXd::Zero(design.cols());
    for (Eigen::Index i = 0; i < pf; ++i) {
        double diag = 0.0;
        for (Eigen::Index j = 0; j < pf; ++j) {
            const double v = svd.matrixV()(i, j) / sv[j];
            diag += v * v;
        }
        out.std_errors[sys.free_index[static_cast<std::size_t>(i)]] = std::sqrt(s2 * diag);
    }

    Eigen::VectorXd probe = sys.reduced_response.array() - sys.reduced_response.mean();
    if (out.sigma > 0.0) probe /= out.sigma;
    auto split = detail::project_split(Xf, probe);
    const double scale = probe.squaredNorm();
    if (scale <= 0.0 || split.explained_part <= 1e-13 * scale) {
        // No factor-aligned variation (e.g. intercept-only model): the
        // residual-to-explained ratio diverges rather than erroring out.
        out.fisher = std::numeric_limits<double>::infinity();
    } else {
        out.fisher = split.residual_part / split.explained_part *
                     (static_cast<double>(pf) / static_cast<double>(n - pf));
    }
    return out;
}

/// Determination coefficient of a fit against the response it was fitted
/// to, evaluated on the reduced system when coefficients were pinned.
inline double r_squared(const RegressionFit& f, const Eigen::VectorXd& response) {
    if (response.size() != f.fitted.size())
        throw ShapeError("r_squared: response length mismatch");
    return determination_ratio(f.fitted - f.fixed_contribution,
                               response - f.fixed_contribution);
}

/// Maximum-likelihood residual scale sqrt(<y - Xb, y - Xb> / n),
/// recomputed from the design and the full coefficient vector.
inline double sigma_mle(const DesignMatrix& design, const Eigen::VectorXd& response,
                        const RegressionFit& f) {
    if (response.size() != design.rows())
        throw ShapeError("sigma_mle: response length mismatch");
    if (f.coefficients.size() != design.cols())
        throw ShapeError("sigma_mle: coefficient count mismatch");
    Eigen::VectorXd resid = response - design.X * f.coefficients;
    return std::sqrt(resid.squaredNorm() / static_cast<double>(design.rows()));
}

/// Point prediction: dot product of the full coefficient vector (pinned
/// values included) with one design row.
inline double predict(const RegressionFit& f, const Eigen::VectorXd& design_row) {
    if (design_row.size() != f.coefficients.size())
        throw ShapeError("predict: row length " + std::to_string(design_row.size()) +
                         " for " + std::to_string(f.coefficients.size()) + " coefficients");
    return f.coefficients.dot(design_row);
}

struct ModelFit {
    DesignMatrix design;
    Eigen::VectorXd response;
    RegressionFit fit;
};

inline ModelFit fit_model(const ModelSpec& spec, const FactorPanel& panel) {
    DesignData dd = build_design(spec, panel);
    RegressionFit f = fit(dd.design, dd.response, spec.fixed_coefficients);
    return ModelFit{std::move(dd.design), std::move(dd.response), std::move(f)};
}

}  // namespace ratekit
