#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ratekit/errors.hpp"
#include "ratekit/panel.hpp"
#include "ratekit/period.hpp"

namespace ratekit {

/// Latent-pair estimate at one time index. The state transition is the
/// identity, so a posterior doubles as the next-period forecast.
///
/// Invariants: P symmetric to 1e-12 relative and positive semidefinite to
/// -1e-10 relative on the smaller eigenvalue.
struct StateEstimate {
    Eigen::Vector2d x_hat;
    Eigen::Matrix2d P;
    int k = 0;

    StateEstimate(Eigen::Vector2d x, Eigen::Matrix2d cov, int index)
        : x_hat(std::move(x)), P(std::move(cov)), k(index) {
        if (!x_hat.allFinite() || !P.allFinite())
            throw IntegrityError("state estimate: non-finite entry at k=" +
                                 std::to_string(k));
        const double scale = P.norm();
        if (std::abs(P(0, 1) - P(1, 0)) > 1e-12 * std::max(scale, 1.0))
            throw IntegrityError("state estimate: covariance asymmetric at k=" +
                                 std::to_string(k));
        // Smaller eigenvalue of the symmetrized 2x2.
        const double a = P(0, 0), c = P(1, 1), b = 0.5 * (P(0, 1) + P(1, 0));
        const double mid = 0.5 * (a + c);
        const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        if (mid - rad < -1e-10 * scale)
            throw IntegrityError("state estimate: covariance not PSD at k=" +
                                 std::to_string(k));
    }
};

/// Diagonal process/observation noise. q holds the two state-increment
/// variances (zero allowed: a zero-noise state is the static-estimation
/// limit); r holds one strictly positive variance per factor, on the
/// standardized factor scale.
struct NoiseConfig {
    Eigen::Vector2d q;
    Eigen::VectorXd r;

    NoiseConfig(Eigen::Vector2d q_, Eigen::VectorXd r_)
        : q(std::move(q_)), r(std::move(r_)) {
        if (!(q[0] >= 0.0) || !(q[1] >= 0.0))
            throw IntegrityError("noise config: process variances must be >= 0");
        for (Eigen::Index i = 0; i < r.size(); ++i)
            if (!(r[i] > 0.0))
                throw IntegrityError("noise config: observation variance " +
                                     std::to_string(i) + " must be > 0");
    }
};

/// Per-period linear map from the latent pair to the n factors.
struct ObservationMap {
    Eigen::MatrixXd H;  // n x 2
    int k = 0;
};

/// Full output of one filter run. Step j covers time index k = j + 1:
/// priors[j] is predicted from the previous posterior, posteriors[j] is
/// corrected by the period-(k+1) factor snapshot, and forecasts[j] (the
/// posterior mean) targets period j + 2. The first two periods therefore
/// carry no forecast.
struct FilterTrajectory {
    StateEstimate init;
    std::vector<StateEstimate> priors;
    std::vector<StateEstimate> posteriors;
    std::vector<Eigen::MatrixXd> gains;      // 2 x n each
    std::vector<Eigen::Vector2d> forecasts;  // forecasts[j] targets period j + 2
    std::vector<Period> periods;             // full panel axis
    std::vector<Eigen::Vector2d> observed;   // measured pairs, full axis

    static constexpr std::size_t warmup = 2;
};

/// Fit one observation-map snapshot from two consecutive periods.
///
/// Row i minimizes [y_k(i) - h.x_k]^2 + [y_k1(i) - h.x_k1]^2 over h.
/// With linearly independent state vectors the 2x2 system is solved
/// exactly (zero residual); collinear states give the minimal-norm
/// solution through an SVD pseudo-inverse at 1e-10 relative tolerance.
inline ObservationMap fit_observation_matrix(const Eigen::VectorXd& y_k,
                                             const Eigen::VectorXd& y_k1,
                                             const Eigen::Vector2d& x_k,
                                             const Eigen::Vector2d& x_k1,
                                             int k = 0) {
    if (y_k.size() != y_k1.size())
        throw ShapeError("observation fit: factor snapshots differ in length");
    if (x_k.isZero(0.0) && x_k1.isZero(0.0))
        throw DegenerateError("observation fit: both state vectors are zero at k=" +
                              std::to_string(k));
    Eigen::Matrix2d S;
    S << x_k[0], x_k[1], x_k1[0], x_k1[1];
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    ObservationMap out;
    out.k = k;
    out.H.resize(y_k.size(), 2);
    for (Eigen::Index i = 0; i < y_k.size(); ++i) {
        Eigen::Vector2d rhs(y_k[i], y_k1[i]);
        out.H.row(i) = svd.solve(rhs).transpose();
    }
    if (!out.H.allFinite())
        throw InternalError("observation fit: non-finite row");
    return out;
}

/// Time update under the identity transition: the mean carries over and
/// the process noise widens the covariance.
inline StateEstimate predict_step(const StateEstimate& prev, const NoiseConfig& noise) {
    Eigen::Matrix2d P = prev.P;
    P(0, 0) += noise.q[0];
    P(1, 1) += noise.q[1];
    return StateEstimate(prev.x_hat, P, prev.k + 1);
}

/// Measurement update: gain G = P- H^T [H P- H^T + R]^{-1} via an LDLT
/// solve, mean corrected by the innovation, covariance (I - GH)P-
/// symmetrized before constructing the posterior.
inline std::pair<StateEstimate, Eigen::MatrixXd> update_step(const StateEstimate& prior,
                                                             const ObservationMap& obs,
                                                             const Eigen::VectorXd& y_next,
                                                             const NoiseConfig& noise) {
    const Eigen::Index n = obs.H.rows();
    if (y_next.size() != n)
        throw ShapeError("update: observation length " + std::to_string(y_next.size()) +
                         " for " + std::to_string(n) + " factor rows");
    if (noise.r.size() != n)
        throw ShapeError("update: noise config covers " + std::to_string(noise.r.size()) +
                         " factors, observation has " + std::to_string(n));
    Eigen::MatrixXd S = obs.H * prior.P * obs.H.transpose();
    S.diagonal() += noise.r;
    // G^T = S^{-1} H P- ; S is SPD because R has strictly positive diagonal.
    Eigen::MatrixXd gain_t = S.ldlt().solve(obs.H * prior.P);
    Eigen::MatrixXd G = gain_t.transpose();
    Eigen::Vector2d innovation_pull = G * (y_next - obs.H * prior.x_hat);
    Eigen::Matrix2d P = (Eigen::Matrix2d::Identity() - G * obs.H) * prior.P;
    P = 0.5 * (P + P.transpose()).eval();
    return {StateEstimate(prior.x_hat + innovation_pull, P, prior.k), std::move(G)};
}

/// Per-column affine map that takes raw factors to zero-mean unit-variance
/// columns (sample standard deviation); constant columns map to zero.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
};

inline Standardizer fit_standardizer(const FactorPanel& panel) {
    const Eigen::Index n = static_cast<Eigen::Index>(panel.rows());
    const Eigen::Index m = static_cast<Eigen::Index>(panel.cols());
    Standardizer st;
    st.mean.resize(m);
    st.scale.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Map<const Eigen::VectorXd> col(panel.raw_column(static_cast<std::size_t>(j)).data(), n);
        st.mean[j] = col.mean();
        const double ss = (col.array() - st.mean[j]).square().sum();
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        st.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return st;
}

inline Eigen::MatrixXd standardized_matrix(const FactorPanel& panel, const Standardizer& st) {
    const Eigen::Index n = static_cast<Eigen::Index>(panel.rows());
    const Eigen::Index m = static_cast<Eigen::Index>(panel.cols());
    Eigen::MatrixXd Z(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Map<const Eigen::VectorXd> col(panel.raw_column(static_cast<std::size_t>(j)).data(), n);
        Z.col(j) = (col.array() - st.mean[j]) / st.scale[j];
    }
    return Z;
}

/// Run the full recursion over a factor panel.
///
/// `observed` supplies the measured pair per period; it feeds the
/// per-step observation-map fit and the initial/noise defaults, while the
/// filtered estimates are the output. Factors are standardized
/// column-wise before fitting and updating, so configured observation
/// variances live on the standardized scale; states stay in natural
/// units.
///
/// Indexing: the posterior at k is corrected by the period-(k+1) factor
/// snapshot, and the observation map at k is fitted from periods k and
/// k+1. Steps run k = 1 .. N-2, so period 0 is consumed by the
/// initialization and the first forecast targets period 2.
inline FilterTrajectory run_filter(const FactorPanel& panel,
                                   const std::vector<Eigen::Vector2d>& observed,
                                   const NoiseConfig& noise,
                                   const StateEstimate& init) {
    const std::size_t N = panel.rows();
    if (observed.size() != N)
        throw AlignmentError("filter: " + std::to_string(observed.size()) +
                             " observed pairs for " + std::to_string(N) + " panel rows");
    if (N < 3)
        throw AlignmentError("filter: needs at least 3 periods, got " + std::to_string(N));
    if (noise.r.size() != static_cast<Eigen::Index>(panel.cols()))
        throw ShapeError("filter: noise config covers " + std::to_string(noise.r.size()) +
                         " factors, panel has " + std::to_string(panel.cols()));

    const Standardizer st = fit_standardizer(panel);
    const Eigen::MatrixXd Z = standardized_matrix(panel, st);

    FilterTrajectory traj{init, {}, {}, {}, {}, panel.periods(), observed};
    StateEstimate posterior = init;
    for (std::size_t k = 1; k + 1 < N; ++k) {
        ObservationMap H = fit_observation_matrix(
            Z.row(static_cast<Eigen::Index>(k)).transpose(),
            Z.row(static_cast<Eigen::Index>(k + 1)).transpose(),
            observed[k], observed[k + 1], static_cast<int>(k));
        StateEstimate prior = predict_step(posterior, noise);
        auto [post, gain] = update_step(prior, H, Z.row(static_cast<Eigen::Index>(k + 1)).transpose(), noise);
        posterior = post;
        traj.priors.push_back(std::move(prior));
        traj.posteriors.push_back(posterior);
        traj.gains.push_back(std::move(gain));
        traj.forecasts.push_back(posterior.x_hat);
    }
    return traj;
}

/// Scale-aware noise defaults.
///
/// Process variances: sample variance of the first differences of each
/// observed state component (floor 1e-8), so the filter expects steps of
/// the size the data actually shows. Observation variances: residual
/// variance of each standardized factor regressed on the observed pair
/// plus an intercept (floor 1e-8); factors fully explained by the pair
/// get the floor, factors the pair cannot explain get weight near their
/// full unit variance.
inline NoiseConfig default_noise_config(const FactorPanel& panel,
                                        const std::vector<Eigen::Vector2d>& observed) {
    const std::size_t N = panel.rows();
    if (observed.size() != N)
        throw AlignmentError("noise defaults: observed pairs do not match panel rows");
    if (N < 2)
        throw AlignmentError("noise defaults: needs at least 2 periods");

    Eigen::Vector2d q;
    for (int c = 0; c < 2; ++c) {
        std::vector<double> diffs(N - 1);
        for (std::size_t i = 1; i < N; ++i)
            diffs[i - 1] = observed[i][c] - observed[i - 1][c];
        Eigen::Map<Eigen::VectorXd> d(diffs.data(), static_cast<Eigen::Index>(diffs.size()));
        double var = 0.0;
        if (d.size() > 1) var = (d.array() - d.mean()).square().sum() /
                                static_cast<double>(d.size() - 1);
        q[c] = std::max(var, 1e-8);
    }

    const Standardizer st = fit_standardizer(panel);
    const Eigen::MatrixXd Z = standardized_matrix(panel, st);
    Eigen::MatrixXd S(static_cast<Eigen::Index>(N), 3);
    S.col(0).setOnes();
    for (std::size_t i = 0; i < N; ++i) {
        S(static_cast<Eigen::Index>(i), 1) = observed[i][0];
        S(static_cast<Eigen::Index>(i), 2) = observed[i][1];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S);
    Eigen::VectorXd r(panel.cols());
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        double var = 1.0;  // standardized columns have unit variance
        if (N > 3) {
            Eigen::VectorXd resid = Z.col(j) - S * qr.solve(Z.col(j));
            var = resid.squaredNorm() / static_cast<double>(N);
        }
        r[j] = std::max(var, 1e-8);
    }
    return NoiseConfig(q, r);
}

/// Default initialization: first observed pair as the mean, sample
/// variances of the observed components (floor 1e-6) as the diagonal
/// covariance.
inline StateEstimate default_init(const std::vector<Eigen::Vector2d>& observed) {
    if (observed.empty())
        throw AlignmentError("init defaults: no observed pairs");
    Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (const auto& o : observed) mean += o[c];
        mean /= static_cast<double>(observed.size());
        double ss = 0.0;
        for (const auto& o : observed) ss += (o[c] - mean) * (o[c] - mean);
        double var = observed.size() > 1
                         ? ss / static_cast<double>(observed.size() - 1)
                         : 0.0;
        P(c, c) = std::max(var, 1e-6);
    }
    return StateEstimate(observed[0], P, 0);
}

}  // namespace ratekit
