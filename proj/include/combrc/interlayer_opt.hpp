#pragma once

// Tuning of the inter-layer attenuation mask: a uniform attenuation sweep and
// CMA-ES over every line's attenuation (in dB).

#include "combrc/error.hpp"
#include "combrc/parallel.hpp"
#include "combrc/random.hpp"
#include "combrc/reservoir.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace combrc {

/// Amplitude alpha with alpha^2 = 10^(att_db / 10).
inline double db_to_amplitude(double att_db) { return std::pow(10.0, att_db / 20.0); }

inline InterlayerWeights weights_from_db(const Eigen::VectorXd& att_db)
{
    InterlayerWeights w;
    w.diag = att_db.unaryExpr([](double v) { return db_to_amplitude(v); });
    return w;
}

struct AttenuationSweepConfig {
    double min_db = -20.0;
    double max_db = 0.0;
    int n_points = 21;

    void validate() const
    {
        if (!(min_db < max_db))
            throw DomainError("AttenuationSweepConfig: min_db must be < max_db");
        if (n_points < 1)
            throw DomainError("AttenuationSweepConfig: n_points must be >= 1");
    }

    /// Evenly spaced in dB from min_db to max_db; a single point sits at min_db.
    std::vector<double> grid() const
    {
        std::vector<double> g(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i)
            g[static_cast<std::size_t>(i)] =
                n_points == 1 ? min_db : min_db + (max_db - min_db) * i / (n_points - 1);
        return g;
    }

    bool operator==(const AttenuationSweepConfig&) const = default;
};

struct SweepPoint {
    double att_db = 0.0;
    double score = std::numeric_limits<double>::quiet_NaN();
    std::string error;  ///< non-empty when the objective threw

    bool ok() const { return error.empty(); }
};

struct SweepResult {
    InterlayerWeights best;
    double best_db = 0.0;
    double best_score = std::numeric_limits<double>::quiet_NaN();
    std::vector<SweepPoint> curve;
};

using MaskObjective = std::function<double(const InterlayerWeights&)>;

/// Evaluates the objective once per grid point with diag = alpha * 1. Failed
/// points are recorded; only a sweep where every point fails throws. Points
/// may be evaluated on `jobs` threads; the result does not depend on it.
inline SweepResult attenuation_sweep(const MaskObjective& objective, const AttenuationSweepConfig& cfg,
                                     Eigen::Index n, int jobs = 1)
{
    cfg.validate();
    if (n < 1)
        throw DimensionError("attenuation_sweep: mask size must be >= 1");
    SweepResult result;
    for (double db : cfg.grid())
        result.curve.push_back(SweepPoint{db, std::numeric_limits<double>::quiet_NaN(), {}});
    parallel_for(result.curve.size(), jobs, [&](std::size_t i) {
        SweepPoint& p = result.curve[i];
        try {
            p.score = objective(InterlayerWeights::uniform(n, db_to_amplitude(p.att_db)));
            if (std::isnan(p.score))
                p.error = "objective returned NaN";
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    });
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < result.curve.size(); ++i)
        if (result.curve[i].ok() && (!best || result.curve[i].score < result.curve[*best].score))
            best = i;
    if (!best)
        throw NumericalError("attenuation_sweep: every sweep point failed (first error: "
                             + result.curve.front().error + ")");
    result.best_db = result.curve[*best].att_db;
    result.best_score = result.curve[*best].score;
    result.best = InterlayerWeights::uniform(n, db_to_amplitude(result.best_db));
    return result;
}

// ---------------------------------------------------------------------------
// CMA-ES

struct CmaesConfig {
    /// 0 selects the default 4 + floor(3 ln n).
    int population_size = 0;
    double sigma0 = 3.0;
    int max_evals = 480;
    std::uint64_t seed = 0;
    std::optional<std::pair<double, double>> bounds = std::pair{-20.0, 0.0};

    int population_for(Eigen::Index n) const
    {
        return population_size > 0 ? population_size
                                   : 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
    }

    void validate(Eigen::Index n) const
    {
        if (population_size != 0 && population_size < 4)
            throw DomainError("CmaesConfig: population_size must be >= 4");
        if (!(sigma0 > 0.0))
            throw DomainError("CmaesConfig: sigma0 must be > 0");
        if (max_evals < population_for(n))
            throw DomainError("CmaesConfig: max_evals must cover one generation");
        if (bounds && !(bounds->first < bounds->second))
            throw DomainError("CmaesConfig: lower bound must be below upper bound");
    }

    bool operator==(const CmaesConfig&) const = default;
};

struct CmaesEvaluation {
    int evaluation_index = 0;
    int generation = 0;
    double score = 0.0;
    Eigen::VectorXd x;
};

struct CmaesResult {
    Eigen::VectorXd best_x;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<CmaesEvaluation> evaluations;
    std::vector<double> generation_best;     ///< best score within each generation
    std::vector<double> best_ever;           ///< best-so-far after each generation
    bool restarted = false;
};

using VectorObjective = std::function<double(const Eigen::VectorXd&)>;

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation, rank-one
/// and rank-mu covariance updates. Candidates outside the box are resampled
/// (and clipped after 100 attempts). Runs whole generations while the budget
/// allows and returns the best candidate ever evaluated. A degenerate
/// covariance restarts once from the best point with twice sigma0.
inline CmaesResult cmaes_minimize(const VectorObjective& objective, const Eigen::VectorXd& x0,
                                  const CmaesConfig& cfg, int jobs = 1)
{
    const Eigen::Index n = x0.size();
    if (n < 1)
        throw DimensionError("cmaes_minimize: need at least one dimension");
    cfg.validate(n);

    const int lambda = cfg.population_for(n);
    const int mu = lambda / 2;
    Eigen::VectorXd weights(mu);
    for (int i = 0; i < mu; ++i)
        weights(i) = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();
    const double dn = static_cast<double>(n);

    const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
    const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
    const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

    Rng rng(cfg.seed);
    CmaesResult result;
    result.best_x = x0;

    Eigen::VectorXd mean = x0;
    double sigma = cfg.sigma0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
    int evals = 0;
    int generation = 0;
    int generation_since_restart = 0;

    auto in_bounds = [&](const Eigen::VectorXd& x) {
        return !cfg.bounds
               || ((x.array() >= cfg.bounds->first).all() && (x.array() <= cfg.bounds->second).all());
    };

    while (evals + lambda <= cfg.max_evals) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        const Eigen::VectorXd eigvals = eig.eigenvalues();
        const bool degenerate = eig.info() != Eigen::Success || !eigvals.allFinite()
                                || eigvals.minCoeff() <= 0.0 || !std::isfinite(sigma) || sigma <= 0.0
                                || eigvals.maxCoeff() > 1e14 * eigvals.minCoeff()
                                || sigma * std::sqrt(eigvals.maxCoeff()) < 1e-300;
        if (degenerate) {
            if (result.restarted)
                break;
            result.restarted = true;
            mean = result.best_x;
            sigma = 2.0 * cfg.sigma0;
            cov.setIdentity();
            ps.setZero();
            pc.setZero();
            generation_since_restart = 0;
            continue;
        }
        const Eigen::MatrixXd basis = eig.eigenvectors();
        const Eigen::VectorXd axis = eigvals.cwiseSqrt();

        std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(lambda));
        std::vector<double> scores(static_cast<std::size_t>(lambda));
        for (int k = 0; k < lambda; ++k) {
            Eigen::VectorXd x(n);
            for (int attempt = 0;; ++attempt) {
                Eigen::VectorXd z(n);
                for (Eigen::Index i = 0; i < n; ++i)
                    z(i) = rng.normal();
                x = mean + sigma * (basis * axis.cwiseProduct(z));
                if (in_bounds(x))
                    break;
                if (attempt == 99) {
                    x = x.cwiseMax(cfg.bounds->first).cwiseMin(cfg.bounds->second);
                    break;
                }
            }
            xs[static_cast<std::size_t>(k)] = x;
        }
        parallel_for(xs.size(), jobs, [&](std::size_t k) {
            const double f = objective(xs[k]);
            scores[k] = std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
        });
        for (std::size_t k = 0; k < xs.size(); ++k) {
            result.evaluations.push_back({evals, generation, scores[k], xs[k]});
            ++evals;
            if (scores[k] < result.best_score) {
                result.best_score = scores[k];
                result.best_x = xs[k];
            }
        }

        std::vector<int> order(static_cast<std::size_t>(lambda));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return scores[static_cast<std::size_t>(a)] < scores[static_cast<std::size_t>(b)];
        });
        result.generation_best.push_back(scores[static_cast<std::size_t>(order[0])]);
        result.best_ever.push_back(result.best_score);

        const Eigen::VectorXd old_mean = mean;
        mean.setZero();
        for (int i = 0; i < mu; ++i)
            mean += weights(i) * xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        const Eigen::VectorXd y_w = (mean - old_mean) / sigma;

        const Eigen::MatrixXd inv_sqrt = basis * axis.cwiseInverse().asDiagonal() * basis.transpose();
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt * y_w);
        ++generation_since_restart;
        const double ps_norm = ps.norm();
        const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * generation_since_restart)) / chi_n
                          < 1.4 + 2.0 / (dn + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const Eigen::VectorXd y =
                (xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] - old_mean) / sigma;
            rank_mu.noalias() += weights(i) * y * y.transpose();
        }
        cov = (1.0 - c1 - cmu) * cov
              + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * cov)
              + cmu * rank_mu;
        cov = 0.5 * (cov + cov.transpose());
        sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
        ++generation;
    }
    return result;
}

}  // namespace combrc
