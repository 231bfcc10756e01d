#pragma once

// Ridge-regression readouts on intensity features, the split of signed
// weights into the two non-negative photodiode channels, error metrics and
// randomised cross-validation.

#include "combrc/error.hpp"
#include "combrc/parallel.hpp"
#include "combrc/random.hpp"
#include "combrc/symbols.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace combrc {

struct RidgeSolution {
    Eigen::VectorXd weights;
    double bias = 0.0;

    Eigen::VectorXd predict(const Eigen::MatrixXd& features) const
    {
        return (features * weights).array() + bias;
    }
};

/// Signed readout realised as two non-negative diagonals: the effective
/// weight on intensity k is w_plus[k]^2 - w_minus[k]^2.
struct ReadoutWeights {
    Eigen::VectorXd w_plus;
    Eigen::VectorXd w_minus;
    double bias = 0.0;

    Eigen::VectorXd signed_weights() const
    {
        return w_plus.array().square() - w_minus.array().square();
    }
};

inline std::vector<double> default_lambda_grid()
{
    return {1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
}

enum class Metric { nmse, ser };

inline const char* to_string(Metric m) { return m == Metric::nmse ? "nmse" : "ser"; }

struct RidgeConfig {
    std::vector<double> lambda_grid = default_lambda_grid();
    std::size_t washout = 0;
    std::uint64_t seed = 0;
    int n_folds = 100;
    /// Fraction of each training portion used to fit while selecting lambda.
    double inner_train_fraction = 0.8;

    void validate() const
    {
        if (lambda_grid.empty())
            throw DomainError("RidgeConfig: lambda_grid must not be empty");
        for (double l : lambda_grid)
            if (!(l > 0.0) || !std::isfinite(l))
                throw DomainError("RidgeConfig: every lambda must be > 0");
        if (n_folds < 1)
            throw DomainError("RidgeConfig: n_folds must be >= 1");
        if (!(inner_train_fraction > 0.0 && inner_train_fraction < 1.0))
            throw DomainError("RidgeConfig: inner_train_fraction must be in (0, 1)");
    }

    bool operator==(const RidgeConfig&) const = default;
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t test = 0;

    bool operator==(const SplitSizes&) const = default;
};

/// Ridge solutions for several regularisation strengths sharing one Gram
/// matrix. The bias is unpenalised: data are centred, then
/// (Xc^T Xc + lambda I) w = Xc^T yc and b = mean(y) - mean(X) w.
inline std::vector<RidgeSolution> ridge_fit_path(const Eigen::MatrixXd& features,
                                                 const Eigen::VectorXd& targets,
                                                 std::span<const double> lambdas)
{
    if (features.rows() != targets.size())
        throw DimensionError("ridge_fit: " + std::to_string(features.rows()) + " feature rows vs "
                             + std::to_string(targets.size()) + " targets");
    if (features.rows() < 1)
        throw DimensionError("ridge_fit: no samples");
    if (!features.allFinite() || !targets.allFinite())
        throw DomainError("ridge_fit: non-finite data");
    for (double l : lambdas)
        if (!(l > 0.0))
            throw DomainError("ridge_fit: lambda must be > 0");

    const Eigen::RowVectorXd mean = features.colwise().mean();
    const double target_mean = targets.mean();
    const Eigen::MatrixXd centered = features.rowwise() - mean;
    const Eigen::VectorXd yc = targets.array() - target_mean;

    const auto f = features.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f, f);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    const Eigen::VectorXd rhs = centered.transpose() * yc;

    std::vector<RidgeSolution> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        Eigen::MatrixXd a = gram;
        a.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success)
            throw NumericalError("ridge_fit: normal equations are not positive definite");
        RidgeSolution s;
        s.weights = llt.solve(rhs);
        s.bias = target_mean - mean.dot(s.weights);
        out.push_back(std::move(s));
    }
    return out;
}

inline RidgeSolution ridge_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                               double lambda)
{
    const double l[] = {lambda};
    return ridge_fit_path(features, targets, l).front();
}

inline ReadoutWeights split_signed_weights(const Eigen::VectorXd& w, double bias = 0.0)
{
    ReadoutWeights out;
    out.w_plus = w.cwiseMax(0.0).cwiseSqrt();
    out.w_minus = (-w).cwiseMax(0.0).cwiseSqrt();
    out.bias = bias;
    return out;
}

/// Mean squared error over the (population) variance of the target.
inline double nmse(std::span<const double> predicted, std::span<const double> target)
{
    if (predicted.size() != target.size())
        throw DimensionError("nmse: length mismatch");
    if (target.size() < 2)
        throw DimensionError("nmse: need at least 2 samples");
    const double n = static_cast<double>(target.size());
    const double mean = std::accumulate(target.begin(), target.end(), 0.0) / n;
    double var = 0.0;
    double mse = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        var += (target[i] - mean) * (target[i] - mean);
        mse += (predicted[i] - target[i]) * (predicted[i] - target[i]);
    }
    if (!(var > 0.0))
        throw DomainError("nmse: target has zero variance");
    return mse / var;
}

inline double ser(std::span<const int> predicted, std::span<const int> target)
{
    if (predicted.size() != target.size())
        throw DimensionError("ser: length mismatch");
    if (target.empty())
        throw DimensionError("ser: empty symbol sequences");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < target.size(); ++i)
        errors += predicted[i] != target[i] ? 1 : 0;
    return static_cast<double>(errors) / static_cast<double>(target.size());
}

inline double score(Metric metric, const Eigen::VectorXd& predicted, const Eigen::VectorXd& target)
{
    if (metric == Metric::nmse)
        return nmse({predicted.data(), static_cast<std::size_t>(predicted.size())},
                    {target.data(), static_cast<std::size_t>(target.size())});
    std::vector<int> p(static_cast<std::size_t>(predicted.size()));
    std::vector<int> t(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = quantize_symbol(predicted(static_cast<Eigen::Index>(i)));
        t[i] = static_cast<int>(std::lround(target(static_cast<Eigen::Index>(i))));
    }
    return ser(p, t);
}

struct FittedReadout {
    RidgeSolution solution;  ///< acts on raw (unstandardised) features
    double lambda = 0.0;
};

/// Fit a readout on one training portion, choosing lambda on an internal
/// split: the first inner_train_fraction of the rows fit, the rest validate.
/// Columns are standardised with the training statistics; the returned
/// weights are mapped back to raw feature units.
inline FittedReadout fit_readout(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                 const RidgeConfig& cfg, Metric metric)
{
    cfg.validate();
    const Eigen::Index n = features.rows();
    const auto n_inner = static_cast<Eigen::Index>(std::floor(cfg.inner_train_fraction * static_cast<double>(n)));
    if (n_inner < 1 || n - n_inner < 2)
        throw DataError("fit_readout: too few training samples (" + std::to_string(n) + ")");

    const Eigen::RowVectorXd mean = features.colwise().mean();
    Eigen::RowVectorXd scale = ((features.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
    for (Eigen::Index k = 0; k < scale.size(); ++k)
        if (!(scale(k) > 1e-300))
            scale(k) = 1.0;
    const Eigen::MatrixXd z = (features.rowwise() - mean).array().rowwise() / scale.array();

    const auto path = ridge_fit_path(z.topRows(n_inner), targets.head(n_inner), cfg.lambda_grid);
    const Eigen::MatrixXd z_val = z.bottomRows(n - n_inner);
    const Eigen::VectorXd y_val = targets.tail(n - n_inner);
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double s = score(metric, path[i].predict(z_val), y_val);
        if (i == 0 || s < best_score) {
            best = i;
            best_score = s;
        }
    }

    const RidgeSolution standardized = ridge_fit(z, targets, cfg.lambda_grid[best]);
    FittedReadout out;
    out.lambda = cfg.lambda_grid[best];
    out.solution.weights = standardized.weights.array() / scale.transpose().array();
    out.solution.bias = standardized.bias - mean.dot(out.solution.weights);
    return out;
}

/// Post-washout timestep indices, shuffled with the stream of (seed, fold).
inline std::vector<Eigen::Index> fold_permutation(std::size_t washout, std::size_t length,
                                                  std::uint64_t seed, std::uint64_t fold)
{
    std::vector<Eigen::Index> idx(length - washout);
    std::iota(idx.begin(), idx.end(), static_cast<Eigen::Index>(washout));
    Rng rng(derive_seed(seed, fold));
    rng.shuffle(std::span<Eigen::Index>(idx));
    return idx;
}

inline void check_cv_inputs(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                            const RidgeConfig& cfg, SplitSizes split)
{
    cfg.validate();
    if (features.rows() != targets.size())
        throw DimensionError("cross_validate: features and targets differ in length");
    const auto length = static_cast<std::size_t>(features.rows());
    if (cfg.washout >= length)
        throw DataError("cross_validate: washout leaves no data");
    if (split.train < 3 || split.test < 1 || split.train + split.test > length - cfg.washout)
        throw DataError("cross_validate: insufficient data after washout ("
                        + std::to_string(length - cfg.washout) + " samples for "
                        + std::to_string(split.train) + " train + " + std::to_string(split.test)
                        + " test)");
}

struct FoldResult {
    double score = 0.0;
    double lambda = 0.0;
};

/// Train on split.train random post-washout timesteps, score on the next
/// split.test of the same permutation.
inline FoldResult evaluate_split(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                 const RidgeConfig& cfg, SplitSizes split, Metric metric,
                                 std::uint64_t seed, std::uint64_t fold)
{
    check_cv_inputs(features, targets, cfg, split);
    const auto perm = fold_permutation(cfg.washout, static_cast<std::size_t>(features.rows()), seed, fold);
    const std::vector<Eigen::Index> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(split.train));
    const std::vector<Eigen::Index> test(perm.begin() + static_cast<std::ptrdiff_t>(split.train),
                                         perm.begin() + static_cast<std::ptrdiff_t>(split.train + split.test));

    const FittedReadout fit = fit_readout(features(train, Eigen::all), targets(train), cfg, metric);
    const Eigen::VectorXd y_test = targets(test);
    return {score(metric, fit.solution.predict(features(test, Eigen::all)), y_test), fit.lambda};
}

struct CvResult {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation across folds
    std::vector<double> fold_scores;
    std::vector<double> lambdas;
};

inline CvResult summarize_scores(std::vector<double> scores)
{
    CvResult r;
    const double n = static_cast<double>(scores.size());
    r.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
    if (scores.size() > 1) {
        double ss = 0.0;
        for (double s : scores)
            ss += (s - r.mean) * (s - r.mean);
        r.stddev = std::sqrt(ss / (n - 1.0));
    }
    r.fold_scores = std::move(scores);
    return r;
}

/// Repeated random train/test partitions of the post-washout timesteps.
/// Fold f uses the seed stream derive_seed(cfg.seed, f), so results do not
/// depend on `jobs`.
inline CvResult cross_validate(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                               const RidgeConfig& cfg, SplitSizes split, Metric metric, int jobs = 1)
{
    check_cv_inputs(features, targets, cfg, split);
    const auto folds = static_cast<std::size_t>(cfg.n_folds);
    std::vector<FoldResult> results(folds);
    parallel_for(folds, jobs, [&](std::size_t f) {
        results[f] = evaluate_split(features, targets, cfg, split, metric, cfg.seed, f);
    });
    std::vector<double> scores;
    std::vector<double> lambdas;
    for (const auto& r : results) {
        scores.push_back(r.score);
        lambdas.push_back(r.lambda);
    }
    CvResult out = summarize_scores(std::move(scores));
    out.lambdas = std::move(lambdas);
    return out;
}

/// Stream used for the single fixed split of the optimisation objective.
inline constexpr std::uint64_t kHoldoutStream = 0x686f6c646f7574ULL;

/// One fixed train/validation split, independent of the CV folds.
inline double holdout_score(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                            const RidgeConfig& cfg, SplitSizes split, Metric metric)
{
    return evaluate_split(features, targets, cfg, split, metric, derive_seed(cfg.seed, kHoldoutStream), 0)
        .score;
}

}  // namespace combrc
