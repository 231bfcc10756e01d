#pragma once

// Experiment runners behind the command-line tool: shallow, parallel and deep
// configurations, axis sweeps and the line-spacing scan. Every run returns a
// ResultRecord that embeds the exact config it came from.

#include "combrc/config.hpp"
#include "combrc/error.hpp"
#include "combrc/interlayer_opt.hpp"
#include "combrc/pipeline.hpp"
#include "combrc/readout.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#ifndef COMBRC_VERSION
#define COMBRC_VERSION "0.1.0"
#endif

namespace combrc::harness {

inline const char* version() { return COMBRC_VERSION; }

/// Wall-clock seconds per phase.
struct Timing {
    double physics = 0.0;  ///< physics build and task preparation
    double dynamics = 0.0;
    double training = 0.0;
    double optimization = 0.0;

    double total() const { return physics + dynamics + training + optimization; }
};

struct ScoreEntry {
    std::string name;  ///< shallow, parallel, deep, band1, band2
    CvResult cv;
};

/// One objective evaluation of the inter-layer search.
struct HistoryRow {
    int evaluation_index = 0;
    int generation = 0;
    double score = 0.0;
    std::vector<double> weights_db;
    std::string error;
};

struct OptimizationHistory {
    InterlayerStrategy strategy = InterlayerStrategy::none;
    std::vector<HistoryRow> rows;
    std::vector<double> best_ever;  ///< per generation (CMA-ES only)
};

enum class RecordKind { run, omega_point };

struct ResultRecord {
    RecordKind kind = RecordKind::run;
    std::string config_hash;
    std::string version;
    std::uint64_t seed = 0;
    ExperimentConfig config;  ///< effective config of this record alone
    Metric metric = Metric::nmse;
    double omega_ghz = 0.0;
    std::vector<ScoreEntry> scores;
    std::optional<double> persistence_nmse;
    std::optional<std::vector<double>> interlayer_db;
    std::optional<double> objective_score;  ///< holdout score of the chosen mask
    std::optional<OptimizationHistory> history;
    Timing timing;

    const ScoreEntry& primary() const
    {
        if (scores.empty())
            throw NumericalError("ResultRecord: no scores");
        return scores.front();
    }
};

namespace detail {

class Stopwatch {
public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline ResultRecord make_record(const Pipeline& p, RecordKind kind)
{
    ResultRecord r;
    r.kind = kind;
    r.config = p.config();
    r.config.sweep.reset();
    r.config_hash = config_hash(r.config);
    r.version = version();
    r.seed = p.config().seed;
    r.metric = p.metric();
    r.omega_ghz = p.physics().omega_ghz;
    r.persistence_nmse = p.task().persistence_nmse;
    return r;
}

}  // namespace detail

inline ResultRecord run_shallow(const Pipeline& p, int jobs = 1)
{
    detail::Stopwatch clock;
    ResultRecord r = detail::make_record(p, RecordKind::run);
    const Eigen::MatrixXd features = p.shallow_features();
    r.timing.dynamics = clock.lap();
    r.scores.push_back({"shallow", p.cv(features, jobs)});
    r.timing.training = clock.lap();
    return r;
}

inline ResultRecord run_parallel(const Pipeline& p, int jobs = 1)
{
    detail::Stopwatch clock;
    ResultRecord r = detail::make_record(p, RecordKind::run);
    const Eigen::MatrixXd features = p.parallel_features();
    r.timing.dynamics = clock.lap();
    r.scores.push_back({"parallel", p.cv(features, jobs)});
    r.timing.training = clock.lap();
    return r;
}

/// Final CV score of the deep configuration with a given mask.
inline ResultRecord evaluate_deep_fixed(const Pipeline& p, const InterlayerWeights& mask, int jobs = 1)
{
    detail::Stopwatch clock;
    ResultRecord r = detail::make_record(p, RecordKind::run);
    const Eigen::MatrixXd features = p.deep_features(mask);
    r.timing.dynamics = clock.lap();
    r.scores.push_back({"deep", p.cv(features, jobs)});
    r.timing.training = clock.lap();
    std::vector<double> db(static_cast<std::size_t>(mask.diag.size()));
    for (Eigen::Index k = 0; k < mask.diag.size(); ++k)
        db[static_cast<std::size_t>(k)] = 20.0 * std::log10(mask.diag(k));
    r.interlayer_db = std::move(db);
    return r;
}

inline OptimizationHistory sweep_history(const SweepResult& s, Eigen::Index n)
{
    OptimizationHistory h;
    h.strategy = InterlayerStrategy::uniform_sweep;
    int i = 0;
    for (const auto& point : s.curve) {
        h.rows.push_back({i++, 0, point.score, std::vector<double>(static_cast<std::size_t>(n), point.att_db),
                          point.error});
    }
    return h;
}

inline OptimizationHistory cmaes_history(const CmaesResult& c)
{
    OptimizationHistory h;
    h.strategy = InterlayerStrategy::cmaes;
    for (const auto& e : c.evaluations)
        h.rows.push_back({e.evaluation_index, e.generation, e.score, std::vector<double>(e.x.begin(), e.x.end()), {}});
    h.best_ever = c.best_ever;
    return h;
}

inline CmaesConfig cmaes_config(const ExperimentConfig& c)
{
    CmaesConfig out;
    out.population_size = c.interlayer.cmaes.population_size;
    out.sigma0 = c.interlayer.cmaes.sigma0;
    out.max_evals = c.interlayer.cmaes.max_evals;
    out.seed = effective_seed(c.interlayer.cmaes.seed, c.seed, seed_stream::cmaes);
    out.bounds = std::pair{c.interlayer.cmaes.bounds_db[0], c.interlayer.cmaes.bounds_db[1]};
    return out;
}

/// Tunes the inter-layer mask with the configured strategy on the holdout
/// split, then reports the CV score of the winner.
inline ResultRecord run_deep(const Pipeline& p, int jobs = 1)
{
    const ExperimentConfig& c = p.config();
    const Eigen::Index n = p.n_lines();
    detail::Stopwatch clock;
    InterlayerWeights mask;
    OptimizationHistory history;
    double objective = 0.0;
    switch (c.interlayer.strategy) {
    case InterlayerStrategy::none:
        throw ConfigError("interlayer.strategy: mode 'deep' requires a strategy");
    case InterlayerStrategy::uniform_sweep: {
        const SweepResult s = attenuation_sweep(
            [&](const InterlayerWeights& w) { return p.deep_objective(w); }, c.interlayer.sweep, n, jobs);
        mask = s.best;
        objective = s.best_score;
        history = sweep_history(s, n);
        break;
    }
    case InterlayerStrategy::cmaes: {
        const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, c.interlayer.cmaes.initial_db);
        const CmaesResult s = cmaes_minimize(
            [&](const Eigen::VectorXd& db) { return objective_from_pipeline(db, p); }, x0, cmaes_config(c), jobs);
        mask = weights_from_db(s.best_x);
        objective = s.best_score;
        history = cmaes_history(s);
        break;
    }
    }
    const double optimization = clock.lap();
    ResultRecord r = evaluate_deep_fixed(p, mask, jobs);
    r.timing.optimization = optimization;
    r.objective_score = objective;
    r.history = std::move(history);
    return r;
}

inline ResultRecord run_mode(const Pipeline& p, int jobs = 1)
{
    switch (p.config().mode) {
    case Mode::shallow:
        return run_shallow(p, jobs);
    case Mode::parallel:
        return run_parallel(p, jobs);
    case Mode::deep:
        return run_deep(p, jobs);
    }
    throw ConfigError("mode: unknown");
}

inline ResultRecord run_experiment(const ExperimentConfig& cfg, int jobs = 1)
{
    validate(cfg);
    detail::Stopwatch clock;
    const Pipeline p(cfg);
    const double build = clock.lap();
    ResultRecord r = run_mode(p, jobs);
    r.timing.physics = build;
    return r;
}

/// Config of one grid point: the axis value applied, the sweep removed.
inline ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, double value)
{
    ExperimentConfig c = cfg;
    c.sweep.reset();
    switch (axis) {
    case SweepAxis::snr_db:
        c.channel.snr_db = value;
        break;
    case SweepAxis::tau:
        c.santafe.spec.tau = static_cast<int>(std::lround(value));
        break;
    case SweepAxis::omega_detuning:
        c.physics.omega_detuning_ghz += value;
        break;
    }
    validate(c);
    return c;
}

struct SweepOutcome {
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> values;
    std::vector<ResultRecord> points;
};

inline SweepOutcome run_sweep(const ExperimentConfig& cfg, int jobs = 1)
{
    validate(cfg);
    if (!cfg.sweep)
        throw ConfigError("sweep: the sweep command needs a 'sweep' section");
    SweepOutcome out{cfg.sweep->axis, cfg.sweep->values, {}};
    for (double v : cfg.sweep->values)
        out.points.push_back(run_experiment(apply_axis(cfg, cfg.sweep->axis, v), jobs));
    return out;
}

/// Each band alone as a shallow reservoir at the config's line spacing.
inline ResultRecord evaluate_omega_point(const ExperimentConfig& cfg, int jobs = 1)
{
    validate(cfg);
    detail::Stopwatch clock;
    const Pipeline p(cfg);
    const double build = clock.lap();
    ResultRecord r = detail::make_record(p, RecordKind::omega_point);
    r.timing.physics = build;
    for (std::size_t b = 0; b < 2; ++b) {
        const Eigen::MatrixXd features = p.band_features(b);
        r.timing.dynamics += clock.lap();
        r.scores.push_back({"band" + std::to_string(b + 1), p.cv(features, jobs)});
        r.timing.training += clock.lap();
    }
    return r;
}

inline SweepOutcome run_omega_scan(const ExperimentConfig& cfg, int jobs = 1)
{
    validate(cfg);
    if (!cfg.sweep || cfg.sweep->axis != SweepAxis::omega_detuning)
        throw ConfigError("sweep.axis: omega-scan needs axis 'omega_detuning'");
    SweepOutcome out{SweepAxis::omega_detuning, cfg.sweep->values, {}};
    for (double v : cfg.sweep->values)
        out.points.push_back(evaluate_omega_point(apply_axis(cfg, SweepAxis::omega_detuning, v), jobs));
    return out;
}

/// Re-runs a record from its embedded config.
inline ResultRecord regenerate(const ResultRecord& record, int jobs = 1)
{
    return record.kind == RecordKind::omega_point ? evaluate_omega_point(record.config, jobs)
                                                  : run_experiment(record.config, jobs);
}

/// True when every fold score of every entry matches bit for bit.
inline bool same_metrics(const ResultRecord& a, const ResultRecord& b)
{
    if (a.scores.size() != b.scores.size())
        return false;
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        const CvResult& x = a.scores[i].cv;
        const CvResult& y = b.scores[i].cv;
        if (a.scores[i].name != b.scores[i].name || x.mean != y.mean || x.stddev != y.stddev
            || x.fold_scores != y.fold_scores)
            return false;
    }
    return a.interlayer_db == b.interlayer_db;
}

// ---------------------------------------------------------------------------
// Comb spectrum

struct SpectrumLine {
    int band = 0;
    int line = 0;  ///< index from the comb centre
    double wavelength_nm = 0.0;
    double w_in_abs = 0.0;
    double loop_power = 0.0;  ///< |x_k|^2 at the fixed point for a quadrature drive
};

/// |W_in| and the loop's steady-state line powers for each band.
inline std::vector<SpectrumLine> comb_spectrum(const ExperimentConfig& cfg)
{
    validate(cfg);
    const ResolvedPhysics phys = resolve_physics(cfg.physics);
    constexpr double c_nm_ghz = 299792458.0;  // nm * GHz
    std::vector<SpectrumLine> out;
    for (std::size_t b = 0; b < phys.bands.size(); ++b) {
        const ReservoirParams layer = build_layer(phys.bands[b], cfg.mzm);
        const Eigen::Index n = layer.size();
        const ComplexMatrix a = ComplexMatrix::Identity(n, n) - layer.w;
        const ComplexVector x =
            a.partialPivLu().solve(layer.w_in * input_nonlinearity(kQuadratureDrive / cfg.mzm.gamma, cfg.mzm));
        const double f0 = c_nm_ghz / phys.bands[b].comb.center_wavelength_nm;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int k = centered_index(static_cast<int>(i), static_cast<int>(n));
            out.push_back({static_cast<int>(b) + 1, k, c_nm_ghz / (f0 + k * phys.omega_ghz), std::abs(layer.w_in(i)),
                           std::norm(x(i))});
        }
    }
    return out;
}

}  // namespace combrc::harness
