#pragma once

// Wiring from an ExperimentConfig to trained-readout scores: band physics,
// the task series and its drive, reservoir features for the shallow,
// parallel and deep configurations, and the inter-layer objective.

#include "combrc/comb_physics.hpp"
#include "combrc/config.hpp"
#include "combrc/error.hpp"
#include "combrc/interlayer_opt.hpp"
#include "combrc/random.hpp"
#include "combrc/readout.hpp"
#include "combrc/reservoir.hpp"
#include "combrc/tasks.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <vector>

namespace combrc {

struct BandPhysics {
    CombSpec comb;
    ModulatorParams input_modulator;
    ModulatorParams loop_modulator;
    LoopParams loop;
};

struct ResolvedPhysics {
    double omega_ghz = 0.0;
    std::array<BandPhysics, 2> bands;
};

/// Dispersion per roundtrip at line spacing omega: theta2 scales as omega^2.
inline double dispersion_at(const PhysicsConfig& p, double omega_ghz)
{
    const double r = omega_ghz / p.omega_ref_ghz;
    return p.dispersion_ref * r * r;
}

/// Both combs share the RF drives. The modulation depth scales with
/// lambda_1 / lambda_b; band 2 sees a detuned dispersion.
inline ResolvedPhysics resolve_physics(const PhysicsConfig& p)
{
    double omega = p.line_spacing_ghz;
    double input_phase = p.input_modulator.rf_phase;
    double loop_phase = p.loop_modulator.rf_phase;
    if (p.seed) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        Rng rng(*p.seed);
        omega = rng.uniform(p.omega_range_ghz[0], p.omega_range_ghz[1]);
        input_phase = std::fmod(rng.uniform(0.0, two_pi), two_pi);
        loop_phase = std::fmod(rng.uniform(0.0, two_pi), two_pi);
    }
    omega += p.omega_detuning_ghz;
    if (!(omega > 0.0))
        throw ConfigError("physics.omega_detuning_ghz: detuned line spacing must stay > 0");

    ResolvedPhysics r;
    r.omega_ghz = omega;
    const double theta2 = dispersion_at(p, omega);
    for (std::size_t b = 0; b < 2; ++b) {
        const double depth = p.wavelengths_nm[0] / p.wavelengths_nm[b];
        BandPhysics& band = r.bands[b];
        band.comb = {p.wavelengths_nm[b], omega, p.n_lines, p.guard_lines};
        band.input_modulator = {p.input_modulator.modulation_index * depth, input_phase};
        band.loop_modulator = {p.loop_modulator.modulation_index * depth, loop_phase};
        band.loop = {p.feedback_coupling, p.gain, b == 0 ? theta2 : theta2 * p.band2_dispersion_detuning,
                     p.spectral_radius_target};
    }
    return r;
}

inline ReservoirParams build_layer(const BandPhysics& band, const MZMParams& mzm)
{
    return {build_internal_matrix(band.comb, band.loop_modulator, band.loop),
            build_input_vector(band.comb, band.input_modulator), mzm};
}

struct PreparedTask {
    Metric metric = Metric::nmse;
    std::vector<double> input;  ///< task values before the drive map
    Eigen::VectorXd target;
    std::vector<double> drive;  ///< layer-1 input u
    DriveMap drive_map;
    std::size_t washout = 0;
    SplitSizes split;
    /// Santa Fe only: NMSE of predicting the target by the current input.
    std::optional<double> persistence_nmse;
};

inline PreparedTask prepare_task(const ExperimentConfig& c)
{
    PreparedTask t;
    TaskSeries series;
    if (c.task == TaskKind::channel) {
        ChannelTaskSpec spec;
        spec.snr_db = c.channel.snr_db;
        spec.train_len = c.channel.train_len;
        spec.test_len = c.channel.test_len;
        spec.washout = c.channel.washout;
        spec.seed = effective_seed(c.channel.seed, c.seed, seed_stream::channel);
        spec.delay = c.channel.delay;
        series = make_channel_task(spec);
        t.metric = Metric::ser;
        t.washout = spec.washout;
        t.split = {spec.train_len, spec.test_len};
    } else {
        const ShiftTaskSpec& spec = c.santafe.spec;
        const std::size_t needed = spec.total_len() + static_cast<std::size_t>(std::abs(spec.tau));
        const std::vector<double> raw =
            c.santafe.dataset
                ? load_series(*c.santafe.dataset, needed)
                : lorenz_surrogate(c.santafe.surrogate_length,
                                   effective_seed(c.santafe.surrogate_seed, c.seed, seed_stream::surrogate));
        series = make_shift_task(raw, spec);
        t.metric = Metric::nmse;
        t.washout = spec.washout;
        t.split = {spec.train_len, spec.test_len};
        const std::span<const double> in(series.input);
        const std::span<const double> tg(series.target);
        t.persistence_nmse = nmse(in.subspan(t.washout), tg.subspan(t.washout));
    }
    t.input = std::move(series.input);
    t.target = Eigen::Map<const Eigen::VectorXd>(series.target.data(),
                                                 static_cast<Eigen::Index>(series.target.size()));
    const std::span<const double> fit_window(t.input.data() + t.washout, t.split.train);
    t.drive_map = DriveMap::fit(fit_window, c.input_drive.center, c.input_drive.half_span, c.mzm);
    t.drive = t.drive_map.apply(t.input);
    return t;
}

inline RidgeConfig ridge_config(const ExperimentConfig& c, std::size_t washout)
{
    RidgeConfig r;
    r.lambda_grid = c.ridge.lambda_grid;
    r.washout = washout;
    r.seed = effective_seed(c.ridge.seed, c.seed, seed_stream::ridge);
    r.n_folds = c.ridge.n_folds;
    r.inner_train_fraction = c.ridge.inner_train_fraction;
    return r;
}

/// Score assigned to a diverged deep run: worse than any attainable value.
inline double divergence_penalty(Metric metric) { return metric == Metric::ser ? 2.0 : 1e3; }

/// Frozen experiment context: physics, task data and link calibration are
/// built once; every feature or score query is a pure function of it.
class Pipeline {
public:
    explicit Pipeline(ExperimentConfig cfg)
        : cfg_(std::move(cfg)), physics_(resolve_physics(cfg_.physics)), task_(prepare_task(cfg_)),
          ridge_(ridge_config(cfg_, task_.washout))
    {
        for (const auto& band : physics_.bands)
            layers_.push_back(build_layer(band, cfg_.mzm));
        // Link gain reference: mask at 0 dB, measured on the second half of
        // the washout so the start-up transient is excluded.
        const std::vector<InterlayerWeights> reference{InterlayerWeights::uniform(n_lines(), 1.0)};
        calibration_ = calibrate_link_gains(task_.drive, layers_, reference, task_.washout / 2, task_.washout);
    }

    const ExperimentConfig& config() const { return cfg_; }
    const ResolvedPhysics& physics() const { return physics_; }
    const std::vector<ReservoirParams>& layers() const { return layers_; }
    const PreparedTask& task() const { return task_; }
    const RidgeConfig& ridge() const { return ridge_; }
    const LinkCalibration& link_calibration() const { return calibration_; }
    Metric metric() const { return task_.metric; }
    Eigen::Index n_lines() const { return cfg_.physics.n_lines; }

    /// One band driven alone by the task input.
    Eigen::MatrixXd band_features(std::size_t band) const
    {
        Trace t = run_sequence(task_.drive, layers_.at(band), LayerState::zero(n_lines()));
        return finish(std::move(t));
    }

    Eigen::MatrixXd shallow_features() const { return band_features(0); }

    /// Both bands driven by the same input, intensities side by side.
    Eigen::MatrixXd parallel_features() const
    {
        const std::array<Trace, 2> traces{
            run_sequence(task_.drive, layers_[0], LayerState::zero(n_lines())),
            run_sequence(task_.drive, layers_[1], LayerState::zero(n_lines()))};
        return finish(concat_deep_state(traces));
    }

    /// Band 1 drives band 2 through the given inter-layer mask.
    Eigen::MatrixXd deep_features(const InterlayerWeights& mask) const
    {
        const std::vector<InterlayerWeights> masks{mask};
        const auto scalers = calibrate_link_scalers(task_.drive, layers_, masks, calibration_);
        DeepRunOptions options;
        options.timing = cfg_.timing;
        const auto traces = run_deep(task_.drive, layers_, masks, scalers, options);
        return finish(concat_deep_state(traces));
    }

    double holdout(const Eigen::MatrixXd& features) const
    {
        return holdout_score(features, task_.target, ridge_, task_.split, task_.metric);
    }

    CvResult cv(const Eigen::MatrixXd& features, int jobs = 1) const
    {
        return cross_validate(features, task_.target, ridge_, task_.split, task_.metric, jobs);
    }

    /// Holdout score of the deep configuration; a diverging cascade scores
    /// divergence_penalty().
    double deep_objective(const InterlayerWeights& mask) const
    {
        try {
            return holdout(deep_features(mask));
        } catch (const DivergenceError&) {
            return divergence_penalty(task_.metric);
        }
    }

private:
    Eigen::MatrixXd finish(Trace trace) const
    {
        add_measurement_noise(trace, cfg_.intensity_noise_std,
                              effective_seed(std::nullopt, cfg_.seed, seed_stream::noise));
        return std::move(trace.intensities);
    }

    ExperimentConfig cfg_;
    ResolvedPhysics physics_;
    PreparedTask task_;
    RidgeConfig ridge_;
    std::vector<ReservoirParams> layers_;
    LinkCalibration calibration_;
};

/// Inter-layer objective over per-line attenuations in dB.
inline double objective_from_pipeline(const Eigen::VectorXd& weights_db, const Pipeline& context)
{
    if (weights_db.size() != context.n_lines())
        throw DimensionError("objective_from_pipeline: expected one attenuation per comb line");
    return context.deep_objective(weights_from_db(weights_db));
}

}  // namespace combrc
