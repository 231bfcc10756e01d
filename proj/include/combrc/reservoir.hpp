#pragma once

// Discrete-time dynamics of linear comb reservoirs with a sine input
// nonlinearity and intensity (photodiode) outputs, plus the analog
// layer-to-layer cascade used by the deep configuration.

#include "combrc/comb_physics.hpp"
#include "combrc/error.hpp"
#include "combrc/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace combrc {

/// A state component with |x_k| above this aborts the run.
inline constexpr double kDivergenceAmplitude = 1e6;

/// MZM bias (quadrature point) for every drive in this library, in units of gamma*u.
inline constexpr double kQuadratureDrive = std::numbers::pi / 4.0;

struct ReservoirParams {
    ComplexMatrix w;
    ComplexVector w_in;
    MZMParams mzm;

    Eigen::Index size() const { return w_in.size(); }

    void validate() const
    {
        if (w.rows() != w.cols())
            throw DimensionError("ReservoirParams: W must be square");
        if (w.rows() != w_in.size())
            throw DimensionError("ReservoirParams: W_in length " + std::to_string(w_in.size())
                                 + " does not match W size " + std::to_string(w.rows()));
        if (!w.allFinite() || !w_in.allFinite())
            throw DomainError("ReservoirParams: non-finite weights");
        mzm.validate();
    }
};

struct LayerState {
    ComplexVector x;

    static LayerState zero(Eigen::Index n) { return {ComplexVector::Zero(n)}; }
};

/// Time-indexed record of one layer: row n holds |x_{n,k}|^2.
struct Trace {
    Eigen::MatrixXd intensities;
    std::optional<ComplexMatrix> states;

    Eigen::Index length() const { return intensities.rows(); }
    Eigen::Index width() const { return intensities.cols(); }
};

/// Diagonal of the non-negative inter-layer attenuation mask.
struct InterlayerWeights {
    Eigen::VectorXd diag;

    static InterlayerWeights uniform(Eigen::Index n, double amplitude)
    {
        return {Eigen::VectorXd::Constant(n, amplitude)};
    }

    void validate() const
    {
        if (!diag.allFinite() || (diag.array() < 0.0).any())
            throw DomainError("InterlayerWeights: entries must be finite and >= 0");
    }
};

struct DeepState {
    std::vector<LayerState> layers;
};

/// Affine map from a photodiode signal s to the next layer's input u.
struct SignalScaler {
    double scale = 1.0;
    double shift = 0.0;

    double operator()(double s) const { return scale * s + shift; }
};

enum class InterlayerTiming {
    same_step,       ///< layer i at step n drives layer i+1 at step n
    one_step_delay,  ///< layer i at step n-1 drives layer i+1 at step n
};

inline double input_nonlinearity(double u, const MZMParams& mzm)
{
    return mzm.e0 * std::sin(mzm.gamma * u);
}

inline LayerState step(const LayerState& state, double u, const ReservoirParams& params)
{
    if (state.x.size() != params.w.cols() || params.w_in.size() != params.w.rows())
        throw DimensionError("step: state of size " + std::to_string(state.x.size())
                             + " does not match reservoir of size "
                             + std::to_string(params.w.rows()));
    LayerState next;
    next.x.noalias() = params.w * state.x;
    next.x += params.w_in * input_nonlinearity(u, params.mzm);
    return next;
}

namespace detail {

inline bool diverged(const ComplexVector& x)
{
    constexpr double limit = kDivergenceAmplitude * kDivergenceAmplitude;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double p = std::norm(x(k));
        if (!(p <= limit))  // also catches NaN
            return true;
    }
    return false;
}

/// In-place update x <- W x + W_in f_in(u) reusing a scratch buffer.
inline void advance(ComplexVector& x, ComplexVector& scratch, double u,
                    const ReservoirParams& params)
{
    scratch.noalias() = params.w * x;
    scratch += params.w_in * input_nonlinearity(u, params.mzm);
    x.swap(scratch);
}

inline double masked_power(const ComplexVector& x, const Eigen::VectorXd& diag)
{
    double total = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k)
        total += diag(k) * diag(k) * std::norm(x(k));
    return total;
}

inline void record(Trace& trace, Eigen::Index n, const ComplexVector& x)
{
    trace.intensities.row(n) = x.cwiseAbs2().transpose();
    if (trace.states)
        trace.states->row(n) = x.transpose();
}

inline Trace make_trace(Eigen::Index length, Eigen::Index width, bool record_states)
{
    Trace trace;
    trace.intensities.resize(length, width);
    if (record_states)
        trace.states = ComplexMatrix(length, width);
    return trace;
}

}  // namespace detail

/// Drive one reservoir with u_seq starting from x0. Throws DivergenceError
/// (layer 0) naming the first timestep whose state is non-finite or exceeds
/// kDivergenceAmplitude.
inline Trace run_sequence(std::span<const double> u_seq, const ReservoirParams& params,
                          const LayerState& x0, bool record_states = false)
{
    params.validate();
    if (u_seq.empty())
        throw DimensionError("run_sequence: empty input sequence");
    if (x0.x.size() != params.size())
        throw DimensionError("run_sequence: initial state has wrong size");

    const auto length = static_cast<Eigen::Index>(u_seq.size());
    Trace trace = detail::make_trace(length, params.size(), record_states);
    ComplexVector x = x0.x;
    ComplexVector scratch(params.size());
    for (Eigen::Index n = 0; n < length; ++n) {
        detail::advance(x, scratch, u_seq[static_cast<std::size_t>(n)], params);
        if (detail::diverged(x))
            throw DivergenceError(0, static_cast<std::size_t>(n));
        detail::record(trace, n, x);
    }
    return trace;
}

/// sum_k (w+_k)^2 |x_k|^2 - sum_k (w-_k)^2 |x_k|^2
inline double quadratic_readout(const LayerState& state, const Eigen::VectorXd& w_plus,
                                const Eigen::VectorXd& w_minus)
{
    if (w_plus.size() != state.x.size() || w_minus.size() != state.x.size())
        throw DimensionError("quadratic_readout: readout diagonals do not match the state");
    if ((w_plus.array() < 0.0).any() || (w_minus.array() < 0.0).any())
        throw DomainError("quadratic_readout: readout diagonals must be non-negative");
    const Eigen::VectorXd intensity = state.x.cwiseAbs2();
    return (w_plus.array().square() * intensity.array()).sum()
           - (w_minus.array().square() * intensity.array()).sum();
}

/// Photodiode signal after the attenuation mask: sum_k w_k^2 |x_k|^2 >= 0.
inline double interlayer_signal(const LayerState& state, const InterlayerWeights& weights)
{
    if (weights.diag.size() != state.x.size())
        throw DimensionError("interlayer_signal: mask does not match the state");
    return detail::masked_power(state.x, weights.diag);
}

struct DeepRunOptions {
    InterlayerTiming timing = InterlayerTiming::same_step;
    bool record_states = false;
};

/// Drive a cascade of reservoirs. Layer 1 sees u_seq; layer i+1 sees
/// scalers[i](interlayer_signal(x^(i), interlayer[i])). All layers start at 0.
inline std::vector<Trace> run_deep(std::span<const double> u_seq,
                                   std::span<const ReservoirParams> layers,
                                   std::span<const InterlayerWeights> interlayer,
                                   std::span<const SignalScaler> scalers,
                                   const DeepRunOptions& options = {})
{
    if (layers.empty())
        throw DimensionError("run_deep: need at least one layer");
    if (interlayer.size() + 1 != layers.size() || scalers.size() + 1 != layers.size())
        throw DimensionError("run_deep: need N_layers - 1 interlayer masks and scalers");
    if (u_seq.empty())
        throw DimensionError("run_deep: empty input sequence");
    for (const auto& layer : layers)
        layer.validate();
    for (std::size_t i = 0; i < interlayer.size(); ++i) {
        interlayer[i].validate();
        if (interlayer[i].diag.size() != layers[i].size())
            throw DimensionError("run_deep: interlayer mask size mismatch");
    }

    const auto length = static_cast<Eigen::Index>(u_seq.size());
    const std::size_t n_layers = layers.size();
    std::vector<Trace> traces;
    std::vector<ComplexVector> x;
    std::vector<ComplexVector> scratch;
    for (const auto& layer : layers) {
        traces.push_back(detail::make_trace(length, layer.size(), options.record_states));
        x.push_back(ComplexVector::Zero(layer.size()));
        scratch.push_back(ComplexVector(layer.size()));
    }
    // Photodiode signal of each link from the previous step (delay mode).
    std::vector<double> previous_signal(n_layers, 0.0);

    for (Eigen::Index n = 0; n < length; ++n) {
        double drive = u_seq[static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < n_layers; ++i) {
            detail::advance(x[i], scratch[i], drive, layers[i]);
            if (detail::diverged(x[i]))
                throw DivergenceError(i, static_cast<std::size_t>(n));
            detail::record(traces[i], n, x[i]);
            if (i + 1 < n_layers) {
                const double s = detail::masked_power(x[i], interlayer[i].diag);
                if (options.timing == InterlayerTiming::same_step) {
                    drive = scalers[i](s);
                } else {
                    drive = scalers[i](previous_signal[i]);
                    previous_signal[i] = s;
                }
            }
        }
    }
    return traces;
}

/// Columnwise concatenation of the layers' intensities, layer 1 first.
inline Trace concat_deep_state(std::span<const Trace> traces)
{
    if (traces.empty())
        throw DimensionError("concat_deep_state: no traces");
    const Eigen::Index length = traces.front().length();
    Eigen::Index width = 0;
    bool all_states = true;
    for (const auto& t : traces) {
        if (t.length() != length)
            throw DimensionError("concat_deep_state: layers have different lengths");
        width += t.width();
        all_states = all_states && t.states.has_value();
    }
    Trace out = detail::make_trace(length, width, all_states);
    Eigen::Index col = 0;
    for (const auto& t : traces) {
        out.intensities.middleCols(col, t.width()) = t.intensities;
        if (all_states)
            out.states->middleCols(col, t.width()) = *t.states;
        col += t.width();
    }
    return out;
}

/// Additive white Gaussian detection noise on recorded intensities.
inline void add_measurement_noise(Trace& trace, double stddev, std::uint64_t seed)
{
    if (stddev <= 0.0)
        return;
    Rng rng(seed);
    for (Eigen::Index n = 0; n < trace.intensities.rows(); ++n)
        for (Eigen::Index k = 0; k < trace.intensities.cols(); ++k)
            trace.intensities(n, k) += stddev * rng.normal();
}

// ---------------------------------------------------------------------------
// Inter-layer link calibration
//
// The photodiode output reaches the next MZM through an AC-coupled amplifier
// and the MZM is biased at quadrature. The amplifier gain is a property of the
// hardware: it is fixed once, with the mask at 0 dB, so that the largest
// excursion seen on the calibration window spans the monotone range
// [0, pi/2] of the drive. Attenuating the mask then shrinks the excursion
// around the bias point, which is what the attenuation sweep explores.

/// Gain (drive radians per unit signal) mapping the reference window's
/// largest excursion from its mean onto pi/4.
inline double reference_link_gain(std::span<const double> reference_signal)
{
    if (reference_signal.empty())
        throw DataError("reference_link_gain: empty calibration window");
    double mean = 0.0;
    for (double s : reference_signal)
        mean += s;
    mean /= static_cast<double>(reference_signal.size());
    double excursion = 0.0;
    for (double s : reference_signal)
        excursion = std::max(excursion, std::abs(s - mean));
    if (!(excursion > 0.0))
        throw NumericalError("reference_link_gain: constant photodiode signal");
    return kQuadratureDrive / excursion;
}

/// Frozen scaler for a link: drive = pi/4 + gain (s - dc), expressed as the
/// next layer's u (drive / gamma). dc is the mean of `signal` (AC coupling).
inline SignalScaler calibrate_signal_scaler(std::span<const double> signal, double gain,
                                            const MZMParams& next_mzm)
{
    if (signal.empty())
        throw DataError("calibrate_signal_scaler: empty calibration window");
    double dc = 0.0;
    for (double s : signal)
        dc += s;
    dc /= static_cast<double>(signal.size());
    return {gain / next_mzm.gamma, (kQuadratureDrive - gain * dc) / next_mzm.gamma};
}

struct LinkCalibration {
    std::vector<double> gains;  ///< one per link, from the reference masks
    std::size_t window_begin = 0;
    std::size_t window_end = 0;
};

/// Reference gains of every link. The chain is driven over u_prefix and the
/// signals on [window_begin, window_end) are measured with `reference`
/// masks; downstream layers are driven through the reference-calibrated
/// scalers while measuring.
inline LinkCalibration calibrate_link_gains(std::span<const double> u_prefix,
                                            std::span<const ReservoirParams> layers,
                                            std::span<const InterlayerWeights> reference,
                                            std::size_t window_begin, std::size_t window_end)
{
    if (window_end > u_prefix.size() || window_begin >= window_end)
        throw DataError("calibrate_link_gains: invalid calibration window");
    if (reference.size() + 1 != layers.size())
        throw DimensionError("calibrate_link_gains: need N_layers - 1 reference masks");

    LinkCalibration cal;
    cal.window_begin = window_begin;
    cal.window_end = window_end;
    std::vector<double> drive(u_prefix.begin(), u_prefix.begin() + static_cast<std::ptrdiff_t>(window_end));
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        const Trace t = run_sequence(drive, layers[i], LayerState::zero(layers[i].size()));
        std::vector<double> signal(drive.size());
        for (Eigen::Index n = 0; n < t.length(); ++n)
            signal[static_cast<std::size_t>(n)] =
                (reference[i].diag.array().square() * t.intensities.row(n).transpose().array()).sum();
        const std::span<const double> window(signal.data() + window_begin, window_end - window_begin);
        cal.gains.push_back(reference_link_gain(window));
        const SignalScaler scaler = calibrate_signal_scaler(window, cal.gains.back(), layers[i + 1].mzm);
        for (std::size_t n = 0; n < drive.size(); ++n)
            drive[n] = scaler(signal[n]);
    }
    return cal;
}

/// Scalers for the actual masks: each link keeps its reference gain and
/// takes its dc level from the attenuated signal on the calibration window.
inline std::vector<SignalScaler> calibrate_link_scalers(std::span<const double> u_prefix,
                                                        std::span<const ReservoirParams> layers,
                                                        std::span<const InterlayerWeights> interlayer,
                                                        const LinkCalibration& cal)
{
    if (interlayer.size() + 1 != layers.size() || cal.gains.size() != interlayer.size())
        throw DimensionError("calibrate_link_scalers: inconsistent layer/link counts");
    if (cal.window_end > u_prefix.size())
        throw DataError("calibrate_link_scalers: prefix shorter than calibration window");

    std::vector<SignalScaler> scalers;
    std::vector<double> drive(u_prefix.begin(), u_prefix.begin() + static_cast<std::ptrdiff_t>(cal.window_end));
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        const Trace t = run_sequence(drive, layers[i], LayerState::zero(layers[i].size()));
        std::vector<double> signal(drive.size());
        for (Eigen::Index n = 0; n < t.length(); ++n)
            signal[static_cast<std::size_t>(n)] =
                (interlayer[i].diag.array().square() * t.intensities.row(n).transpose().array()).sum();
        const std::span<const double> window(signal.data() + cal.window_begin,
                                             cal.window_end - cal.window_begin);
        scalers.push_back(calibrate_signal_scaler(window, cal.gains[i], layers[i + 1].mzm));
        for (std::size_t n = 0; n < drive.size(); ++n)
            drive[n] = scalers.back()(signal[n]);
    }
    return scalers;
}

}  // namespace combrc
