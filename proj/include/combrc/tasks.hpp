#pragma once

// Benchmark data: the Santa Fe laser series (or a chaotic surrogate) for the
// time-shift task, and the nonlinear communication channel for the
// equalisation task.

#include "combrc/comb_physics.hpp"
#include "combrc/error.hpp"
#include "combrc/random.hpp"
#include "combrc/reservoir.hpp"
#include "combrc/symbols.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace combrc {

struct ShiftTaskSpec {
    int tau = 1;
    std::size_t train_len = 6000;
    std::size_t test_len = 2500;
    std::size_t washout = 500;

    void validate() const
    {
        if (std::abs(tau) > 5)
            throw DomainError("ShiftTaskSpec: |tau| must be <= 5");
        if (train_len == 0 || test_len == 0)
            throw DomainError("ShiftTaskSpec: lengths must be positive");
    }

    std::size_t total_len() const { return washout + train_len + test_len; }

    bool operator==(const ShiftTaskSpec&) const = default;
};

struct ChannelTaskSpec {
    double snr_db = 28.0;
    std::size_t train_len = 14000;
    std::size_t test_len = 30000;
    std::size_t washout = 1000;
    std::uint64_t seed = 0;
    /// Target for channel output u(n) is d(n - delay).
    int delay = 2;

    void validate() const
    {
        if (!(snr_db >= 8.0 && snr_db <= 32.0))
            throw DomainError("ChannelTaskSpec: snr_db must be in [8, 32]");
        if (train_len == 0 || test_len == 0)
            throw DomainError("ChannelTaskSpec: lengths must be positive");
        if (delay < 0 || delay > 7)
            throw DomainError("ChannelTaskSpec: delay must be in [0, 7]");
    }

    std::size_t total_len() const { return washout + train_len + test_len; }

    bool operator==(const ChannelTaskSpec&) const = default;
};

inline void standardize(std::vector<double>& x)
{
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x)
        var += (v - mean) * (v - mean);
    var /= n;
    if (!(var > 0.0))
        throw DataError("standardize: series is constant");
    const double inv = 1.0 / std::sqrt(var);
    for (double& v : x)
        v = (v - mean) * inv;
}

/// Plain-text series, one decimal number per line (LF or CRLF; blank lines
/// ignored), standardised to zero mean and unit variance.
inline std::vector<double> load_series(const std::filesystem::path& path, std::size_t min_length = 0)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("load_series: cannot open " + path.string());

    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        if (*begin == '+')
            ++begin;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v))
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '"
                            + line.substr(first, last - first + 1) + "' as a number");
        values.push_back(v);
    }
    if (values.size() < std::max<std::size_t>(min_length, 2))
        throw DataError("load_series: " + path.string() + " has " + std::to_string(values.size())
                        + " samples, need at least " + std::to_string(std::max<std::size_t>(min_length, 2)));
    standardize(values);
    return values;
}

/// Pairs (u_t, u_{t+tau}): positive tau asks for the future, negative for
/// the past. Both outputs have length size - |tau|.
inline std::pair<std::vector<double>, std::vector<double>> make_shift_target(std::span<const double> u,
                                                                             int tau)
{
    const auto shift = static_cast<std::size_t>(std::abs(tau));
    if (shift >= u.size())
        throw DomainError("make_shift_target: |tau| must be smaller than the series length");
    const std::size_t n = u.size() - shift;
    std::vector<double> input(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (tau >= 0) {
            input[i] = u[i];
            target[i] = u[i + shift];
        } else {
            input[i] = u[i + shift];
            target[i] = u[i];
        }
    }
    return {std::move(input), std::move(target)};
}

/// Chaotic stand-in for the Santa Fe laser data: squared x of the Lorenz
/// system (sigma 10, rho 28, beta 8/3), RK4 with h = 0.01, sampled every 0.08
/// time units (about 8 samples per oscillation), standardised. The seed
/// perturbs the initial condition; 1000 samples of transient are dropped.
inline std::vector<double> lorenz_surrogate(std::size_t length, std::uint64_t seed)
{
    using State = std::array<double, 3>;
    auto deriv = [](const State& s) -> State {
        return {10.0 * (s[1] - s[0]), s[0] * (28.0 - s[2]) - s[1], s[0] * s[1] - 8.0 / 3.0 * s[2]};
    };
    auto axpy = [](const State& a, double h, const State& b) -> State {
        return {a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]};
    };

    Rng rng(seed);
    State s{1.0 + rng.normal(), 1.0 + rng.normal(), 20.0 + rng.normal()};
    constexpr double h = 0.01;
    constexpr int substeps = 8;
    constexpr std::size_t transient = 1000;

    std::vector<double> out;
    out.reserve(length);
    for (std::size_t i = 0; i < length + transient; ++i) {
        for (int k = 0; k < substeps; ++k) {
            const State k1 = deriv(s);
            const State k2 = deriv(axpy(s, h / 2, k1));
            const State k3 = deriv(axpy(s, h / 2, k2));
            const State k4 = deriv(axpy(s, h, k3));
            for (int c = 0; c < 3; ++c)
                s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if (i >= transient)
            out.push_back(s[0] * s[0]);
    }
    standardize(out);
    return out;
}

/// I.i.d. uniform symbols from {-3, -1, 1, 3}.
inline std::vector<int> gen_symbols(std::size_t length, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<int> d(length);
    for (auto& s : d)
        s = kSymbolAlphabet[static_cast<std::size_t>(rng.next() >> 62)];
    return d;
}

/// Linear channel taps for d(n+2) .. d(n-7).
inline constexpr std::array<double, 10> kChannelTaps{0.08, -0.12, 1.0,  0.18, -0.1,
                                                     0.091, -0.05, 0.04, 0.03, 0.01};
/// Output j of the channel corresponds to symbol time n = j + kChannelLag.
inline constexpr std::size_t kChannelLag = 7;
inline constexpr std::size_t kChannelTrim = kChannelTaps.size() - 1;

/// Noiseless channel: q(n) = sum_i taps_i d(n + 2 - i),
/// u(n) = q + 0.036 q^2 - 0.011 q^3, for n in [7, size - 3].
inline std::vector<double> channel_noiseless(std::span<const int> d)
{
    if (d.size() < kChannelTaps.size() + 1)
        throw DataError("channel_distort: need at least 11 symbols");
    const std::size_t n_out = d.size() - kChannelTrim;
    std::vector<double> u(n_out);
    for (std::size_t j = 0; j < n_out; ++j) {
        const std::size_t n = j + kChannelLag;
        double q = 0.0;
        for (std::size_t i = 0; i < kChannelTaps.size(); ++i)
            q += kChannelTaps[i] * d[n + 2 - i];
        u[j] = q + 0.036 * q * q - 0.011 * q * q * q;
    }
    return u;
}

/// Noiseless channel plus white Gaussian noise at the requested SNR relative
/// to the mean power of the noiseless output. snr_db = +inf adds no noise.
inline std::vector<double> channel_distort(std::span<const int> d, double snr_db, std::uint64_t seed)
{
    std::vector<double> u = channel_noiseless(d);
    if (std::isinf(snr_db) && snr_db > 0)
        return u;
    double power = 0.0;
    for (double v : u)
        power += v * v;
    power /= static_cast<double>(u.size());
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
    Rng rng(seed);
    for (double& v : u)
        v += sigma * rng.normal();
    return u;
}

struct TaskSeries {
    std::vector<double> input;
    std::vector<double> target;
};

/// Channel output and aligned symbol targets, exactly spec.total_len() long.
inline TaskSeries make_channel_task(const ChannelTaskSpec& spec)
{
    spec.validate();
    const std::size_t length = spec.total_len();
    const auto d = gen_symbols(length + kChannelTrim, derive_seed(spec.seed, 0));
    TaskSeries out;
    out.input = channel_distort(d, spec.snr_db, derive_seed(spec.seed, 1));
    out.target.resize(length);
    for (std::size_t j = 0; j < length; ++j)
        out.target[j] = d[j + kChannelLag - static_cast<std::size_t>(spec.delay)];
    return out;
}

/// Santa Fe shift task truncated to exactly spec.total_len() samples.
inline TaskSeries make_shift_task(std::span<const double> series, const ShiftTaskSpec& spec)
{
    spec.validate();
    auto [input, target] = make_shift_target(series, spec.tau);
    if (input.size() < spec.total_len())
        throw DataError("shift task: series provides " + std::to_string(input.size())
                        + " aligned samples, need " + std::to_string(spec.total_len()));
    input.resize(spec.total_len());
    target.resize(spec.total_len());
    return {std::move(input), std::move(target)};
}

/// Affine map from task values to the first layer's input u, chosen so that
/// gamma*u covers [center - half_span, center + half_span] over a
/// calibration window.
struct DriveMap {
    double scale = 1.0;
    double shift = 0.0;

    double operator()(double v) const { return scale * v + shift; }

    static DriveMap fit(std::span<const double> window, double center, double half_span,
                        const MZMParams& mzm)
    {
        if (window.empty())
            throw DataError("DriveMap: empty calibration window");
        const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
        if (!(*hi > *lo))
            throw DataError("DriveMap: constant calibration window");
        const double mid = 0.5 * (*hi + *lo);
        const double a = half_span / (0.5 * (*hi - *lo));
        return {a / mzm.gamma, (center - a * mid) / mzm.gamma};
    }

    std::vector<double> apply(std::span<const double> values) const
    {
        std::vector<double> out(values.size());
        std::transform(values.begin(), values.end(), out.begin(), *this);
        return out;
    }
};

}  // namespace combrc
