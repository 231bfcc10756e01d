#pragma once

// Declarative experiment description and its JSON form.
//
// Every field has a default, so a config file only lists what it changes.
// Unknown keys are rejected, and all validation errors name the field path.
// to_json() writes every field, which makes the effective config saved next
// to the results a complete description of the run.

#include "combrc/comb_physics.hpp"
#include "combrc/error.hpp"
#include "combrc/interlayer_opt.hpp"
#include "combrc/random.hpp"
#include "combrc/readout.hpp"
#include "combrc/reservoir.hpp"
#include "combrc/tasks.hpp"

#include "json.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace combrc {

enum class Mode { shallow, parallel, deep };
enum class TaskKind { santafe, channel };
enum class InterlayerStrategy { none, uniform_sweep, cmaes };
enum class SweepAxis { snr_db, tau, omega_detuning };

struct PhysicsConfig {
    int n_lines = 20;
    int guard_lines = 24;
    double line_spacing_ghz = 17.0;
    std::array<double, 2> wavelengths_nm{1550.2, 1555.4};
    ModulatorParams input_modulator{5.0, 0.0};  ///< PM 1, comb generation
    ModulatorParams loop_modulator{1.5, 0.0};   ///< PM 2, inside the loop
    double feedback_coupling = 0.65;
    double gain = 1.0;
    /// Quadratic spectral phase per roundtrip at omega_ref_ghz; scales as Omega^2.
    double dispersion_ref = 0.3;
    double omega_ref_ghz = 17.0;
    double band2_dispersion_detuning = 1.13;
    std::optional<double> spectral_radius_target;
    /// When set, draws Omega from omega_range_ghz and both RF phases.
    std::optional<std::uint64_t> seed;
    std::array<double, 2> omega_range_ghz{12.0, 21.0};
    /// Added to the (drawn or configured) line spacing; the omega scan axis.
    double omega_detuning_ghz = 0.0;

    bool operator==(const PhysicsConfig&) const = default;
};

struct InputDriveConfig {
    double center = std::numbers::pi / 4.0;
    double half_span = 0.3;

    bool operator==(const InputDriveConfig&) const = default;
};

struct SantaFeConfig {
    ShiftTaskSpec spec;
    std::optional<std::string> dataset;
    std::size_t surrogate_length = 10000;
    std::optional<std::uint64_t> surrogate_seed;

    bool operator==(const SantaFeConfig&) const = default;
};

struct ChannelConfig {
    double snr_db = 28.0;
    std::size_t train_len = 14000;
    std::size_t test_len = 30000;
    std::size_t washout = 1000;
    std::optional<std::uint64_t> seed;
    int delay = 2;

    bool operator==(const ChannelConfig&) const = default;
};

struct RidgeSettings {
    std::vector<double> lambda_grid = default_lambda_grid();
    int n_folds = 100;
    std::optional<std::uint64_t> seed;
    double inner_train_fraction = 0.8;

    bool operator==(const RidgeSettings&) const = default;
};

struct CmaesSettings {
    int population_size = 0;
    double sigma0 = 3.0;
    int max_evals = 480;
    std::optional<std::uint64_t> seed;
    double initial_db = -10.0;
    std::array<double, 2> bounds_db{-20.0, 0.0};

    bool operator==(const CmaesSettings&) const = default;
};

struct InterlayerConfig {
    InterlayerStrategy strategy = InterlayerStrategy::uniform_sweep;
    AttenuationSweepConfig sweep;
    CmaesSettings cmaes;

    bool operator==(const InterlayerConfig&) const = default;
};

struct SweepConfig {
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> values;

    bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
    Mode mode = Mode::shallow;
    TaskKind task = TaskKind::channel;
    PhysicsConfig physics;
    MZMParams mzm;
    InputDriveConfig input_drive;
    SantaFeConfig santafe;
    ChannelConfig channel;
    RidgeSettings ridge;
    InterlayerConfig interlayer;
    InterlayerTiming timing = InterlayerTiming::same_step;
    std::optional<SweepConfig> sweep;
    double intensity_noise_std = 0.0;
    std::uint64_t seed = 0;
    std::string output_dir = "results";

    bool operator==(const ExperimentConfig&) const = default;
};

// Seed streams derived from the master seed when a sub-seed is not given.
namespace seed_stream {
inline constexpr std::uint64_t ridge = 1;
inline constexpr std::uint64_t channel = 2;
inline constexpr std::uint64_t cmaes = 3;
inline constexpr std::uint64_t surrogate = 4;
inline constexpr std::uint64_t noise = 5;
}  // namespace seed_stream

inline std::uint64_t effective_seed(const std::optional<std::uint64_t>& explicit_seed, std::uint64_t master,
                                    std::uint64_t stream)
{
    return explicit_seed ? *explicit_seed : derive_seed(master, stream);
}

// ---------------------------------------------------------------------------
// enum names

namespace detail {

template <typename E, std::size_t N>
struct EnumNames {
    std::array<std::pair<E, const char*>, N> entries;

    const char* name(E e) const
    {
        for (const auto& [v, s] : entries)
            if (v == e)
                return s;
        return "?";
    }

    E parse(const std::string& s, const std::string& path) const
    {
        std::string allowed;
        for (const auto& [v, n] : entries) {
            if (s == n)
                return v;
            allowed += (allowed.empty() ? "" : ", ") + std::string(n);
        }
        throw ConfigError(path + ": unknown value '" + s + "' (expected one of " + allowed + ")");
    }
};

inline constexpr EnumNames<Mode, 3> kModeNames{
    {{{Mode::shallow, "shallow"}, {Mode::parallel, "parallel"}, {Mode::deep, "deep"}}}};
inline constexpr EnumNames<TaskKind, 2> kTaskNames{{{{TaskKind::santafe, "santafe"}, {TaskKind::channel, "channel"}}}};
inline constexpr EnumNames<InterlayerStrategy, 3> kStrategyNames{{{{InterlayerStrategy::none, "none"},
                                                                   {InterlayerStrategy::uniform_sweep, "uniform_sweep"},
                                                                   {InterlayerStrategy::cmaes, "cmaes"}}}};
inline constexpr EnumNames<SweepAxis, 3> kAxisNames{
    {{{SweepAxis::snr_db, "snr_db"}, {SweepAxis::tau, "tau"}, {SweepAxis::omega_detuning, "omega_detuning"}}}};
inline constexpr EnumNames<InterlayerTiming, 2> kTimingNames{
    {{{InterlayerTiming::same_step, "same_step"}, {InterlayerTiming::one_step_delay, "one_step_delay"}}}};

}  // namespace detail

inline const char* to_string(Mode m) { return detail::kModeNames.name(m); }
inline const char* to_string(TaskKind t) { return detail::kTaskNames.name(t); }
inline const char* to_string(InterlayerStrategy s) { return detail::kStrategyNames.name(s); }
inline const char* to_string(SweepAxis a) { return detail::kAxisNames.name(a); }
inline const char* to_string(InterlayerTiming t) { return detail::kTimingNames.name(t); }

// ---------------------------------------------------------------------------
// JSON -> config

namespace detail {

using nlohmann::json;

/// Reads an object's fields, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(where() + ": expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number())
                throw ConfigError(field(key) + ": expected a number");
            out = v->get<double>();
        }
    }

    template <typename Int>
    void integer(const std::string& key, Int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer())
                throw ConfigError(field(key) + ": expected an integer");
            if constexpr (std::is_unsigned_v<Int>) {
                if (v->is_number_unsigned() || v->get<std::int64_t>() >= 0)
                    out = static_cast<Int>(v->get<std::uint64_t>());
                else
                    throw ConfigError(field(key) + ": must be non-negative");
            } else {
                out = static_cast<Int>(v->get<std::int64_t>());
            }
        }
    }

    void optional_seed(const std::string& key, std::optional<std::uint64_t>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            std::uint64_t s = 0;
            integer(key, s);
            out = s;
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            double d = 0.0;
            number(key, d);
            out = d;
        }
    }

    void string(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string())
                throw ConfigError(field(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }

    void pair(const std::string& key, std::array<double, 2>& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                throw ConfigError(field(key) + ": expected an array of two numbers");
            out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
        }
    }

    void numbers(const std::string& key, std::vector<double>& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_array())
                throw ConfigError(field(key) + ": expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number())
                    throw ConfigError(field(key) + "[" + std::to_string(i) + "]: expected a number");
                out.push_back((*v)[i].get<double>());
            }
        }
    }

    template <typename E, std::size_t N>
    void enumeration(const std::string& key, const EnumNames<E, N>& names, E& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string())
                throw ConfigError(field(key) + ": expected a string");
            out = names.parse(v->get<std::string>(), field(key));
        }
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(field(it.key()) + ": unknown key");
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void read_modulator(ObjectReader& parent, const std::string& key, ModulatorParams& m)
{
    if (const json* v = parent.find(key)) {
        ObjectReader r(*v, parent.field(key));
        r.number("modulation_index", m.modulation_index);
        r.number("rf_phase", m.rf_phase);
        r.finish();
    }
}

}  // namespace detail

/// Checks cross-field invariants; throws ConfigError naming the field.
inline void validate(const ExperimentConfig& c)
{
    auto require = [](bool ok, const std::string& msg) {
        if (!ok)
            throw ConfigError(msg);
    };
    const auto& p = c.physics;
    require(p.n_lines >= 1, "physics.n_lines: must be >= 1");
    require(p.guard_lines >= 0, "physics.guard_lines: must be >= 0");
    require(p.n_lines + 2 * p.guard_lines <= kMaxSimulatedLines,
            "physics.guard_lines: n_lines + 2*guard_lines must be <= 512");
    require(p.line_spacing_ghz > 0.0, "physics.line_spacing_ghz: must be > 0");
    require(p.wavelengths_nm[0] > 0.0 && p.wavelengths_nm[1] > 0.0, "physics.wavelengths_nm: must be > 0");
    require(p.input_modulator.modulation_index >= 0.0 && p.input_modulator.modulation_index <= kMaxBesselArgument,
            "physics.input_modulator.modulation_index: must be in [0, 50]");
    require(p.loop_modulator.modulation_index >= 0.0 && p.loop_modulator.modulation_index <= kMaxBesselArgument,
            "physics.loop_modulator.modulation_index: must be in [0, 50]");
    require(p.input_modulator.rf_phase >= 0.0 && p.input_modulator.rf_phase < 2.0 * std::numbers::pi,
            "physics.input_modulator.rf_phase: must be in [0, 2pi)");
    require(p.loop_modulator.rf_phase >= 0.0 && p.loop_modulator.rf_phase < 2.0 * std::numbers::pi,
            "physics.loop_modulator.rf_phase: must be in [0, 2pi)");
    require(p.feedback_coupling >= 0.0 && p.feedback_coupling <= 1.0, "physics.feedback_coupling: must be in [0, 1]");
    require(p.gain >= 0.0, "physics.gain: must be >= 0");
    require(std::isfinite(p.dispersion_ref), "physics.dispersion_ref: must be finite");
    require(p.omega_ref_ghz > 0.0, "physics.omega_ref_ghz: must be > 0");
    require(p.band2_dispersion_detuning > 0.0, "physics.band2_dispersion_detuning: must be > 0");
    require(!p.spectral_radius_target || (*p.spectral_radius_target > 0.0 && *p.spectral_radius_target <= 1.5),
            "physics.spectral_radius_target: must be in (0, 1.5]");
    require(p.omega_range_ghz[0] > 0.0 && p.omega_range_ghz[0] <= p.omega_range_ghz[1],
            "physics.omega_range_ghz: need 0 < min <= max");
    {
        const double lowest = p.seed ? p.omega_range_ghz[0] : p.line_spacing_ghz;
        require(std::isfinite(p.omega_detuning_ghz) && lowest + p.omega_detuning_ghz > 0.0,
                "physics.omega_detuning_ghz: detuned line spacing must stay > 0");
    }

    require(c.mzm.e0 > 0.0, "mzm.e0: must be > 0");
    require(c.mzm.gamma > 0.0, "mzm.gamma: must be > 0");
    require(c.input_drive.half_span > 0.0, "input_drive.half_span: must be > 0");

    const auto& sf = c.santafe.spec;
    require(std::abs(sf.tau) <= 5, "santafe.tau: must be in [-5, 5]");
    require(sf.train_len >= 3 && sf.test_len >= 1, "santafe.train_len: lengths must be positive");
    require(sf.washout >= 2, "santafe.washout: must be >= 2 (link calibration window)");
    if (!c.santafe.dataset)
        require(c.santafe.surrogate_length >= sf.total_len() + static_cast<std::size_t>(std::abs(sf.tau)),
                "santafe.surrogate_length: must cover washout + train_len + test_len + |tau|");
    const auto& ch = c.channel;
    require(ch.snr_db >= 8.0 && ch.snr_db <= 32.0, "channel.snr_db: must be in [8, 32]");
    require(ch.train_len >= 3 && ch.test_len >= 1, "channel.train_len: lengths must be positive");
    require(ch.washout >= 2, "channel.washout: must be >= 2 (link calibration window)");
    require(ch.delay >= 0 && ch.delay <= 7, "channel.delay: must be in [0, 7]");

    require(!c.ridge.lambda_grid.empty(), "ridge.lambda_grid: must not be empty");
    for (double l : c.ridge.lambda_grid)
        require(l > 0.0 && std::isfinite(l), "ridge.lambda_grid: every lambda must be > 0");
    require(c.ridge.n_folds >= 1, "ridge.n_folds: must be >= 1");
    require(c.ridge.inner_train_fraction > 0.0 && c.ridge.inner_train_fraction < 1.0,
            "ridge.inner_train_fraction: must be in (0, 1)");

    const auto& il = c.interlayer;
    require(il.sweep.min_db < il.sweep.max_db, "interlayer.sweep.min_db: must be < max_db");
    require(il.sweep.n_points >= 1, "interlayer.sweep.n_points: must be >= 1");
    require(il.cmaes.population_size == 0 || il.cmaes.population_size >= 4,
            "interlayer.cmaes.population_size: must be 0 (default) or >= 4");
    require(il.cmaes.sigma0 > 0.0, "interlayer.cmaes.sigma0: must be > 0");
    require(il.cmaes.bounds_db[0] < il.cmaes.bounds_db[1], "interlayer.cmaes.bounds_db: need lower < upper");
    require(il.cmaes.initial_db >= il.cmaes.bounds_db[0] && il.cmaes.initial_db <= il.cmaes.bounds_db[1],
            "interlayer.cmaes.initial_db: must lie within bounds_db");
    {
        CmaesConfig probe;
        probe.population_size = il.cmaes.population_size;
        require(il.cmaes.max_evals >= probe.population_for(p.n_lines),
                "interlayer.cmaes.max_evals: must cover at least one generation");
    }
    if (c.mode == Mode::deep)
        require(il.strategy != InterlayerStrategy::none, "interlayer.strategy: mode 'deep' requires a strategy");

    if (c.sweep) {
        require(!c.sweep->values.empty(), "sweep.values: must not be empty");
        if (c.sweep->axis == SweepAxis::snr_db) {
            require(c.task == TaskKind::channel, "sweep.axis: snr_db requires task 'channel'");
            for (double v : c.sweep->values)
                require(v >= 8.0 && v <= 32.0, "sweep.values: snr_db must be in [8, 32]");
        }
        if (c.sweep->axis == SweepAxis::tau) {
            require(c.task == TaskKind::santafe, "sweep.axis: tau requires task 'santafe'");
            for (double v : c.sweep->values)
                require(v == std::round(v) && std::abs(v) <= 5.0, "sweep.values: tau must be an integer in [-5, 5]");
        }
        if (c.sweep->axis == SweepAxis::omega_detuning)
            for (double v : c.sweep->values)
                require((p.seed ? p.omega_range_ghz[0] : p.line_spacing_ghz) + p.omega_detuning_ghz + v > 0.0,
                        "sweep.values: detuned line spacing must stay > 0");
    }
    require(c.intensity_noise_std >= 0.0, "noise.intensity_std: must be >= 0");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    using detail::ObjectReader;
    using nlohmann::json;
    ExperimentConfig c;
    ObjectReader root(j, "");
    root.enumeration("mode", detail::kModeNames, c.mode);
    root.enumeration("task", detail::kTaskNames, c.task);
    root.integer("seed", c.seed);
    root.string("output_dir", c.output_dir);

    if (const json* v = root.find("physics")) {
        ObjectReader r(*v, "physics");
        auto& p = c.physics;
        r.integer("n_lines", p.n_lines);
        r.integer("guard_lines", p.guard_lines);
        r.number("line_spacing_ghz", p.line_spacing_ghz);
        r.pair("wavelengths_nm", p.wavelengths_nm);
        detail::read_modulator(r, "input_modulator", p.input_modulator);
        detail::read_modulator(r, "loop_modulator", p.loop_modulator);
        r.number("feedback_coupling", p.feedback_coupling);
        r.number("gain", p.gain);
        r.number("dispersion_ref", p.dispersion_ref);
        r.number("omega_ref_ghz", p.omega_ref_ghz);
        r.number("band2_dispersion_detuning", p.band2_dispersion_detuning);
        r.optional_number("spectral_radius_target", p.spectral_radius_target);
        r.optional_seed("seed", p.seed);
        r.pair("omega_range_ghz", p.omega_range_ghz);
        r.number("omega_detuning_ghz", p.omega_detuning_ghz);
        r.finish();
    }
    if (const json* v = root.find("mzm")) {
        ObjectReader r(*v, "mzm");
        r.number("e0", c.mzm.e0);
        r.number("gamma", c.mzm.gamma);
        r.finish();
    }
    if (const json* v = root.find("input_drive")) {
        ObjectReader r(*v, "input_drive");
        r.number("center", c.input_drive.center);
        r.number("half_span", c.input_drive.half_span);
        r.finish();
    }
    if (const json* v = root.find("santafe")) {
        ObjectReader r(*v, "santafe");
        r.integer("tau", c.santafe.spec.tau);
        r.integer("train_len", c.santafe.spec.train_len);
        r.integer("test_len", c.santafe.spec.test_len);
        r.integer("washout", c.santafe.spec.washout);
        if (const json* d = r.find("dataset")) {
            if (d->is_null())
                c.santafe.dataset.reset();
            else if (d->is_string())
                c.santafe.dataset = d->get<std::string>();
            else
                throw ConfigError("santafe.dataset: expected a path string or null");
        }
        r.integer("surrogate_length", c.santafe.surrogate_length);
        r.optional_seed("surrogate_seed", c.santafe.surrogate_seed);
        r.finish();
    }
    if (const json* v = root.find("channel")) {
        ObjectReader r(*v, "channel");
        r.number("snr_db", c.channel.snr_db);
        r.integer("train_len", c.channel.train_len);
        r.integer("test_len", c.channel.test_len);
        r.integer("washout", c.channel.washout);
        r.optional_seed("seed", c.channel.seed);
        r.integer("delay", c.channel.delay);
        r.finish();
    }
    if (const json* v = root.find("ridge")) {
        ObjectReader r(*v, "ridge");
        r.numbers("lambda_grid", c.ridge.lambda_grid);
        r.integer("n_folds", c.ridge.n_folds);
        r.optional_seed("seed", c.ridge.seed);
        r.number("inner_train_fraction", c.ridge.inner_train_fraction);
        r.finish();
    }
    if (const json* v = root.find("interlayer")) {
        ObjectReader r(*v, "interlayer");
        r.enumeration("strategy", detail::kStrategyNames, c.interlayer.strategy);
        if (const json* s = r.find("sweep")) {
            ObjectReader rs(*s, "interlayer.sweep");
            rs.number("min_db", c.interlayer.sweep.min_db);
            rs.number("max_db", c.interlayer.sweep.max_db);
            rs.integer("n_points", c.interlayer.sweep.n_points);
            rs.finish();
        }
        if (const json* s = r.find("cmaes")) {
            ObjectReader rc(*s, "interlayer.cmaes");
            auto& cm = c.interlayer.cmaes;
            rc.integer("population_size", cm.population_size);
            rc.number("sigma0", cm.sigma0);
            rc.integer("max_evals", cm.max_evals);
            rc.optional_seed("seed", cm.seed);
            rc.number("initial_db", cm.initial_db);
            rc.pair("bounds_db", cm.bounds_db);
            rc.finish();
        }
        r.finish();
    }
    if (const json* v = root.find("deep")) {
        ObjectReader r(*v, "deep");
        r.enumeration("timing", detail::kTimingNames, c.timing);
        r.finish();
    }
    if (const json* v = root.find("sweep")) {
        if (v->is_null()) {
            c.sweep.reset();
        } else {
            ObjectReader r(*v, "sweep");
            SweepConfig s;
            r.enumeration("axis", detail::kAxisNames, s.axis);
            r.numbers("values", s.values);
            r.finish();
            c.sweep = s;
        }
    }
    if (const json* v = root.find("noise")) {
        ObjectReader r(*v, "noise");
        r.number("intensity_std", c.intensity_noise_std);
        r.finish();
    }
    root.finish();
    validate(c);
    return c;
}

// ---------------------------------------------------------------------------
// config -> JSON

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    using nlohmann::json;
    auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
    auto modulator = [](const ModulatorParams& m) {
        return json{{"modulation_index", m.modulation_index}, {"rf_phase", m.rf_phase}};
    };
    const auto& p = c.physics;
    json j;
    j["mode"] = to_string(c.mode);
    j["task"] = to_string(c.task);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["physics"] = {{"n_lines", p.n_lines},
                    {"guard_lines", p.guard_lines},
                    {"line_spacing_ghz", p.line_spacing_ghz},
                    {"wavelengths_nm", p.wavelengths_nm},
                    {"input_modulator", modulator(p.input_modulator)},
                    {"loop_modulator", modulator(p.loop_modulator)},
                    {"feedback_coupling", p.feedback_coupling},
                    {"gain", p.gain},
                    {"dispersion_ref", p.dispersion_ref},
                    {"omega_ref_ghz", p.omega_ref_ghz},
                    {"band2_dispersion_detuning", p.band2_dispersion_detuning},
                    {"spectral_radius_target", opt(p.spectral_radius_target)},
                    {"seed", opt(p.seed)},
                    {"omega_range_ghz", p.omega_range_ghz},
                    {"omega_detuning_ghz", p.omega_detuning_ghz}};
    j["mzm"] = {{"e0", c.mzm.e0}, {"gamma", c.mzm.gamma}};
    j["input_drive"] = {{"center", c.input_drive.center}, {"half_span", c.input_drive.half_span}};
    j["santafe"] = {{"tau", c.santafe.spec.tau},
                    {"train_len", c.santafe.spec.train_len},
                    {"test_len", c.santafe.spec.test_len},
                    {"washout", c.santafe.spec.washout},
                    {"dataset", opt(c.santafe.dataset)},
                    {"surrogate_length", c.santafe.surrogate_length},
                    {"surrogate_seed", opt(c.santafe.surrogate_seed)}};
    j["channel"] = {{"snr_db", c.channel.snr_db},
                    {"train_len", c.channel.train_len},
                    {"test_len", c.channel.test_len},
                    {"washout", c.channel.washout},
                    {"seed", opt(c.channel.seed)},
                    {"delay", c.channel.delay}};
    j["ridge"] = {{"lambda_grid", c.ridge.lambda_grid},
                  {"n_folds", c.ridge.n_folds},
                  {"seed", opt(c.ridge.seed)},
                  {"inner_train_fraction", c.ridge.inner_train_fraction}};
    const auto& cm = c.interlayer.cmaes;
    j["interlayer"] = {{"strategy", to_string(c.interlayer.strategy)},
                       {"sweep",
                        {{"min_db", c.interlayer.sweep.min_db},
                         {"max_db", c.interlayer.sweep.max_db},
                         {"n_points", c.interlayer.sweep.n_points}}},
                       {"cmaes",
                        {{"population_size", cm.population_size},
                         {"sigma0", cm.sigma0},
                         {"max_evals", cm.max_evals},
                         {"seed", opt(cm.seed)},
                         {"initial_db", cm.initial_db},
                         {"bounds_db", cm.bounds_db}}}};
    j["deep"] = {{"timing", to_string(c.timing)}};
    j["sweep"] = c.sweep ? json{{"axis", to_string(c.sweep->axis)}, {"values", c.sweep->values}} : json(nullptr);
    j["noise"] = {{"intensity_std", c.intensity_noise_std}};
    return j;
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2); }

inline ExperimentConfig parse_config(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("<root>: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<root>: cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// FNV-1a 64 of the canonical (sorted-key, compact) JSON, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace combrc
