// combrc: run comb reservoir experiments from a JSON config.
//
//   combrc run --config cfg.json [--seed S] [--jobs J] [--output DIR] [--plot]
//   combrc sweep --config cfg.json ...
//   combrc omega-scan --config cfg.json ...
//   combrc comb-spectrum --config cfg.json
//   combrc validate-config --config cfg.json
//
// Exit codes: 0 success, 2 config or usage error, 3 runtime error.

#include "combrc/combrc.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config_path;
    std::string dataset;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool plot = false;
    std::string output;
};

combrc::ExperimentConfig load(const Options& o)
{
    combrc::ExperimentConfig cfg =
        o.config_path.empty() ? combrc::ExperimentConfig{} : combrc::load_config(o.config_path);
    if (!o.dataset.empty())
        cfg.santafe.dataset = o.dataset;
    if (o.seed)
        cfg.seed = *o.seed;
    if (!o.output.empty())
        cfg.output_dir = o.output;
    combrc::validate(cfg);
    return cfg;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_records(const std::vector<combrc::harness::ResultRecord>& records,
                   const std::optional<combrc::harness::SweepOutcome>& sweep)
{
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::cout << "point " << i;
        if (sweep)
            std::cout << "  " << combrc::to_string(sweep->axis) << "=" << fmt(sweep->values[i]);
        std::cout << "  omega=" << fmt(r.omega_ghz) << " GHz";
        for (const auto& e : r.scores)
            std::cout << "  " << e.name << " " << combrc::to_string(r.metric) << "=" << fmt(e.cv.mean) << " +/- "
                      << fmt(e.cv.stddev);
        if (r.interlayer_db && !r.interlayer_db->empty()) {
            double lo = r.interlayer_db->front();
            double hi = lo;
            for (double v : *r.interlayer_db) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            std::cout << "  mask=[" << fmt(lo) << ", " << fmt(hi) << "] dB";
        }
        if (r.persistence_nmse)
            std::cout << "  persistence=" << fmt(*r.persistence_nmse);
        std::cout << "  (" << fmt(r.timing.total()) << " s)\n";
    }
}

void finish(const std::string& command, const combrc::ExperimentConfig& cfg,
            const std::vector<combrc::harness::ResultRecord>& records,
            const std::optional<combrc::harness::SweepOutcome>& sweep, bool plot)
{
    print_records(records, sweep);
    const auto written = combrc::harness::write_outputs(cfg.output_dir, command, cfg, records, sweep, plot);
    for (const auto& p : written)
        std::cout << "wrote " << p.string() << "\n";
}

int cmd_run(const Options& o)
{
    const auto cfg = load(o);
    const auto record = combrc::harness::run_experiment(cfg, o.jobs);
    finish("run", cfg, {record}, std::nullopt, o.plot);
    return 0;
}

int cmd_sweep(const Options& o)
{
    const auto cfg = load(o);
    auto outcome = combrc::harness::run_sweep(cfg, o.jobs);
    const auto records = outcome.points;
    finish("sweep", cfg, records, std::move(outcome), o.plot);
    return 0;
}

int cmd_omega_scan(const Options& o)
{
    const auto cfg = load(o);
    auto outcome = combrc::harness::run_omega_scan(cfg, o.jobs);
    const auto records = outcome.points;
    finish("omega-scan", cfg, records, std::move(outcome), o.plot);
    return 0;
}

int cmd_comb_spectrum(const Options& o)
{
    const auto cfg = load(o);
    const auto lines = combrc::harness::comb_spectrum(cfg);
    std::ostringstream csv;
    csv << "band,line,wavelength_nm,w_in_abs,w_in_power_db,loop_power\n";
    for (const auto& l : lines) {
        const double p = l.w_in_abs * l.w_in_abs;
        csv << l.band << ',' << l.line << ',' << combrc::harness::detail::csv_number(l.wavelength_nm) << ','
            << combrc::harness::detail::csv_number(l.w_in_abs) << ','
            << combrc::harness::detail::csv_number(p > 0.0 ? 10.0 * std::log10(p) : -INFINITY) << ','
            << combrc::harness::detail::csv_number(l.loop_power) << '\n';
    }
    std::cout << csv.str();
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / "comb_spectrum.csv";
    combrc::harness::detail::write_text(path, csv.str());
    std::cerr << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_validate(const Options& o)
{
    const auto cfg = load(o);
    std::cout << combrc::serialize(cfg) << "\n";
    std::cerr << "config ok, hash " << combrc::config_hash(cfg) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Frequency-multiplexed photonic deep reservoir simulator"};
    app.set_version_flag("--version", std::string(combrc::harness::version()));
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config_path, "experiment config (JSON)");
        if (needs_config)
            c->required()->check(CLI::ExistingFile);
        sub->add_option("--dataset", o.dataset, "Santa Fe series, one sample per line")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed (overrides the config)");
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--plot", o.plot, "also write plot.svg");
        sub->add_option("--output", o.output, "output directory (overrides the config)");
    };

    auto* run = app.add_subcommand("run", "single experiment");
    auto* sweep = app.add_subcommand("sweep", "experiment over the config's sweep axis");
    auto* omega = app.add_subcommand("omega-scan", "per-band shallow score over line-spacing detunings");
    auto* spectrum = app.add_subcommand("comb-spectrum", "dump |W_in| and loop line powers");
    auto* check = app.add_subcommand("validate-config", "parse, validate and print the effective config");
    add_common(run, false);
    add_common(sweep, true);
    add_common(omega, true);
    add_common(spectrum, false);
    add_common(check, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run)
            return cmd_run(o);
        if (*sweep)
            return cmd_sweep(o);
        if (*omega)
            return cmd_omega_scan(o);
        if (*spectrum)
            return cmd_comb_spectrum(o);
        return cmd_validate(o);
    } catch (const combrc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const combrc::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
