// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
//   acceptance [--jobs J] [--dataset santa_fe.txt] [--only N]

#include "combrc/combrc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace combrc;

namespace {

struct Args {
    int jobs = 1;
    std::optional<std::string> dataset;
    std::optional<int> only;
};

constexpr int kPhysicsSeeds = 10;
constexpr int kSeedsRequired = 8;

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// ---------------------------------------------------------------------------
// 1. physics invariants

Outcome physics_invariants()
{
    Outcome out;
    double row_dev = 0.0;
    double col_dev = 0.0;
    for (double m : {0.3, 0.8, 1.2, 1.5, 2.0}) {
        for (double phase : {0.0, 1.1, 4.0}) {
            const CombSpec spec{1550.2, 17.0, 20, 24};
            const ComplexMatrix p = pm_coupling_matrix(spec, {m, phase});
            const Eigen::VectorXd rows = p.cwiseAbs2().rowwise().sum();
            const Eigen::VectorXd cols = p.cwiseAbs2().colwise().sum().transpose();
            for (int i = spec.guard_lines; i < spec.guard_lines + spec.n_lines; ++i) {
                row_dev = std::max(row_dev, std::abs(rows(i) - 1.0));
                col_dev = std::max(col_dev, std::abs(cols(i) - 1.0));
            }
        }
    }
    double modulus_dev = 0.0;
    for (double theta : {0.0, 0.05, 0.3, 1.7, -2.2}) {
        const ComplexVector d = dispersion_phases({1550.2, 17.0, 20, 24}, {0.8, 1.0, theta, std::nullopt});
        modulus_dev = std::max(modulus_dev, (d.cwiseAbs().array() - 1.0).abs().maxCoeff());
    }
    double norm = 0.0;
    for (double m : {0.5, 1.2, 1.5, 2.0})
        for (double theta : {0.0, 0.05, 0.3, 0.9})
            norm = std::max(norm, operator_norm(build_internal_matrix({1550.2, 17.0, 20, 24}, {m, 0.7},
                                                                      {1.0, 1.0, theta, std::nullopt})));
    out.check(row_dev <= 1e-9 && col_dev <= 1e-9, "truncated unitarity");
    out.check(modulus_dev <= 1e-14, "unit modulus");
    out.check(norm <= 1.0 + 1e-9, "passive operator norm");
    out.detail << "row/col power-sum dev " << sci(row_dev) << "/" << sci(col_dev) << " (tol 1e-9), |D|-1 "
               << sci(modulus_dev) << " (tol 1e-14), max ||W|| " << sci(norm) << " (tol 1+1e-9)";
    return out;
}

// ---------------------------------------------------------------------------
// 2. dynamics oracles

Outcome dynamics_oracles()
{
    using C = std::complex<double>;
    Outcome out;

    // Hand-iterated two-layer, two-neuron cascade over two steps.
    const C w1[2][2] = {{0.5, C(0, 0.1)}, {0.2, 0.3}};
    const C win1[2] = {1.0, C(0, 0.5)};
    const C w2[2][2] = {{0.4, 0.0}, {C(0, 0.1), 0.6}};
    const C win2[2] = {0.7, 0.2};
    const double mask[2] = {0.8, 0.5};
    const double scale = 0.3, shift = 0.1;
    const double u[2] = {0.4, -0.2};

    C a[2] = {0.0, 0.0}, b[2] = {0.0, 0.0};
    double expected[2][4];
    for (int n = 0; n < 2; ++n) {
        const double f1 = std::sin(u[n]);
        const C a0 = w1[0][0] * a[0] + w1[0][1] * a[1] + win1[0] * f1;
        const C a1 = w1[1][0] * a[0] + w1[1][1] * a[1] + win1[1] * f1;
        a[0] = a0;
        a[1] = a1;
        const double s = mask[0] * mask[0] * std::norm(a[0]) + mask[1] * mask[1] * std::norm(a[1]);
        const double f2 = std::sin(scale * s + shift);
        const C b0 = w2[0][0] * b[0] + w2[0][1] * b[1] + win2[0] * f2;
        const C b1 = w2[1][0] * b[0] + w2[1][1] * b[1] + win2[1] * f2;
        b[0] = b0;
        b[1] = b1;
        expected[n][0] = std::norm(a[0]);
        expected[n][1] = std::norm(a[1]);
        expected[n][2] = std::norm(b[0]);
        expected[n][3] = std::norm(b[1]);
    }
    ReservoirParams l1, l2;
    l1.w.resize(2, 2);
    l2.w.resize(2, 2);
    l1.w_in.resize(2);
    l2.w_in.resize(2);
    for (int i = 0; i < 2; ++i) {
        l1.w_in(i) = win1[i];
        l2.w_in(i) = win2[i];
        for (int j = 0; j < 2; ++j) {
            l1.w(i, j) = w1[i][j];
            l2.w(i, j) = w2[i][j];
        }
    }
    const std::vector<ReservoirParams> layers{l1, l2};
    const std::vector<InterlayerWeights> masks{{Eigen::Vector2d(mask[0], mask[1])}};
    const std::vector<SignalScaler> scalers{{scale, shift}};
    const std::vector<double> useq{u[0], u[1]};
    const auto traces = run_deep(useq, layers, masks, scalers);
    double trace_err = 0.0;
    for (int n = 0; n < 2; ++n)
        for (int k = 0; k < 2; ++k) {
            trace_err = std::max(trace_err, std::abs(traces[0].intensities(n, k) - expected[n][k]));
            trace_err = std::max(trace_err, std::abs(traces[1].intensities(n, k) - expected[n][k + 2]));
        }

    // Field linearity: unforced evolution from a*v equals a times that from v.
    const ResolvedPhysics phys = resolve_physics(PhysicsConfig{});
    const ReservoirParams layer = build_layer(phys.bands[0], MZMParams{});
    Rng rng(11);
    ComplexVector v(layer.size());
    for (Eigen::Index k = 0; k < v.size(); ++k)
        v(k) = C(rng.normal(), rng.normal());
    const C scale_a(1.7, -0.4);
    const std::vector<double> zeros(40, 0.0);
    const Trace tv = run_sequence(zeros, layer, {v}, true);
    const Trace ta = run_sequence(zeros, layer, {scale_a * v}, true);
    const double lin_err = (*ta.states - scale_a * *tv.states).cwiseAbs().maxCoeff();

    // Quadratic homogeneity of the readout.
    LayerState x{v};
    Eigen::VectorXd wp(v.size()), wm(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        wp(k) = rng.uniform();
        wm(k) = rng.uniform();
    }
    const double base = quadratic_readout(x, wp, wm);
    const double doubled = quadratic_readout(x, 2.0 * wp, 2.0 * wm);
    const double c = 1.37;
    const double scaled = quadratic_readout(x, c * wp, c * wm);
    const double rel = std::abs(scaled - c * c * base) / std::abs(c * c * base);

    out.check(trace_err <= 1e-12, "hand trace");
    out.check(lin_err <= 1e-12, "field linearity");
    out.check(doubled == 4.0 * base && rel <= 1e-14, "quadratic homogeneity");
    out.detail << "deep trace err " << sci(trace_err) << " (tol 1e-12), linearity err " << sci(lin_err)
               << " (tol 1e-12), homogeneity exact for c=2, rel err " << sci(rel) << " for c=1.37";
    return out;
}

// ---------------------------------------------------------------------------
// 3. regression oracle

/// Dense Gaussian elimination with partial pivoting.
std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c]))
                p = r;
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

Outcome regression_oracle()
{
    Outcome out;
    double worst = 0.0;
    double split_err = 0.0;
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        Rng rng(100 + trial);
        Eigen::MatrixXd x(50, 5);
        Eigen::VectorXd y(50);
        for (Eigen::Index i = 0; i < 50; ++i) {
            for (Eigen::Index k = 0; k < 5; ++k)
                x(i, k) = rng.uniform(0.0, 2.0);
            y(i) = rng.normal();
        }
        for (double lambda : {1e-6, 1e-3, 1e-1}) {
            // Normal equations of [X 1] with the bias unpenalised.
            std::vector<std::vector<double>> a(6, std::vector<double>(6, 0.0));
            std::vector<double> rhs(6, 0.0);
            for (Eigen::Index i = 0; i < 50; ++i) {
                double row[6];
                for (int k = 0; k < 5; ++k)
                    row[k] = x(i, k);
                row[5] = 1.0;
                for (int p = 0; p < 6; ++p) {
                    rhs[static_cast<std::size_t>(p)] += row[p] * y(i);
                    for (int q = 0; q < 6; ++q)
                        a[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] += row[p] * row[q];
                }
            }
            for (std::size_t k = 0; k < 5; ++k)
                a[k][k] += lambda;
            const auto ref = gauss_solve(a, rhs);
            const RidgeSolution sol = ridge_fit(x, y, lambda);
            double num = 0.0, den = 0.0;
            for (int k = 0; k < 5; ++k) {
                num = std::max(num, std::abs(sol.weights(k) - ref[static_cast<std::size_t>(k)]));
                den = std::max(den, std::abs(ref[static_cast<std::size_t>(k)]));
            }
            num = std::max(num, std::abs(sol.bias - ref[5]));
            den = std::max(den, std::abs(ref[5]));
            worst = std::max(worst, num / den);

            // Signed split round trip: intensities are |x|^2 of a field.
            const ReadoutWeights rw = split_signed_weights(sol.weights, sol.bias);
            const Eigen::VectorXd linear = sol.predict(x);
            for (Eigen::Index i = 0; i < 50; ++i) {
                LayerState s{ComplexVector(5)};
                for (Eigen::Index k = 0; k < 5; ++k)
                    s.x(k) = std::polar(std::sqrt(x(i, k)), 0.3 * static_cast<double>(k));
                const double q = quadratic_readout(s, rw.w_plus, rw.w_minus) + rw.bias;
                split_err = std::max(split_err, std::abs(q - linear(i)));
            }
        }
    }
    out.check(worst <= 1e-10, "ridge vs normal equations");
    out.check(split_err <= 1e-12, "signed split");
    out.detail << "max relative deviation from Gaussian-elimination normal equations " << sci(worst)
               << " (tol 1e-10), signed-split round trip " << sci(split_err) << " (tol 1e-12)";
    return out;
}

// ---------------------------------------------------------------------------
// 4. task oracles

Outcome task_oracles()
{
    Outcome out;
    const std::vector<int> ones(20, 1);
    double tap_sum = 0.0;
    for (double t : kChannelTaps)
        tap_sum += t;
    const double q = 1.161;
    const double u_expected = q + 0.036 * q * q - 0.011 * q * q * q;
    double tap_err = std::abs(tap_sum - q);
    for (double v : channel_noiseless(ones))
        tap_err = std::max(tap_err, std::abs(v - u_expected));

    double snr_err = 0.0;
    const auto d = gen_symbols(30000 + kChannelTrim, 77);
    const auto clean = channel_noiseless(d);
    for (double snr : {8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0}) {
        const auto noisy = channel_distort(d, snr, 1234 + static_cast<std::uint64_t>(snr));
        double ps = 0.0, pn = 0.0;
        for (std::size_t i = 0; i < clean.size(); ++i) {
            ps += clean[i] * clean[i];
            pn += (noisy[i] - clean[i]) * (noisy[i] - clean[i]);
        }
        snr_err = std::max(snr_err, std::abs(10.0 * std::log10(ps / pn) - snr));
    }

    const std::vector<double> t{0.0, 2.0, 1.0, 5.0};
    const std::vector<double> mean_pred(4, 2.0);
    const std::vector<int> s{-3, -1, 1, 3};
    const std::vector<int> wrong{3, 1, -1, -3};
    const bool defs = nmse(t, t) == 0.0 && std::abs(nmse(mean_pred, t) - 1.0) < 1e-15 && ser(s, s) == 0.0
                      && ser(wrong, s) == 1.0;

    out.check(tap_err <= 1e-12, "channel taps");
    out.check(snr_err <= 0.2, "SNR");
    out.check(defs, "metric definitions");
    out.detail << "q for d=1 within " << sci(tap_err) << " of 1.161, max |measured-requested| SNR "
               << sci(snr_err) << " dB over 8..32 dB (tol 0.2), NMSE/SER definitions "
               << (defs ? "hold" : "violated");
    return out;
}

// ---------------------------------------------------------------------------
// 5, 6. trend reproduction

struct ModeScores {
    double shallow = 0.0, parallel = 0.0, deep = 0.0;
    double shallow_std = 0.0;
    double deep_db = 0.0;
    std::optional<double> persistence;
};

ModeScores three_configurations(const ExperimentConfig& cfg, int jobs)
{
    const Pipeline p(cfg);
    ModeScores s;
    const auto sh = harness::run_shallow(p, jobs);
    s.shallow = sh.primary().cv.mean;
    s.shallow_std = sh.primary().cv.stddev;
    s.parallel = harness::run_parallel(p, jobs).primary().cv.mean;
    const auto deep = harness::run_deep(p, jobs);
    s.deep = deep.primary().cv.mean;
    s.deep_db = deep.interlayer_db->front();
    s.persistence = sh.persistence_nmse;
    return s;
}

ExperimentConfig physics_seed_config(ExperimentConfig cfg, int seed)
{
    cfg.physics.seed = static_cast<std::uint64_t>(seed);
    return cfg;
}

Outcome channel_trends(int jobs)
{
    Outcome out;
    ExperimentConfig base;
    base.task = TaskKind::channel;

    // (a) shallow SER against SNR.
    std::vector<double> means, stds;
    const std::vector<double> grid{8, 12, 16, 20, 24, 28, 32};
    for (double snr : grid) {
        ExperimentConfig c = physics_seed_config(base, 0);
        c.channel.snr_db = snr;
        const auto r = harness::run_experiment(c, jobs);
        means.push_back(r.primary().cv.mean);
        stds.push_back(r.primary().cv.stddev);
    }
    int inversions = 0;
    bool inversion_small = true;
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (means[i] > means[i - 1]) {
            ++inversions;
            inversion_small = inversion_small && means[i] - means[i - 1] <= std::max(stds[i], stds[i - 1]);
        }
    }
    const bool a_ok = inversions == 0 || (inversions == 1 && inversion_small);
    out.check(a_ok, "5a SER monotone in SNR");
    out.detail << "(a) shallow SER over 8..32 dB:";
    for (double m : means)
        out.detail << " " << sci(m);
    out.detail << " (" << inversions << " inversions)";

    // (b) three configurations at 28 dB over physics seeds.
    double sh = 0.0, pa = 0.0, de = 0.0;
    int deep_wins = 0;
    std::ostringstream per_seed;
    for (int seed = 0; seed < kPhysicsSeeds; ++seed) {
        ExperimentConfig c = physics_seed_config(base, seed);
        c.mode = Mode::deep;
        c.channel.snr_db = 28.0;
        const ModeScores s = three_configurations(c, jobs);
        sh += s.shallow / kPhysicsSeeds;
        pa += s.parallel / kPhysicsSeeds;
        de += s.deep / kPhysicsSeeds;
        deep_wins += s.deep < s.shallow;
        per_seed << " s" << seed << ":" << sci(s.shallow) << "/" << sci(s.parallel) << "/" << sci(s.deep);
    }
    out.check(de <= pa && pa <= sh, "5b mean ordering deep <= parallel <= shallow");
    out.check(deep_wins >= kSeedsRequired, "5b deep beats shallow in >= 8 of 10 seeds");
    out.detail << "; (b) mean SER at 28 dB shallow " << sci(sh) << ", parallel " << sci(pa) << ", deep " << sci(de)
               << ", deep < shallow in " << deep_wins << "/" << kPhysicsSeeds << " seeds; per seed sh/par/deep"
               << per_seed.str();
    return out;
}

Outcome santafe_trends(int jobs, const std::optional<std::string>& dataset)
{
    Outcome out;
    ExperimentConfig base;
    base.task = TaskKind::santafe;
    base.mode = Mode::deep;
    base.santafe.spec.tau = 1;
    base.santafe.dataset = dataset;
    int ordered = 0;
    int beats_persistence = 0;
    double persistence = 0.0;
    std::ostringstream per_seed;
    for (int seed = 0; seed < kPhysicsSeeds; ++seed) {
        const ModeScores s = three_configurations(physics_seed_config(base, seed), jobs);
        ordered += s.deep <= s.parallel && s.parallel <= s.shallow;
        beats_persistence += s.shallow < *s.persistence;
        persistence = *s.persistence;
        per_seed << " s" << seed << ":" << sci(s.shallow) << "/" << sci(s.parallel) << "/" << sci(s.deep);
    }
    out.check(ordered >= kSeedsRequired, "ordering deep <= parallel <= shallow in >= 8 of 10 seeds");
    out.check(beats_persistence == kPhysicsSeeds, "shallow beats persistence");
    out.detail << (dataset ? "dataset " + *dataset : std::string("Lorenz surrogate")) << ", tau=+1: ordering holds in "
               << ordered << "/" << kPhysicsSeeds << " seeds, shallow beats persistence (NMSE " << sci(persistence)
               << ") in " << beats_persistence << "/" << kPhysicsSeeds << "; per seed sh/par/deep" << per_seed.str();
    return out;
}

// ---------------------------------------------------------------------------
// 7. optimizer checks

bool monotone(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1])
            return false;
    return true;
}

Outcome optimizer_checks(int jobs)
{
    Outcome out;
    bool all_monotone = true;
    double sphere_best = INFINITY;
    int sphere_evals = 0;
    {
        CmaesConfig cfg;
        cfg.sigma0 = 1.0;
        cfg.max_evals = 5000;
        cfg.bounds.reset();
        cfg.seed = 3;
        Eigen::VectorXd x0 = Eigen::VectorXd::Constant(10, 2.0);
        const auto r = cmaes_minimize([](const Eigen::VectorXd& x) { return x.squaredNorm(); }, x0, cfg);
        sphere_best = r.best_score;
        sphere_evals = static_cast<int>(r.evaluations.size());
        all_monotone = all_monotone && monotone(r.best_ever);
    }

    ExperimentConfig cfg;
    cfg.task = TaskKind::channel;
    cfg.mode = Mode::deep;
    cfg.physics.seed = 0;
    const Pipeline p(cfg);

    const SweepResult sweep =
        attenuation_sweep([&](const InterlayerWeights& w) { return p.deep_objective(w); }, cfg.interlayer.sweep,
                          p.n_lines(), jobs);
    double consistency = 0.0;
    for (const auto& pt : sweep.curve)
        consistency = std::max(consistency, std::abs(p.deep_objective(InterlayerWeights::uniform(
                                                         p.n_lines(), db_to_amplitude(pt.att_db)))
                                                     - pt.score));
    consistency = std::max(consistency, std::abs(p.deep_objective(sweep.best) - sweep.best_score));
    const auto sweep_record = harness::evaluate_deep_fixed(p, sweep.best, jobs);

    ExperimentConfig cma_cfg = cfg;
    cma_cfg.interlayer.strategy = InterlayerStrategy::cmaes;
    const Pipeline pc(cma_cfg);
    const auto cma_record = harness::run_deep(pc, jobs);
    all_monotone = all_monotone && monotone(cma_record.history->best_ever);
    const double sweep_mean = sweep_record.primary().cv.mean;
    const double sweep_std = sweep_record.primary().cv.stddev;
    const double cma_mean = cma_record.primary().cv.mean;

    out.check(sphere_best < 1e-6 && sphere_evals <= 5000, "10-D sphere");
    out.check(all_monotone, "best-ever monotone");
    out.check(consistency <= 1e-12, "sweep consistency");
    out.check(cma_mean <= sweep_mean + sweep_std, "CMA-ES vs sweep");
    out.detail << "sphere best " << sci(sphere_best) << " in " << sphere_evals << " evals, best-ever monotone "
               << (all_monotone ? "yes" : "no") << ", sweep re-evaluation dev " << sci(consistency)
               << ", deep SER CMA-ES " << sci(cma_mean) << " vs sweep " << sci(sweep_mean) << " +/- "
               << sci(sweep_std) << " (" << cma_record.history->rows.size() << " CMA-ES evals)";
    return out;
}

// ---------------------------------------------------------------------------
// 8. reproducibility

Outcome reproducibility(int jobs)
{
    Outcome out;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "combrc_acceptance_records";
    fs::remove_all(dir);

    ExperimentConfig sweep_cfg;
    sweep_cfg.task = TaskKind::santafe;
    sweep_cfg.mode = Mode::deep;
    sweep_cfg.physics.seed = 4;
    sweep_cfg.sweep = SweepConfig{SweepAxis::tau, {-1.0, 2.0}};
    const auto outcome = harness::run_sweep(sweep_cfg, jobs);
    harness::write_outputs(dir / "sweep", "sweep", sweep_cfg, outcome.points, outcome, false);

    ExperimentConfig scan_cfg;
    scan_cfg.physics.n_lines = 14;
    scan_cfg.ridge.n_folds = 10;
    scan_cfg.sweep = SweepConfig{SweepAxis::omega_detuning, {-2.0}};
    const auto scan = harness::run_omega_scan(scan_cfg, jobs);
    harness::write_outputs(dir / "scan", "omega-scan", scan_cfg, scan.points, scan, false);

    std::vector<harness::ResultRecord> loaded = harness::load_summary(dir / "sweep" / "summary.json");
    for (auto& r : harness::load_summary(dir / "scan" / "summary.json"))
        loaded.push_back(std::move(r));
    int identical = 0;
    for (const auto& r : loaded)
        identical += harness::same_metrics(r, harness::regenerate(r, jobs)) && r.config_hash == config_hash(r.config);

    bool round_trip = true;
    for (const ExperimentConfig& c : {ExperimentConfig{}, sweep_cfg, scan_cfg}) {
        const ExperimentConfig back = parse_config(serialize(c));
        round_trip = round_trip && back == c && serialize(back) == serialize(c);
    }
    fs::remove_all(dir);

    out.check(!loaded.empty() && identical == static_cast<int>(loaded.size()), "record regeneration");
    out.check(round_trip, "config round trip");
    out.detail << identical << "/" << loaded.size() << " persisted records regenerate bit-identical metrics, config "
               << "round trip " << (round_trip ? "identity" : "broken");
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    Args args;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--jobs" && i + 1 < argc)
            args.jobs = std::max(1, std::atoi(argv[++i]));
        else if (a == "--dataset" && i + 1 < argc)
            args.dataset = argv[++i];
        else if (a == "--only" && i + 1 < argc)
            args.only = std::atoi(argv[++i]);
        else {
            std::cerr << "usage: acceptance [--jobs J] [--dataset PATH] [--only N]\n";
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"physics invariants", physics_invariants},
        {"dynamics oracles", dynamics_oracles},
        {"regression oracle", regression_oracle},
        {"task oracles", task_oracles},
        {"channel equalization trends", [&] { return channel_trends(args.jobs); }},
        {"Santa Fe trends", [&] { return santafe_trends(args.jobs, args.dataset); }},
        {"optimizer checks", [&] { return optimizer_checks(args.jobs); }},
        {"reproducibility", [&] { return reproducibility(args.jobs); }},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (args.only && *args.only != static_cast<int>(i + 1))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
                  << o.detail.str() << " [" << sci(secs) << " s]" << std::endl;
    }
    return all ? 0 : 1;
}
