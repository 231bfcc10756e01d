#include "combrc/tasks.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

using namespace combrc;

namespace {

std::filesystem::path write_file(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::temp_directory_path() / ("combrc_test_" + name);
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance(const std::vector<double>& v)
{
    const double m = mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / v.size();
}

double correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(LoadSeries, StandardisesValues)
{
    const auto v = load_series(write_file("abc.txt", "1\n2\n3\n"));
    ASSERT_EQ(v.size(), 3u);
    const double s = std::sqrt(1.5);
    EXPECT_NEAR(v[0], -s, 1e-15);
    EXPECT_NEAR(v[1], 0.0, 1e-15);
    EXPECT_NEAR(v[2], s, 1e-15);
}

TEST(LoadSeries, CrlfBlankLinesAndSigns)
{
    const auto a = load_series(write_file("crlf.txt", "1\r\n\r\n 2 \r\n+3\r\n"));
    const auto b = load_series(write_file("lf.txt", "1\n2\n3"));
    EXPECT_EQ(a, b);
    const auto c = load_series(write_file("exp.txt", "-1e2\n0.5\n2.5E1\n"));
    EXPECT_EQ(c.size(), 3u);
}

TEST(LoadSeries, ReportsMalformedLine)
{
    const auto path = write_file("bad.txt", "1\n2\n3\n4\n5\n6\n7.5x\n8\n");
    try {
        load_series(path);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":7:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_series(write_file("nan.txt", "1\nnan\n2\n")), DataError);
}

TEST(LoadSeries, LengthChecks)
{
    EXPECT_THROW(load_series(write_file("one.txt", "4\n")), DataError);
    EXPECT_THROW(load_series(write_file("short.txt", "1\n2\n3\n"), 4), DataError);
    EXPECT_THROW(load_series(write_file("flat.txt", "2\n2\n2\n")), DataError);
    EXPECT_THROW(load_series("/nonexistent/combrc/series.txt"), DataError);
}

TEST(ShiftTarget, Examples)
{
    const std::vector<double> u{10, 11, 12, 13, 14};
    auto [in1, t1] = make_shift_target(u, 1);
    EXPECT_EQ(in1, (std::vector<double>{10, 11, 12, 13}));
    EXPECT_EQ(t1, (std::vector<double>{11, 12, 13, 14}));
    auto [in0, t0] = make_shift_target(u, 0);
    EXPECT_EQ(in0, u);
    EXPECT_EQ(t0, u);
    auto [inm, tm] = make_shift_target(u, -2);
    EXPECT_EQ(inm, (std::vector<double>{12, 13, 14}));
    EXPECT_EQ(tm, (std::vector<double>{10, 11, 12}));
    EXPECT_THROW(make_shift_target(u, 5), DomainError);
}

TEST(ShiftTarget, PlusAndMinusTauAreMirrorImages)
{
    std::vector<double> u(40);
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::sin(0.3 * i) + 0.01 * i * i;
    for (int tau = 1; tau <= 5; ++tau) {
        auto [ip, tp] = make_shift_target(u, tau);
        auto [im, tm] = make_shift_target(u, -tau);
        EXPECT_EQ(ip, tm);
        EXPECT_EQ(tp, im);
        for (std::size_t i = 0; i < ip.size(); ++i)
            EXPECT_EQ(tp[i], u[i + tau]);
    }
}

TEST(ShiftTask, ExactLengthAndValidation)
{
    std::vector<double> u(120);
    std::iota(u.begin(), u.end(), 0.0);
    ShiftTaskSpec spec{-3, 60, 40, 10};
    const TaskSeries t = make_shift_task(u, spec);
    EXPECT_EQ(t.input.size(), 110u);
    EXPECT_EQ(t.target.size(), 110u);
    EXPECT_EQ(t.input[0] - t.target[0], 3.0);
    spec.tau = 6;
    EXPECT_THROW(make_shift_task(u, spec), DomainError);
    spec = {1, 100, 20, 0};
    EXPECT_THROW(make_shift_task(u, spec), DataError);
}

TEST(Symbols, ReproducibleAndFromAlphabet)
{
    const auto a = gen_symbols(1000, 17);
    EXPECT_EQ(a, gen_symbols(1000, 17));
    EXPECT_NE(a, gen_symbols(1000, 18));
    for (int s : a)
        EXPECT_TRUE(s == -3 || s == -1 || s == 1 || s == 3) << s;
}

TEST(Symbols, UniformWithinThreeSigma)
{
    constexpr std::size_t n = 40000;
    std::map<int, std::size_t> counts;
    for (int s : gen_symbols(n, 5))
        ++counts[s];
    const double expected = n / 4.0;
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    ASSERT_EQ(counts.size(), 4u);
    for (const auto& [symbol, c] : counts)
        EXPECT_LE(std::abs(static_cast<double>(c) - expected), 3.0 * sigma) << symbol;
}

TEST(Symbols, Quantizer)
{
    EXPECT_EQ(quantize_symbol(-5.0), -3);
    EXPECT_EQ(quantize_symbol(-2.0), -3);
    EXPECT_EQ(quantize_symbol(-1.999), -1);
    EXPECT_EQ(quantize_symbol(0.0), -1);
    EXPECT_EQ(quantize_symbol(1e-9), 1);
    EXPECT_EQ(quantize_symbol(2.0), 1);
    EXPECT_EQ(quantize_symbol(2.5), 3);
    for (int s : kSymbolAlphabet)
        EXPECT_EQ(quantize_symbol(s), s);
}

TEST(Channel, TapSum)
{
    EXPECT_NEAR(std::accumulate(kChannelTaps.begin(), kChannelTaps.end(), 0.0), 1.161, 1e-12);
}

TEST(Channel, ConstantInputGivesPolynomialOfTapSum)
{
    const std::vector<int> d(20, 1);
    const auto u = channel_noiseless(d);
    const double q = 1.161;
    ASSERT_EQ(u.size(), 11u);
    for (double v : u)
        EXPECT_NEAR(v, q + 0.036 * q * q - 0.011 * q * q * q, 1e-12);
}

TEST(Channel, TenTapLocality)
{
    std::vector<int> d = gen_symbols(60, 3);
    const auto base = channel_noiseless(d);
    const std::size_t k = 30;
    d[k] = d[k] == 3 ? -3 : 3;
    const auto changed = channel_noiseless(d);
    for (std::size_t j = 0; j < base.size(); ++j) {
        // Output j reads symbols j + 0 .. j + 9.
        const bool touches = j + 9 >= k && j <= k;
        if (touches)
            EXPECT_NE(base[j], changed[j]) << j;
        else
            EXPECT_EQ(base[j], changed[j]) << j;
    }
}

TEST(Channel, SingleImpulseResponse)
{
    std::vector<int> d(30, 0);
    d[15] = 1;
    const auto u = channel_noiseless(d);
    // Output j has q = taps[j + 9 - 15]; q in the cubic map.
    for (std::size_t i = 0; i < kChannelTaps.size(); ++i) {
        const double q = kChannelTaps[i];
        EXPECT_NEAR(u[15 + i - 9], q + 0.036 * q * q - 0.011 * q * q * q, 1e-15);
    }
}

TEST(Channel, InfiniteSnrIsNoiseless)
{
    const auto d = gen_symbols(500, 4);
    EXPECT_EQ(channel_distort(d, std::numeric_limits<double>::infinity(), 1), channel_noiseless(d));
}

TEST(Channel, NoisePowerMatchesSnrAndIsWhite)
{
    const auto d = gen_symbols(60000, 8);
    const auto clean = channel_noiseless(d);
    double power = 0.0;
    for (double v : clean)
        power += v * v;
    power /= clean.size();
    for (double snr : {8.0, 20.0, 32.0}) {
        const auto noisy = channel_distort(d, snr, 9);
        std::vector<double> noise(clean.size());
        for (std::size_t i = 0; i < noise.size(); ++i)
            noise[i] = noisy[i] - clean[i];
        const double measured_db = 10.0 * std::log10(power / variance(noise));
        EXPECT_NEAR(measured_db, snr, 0.1);
        EXPECT_LT(std::abs(correlation(noise, clean)), 0.02);
        const std::vector<double> a(noise.begin(), noise.end() - 1), b(noise.begin() + 1, noise.end());
        EXPECT_LT(std::abs(correlation(a, b)), 0.02);
    }
}

TEST(Channel, TaskAlignmentAndLength)
{
    ChannelTaskSpec spec;
    spec.train_len = 300;
    spec.test_len = 200;
    spec.washout = 50;
    spec.seed = 12;
    spec.delay = 2;
    const TaskSeries t = make_channel_task(spec);
    ASSERT_EQ(t.input.size(), 550u);
    ASSERT_EQ(t.target.size(), 550u);

    const auto d = gen_symbols(550 + kChannelTrim, derive_seed(12, 0));
    const auto clean = channel_noiseless(d);
    for (std::size_t j = 0; j < 550; ++j)
        EXPECT_EQ(t.target[j], d[j + kChannelLag - 2]);
    // Noise at 28 dB is small: the input tracks the noiseless channel.
    EXPECT_GT(correlation(t.input, clean), 0.99);
    EXPECT_EQ(t.input, make_channel_task(spec).input);

    spec.delay = 0;
    const TaskSeries t0 = make_channel_task(spec);
    EXPECT_EQ(t0.target[0], d[kChannelLag]);
}

TEST(Channel, SpecValidation)
{
    ChannelTaskSpec spec;
    spec.snr_db = 7.5;
    EXPECT_THROW(make_channel_task(spec), DomainError);
    spec.snr_db = 20;
    spec.delay = 8;
    EXPECT_THROW(make_channel_task(spec), DomainError);
    EXPECT_THROW(channel_noiseless(std::vector<int>(10, 1)), DataError);
}

TEST(Surrogate, StandardisedReproducibleAndChaotic)
{
    const auto a = lorenz_surrogate(4000, 1);
    EXPECT_EQ(a, lorenz_surrogate(4000, 1));
    EXPECT_NEAR(mean(a), 0.0, 1e-12);
    EXPECT_NEAR(variance(a), 1.0, 1e-12);
    const auto b = lorenz_surrogate(4000, 2);
    // Sensitive dependence: distinct seeds decorrelate.
    const std::vector<double> ta(a.end() - 1000, a.end()), tb(b.end() - 1000, b.end());
    EXPECT_LT(std::abs(correlation(ta, tb)), 0.5);
    // Smooth at the sampling rate: one-step prediction beats the mean.
    const std::vector<double> x(a.begin(), a.end() - 1), y(a.begin() + 1, a.end());
    EXPECT_GT(correlation(x, y), 0.5);
}

TEST(DriveMap, MapsWindowOntoRequestedSpan)
{
    const std::vector<double> w{-2.0, 5.0, 1.0, 3.0};
    const MZMParams mzm{1.0, 2.0};
    const DriveMap m = DriveMap::fit(w, 0.785, 0.3, mzm);
    EXPECT_NEAR(mzm.gamma * m(-2.0), 0.485, 1e-12);
    EXPECT_NEAR(mzm.gamma * m(5.0), 1.085, 1e-12);
    EXPECT_NEAR(mzm.gamma * m(1.5), 0.785, 1e-12);
    const auto applied = m.apply(w);
    for (std::size_t i = 0; i < w.size(); ++i)
        EXPECT_EQ(applied[i], m(w[i]));
    EXPECT_THROW(DriveMap::fit(std::vector<double>(3, 1.0), 0.785, 0.3, mzm), DataError);
    EXPECT_THROW(DriveMap::fit({}, 0.785, 0.3, mzm), DataError);
}
