#pragma once

// Physical model of one fiber-loop roundtrip acting on a frequency comb.
//
// Comb line k (counted from the comb centre) carries the complex amplitude of
// neuron k. One roundtrip applies, in loop order,
//     phase modulation  P(m)_{kl} = J_{k-l}(m) exp(i (k-l) phi)
//     dispersion        D_kk      = exp(i theta2 k^2)
//     coupler and gain  kappa * g
// so the internal connectivity is W = kappa g D P. The band is simulated with
// `guard_lines` extra lines on each side and then truncated to the central
// n_lines, which is what makes W a (strict) contraction of a unitary map.

#include "combrc/bessel.hpp"
#include "combrc/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

namespace combrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kMaxSimulatedLines = 512;

struct CombSpec {
    double center_wavelength_nm = 1550.2;
    double line_spacing_ghz = 17.0;
    int n_lines = 20;
    int guard_lines = 24;

    int total_lines() const { return n_lines + 2 * guard_lines; }

    void validate() const
    {
        if (n_lines < 1)
            throw DomainError("CombSpec: n_lines must be >= 1");
        if (!(line_spacing_ghz > 0.0))
            throw DomainError("CombSpec: line_spacing_ghz must be > 0");
        if (guard_lines < 0)
            throw DomainError("CombSpec: guard_lines must be >= 0");
    }

    bool operator==(const CombSpec&) const = default;
};

struct ModulatorParams {
    double modulation_index = 0.0;
    double rf_phase = 0.0;

    void validate() const
    {
        if (!(modulation_index >= 0.0))
            throw DomainError("ModulatorParams: modulation_index must be >= 0");
        if (!(rf_phase >= 0.0 && rf_phase < 2.0 * std::numbers::pi))
            throw DomainError("ModulatorParams: rf_phase must be in [0, 2pi)");
    }

    bool operator==(const ModulatorParams&) const = default;
};

struct LoopParams {
    double feedback_coupling = 0.65;
    double gain = 1.0;
    double dispersion_coeff = 0.3;
    std::optional<double> spectral_radius_target;

    void validate() const
    {
        if (!(feedback_coupling >= 0.0 && feedback_coupling <= 1.0))
            throw DomainError("LoopParams: feedback_coupling must be in [0, 1]");
        if (!(gain >= 0.0))
            throw DomainError("LoopParams: gain must be >= 0");
        if (!std::isfinite(dispersion_coeff))
            throw DomainError("LoopParams: dispersion_coeff must be finite");
        if (spectral_radius_target
            && !(*spectral_radius_target > 0.0 && *spectral_radius_target <= 1.5))
            throw DomainError("LoopParams: spectral_radius_target must be in (0, 1.5]");
    }

    bool operator==(const LoopParams&) const = default;
};

/// Mach-Zehnder input modulator, f_in(u) = e0 sin(gamma u).
struct MZMParams {
    double e0 = 1.0;
    double gamma = 1.0;

    void validate() const
    {
        if (!(e0 > 0.0))
            throw DomainError("MZMParams: e0 must be > 0");
        if (!(gamma > 0.0))
            throw DomainError("MZMParams: gamma must be > 0");
    }

    bool operator==(const MZMParams&) const = default;
};

/// Line index of row i in a band of `size` lines, measured from the centre.
inline int centered_index(int i, int size) { return i - size / 2; }

inline ComplexMatrix pm_coupling_matrix(const CombSpec& spec, const ModulatorParams& pm)
{
    spec.validate();
    pm.validate();
    const int m = spec.total_lines();
    if (m > kMaxSimulatedLines)
        throw DimensionError("pm_coupling_matrix: " + std::to_string(m)
                             + " simulated lines exceed the cap of 512");

    const int max_offset = std::min(m - 1, kMaxBesselOrder);
    const auto table = bessel_j_table(max_offset, pm.modulation_index);

    ComplexMatrix p = ComplexMatrix::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
            const int d = k - l;
            const int ad = std::abs(d);
            if (ad > max_offset)
                continue;
            double j = table[static_cast<std::size_t>(ad)];
            if (d < 0 && (ad % 2) == 1)
                j = -j;
            p(k, l) = j * std::polar(1.0, d * pm.rf_phase);
        }
    }
    return p;
}

/// Diagonal of the dispersion operator over the full simulated band.
inline ComplexVector dispersion_phases(const CombSpec& spec, const LoopParams& loop)
{
    spec.validate();
    loop.validate();
    const int m = spec.total_lines();
    ComplexVector d(m);
    for (int i = 0; i < m; ++i) {
        const double k = centered_index(i, m);
        d(i) = std::polar(1.0, loop.dispersion_coeff * k * k);
    }
    return d;
}

/// Largest eigenvalue modulus.
inline double spectral_radius(const ComplexMatrix& w)
{
    if (w.rows() != w.cols())
        throw DimensionError("spectral_radius: matrix must be square");
    if (w.size() == 0)
        return 0.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(w, false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("spectral_radius: eigenvalue iteration did not converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& w)
{
    if (w.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(w);
    return svd.singularValues()(0);
}

inline ComplexMatrix build_internal_matrix(const CombSpec& spec, const ModulatorParams& pm,
                                           const LoopParams& loop)
{
    const ComplexMatrix p = pm_coupling_matrix(spec, pm);
    const ComplexVector d = dispersion_phases(spec, loop);
    const double amplitude = loop.feedback_coupling * loop.gain;

    ComplexMatrix w = amplitude
                      * (d.asDiagonal() * p).block(spec.guard_lines, spec.guard_lines,
                                                   spec.n_lines, spec.n_lines);

    if (loop.spectral_radius_target) {
        const double rho = spectral_radius(w);
        if (!(rho > 0.0))
            throw NumericalError("build_internal_matrix: cannot rescale a nilpotent W");
        w *= *loop.spectral_radius_target / rho;
    }
    return w;
}

/// Input weights of a comb generated by phase-modulating a single carrier:
/// line k receives J_k(m) exp(i k phi). Only the central n_lines are kept.
inline ComplexVector build_input_vector(const CombSpec& spec, const ModulatorParams& pm_input)
{
    spec.validate();
    pm_input.validate();
    const int n = spec.n_lines;
    const int max_order = std::min(n / 2 + 1, kMaxBesselOrder);
    const auto table = bessel_j_table(max_order, pm_input.modulation_index);

    ComplexVector w_in(n);
    for (int i = 0; i < n; ++i) {
        const int k = centered_index(i, n);
        const int ak = std::abs(k);
        double j = table[static_cast<std::size_t>(ak)];
        if (k < 0 && (ak % 2) == 1)
            j = -j;
        w_in(i) = j * std::polar(1.0, k * pm_input.rf_phase);
    }
    return w_in;
}

}  // namespace combrc
