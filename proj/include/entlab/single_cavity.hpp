#pragma once

#include <array>
#include <utility>

#include "entlab/qstate.hpp"

namespace entlab::single_cavity {

using qstate::cxd;
using qstate::DensityMatrix;
using qstate::Matrix;
using qstate::Vector;

// Two atoms dispersively coupled to one damped standing-wave mode, after
// adiabatic elimination of the mode. Couplings in units of g0.
struct CavityParams {
    double g1 = 1.0;
    double g2 = 1.0;
    double delta = 0.0;     // cavity-atom detuning, omega_c - omega_0
    double kappa = 0.0;     // cavity decay rate
    double gamma_sp = 0.0;  // residual spontaneous emission

    double lorentz() const { return 0.25 * kappa * kappa + delta * delta; }
    double delta_1() const { return g1 * g1 * delta / lorentz(); }
    double delta_2() const { return g2 * g2 * delta / lorentz(); }
    double delta_12() const { return delta_1() - delta_2(); }
    double omega_12() const { return g1 * g2 * delta / lorentz(); }
    double gamma_1() const { return g1 * g1 * kappa / lorentz(); }
    double gamma_2() const { return g2 * g2 * kappa / lorentz(); }
    double gamma_12() const { return g1 * g2 * kappa / lorentz(); }
};

// Standing-wave couplings with atom 1 at an antinode:
// g1 = g0, g2 = g0 cos(2 pi r12 / lambda), g0 = 1.
std::pair<double, double> standing_wave_couplings(double r12_over_lambda);

// Effective two-level picture of the one-photon sector.
struct BlochState {
    double u = 0, v = 0, w = 0;  // coherence quadratures and inversion
    double s = 0;                // rho22 + rho33
    double rho11 = 0, rho44 = 0;
};

// Closed-form damped precession of the Bloch vector about the pseudofield
// (-2 omega12, 0, delta12); populations decay toward the ground state.
BlochState bloch_evolve(const BlochState& b0, double omega12, double delta12,
                        double gamma_sp, double t);

// Good-cavity concurrence C(t) = sqrt(1 - wbar^2) e^{-gamma t} for a unit
// initial Bloch vector; equals 2|rho23(t)|.
double concurrence_good_cavity(const BlochState& b0, double omega12, double delta12,
                               double gamma_sp, double t);

enum class DiffractionInitial { Psi3, PsiS };

// Concurrence as a function of atomic position and the scaled time
// tau = (2 g0^2 / Delta) t, with scaled decay Gamma = (Delta / 2 g0^2) gamma.
double diffraction_pattern(DiffractionInitial initial, double r12_over_lambda, double tau,
                           double Gamma);

// Bad-cavity one-photon sector: Y = (rho22, rho33, u, v), dY/dt = A Y.
Eigen::Matrix4d bad_cavity_matrix(const CavityParams& p);
Eigen::Vector4d bad_cavity_evolve(const Eigen::Vector4d& y0, const CavityParams& p, double t);

// The conserved combination gamma1 rho22 + gamma2 rho33 - gamma12 u.
double trapped_combination(const Eigen::Vector4d& y, const CavityParams& p);

// Non-decaying (dark) superposition of the one-photon product states,
// (g1|Psi2> - g2|Psi3>)/norm expressed through the cavity-induced rates.
Vector trapping_state(double gamma1, double gamma2);

// Population feed rate of the trapped state from the doubly excited
// state: (gamma2 - gamma1)^2 / (gamma1 + gamma2) per unit rho44.
double trapping_feed_rate(double gamma1, double gamma2);

enum class BadCavityInitial { Psi2, Psi3, Psi4 };

// Stationary concurrence reached in the bad-cavity regime.
double steady_concurrence(BadCavityInitial initial, double g1, double g2);

// Closed-form bad-cavity concurrence evolution for the one-photon starts.
double bad_cavity_concurrence_closed(BadCavityInitial initial, const CavityParams& p,
                                     double t);

// Full 16-dimensional Liouvillian of the adiabatically eliminated master
// equation acting on vec(rho) (Product basis, column stacking), including
// the doubly-excited sector feed.
Eigen::MatrixXcd master_liouvillian(const CavityParams& p);
DensityMatrix evolve_full(const DensityMatrix& rho0, const CavityParams& p, double t);

// Spectrum of a one-photon-sector density matrix: eigenvalues
// {rho11, (1 - rho11 +- U)/2, 0} with U^2 = w^2 + u^2 + v^2, plus the
// normalized eigenstates (Product coordinates).
struct OnePhotonEigensystem {
    std::array<double, 4> values;   // lambda1, lambda2, lambda3, lambda4
    std::array<Vector, 4> states;
};
OnePhotonEigensystem one_photon_eigensystem(const DensityMatrix& rho);

// Concurrence evolution triggered from the symmetric state (u0 = 1):
// C(t) = |1 - 2 d12^2/a^2 sin^2(at/2) - i (d12/a) sin(at)| e^{-gamma t}.
double triggered_concurrence(double delta12, double omega12, double gamma_sp, double t);

} // namespace entlab::single_cavity
