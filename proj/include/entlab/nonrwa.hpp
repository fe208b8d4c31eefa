#pragma once

#include <utility>
#include <vector>

#include "entlab/qstate.hpp"

namespace entlab::nonrwa {

using qstate::cxd;
using qstate::DensityMatrix;
using qstate::Matrix;
using qstate::Vector;

// Two atoms plus one damped cavity mode in a truncated Fock space.
// Frequencies and rates in units of the cavity frequency omega_c = 1.
struct NonRwaParams {
    double g0 = 1.0;                 // peak coupling
    double d_over_lambda = 0.0;      // atom separation
    double n_half = 0.5;             // cavity length parameter n = L/lambda
    double omega_c = 1.0;
    double detuning = 0.01;          // omega_c - omega_0
    double kappa = 0.1;              // cavity decay
    int n_max = 6;                   // Fock cutoff

    double omega_0() const { return omega_c - detuning; }
    // g(r_{1,2}) = g0 sin(pi (n -/+ d/lambda))
    std::pair<double, double> couplings() const;
    Eigen::Index dim() const { return 4 * (n_max + 1); }
};

// Hamiltonian on the atoms (x) field space. With rwa = true only the
// excitation-conserving terms S+ a and S- a^dag are kept; with
// rwa = false the full S^x (a + a^dag) coupling is used.
Matrix build_hamiltonian(const NonRwaParams& p, bool rwa);

// Total excitation number operator (atomic excitations plus photons).
Matrix excitation_number(const NonRwaParams& p);

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> atomic;     // reduced 4x4 states
    std::vector<double> concurrence;       // one-photon criterion C1
    std::vector<double> rho44;
    std::vector<double> top_fock_pop;
    std::vector<double> total_trace;
    std::vector<double> energy;            // tr(H rho) of the composite state
    bool pattern_warning = false;          // general concurrence fallback used
};

// Integrates the cavity-damped master equation from a composite initial
// state over the grid (times in units of 1/omega_c). Throws
// CutoffInsufficient if the top Fock level acquires population > 1e-6.
Trajectory evolve_nonrwa(const DensityMatrix& rho0, const NonRwaParams& p, bool rwa,
                         const std::vector<double>& grid);

// Composite initial state |atomic> (x) |0 photons>.
DensityMatrix composite_vacuum_state(const Vector& atomic_state, const NonRwaParams& p);

// Reduced 4x4 atomic state (Product ordering).
DensityMatrix reduced_atomic(const DensityMatrix& rho_s, const NonRwaParams& p);

// One-photon entanglement criterion C = 2 max(0, |rho23| - sqrt(rho11 rho44)).
// Falls back to the general concurrence with a warning flag when the
// matrix is not of the populations + rho23 + rho14 pattern.
std::pair<double, bool> concurrence_c1(const DensityMatrix& rho_atoms);

} // namespace entlab::nonrwa
