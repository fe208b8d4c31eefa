#pragma once

#include <array>

#include "entlab/qstate.hpp"

namespace entlab::double_jc {

using qstate::cxd;
using qstate::DensityMatrix;
using qstate::Vector;

// Two isolated atom-cavity subsystems. Couplings g_i and detunings
// 2*Delta_j = omega0 - omega_j, all in units of a reference coupling.
struct JCParams {
    double g1 = 1.0;
    double g2 = 1.0;
    double delta1 = 0.0;
    double delta2 = 0.0;

    double rabi_1() const { return std::hypot(g1, delta1); }
    double rabi_2() const { return std::hypot(g2, delta2); }
};

// Pure-state amplitudes. One-excitation sector spans
// (|e g, 00>, |g e, 00>, |g g, 10>, |g g, 01>); the two-excitation sector
// spans (|e e, 00>, |e g, 01>, |g e, 10>, |g g, 11>) plus the constant
// ground amplitude d0 on |g g, 00>.
enum class Sector { One, Two };

struct AmplitudeVector {
    Sector sector = Sector::One;
    Eigen::Vector4cd d = Eigen::Vector4cd::Zero();
    cxd d0{0.0, 0.0};

    double norm() const;
    void require_normalized(double tol = 1e-10) const;
};

struct PairConcurrences {
    double c_AB = 0;  // atom-atom
    double c_ab = 0;  // field-field
    double c_Aa = 0;  // atom 1 - its field
    double c_Ab = 0;  // atom 1 - field 2
    double c_Ba = 0;  // atom 2 - field 1
    double c_Bb = 0;  // atom 2 - its field

    std::array<double, 6> as_array() const { return {c_AB, c_ab, c_Aa, c_Ab, c_Ba, c_Bb}; }
};

// Closed-form one-excitation evolution (each subsystem is an independent
// detuned Rabi problem).
AmplitudeVector single_exc_evolve(const AmplitudeVector& d0, const JCParams& p, double t);

// Concurrences of the six qubit pairs in the one-excitation sector:
// products of amplitude magnitudes, with no threshold terms.
PairConcurrences pair_concurrences_single(const AmplitudeVector& d);

// Closed forms for equal couplings g1 = g2 = g and equal detunings, for
// the initial two-atom Bell state: delta_scaled = Delta/g, gt = g*t.
PairConcurrences resonant_equal_coupling_concurrences(double delta_scaled, double gt);

// Two-excitation evolution: matrix exponential of the coupled four-level
// problem in the frame rotating at omega1 + omega2; d0 is a constant.
AmplitudeVector double_exc_evolve(const AmplitudeVector& d0, const JCParams& p, double t);
Eigen::Matrix4cd double_exc_coefficient_matrix(const JCParams& p);

// Concurrences in the two-excitation-plus-ground sector; the four cross
// pairs carry threshold terms and vanish identically when d0 = 0.
PairConcurrences pair_concurrences_double(const AmplitudeVector& d);

// Resonant unequal couplings, initial (|e g> + |g e>)/sqrt(2) (x) vacuum:
// all six concurrences as products of |cos|/|sin| at g1 t and g2 t.
// `gt` is measured with g = (g1 + g2)/2 = 1.
PairConcurrences steered_transfer(double ratio_g2_over_g1, double gt);

// Scan of the steered transfer: which pair (if any) reaches concurrence
// one within gt in [0, horizon].
struct TransferReport {
    std::array<double, 6> sup;        // supremum of each pair concurrence
    int complete_pair = -1;           // index into PairConcurrences::as_array, or -1
};
TransferReport steered_transfer_report(double ratio_g2_over_g1, double horizon);

// Uniform-population superposition (phases theta, phi), evolved in the
// one-excitation sector with g1 = g2 = 1 and common detuning.
PairConcurrences frozen_state_scan(double theta, double phi, double delta, double t);
AmplitudeVector frozen_initial(double theta, double phi, bool plus_branch = true);

// 16-dimensional pure state of (atom1, atom2, field1, field2) for a given
// amplitude vector; used to cross-check the closed-form concurrences
// against reduced-density-matrix computations.
Vector embed_state(const AmplitudeVector& d);

// Reduced two-qubit state of one of the six pairs, Product ordering.
enum class Pair { AB, ab, Aa, Ab, Ba, Bb };
DensityMatrix reduced_pair(const AmplitudeVector& d, Pair which);
double reduced_pair_concurrence(const AmplitudeVector& d, Pair which);

} // namespace entlab::double_jc
