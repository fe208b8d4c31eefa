#pragma once

#include "entlab/qstate.hpp"

namespace entlab::measures {

using qstate::DensityMatrix;
using qstate::Matrix;

// Off-pattern entries at or below this size count as exact zeros when
// matching a matrix against the X or block sparsity patterns.
inline constexpr double PATTERN_TOL = 1e-10;

struct ConcurrenceBreakdown {
    double c;   // max(0, c1, c2)
    double c1;  // two-photon criterion, 2(|rho14| - sqrt(rho22 rho33))
    double c2;  // one-photon criterion, 2(|rho23| - sqrt(rho11 rho44))
};

// Wootters concurrence of an arbitrary two-qubit state given in the
// Product basis. Uses the Hermitian-equivalent spectrum of
// rho (sy x sy) rho* (sy x sy); complex conjugation is taken in the
// Product basis.
double concurrence(const DensityMatrix& rho);

// Closed form for X-shaped matrices (nonzero entries only on the diagonal
// and anti-diagonal). Throws PatternViolation when off-pattern entries
// exceed PATTERN_TOL; callers should then use the general concurrence.
ConcurrenceBreakdown concurrence_x_state(const DensityMatrix& rho);

// Closed form for matrices whose only coherences are rho23/rho32.
double concurrence_block(const DensityMatrix& rho);

// Closed form for Dicke-basis matrices with a populated one-photon block
// plus symmetric/antisymmetric coherence:
//   C = max(0, sqrt((rho_ss - rho_aa)^2 - (rho_sa - rho_as)^2)
//              - 2 sqrt(rho11 rho44)).
double concurrence_two_entangled(const DensityMatrix& rho_dicke);

// Binary (Shannon) entropy, base 2, with 0 log 0 := 0.
double binary_entropy(double p);

// Entropy of entanglement of a pure two-qubit state: the von Neumann
// entropy of either one-qubit marginal, in bits.
double entropy_of_entanglement(const DensityMatrix& pure);

// Entanglement of formation via the closed form
// H(1/2 + 1/2 sqrt(1 - C^2)).
double entanglement_of_formation(const DensityMatrix& rho);

} // namespace entlab::measures
