#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "entlab/measures.hpp"
#include "entlab/qstate.hpp"

namespace entlab::free_space {

using measures::ConcurrenceBreakdown;
using qstate::cxd;
using qstate::DensityMatrix;
using qstate::Matrix;
using qstate::Vector;

// Two-atom coupling to a common vacuum reservoir. All rates are in units
// of the single-atom decay rate gamma.
struct CollectiveParams {
    double gamma = 1.0;    // single-atom spontaneous decay
    double gamma12 = 0.0;  // collective damping
    double omega12 = 0.0;  // dipole-dipole shift
    double kr12 = 0.0;     // dimensionless separation k*r12 (0 = unset)
    double mu_dot_r = 0.0; // |mu_hat . r_hat|
    double omega0 = 0.0;   // optical frequency; enters only the rho14 phase

    static CollectiveParams independent() { return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }
    static CollectiveParams dicke_limit() { return {1.0, 1.0, 0.0, 0.0, 0.0, 0.0}; }
};

// Collective damping and dipole-dipole shift for atoms separated by
// kr12 with parallel dipoles at |mu_hat . r_hat| = mu_dot_r.
CollectiveParams collective_params(double kr12, double mu_dot_r);

// Quasistatic dipole-dipole potential, valid for 0 < kr12 < 0.3:
// V12 = (3 gamma / 4) kr12^-3 (1 - 3 (mu.r)^2).
double small_kr_potential(double kr12, double mu_dot_r);

// The ten independent Dicke-basis matrix elements that close under the
// two-atom master equation: four populations, the s/a coherence, the
// two-photon coherence and the four cascade coherences.
struct DickeElements {
    double r44 = 0, rss = 0, raa = 0, r11 = 0;
    cxd rsa{0, 0};  // <s|rho|a>
    cxd r14{0, 0};  // <1|rho|4>
    cxd rs4{0, 0}, ra4{0, 0}, r1s{0, 0}, r1a{0, 0};

    static DickeElements from_density(const DensityMatrix& rho_dicke);
    DensityMatrix to_density() const;
    Matrix to_matrix() const;
};

struct DickeTrajectory {
    std::vector<double> times;
    std::vector<DickeElements> elements;
    std::vector<double> concurrence;
    std::vector<double> c1;  // two-photon criterion (X form, Product basis)
    std::vector<double> c2;  // one-photon criterion

    std::vector<DensityMatrix> densities() const;
};

// The X-state criteria of a Dicke-pattern matrix, evaluated after
// transforming to the Product basis. c = max(0, c1, c2) whenever the
// Product-basis matrix is X-shaped.
ConcurrenceBreakdown dicke_criteria(const DickeElements& e);

// Integrates the master-equation rate/coherence system on the given
// strictly increasing time grid starting at grid.front() = 0.
// Default local error control: absolute 1e-12, relative 1e-10.
DickeTrajectory evolve_master(const DensityMatrix& rho0_dicke, const CollectiveParams& p,
                              const std::vector<double>& grid, double abs_tol = 1e-12,
                              double rel_tol = 1e-10);

// Closed-form solution of the same system at time t. The degenerate
// limits gamma12 -> +-gamma are handled by their series forms.
DensityMatrix analytic_solution(const DensityMatrix& rho0_dicke, const CollectiveParams& p,
                                double t);
DickeElements analytic_elements(const DickeElements& e0, const CollectiveParams& p, double t);

// Concurrence when the initial state is |e1 g2> (one atom excited):
// C(t) = e^{-gamma t} sqrt(sinh^2(gamma12 t) + sin^2(2 omega12 t)).
double concurrence_single_excitation(const CollectiveParams& p, double t);

// Diagonalization of the one-photon {s, a} block: populations of the two
// diagonal superposition states and the states themselves (Dicke coords).
struct DiagonalStates {
    double population_plus = 0;
    double population_minus = 0;
    Vector state_plus;   // 4-vector in Dicke coordinates
    Vector state_minus;
};
DiagonalStates diagonal_states(const DensityMatrix& rho_dicke);

// Small-sample (Dicke) limit gamma12 = gamma, diagonal initial state in
// {ground, symmetric, doubly excited}.
struct DickePopulations {
    double r11 = 0, rss = 0, raa = 0, r44 = 0;
};
struct DickeModelPoint {
    DickePopulations populations;
    double concurrence = 0;
};
DickeModelPoint dicke_model_trajectory(const DickePopulations& rho0, double t);

// Finite disentanglement time for the correlated initial state
// sqrt(q)|ee> + sqrt(1-q)|gg> with independent atoms; no value for
// q <= 1/2 where the decay is asymptotic.
std::optional<double> sudden_death_time(double q);

// Closed-form criteria at time t for the correlated-q initial state:
// c1 = 2|rho14| - (rho_ss + rho_aa), c2 = |rho_ss - rho_aa| -
// 2 sqrt(rho11 rho44), c = max(0, c1, c2).
ConcurrenceBreakdown concurrence_correlated_q(double q, const CollectiveParams& p, double t);

// Death/revival pair: the two roots of gamma t e^{-gamma t} =
// sqrt((1-q)/q) (small-separation approximation gamma12 ~ gamma).
// No value when the right-hand side exceeds 1/e.
std::optional<std::pair<double, double>> revival_times(double q);

// Time at which the long-lived antisymmetric-state entanglement dies:
// (1/gamma) arcsinh(sqrt((1-q)/q) * 2 gamma / (gamma - gamma12));
// +infinity when gamma12 = gamma.
double second_death_time(double q, const CollectiveParams& p);

// Spontaneous evolution from the doubly excited state: concurrence series
// on the grid and the delayed creation (birth) time, if any.
struct SuddenBirthResult {
    std::vector<double> times;
    std::vector<double> concurrence;
    std::optional<double> birth_time;
};
SuddenBirthResult sudden_birth_trajectory(const CollectiveParams& p,
                                          const std::vector<double>& grid);

// Populations of the doubly-excited-state decay at time t (used by the
// sudden-birth analysis and the population scenarios).
DickePopulations double_excitation_populations(const CollectiveParams& p, double t);

// Sign-change event detection on a sampled criterion, refined by
// bisection to 1e-8. A crossing counts only if the criterion exceeds
// 1e-9 on its positive side.
std::vector<double> find_zero_crossings(const std::function<double(double)>& f,
                                        const std::vector<double>& grid);

} // namespace entlab::free_space
