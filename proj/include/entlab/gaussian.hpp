#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entlab/errors.hpp"

namespace entlab::gaussian {

using cxd = std::complex<double>;

// Bosonic mode bookkeeping. Quadratures are interleaved (q1, p1, q2, p2, ...)
// with vacuum variance 1/2 per quadrature.
struct ModeRegistry {
    std::vector<std::string> labels;

    int count() const { return static_cast<int>(labels.size()); }
    int index(const std::string& label) const;
};

// Interleaved-ordering symplectic form, blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int n_modes);

struct CovarianceState {
    Eigen::VectorXd mean;   // length 2 n
    Eigen::MatrixXd sigma;  // 2n x 2n, symmetric

    int n_modes() const { return static_cast<int>(mean.size()) / 2; }
    static CovarianceState vacuum(int n_modes);

    // Variance of a linear quadrature combination c . r.
    double variance(const Eigen::VectorXd& coeffs) const;

    // smallest eigenvalue of sigma + i Omega / 2 (>= 0 for physical states)
    double uncertainty_min_eig() const;
    void validate(double sym_tol = 1e-12, double heisenberg_floor = -1e-9) const;

    CovarianceState restricted(const std::vector<int>& modes) const;
};

// Quadratic Hamiltonian H = sum F_ij a_i^dag a_j
//                          + 1/2 sum (S_ij a_i^dag a_j^dag + h.c.),
// with F Hermitian and S symmetric by construction, so every stored term
// is paired with its conjugate.
class QuadraticHamiltonian {
public:
    explicit QuadraticHamiltonian(int n_modes);

    int n_modes() const { return n_; }
    const Eigen::MatrixXcd& f() const { return f_; }
    const Eigen::MatrixXcd& s() const { return s_; }

    // c a_i^dag a_j + conj(c) a_j^dag a_i
    void add_beamsplitter(int i, int j, cxd c);
    // omega a_i^dag a_i
    void add_number(int i, double omega);
    // c a_i^dag a_j^dag + conj(c) a_j a_i  (i != j)
    void add_two_mode_squeeze(int i, int j, cxd c);
    // c a_i^dag^2 + conj(c) a_i^2
    void add_single_mode_squeeze(int i, cxd c);

    // Drift of the quadrature first moments, dr/dt = A_h r.
    Eigen::MatrixXd quadrature_drift() const;

private:
    int n_;
    Eigen::MatrixXcd f_, s_;
};

// First-moment drift A and diffusion D of the covariance flow
// d sigma/dt = A sigma + sigma A^T + D, with cavity amplitude decay at
// rate kappa applied to the listed modes. Normalized so that the
// linear-mixer relaxation eigenvalues are -kappa/2 +- sqrt((kappa/2)^2 - beta^2).
struct DriftDiffusion {
    Eigen::MatrixXd a;
    Eigen::MatrixXd d;
};
DriftDiffusion drift_and_diffusion(const QuadraticHamiltonian& h, double kappa,
                                   const std::vector<int>& damped_modes);

struct EvolveResult {
    CovarianceState state;
    bool unstable = false;
    double max_re_eigenvalue = 0.0;
};

// sigma(t) = e^{At} sigma0 e^{A^T t} + int_0^t e^{As} D e^{A^T s} ds,
// evaluated with a Van Loan block exponential.
EvolveResult evolve_covariance(const CovarianceState& s0, const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& d, double t);

// Steady state of A sigma + sigma A^T + D = 0 via Kronecker vectorization.
Eigen::MatrixXd lyapunov_steady(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d);

// Squeeze transforms as symplectic matrices acting on the state
// covariance, sigma -> M sigma M^T.
struct SqueezeSpec {
    enum class Kind { Single, TwoMode, Chain4 } kind = Kind::Single;
    std::vector<int> modes;  // 1 mode, 2 modes, or 4 chain modes
    double xi = 0.0;
};
Eigen::MatrixXd symplectic_of_squeeze(const SqueezeSpec& spec, int n_modes);

// Real quadrature representation W of a complex mode transform d = U c,
// such that r_d = W r_c. Unitary U gives orthogonal symplectic W.
Eigen::MatrixXd quadrature_map(const Eigen::MatrixXcd& u);

enum class MixerId { T1, T2, T3, GoldenD };

// 4x4 unitary defining the decoupled superposition modes of each
// preparation protocol (rows are the prepared modes).
Eigen::MatrixXcd mode_mixer(MixerId id, const ModeRegistry& registry);

enum class Protocol { SingleEnsemble12, FourMode12, Linear13, Square13, Tshape13 };

std::string to_string(Protocol p);

enum class Direction { Clockwise, Anticlockwise };

// One laser-pulse interval. Rabi magnitudes are stored in units of the
// reference Rabi frequency (the tables' Omega); couplings are
// beta_scale/2 times these values.
struct PulseStep {
    double duration = 4.0;  // units of 1/kappa
    Direction direction = Direction::Clockwise;
    std::vector<double> rabi_u, rabi_s;    // per ensemble
    std::vector<double> phase_u, phase_s;  // per ensemble
};

// Pulse sequence of a protocol with squeeze ratio r in (0, 1). Derived
// mechanically from the protocol's mode transform so that step n
// prepares exactly the n-th superposition mode.
std::vector<PulseStep> pulse_schedule(Protocol protocol, double r);

ModeRegistry protocol_registry(Protocol protocol);
std::vector<int> protocol_cavity_modes(Protocol protocol);
std::vector<int> protocol_collective_modes(Protocol protocol);

// Effective Hamiltonian of one pulse step in the protocol's registry.
QuadraticHamiltonian build_step_hamiltonian(Protocol protocol, const PulseStep& step,
                                            double beta_scale);

struct StepReport {
    Eigen::VectorXcd drift_eigenvalues;
    double lyapunov_residual = 0.0;  // |A s + s A^T + D| at the end of the step
    bool unstable = false;
};

struct ProtocolResult {
    CovarianceState collective;  // cavity modes traced out
    CovarianceState full;
    std::vector<StepReport> steps;
};

// Sequential pulse-step evolution from vacuum. tau_per_step overrides the
// schedule durations when positive (units 1/kappa).
ProtocolResult run_protocol(Protocol protocol, double r, double kappa, double beta_scale,
                            double tau_per_step = -1.0);

// Exact (asymptotic) prepared state on the collective modes for squeeze
// parameter xi.
CovarianceState target_state(Protocol protocol, double xi);

enum class Graph { Linear, Square, Tshape };

struct NamedVariance {
    std::string name;
    double value;
};

// Graph nullifier variances V(p_a - sum_{b in N(a)} q_b) of a 4-mode
// collective state.
std::vector<NamedVariance> cluster_variances(const CovarianceState& s, Graph graph);

// beta = sqrt(N) Omega g / (2 Delta)
double effective_coupling(double n_atoms, double rabi, double g, double delta);

// Validity of the dispersive regime underlying the effective model.
struct DispersiveConfig {
    double delta_u = 0, delta_s = 0;
    double g_u = 0, g_s = 0;
    double rabi_u = 0, rabi_s = 0;
    double gamma_u = 0, gamma_s = 0;
    double n_atoms = 1;
    double delta_c = 0;  // cavity detuning from the Raman resonance
    double factor = 20.0;
};
struct DispersiveReport {
    bool pass = true;
    std::vector<std::string> violations;
};
DispersiveReport validate_dispersive(const DispersiveConfig& cfg);

} // namespace entlab::gaussian
