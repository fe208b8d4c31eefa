#include "entlab/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace entlab::gaussian {

namespace {

const double GOLDEN = 0.5 * (1.0 + std::sqrt(5.0));

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

int qi(int mode) { return 2 * mode; }
int pi_(int mode) { return 2 * mode + 1; }

Eigen::MatrixXd kron_real(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double wrap_phase(double phi) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(phi, two_pi);
    if (w < 0) w += two_pi;
    if (std::abs(w - two_pi) < 1e-12) w = 0.0;
    return w;
}

} // namespace

int ModeRegistry::index(const std::string& label) const {
    for (int i = 0; i < count(); ++i)
        if (labels[i] == label) return i;
    throw ContractViolation("ModeRegistry: unknown mode label '" + label + "'");
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(qi(m), pi_(m)) = 1.0;
        omega(pi_(m), qi(m)) = -1.0;
    }
    return omega;
}

CovarianceState CovarianceState::vacuum(int n_modes) {
    CovarianceState s;
    s.mean = Eigen::VectorXd::Zero(2 * n_modes);
    s.sigma = 0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    return s;
}

double CovarianceState::variance(const Eigen::VectorXd& coeffs) const {
    require(coeffs.size() == sigma.rows(), "variance: coefficient length mismatch");
    return coeffs.dot(sigma * coeffs);
}

double CovarianceState::uncertainty_min_eig() const {
    const int n = n_modes();
    Eigen::MatrixXcd h = sigma.cast<cxd>() +
                         cxd(0.0, 0.5) * symplectic_form(n).cast<cxd>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    return solver.eigenvalues().minCoeff();
}

void CovarianceState::validate(double sym_tol, double heisenberg_floor) const {
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > sym_tol)
        throw ContractViolation("covariance matrix not symmetric");
    if (uncertainty_min_eig() < heisenberg_floor)
        throw ContractViolation("covariance matrix violates the uncertainty relation");
}

CovarianceState CovarianceState::restricted(const std::vector<int>& modes) const {
    CovarianceState out;
    const int m = static_cast<int>(modes.size());
    out.mean.resize(2 * m);
    out.sigma.resize(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) {
        out.mean(qi(a)) = mean(qi(modes[a]));
        out.mean(pi_(a)) = mean(pi_(modes[a]));
        for (int b = 0; b < m; ++b)
            for (int da = 0; da < 2; ++da)
                for (int db = 0; db < 2; ++db)
                    out.sigma(2 * a + da, 2 * b + db) =
                        sigma(2 * modes[a] + da, 2 * modes[b] + db);
    }
    return out;
}

QuadraticHamiltonian::QuadraticHamiltonian(int n_modes)
    : n_(n_modes),
      f_(Eigen::MatrixXcd::Zero(n_modes, n_modes)),
      s_(Eigen::MatrixXcd::Zero(n_modes, n_modes)) {
    require(n_modes > 0, "QuadraticHamiltonian: need at least one mode");
}

void QuadraticHamiltonian::add_beamsplitter(int i, int j, cxd c) {
    require(i >= 0 && i < n_ && j >= 0 && j < n_ && i != j,
            "add_beamsplitter: bad mode indices");
    f_(i, j) += c;
    f_(j, i) += std::conj(c);
}

void QuadraticHamiltonian::add_number(int i, double omega) {
    require(i >= 0 && i < n_, "add_number: bad mode index");
    f_(i, i) += omega;
}

void QuadraticHamiltonian::add_two_mode_squeeze(int i, int j, cxd c) {
    require(i >= 0 && i < n_ && j >= 0 && j < n_ && i != j,
            "add_two_mode_squeeze: bad mode indices");
    s_(i, j) += c;
    s_(j, i) += c;
}

void QuadraticHamiltonian::add_single_mode_squeeze(int i, cxd c) {
    require(i >= 0 && i < n_, "add_single_mode_squeeze: bad mode index");
    s_(i, i) += 2.0 * c;  // H contains c a_i^dag^2 = (1/2) S_ii a_i^dag^2
}

Eigen::MatrixXd QuadraticHamiltonian::quadrature_drift() const {
    const Eigen::MatrixXd fr = f_.real(), fi = f_.imag();
    const Eigen::MatrixXd sr = s_.real(), si = s_.imag();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
    for (int k = 0; k < n_; ++k) {
        for (int l = 0; l < n_; ++l) {
            a(qi(k), qi(l)) = fi(k, l) + si(k, l);
            a(qi(k), pi_(l)) = fr(k, l) - sr(k, l);
            a(pi_(k), qi(l)) = -(fr(k, l) + sr(k, l));
            a(pi_(k), pi_(l)) = fi(k, l) - si(k, l);
        }
    }
    return a;
}

DriftDiffusion drift_and_diffusion(const QuadraticHamiltonian& h, double kappa,
                                   const std::vector<int>& damped_modes) {
    DriftDiffusion out;
    out.a = h.quadrature_drift();
    out.d = Eigen::MatrixXd::Zero(2 * h.n_modes(), 2 * h.n_modes());
    for (int m : damped_modes) {
        require(m >= 0 && m < h.n_modes(), "drift_and_diffusion: unknown damped mode");
        out.a(qi(m), qi(m)) -= kappa;
        out.a(pi_(m), pi_(m)) -= kappa;
        out.d(qi(m), qi(m)) = kappa;
        out.d(pi_(m), pi_(m)) = kappa;
    }
    return out;
}

EvolveResult evolve_covariance(const CovarianceState& s0, const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& d, double t) {
    const Eigen::Index n = a.rows();
    require(a.cols() == n && d.rows() == n && d.cols() == n && s0.sigma.rows() == n,
            "evolve_covariance: dimension mismatch");
    require(t >= 0.0, "evolve_covariance: time must be non-negative");

    EvolveResult res;
    const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues();
    res.max_re_eigenvalue = eigs.real().maxCoeff();
    res.unstable = res.max_re_eigenvalue > 1e-12;

    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = a;
    block.topRightCorner(n, n) = d;
    block.bottomRightCorner(n, n) = -a.transpose();
    const Eigen::MatrixXd e = (block * t).exp();
    const Eigen::MatrixXd f1 = e.topLeftCorner(n, n);
    const Eigen::MatrixXd q = e.topRightCorner(n, n) * f1.transpose();

    res.state.mean = f1 * s0.mean;
    res.state.sigma = f1 * s0.sigma * f1.transpose() + q;
    res.state.sigma = 0.5 * (res.state.sigma + res.state.sigma.transpose()).eval();
    return res;
}

Eigen::MatrixXd lyapunov_steady(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d) {
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd op = kron_real(eye, a) + kron_real(a, eye);
    Eigen::VectorXd dvec(n * n);
    for (Eigen::Index c = 0; c < n; ++c) dvec.segment(c * n, n) = d.col(c);
    const Eigen::VectorXd svec = op.partialPivLu().solve(-dvec);
    Eigen::MatrixXd sigma(n, n);
    for (Eigen::Index c = 0; c < n; ++c) sigma.col(c) = svec.segment(c * n, n);
    return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd symplectic_of_squeeze(const SqueezeSpec& spec, int n_modes) {
    require(std::isfinite(spec.xi), "symplectic_of_squeeze: xi must be finite");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    auto check = [&](std::size_t k) {
        require(spec.modes.size() == k, "symplectic_of_squeeze: wrong mode count");
        for (int mm : spec.modes)
            require(mm >= 0 && mm < n_modes, "symplectic_of_squeeze: mode out of range");
    };
    const double c = std::cosh(spec.xi), s = std::sinh(spec.xi);
    switch (spec.kind) {
        case SqueezeSpec::Kind::Single: {
            check(1);
            const int k = spec.modes[0];
            m(qi(k), qi(k)) = std::exp(-spec.xi);
            m(pi_(k), pi_(k)) = std::exp(spec.xi);
            break;
        }
        case SqueezeSpec::Kind::TwoMode: {
            check(2);
            const int i = spec.modes[0], j = spec.modes[1];
            m(qi(i), qi(i)) = c;
            m(qi(j), qi(j)) = c;
            m(qi(i), qi(j)) = s;
            m(qi(j), qi(i)) = s;
            m(pi_(i), pi_(i)) = c;
            m(pi_(j), pi_(j)) = c;
            m(pi_(i), pi_(j)) = -s;
            m(pi_(j), pi_(i)) = -s;
            break;
        }
        case SqueezeSpec::Kind::Chain4: {
            check(4);
            Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
            for (int e = 0; e < 3; ++e) {
                const int i = spec.modes[e], j = spec.modes[e + 1];
                gen(qi(i), qi(j)) += spec.xi;
                gen(qi(j), qi(i)) += spec.xi;
                gen(pi_(i), pi_(j)) -= spec.xi;
                gen(pi_(j), pi_(i)) -= spec.xi;
            }
            m = gen.exp();
            break;
        }
    }
    return m;
}

Eigen::MatrixXd quadrature_map(const Eigen::MatrixXcd& u) {
    const int n = static_cast<int>(u.rows());
    require(u.cols() == n, "quadrature_map: square matrix expected");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            w(qi(m), qi(k)) = u(m, k).real();
            w(qi(m), pi_(k)) = -u(m, k).imag();
            w(pi_(m), qi(k)) = u(m, k).imag();
            w(pi_(m), pi_(k)) = u(m, k).real();
        }
    }
    return w;
}

Eigen::MatrixXcd mode_mixer(MixerId id, const ModeRegistry& registry) {
    require(registry.count() == 4, "mode_mixer: registry must hold 4 collective modes");
    Eigen::MatrixXcd u(4, 4);
    const cxd i{0.0, 1.0};
    const double r2 = std::sqrt(2.0), r10 = std::sqrt(10.0);
    switch (id) {
        case MixerId::T1:
            u.row(0) << -i / r2, -1.0 / r2, 0.0, 0.0;
            u.row(1) << -i / r10, 1.0 / r10, 2.0 * i / r10, 2.0 / r10;
            u.row(2) << 0.0, 0.0, -1.0 / r2, -i / r2;
            u.row(3) << -2.0 / r10, -2.0 * i / r10, -1.0 / r10, i / r10;
            break;
        case MixerId::T2:
            u.row(0) << -i / r10, -i / r10, -2.0 / r10, -2.0 / r10;
            u.row(1) << -i / r2, i / r2, 0.0, 0.0;
            u.row(2) << -2.0 / r10, -2.0 / r10, -i / r10, -i / r10;
            u.row(3) << 0.0, 0.0, -i / r2, i / r2;
            break;
        case MixerId::T3: {
            const double r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
            u.row(0) << i * r3 / 2.0, -r3 / 6.0, -r3 / 6.0, -r3 / 6.0;
            u.row(1) << 0.0, r6 / 3.0, -r6 / 6.0, -r6 / 6.0;
            u.row(2) << 0.0, 0.0, 1.0 / r2, -1.0 / r2;
            u.row(3) << i / 2.0, 0.5, 0.5, 0.5;
            break;
        }
        case MixerId::GoldenD: {
            const double nl = std::sqrt(1.0 + GOLDEN * GOLDEN);
            // modes ordered (C2k1, C-2k1, C2k2, C-2k2); rows (d+1, d-1, d+2, d-2)
            u.row(0) << 1.0 / nl, 0.0, GOLDEN / nl, 0.0;
            u.row(1) << 0.0, -1.0 / nl, 0.0, GOLDEN / nl;
            u.row(2) << GOLDEN / nl, 0.0, -1.0 / nl, 0.0;
            u.row(3) << 0.0, GOLDEN / nl, 0.0, 1.0 / nl;
            break;
        }
    }
    return u;
}

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::SingleEnsemble12: return "single_ensemble_12";
        case Protocol::FourMode12: return "four_mode_12";
        case Protocol::Linear13: return "linear_13";
        case Protocol::Square13: return "square_13";
        case Protocol::Tshape13: return "tshape_13";
    }
    return "?";
}

ModeRegistry protocol_registry(Protocol protocol) {
    switch (protocol) {
        case Protocol::SingleEnsemble12:
            return {{"a+", "a-", "C0k", "C2k", "C-2k"}};
        case Protocol::FourMode12:
            return {{"a+", "a-", "C0k1", "C0k2", "C2k1", "C-2k1", "C2k2", "C-2k2"}};
        default:
            return {{"a", "C1", "C2", "C3", "C4"}};
    }
}

std::vector<int> protocol_cavity_modes(Protocol protocol) {
    switch (protocol) {
        case Protocol::SingleEnsemble12:
        case Protocol::FourMode12: return {0, 1};
        default: return {0};
    }
}

std::vector<int> protocol_collective_modes(Protocol protocol) {
    switch (protocol) {
        case Protocol::SingleEnsemble12: return {2, 3, 4};
        case Protocol::FourMode12: return {4, 5, 6, 7};
        default: return {1, 2, 3, 4};
    }
}

namespace {

MixerId protocol_mixer(Protocol protocol) {
    switch (protocol) {
        case Protocol::Linear13: return MixerId::T1;
        case Protocol::Square13: return MixerId::T2;
        case Protocol::Tshape13: return MixerId::T3;
        default: throw ContractViolation("protocol has no 4-ensemble mode transform");
    }
}

// Step that prepares the superposition mode sum_m u_m C_m: the laser
// coefficients must satisfy Omega_um e^{i phi_um} = 2 u_m and
// Omega_sm e^{i phi_sm} = +-2 r conj(u_m). The sign selects which
// quadrature of the prepared mode ends up squeezed.
PulseStep step_for_mode_row(const Eigen::VectorXcd& row, double r, double tau,
                            bool squeeze_p) {
    PulseStep st;
    st.duration = tau;
    st.direction = Direction::Clockwise;
    const int n = static_cast<int>(row.size());
    st.rabi_u.resize(n);
    st.rabi_s.resize(n);
    st.phase_u.assign(n, 0.0);
    st.phase_s.assign(n, 0.0);
    for (int m = 0; m < n; ++m) {
        const cxd cu = 2.0 * row(m);
        st.rabi_u[m] = std::abs(cu);
        st.rabi_s[m] = r * std::abs(cu);
        if (std::abs(cu) > 1e-14) {
            st.phase_u[m] = wrap_phase(std::arg(cu));
            st.phase_s[m] = wrap_phase((squeeze_p ? M_PI : 0.0) - std::arg(cu));
        }
    }
    return st;
}

} // namespace

std::vector<PulseStep> pulse_schedule(Protocol protocol, double r) {
    require(r > 0.0 && r < 1.0, "pulse_schedule: squeeze ratio must satisfy 0 < r < 1");
    std::vector<PulseStep> steps;
    switch (protocol) {
        case Protocol::Linear13:
        case Protocol::Square13:
        case Protocol::Tshape13: {
            const Eigen::MatrixXcd u =
                mode_mixer(protocol_mixer(protocol), ModeRegistry{{"C1", "C2", "C3", "C4"}});
            for (int n = 0; n < 4; ++n) {
                // The T-shape nullifiers probe the momentum quadratures of
                // the first three superposition modes and the position
                // quadrature of the fourth, so those steps squeeze
                // accordingly; the linear and square protocols squeeze q.
                const bool squeeze_p = protocol == Protocol::Tshape13 && n < 3;
                steps.push_back(step_for_mode_row(u.row(n), r, 4.0, squeeze_p));
            }
            break;
        }
        case Protocol::SingleEnsemble12: {
            for (int k = 0; k < 2; ++k) {
                PulseStep st;
                st.duration = 8.0;
                st.direction = k == 0 ? Direction::Clockwise : Direction::Anticlockwise;
                st.rabi_u = {2.0};
                st.rabi_s = {2.0 * r};
                st.phase_u = {0.0};
                st.phase_s = {0.0};
                steps.push_back(st);
            }
            break;
        }
        case Protocol::FourMode12: {
            // Steps 1-2 squeeze the (d+1, d-2) pair with parameter
            // atanh(r) = lambda*xi; steps 3-4 the (d+2, d-1) pair with
            // xi/lambda, realized by r_b and a pi phase on one ensemble.
            const double xi = std::atanh(r) / GOLDEN;
            const double rb = std::tanh(xi / GOLDEN);
            const double l = GOLDEN;
            auto make = [](Direction dir, std::vector<double> ru, std::vector<double> rs,
                           std::vector<double> pu, std::vector<double> ps) {
                PulseStep st;
                st.duration = 8.0;
                st.direction = dir;
                st.rabi_u = std::move(ru);
                st.rabi_s = std::move(rs);
                st.phase_u = std::move(pu);
                st.phase_s = std::move(ps);
                return st;
            };
            steps.push_back(make(Direction::Clockwise, {2.0, 2.0 * l},
                                 {2.0 * l * r, 2.0 * r}, {0, 0}, {0, 0}));
            steps.push_back(make(Direction::Anticlockwise, {2.0 * l, 2.0},
                                 {2.0 * r, 2.0 * l * r}, {0, 0}, {0, 0}));
            steps.push_back(make(Direction::Clockwise, {2.0 * l, 2.0},
                                 {2.0 * rb, 2.0 * l * rb}, {0, M_PI}, {0, M_PI}));
            steps.push_back(make(Direction::Anticlockwise, {2.0, 2.0 * l},
                                 {2.0 * l * rb, 2.0 * rb}, {M_PI, 0}, {M_PI, 0}));
            break;
        }
    }
    return steps;
}

QuadraticHamiltonian build_step_hamiltonian(Protocol protocol, const PulseStep& step,
                                            double beta_scale) {
    const ModeRegistry reg = protocol_registry(protocol);
    QuadraticHamiltonian h(reg.count());
    const cxd i{0.0, 1.0};
    auto cu = [&](int m) {
        return 0.5 * beta_scale * step.rabi_u[m] * std::exp(i * step.phase_u[m]);
    };
    auto cs = [&](int m) {
        return 0.5 * beta_scale * step.rabi_s[m] * std::exp(i * step.phase_s[m]);
    };
    switch (protocol) {
        case Protocol::Linear13:
        case Protocol::Square13:
        case Protocol::Tshape13: {
            require(step.rabi_u.size() == 4, "build_step_hamiltonian: need 4 ensembles");
            for (int m = 0; m < 4; ++m) {
                if (step.rabi_u[m] > 0) h.add_beamsplitter(0, 1 + m, cu(m));
                if (step.rabi_s[m] > 0) h.add_two_mode_squeeze(0, 1 + m, cs(m));
            }
            break;
        }
        case Protocol::SingleEnsemble12:
        case Protocol::FourMode12: {
            const int n_ens = protocol == Protocol::SingleEnsemble12 ? 1 : 2;
            require(static_cast<int>(step.rabi_u.size()) == n_ens,
                    "build_step_hamiltonian: ensemble count mismatch");
            const int a_plus = 0, a_minus = 1;
            const int co = (step.direction == Direction::Clockwise) ? a_plus : a_minus;
            const int cross = (step.direction == Direction::Clockwise) ? a_minus : a_plus;
            for (int n = 0; n < n_ens; ++n) {
                const int c0 = protocol == Protocol::SingleEnsemble12 ? 2 : 2 + n;
                const int c_fwd = protocol == Protocol::SingleEnsemble12 ? 3 : 4 + 2 * n;
                const int c_bwd = protocol == Protocol::SingleEnsemble12 ? 4 : 5 + 2 * n;
                // lasers co-propagating with `co`; the C0k mode couples to it
                h.add_beamsplitter(co, c0, cu(n));
                h.add_two_mode_squeeze(co, c0, cs(n));
                if (step.direction == Direction::Clockwise) {
                    h.add_beamsplitter(cross, c_fwd, cu(n));
                    h.add_two_mode_squeeze(cross, c_bwd, cs(n));
                } else {
                    h.add_beamsplitter(cross, c_bwd, cu(n));
                    h.add_two_mode_squeeze(cross, c_fwd, cs(n));
                }
            }
            break;
        }
    }
    return h;
}

ProtocolResult run_protocol(Protocol protocol, double r, double kappa, double beta_scale,
                            double tau_per_step) {
    require(kappa > 0.0, "run_protocol: kappa must be positive");
    require(beta_scale > 0.0, "run_protocol: beta scale must be positive");
    const auto steps = pulse_schedule(protocol, r);
    const auto cavity = protocol_cavity_modes(protocol);
    const ModeRegistry reg = protocol_registry(protocol);

    ProtocolResult out;
    CovarianceState state = CovarianceState::vacuum(reg.count());
    for (const auto& st : steps) {
        const QuadraticHamiltonian h = build_step_hamiltonian(protocol, st, beta_scale);
        const auto [a, d] = drift_and_diffusion(h, kappa, cavity);
        const double tau = (tau_per_step > 0.0 ? tau_per_step : st.duration) / kappa;
        const EvolveResult res = evolve_covariance(state, a, d, tau);
        state = res.state;
        state.validate(1e-9, -1e-9);

        StepReport rep;
        rep.drift_eigenvalues = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues();
        rep.lyapunov_residual =
            (a * state.sigma + state.sigma * a.transpose() + d).cwiseAbs().maxCoeff();
        rep.unstable = res.unstable;
        out.steps.push_back(std::move(rep));
    }
    out.full = state;
    out.collective = state.restricted(protocol_collective_modes(protocol));
    return out;
}

CovarianceState target_state(Protocol protocol, double xi) {
    require(std::isfinite(xi), "target_state: xi must be finite");
    switch (protocol) {
        case Protocol::Linear13:
        case Protocol::Square13:
        case Protocol::Tshape13: {
            const Eigen::MatrixXcd u =
                mode_mixer(protocol_mixer(protocol), ModeRegistry{{"C1", "C2", "C3", "C4"}});
            const Eigen::MatrixXd w = quadrature_map(u);
            Eigen::MatrixXd sigma_d = Eigen::MatrixXd::Zero(8, 8);
            for (int m = 0; m < 4; ++m) {
                const bool squeeze_p = protocol == Protocol::Tshape13 && m < 3;
                sigma_d(qi(m), qi(m)) = 0.5 * std::exp(squeeze_p ? 2.0 * xi : -2.0 * xi);
                sigma_d(pi_(m), pi_(m)) = 0.5 * std::exp(squeeze_p ? -2.0 * xi : 2.0 * xi);
            }
            CovarianceState s;
            s.mean = Eigen::VectorXd::Zero(8);
            s.sigma = w.transpose() * sigma_d * w;
            return s;
        }
        case Protocol::SingleEnsemble12: {
            // modes (C0k, C2k, C-2k); the preparation squeezes the sum
            // quadrature of the counter-propagating pair, which is the
            // -xi orientation of the two-mode transform here
            const Eigen::MatrixXd m0 =
                symplectic_of_squeeze({SqueezeSpec::Kind::Single, {0}, xi}, 3);
            const Eigen::MatrixXd m1 =
                symplectic_of_squeeze({SqueezeSpec::Kind::TwoMode, {1, 2}, -xi}, 3);
            CovarianceState s = CovarianceState::vacuum(3);
            const Eigen::MatrixXd m = m1 * m0;
            s.sigma = m * s.sigma * m.transpose();
            return s;
        }
        case Protocol::FourMode12: {
            // same orientation convention as the single-ensemble pair
            const Eigen::MatrixXd m =
                symplectic_of_squeeze({SqueezeSpec::Kind::Chain4, {0, 1, 2, 3}, -xi}, 4);
            CovarianceState s = CovarianceState::vacuum(4);
            s.sigma = m * s.sigma * m.transpose();
            return s;
        }
    }
    throw ContractViolation("target_state: unknown protocol");
}

std::vector<NamedVariance> cluster_variances(const CovarianceState& s, Graph graph) {
    require(s.n_modes() == 4, "cluster_variances: need a 4-mode collective state");
    struct Nullifier {
        std::string name;
        int p_mode;
        std::vector<int> q_modes;
    };
    std::vector<Nullifier> defs;
    switch (graph) {
        case Graph::Linear:
            defs = {{"V(p1-q2)", 0, {1}},
                    {"V(p2-q1-q3)", 1, {0, 2}},
                    {"V(p3-q2-q4)", 2, {1, 3}},
                    {"V(p4-q3)", 3, {2}}};
            break;
        case Graph::Square:
            defs = {{"V(p1-q3-q4)", 0, {2, 3}},
                    {"V(p2-q3-q4)", 1, {2, 3}},
                    {"V(p3-q1-q2)", 2, {0, 1}},
                    {"V(p4-q1-q2)", 3, {0, 1}}};
            break;
        case Graph::Tshape:
            defs = {{"V(p2-q1)", 1, {0}},
                    {"V(p3-q1)", 2, {0}},
                    {"V(p4-q1)", 3, {0}},
                    {"V(p1-q2-q3-q4)", 0, {1, 2, 3}}};
            break;
    }
    std::vector<NamedVariance> out;
    for (const auto& nf : defs) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
        v(pi_(nf.p_mode)) = 1.0;
        for (int qm : nf.q_modes) v(qi(qm)) = -1.0;
        out.push_back({nf.name, s.variance(v)});
    }
    return out;
}

double effective_coupling(double n_atoms, double rabi, double g, double delta) {
    require(delta != 0.0, "effective_coupling: detuning must be nonzero");
    require(n_atoms > 0, "effective_coupling: need a positive atom number");
    return std::sqrt(n_atoms) * rabi * g / (2.0 * delta);
}

DispersiveReport validate_dispersive(const DispersiveConfig& cfg) {
    DispersiveReport rep;
    auto check_large = [&](const std::string& name, double detuning) {
        for (const auto& [pname, val] :
             {std::pair<std::string, double>{"g_u", cfg.g_u},
              {"g_s", cfg.g_s},
              {"rabi_u", cfg.rabi_u},
              {"rabi_s", cfg.rabi_s},
              {"gamma_u", cfg.gamma_u},
              {"gamma_s", cfg.gamma_s}}) {
            if (val > 0 && detuning < cfg.factor * val) {
                rep.pass = false;
                rep.violations.push_back(name + " < " + std::to_string(cfg.factor) + " x " +
                                         pname);
            }
        }
    };
    check_large("delta_u", cfg.delta_u);
    check_large("delta_s", cfg.delta_s);

    const double lhs = cfg.g_u * cfg.g_u / cfg.delta_u;
    const double rhs = cfg.g_s * cfg.g_s / cfg.delta_s;
    if (std::abs(lhs - rhs) > 1e-9 * std::max(std::abs(lhs), std::abs(rhs))) {
        rep.pass = false;
        rep.violations.push_back("stark-shift balance g_u^2/delta_u != g_s^2/delta_s");
    }
    const double cavity = cfg.delta_c + cfg.n_atoms * cfg.g_u * cfg.g_u / cfg.delta_u;
    if (std::abs(cavity) > 1e-9 * std::max(1.0, std::abs(cfg.delta_c))) {
        rep.pass = false;
        rep.violations.push_back("cavity detuning does not cancel the collective shift");
    }
    return rep;
}

} // namespace entlab::gaussian
