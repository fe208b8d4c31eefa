#include "entlab/nonrwa.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include <Eigen/SparseCore>

#include "entlab/measures.hpp"

namespace entlab::nonrwa {

namespace {

namespace ode = boost::numeric::odeint;

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

Matrix field_annihilation(int n_max) {
    Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

// Atomic operators on the Product-ordered 4-dim space (gg, ge, eg, ee);
// atom 1 is the leading factor.
Matrix atom_sm(int which) {
    Matrix sm2 = Matrix::Zero(2, 2);
    sm2(0, 1) = 1.0;  // |g><e|
    const Matrix id2 = Matrix::Identity(2, 2);
    return which == 1 ? qstate::kron(sm2, id2) : qstate::kron(id2, sm2);
}

using OdeState = std::vector<double>;

OdeState pack(const Matrix& rho) {
    const Eigen::Index n = rho.rows();
    OdeState y(2 * n * n);
    Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<cxd*>(y.data()), n * n) =
        Eigen::Map<const Eigen::VectorXcd>(rho.data(), n * n);
    return y;
}

Matrix unpack(const OdeState& y, Eigen::Index n) {
    Matrix rho(n, n);
    Eigen::Map<Eigen::VectorXcd>(rho.data(), n * n) =
        Eigen::Map<const Eigen::VectorXcd>(reinterpret_cast<const cxd*>(y.data()), n * n);
    return rho;
}

struct LindbladRhs {
    Eigen::SparseMatrix<cxd> h_sparse;
    double kappa = 0.0;
    Eigen::Index nf = 0;
    Eigen::Index n = 0;
    mutable Matrix hr, rh;  // scratch, reused across evaluations

    // Exploits the ladder structure: H is sparse (a few couplings per
    // basis state) and the cavity dissipator is an index shift plus a
    // diagonal scale, so one evaluation costs O(nnz(H) n + n^2).
    void operator()(const OdeState& y, OdeState& dydt, double /*t*/) const {
        const Eigen::Map<const Matrix> rho(reinterpret_cast<const cxd*>(y.data()), n, n);
        dydt.resize(y.size());
        Eigen::Map<Matrix> drho(reinterpret_cast<cxd*>(dydt.data()), n, n);
        hr.resize(n, n);
        rh.resize(n, n);
        hr.noalias() = h_sparse * rho;
        rh.noalias() = rho * h_sparse;
        drho = cxd(0.0, -1.0) * (hr - rh);
        if (kappa > 0.0) {
            // column-major sweep: for each column, walk contiguous rows
            for (Eigen::Index bj = 0; bj < 4; ++bj) {
                for (Eigen::Index nn = 0; nn < nf; ++nn) {
                    const Eigen::Index col = bj * nf + nn;
                    for (Eigen::Index bi = 0; bi < 4; ++bi) {
                        for (Eigen::Index m = 0; m < nf; ++m) {
                            const Eigen::Index row = bi * nf + m;
                            cxd d = -0.5 * kappa * double(m + nn) * rho(row, col);
                            if (m + 1 < nf && nn + 1 < nf)
                                d += kappa * std::sqrt(double((m + 1) * (nn + 1))) *
                                     rho(row + 1, col + 1);
                            drho(row, col) += d;
                        }
                    }
                }
            }
        }
    }
};

} // namespace

std::pair<double, double> NonRwaParams::couplings() const {
    return {g0 * std::sin(M_PI * (n_half - d_over_lambda)),
            g0 * std::sin(M_PI * (n_half + d_over_lambda))};
}

Matrix build_hamiltonian(const NonRwaParams& p, bool rwa) {
    require(p.n_max >= 2, "build_hamiltonian: Fock cutoff must allow two photons");
    const Eigen::Index nf = p.n_max + 1;
    const Matrix a1 = field_annihilation(p.n_max);
    const Matrix id_f = Matrix::Identity(nf, nf);
    const Matrix id_a = Matrix::Identity(4, 4);

    Matrix num = Matrix::Zero(nf, nf);
    for (int k = 0; k <= p.n_max; ++k) num(k, k) = double(k);

    const auto [g1, g2] = p.couplings();
    const Matrix sm1 = atom_sm(1), sm2 = atom_sm(2);
    const Matrix sz = (sm1.adjoint() * sm1 - sm1 * sm1.adjoint()) +
                      (sm2.adjoint() * sm2 - sm2 * sm2.adjoint());

    Matrix h = qstate::kron(0.5 * p.omega_0() * sz, id_f) +
               qstate::kron(id_a, p.omega_c * num);
    const Matrix a_full = qstate::kron(id_a, a1);
    auto couple = [&](const Matrix& sm, double g) {
        const Matrix sp_full = qstate::kron(Matrix(sm.adjoint()), id_f);
        const Matrix sm_full = qstate::kron(sm, id_f);
        if (rwa) {
            h += g * (sp_full * a_full + sm_full * a_full.adjoint());
        } else {
            const Matrix sx = sp_full + sm_full;
            h += g * (sx * a_full.adjoint() + a_full * sx);
        }
    };
    couple(sm1, g1);
    couple(sm2, g2);
    return h;
}

Matrix excitation_number(const NonRwaParams& p) {
    const Eigen::Index nf = p.n_max + 1;
    const Matrix id_f = Matrix::Identity(nf, nf);
    const Matrix id_a = Matrix::Identity(4, 4);
    Matrix num = Matrix::Zero(nf, nf);
    for (int k = 0; k <= p.n_max; ++k) num(k, k) = double(k);
    const Matrix sm1 = atom_sm(1), sm2 = atom_sm(2);
    return qstate::kron(Matrix(sm1.adjoint() * sm1 + sm2.adjoint() * sm2), id_f) +
           qstate::kron(id_a, num);
}

DensityMatrix composite_vacuum_state(const Vector& atomic_state, const NonRwaParams& p) {
    Vector vac = Vector::Zero(p.n_max + 1);
    vac(0) = 1.0;
    return DensityMatrix::pure(qstate::kron_vec(atomic_state, vac), qstate::Basis::Product);
}

DensityMatrix reduced_atomic(const DensityMatrix& rho_s, const NonRwaParams& p) {
    return qstate::partial_trace(rho_s, {4, p.n_max + 1}, {0});
}

std::pair<double, bool> concurrence_c1(const DensityMatrix& rho_atoms) {
    require(rho_atoms.dim() == 4, "concurrence_c1: atomic state must be 4x4");
    Matrix off = rho_atoms.matrix();
    off(0, 0) = off(1, 1) = off(2, 2) = off(3, 3) = 0.0;
    off(1, 2) = off(2, 1) = off(0, 3) = off(3, 0) = 0.0;
    // Trajectory states carry integrator round-off; allow a looser pattern
    // gate than the exact-zero tolerance before falling back.
    if (off.cwiseAbs().maxCoeff() > 1e-8)
        return {measures::concurrence(rho_atoms), true};
    const Matrix& m = rho_atoms.matrix();
    const double c = 2.0 * std::max(0.0, std::abs(m(1, 2)) -
                                             std::sqrt(std::max(0.0, m(0, 0).real() *
                                                                         m(3, 3).real())));
    return {c, false};
}

Trajectory evolve_nonrwa(const DensityMatrix& rho0, const NonRwaParams& p, bool rwa,
                         const std::vector<double>& grid) {
    require(rho0.dim() == p.dim(), "evolve_nonrwa: state dimension does not match cutoff");
    require(!grid.empty() && grid.front() >= 0.0 &&
                std::is_sorted(grid.begin(), grid.end()),
            "evolve_nonrwa: time grid must be sorted and non-negative");

    LindbladRhs rhs;
    rhs.h_sparse = build_hamiltonian(p, rwa).sparseView(1.0, 1e-14);
    rhs.kappa = p.kappa;
    rhs.nf = p.n_max + 1;
    rhs.n = p.dim();

    OdeState y = pack(rho0.matrix());
    Trajectory traj;
    traj.times = grid;

    std::vector<Matrix> snapshots;
    snapshots.reserve(grid.size());
    auto stepper = ode::make_controlled(1e-10, 1e-9, ode::runge_kutta_dopri5<OdeState>());
    const double max_dt = 0.02 / p.omega_c;  // resolve the counter-rotating scale
    try {
        ode::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), max_dt,
                             [&snapshots, &p](const OdeState& s, double /*t*/) {
                                 snapshots.push_back(unpack(s, p.dim()));
                             });
    } catch (const std::exception& ex) {
        throw NumericalFailure(std::string("evolve_nonrwa: integrator failed: ") + ex.what());
    }

    for (const auto& m : snapshots) {
        // population of the top Fock level, summed over atomic states
        double top = 0.0;
        for (int aidx = 0; aidx < 4; ++aidx) {
            const Eigen::Index k = aidx * (p.n_max + 1) + p.n_max;
            top += m(k, k).real();
        }
        if (top > 1e-6)
            throw CutoffInsufficient("evolve_nonrwa: top Fock population " +
                                     std::to_string(top) + "; increase n_max");
        traj.top_fock_pop.push_back(top);
        traj.total_trace.push_back(m.trace().real());
        traj.energy.push_back((rhs.h_sparse * m).trace().real());

        const Matrix sym = 0.5 * (m + m.adjoint());
        const DensityMatrix full(sym, qstate::Basis::Product);
        const DensityMatrix atoms = reduced_atomic(full, p);
        const auto [c1, warn] = concurrence_c1(atoms);
        traj.pattern_warning = traj.pattern_warning || warn;
        traj.concurrence.push_back(c1);
        traj.rho44.push_back(atoms(3, 3).real());
        traj.atomic.push_back(atoms);
    }
    return traj;
}

} // namespace entlab::nonrwa
