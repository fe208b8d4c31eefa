#include "entlab/double_jc.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "entlab/measures.hpp"

namespace entlab::double_jc {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

// Basis-state index of |atom1, atom2, n1, n2> with excited/photon = 1,
// laid out as four qubits (A, B, a, b).
int idx(int a1, int a2, int n1, int n2) { return 8 * a1 + 4 * a2 + 2 * n1 + n2; }

} // namespace

double AmplitudeVector::norm() const {
    double n2 = d.squaredNorm();
    if (sector == Sector::Two) n2 += std::norm(d0);
    return std::sqrt(n2);
}

void AmplitudeVector::require_normalized(double tol) const {
    if (std::abs(norm() - 1.0) > tol)
        throw ContractViolation("amplitude vector norm deviates from 1 by " +
                                std::to_string(std::abs(norm() - 1.0)));
}

AmplitudeVector single_exc_evolve(const AmplitudeVector& d0, const JCParams& p, double t) {
    require(d0.sector == Sector::One, "single_exc_evolve: one-excitation sector expected");
    d0.require_normalized();
    const cxd i{0.0, 1.0};
    const double om1 = p.rabi_1(), om2 = p.rabi_2();
    const double dl1 = om1 > 0 ? p.delta1 / om1 : 0.0;
    const double dl2 = om2 > 0 ? p.delta2 / om2 : 0.0;
    const double b1 = om1 > 0 ? p.g1 / om1 : 0.0;
    const double b2 = om2 > 0 ? p.g2 / om2 : 0.0;
    const cxd ph1 = std::exp(i * p.delta1 * t), ph2 = std::exp(i * p.delta2 * t);
    const double c1 = std::cos(om1 * t), s1 = std::sin(om1 * t);
    const double c2 = std::cos(om2 * t), s2 = std::sin(om2 * t);

    AmplitudeVector out;
    out.sector = Sector::One;
    out.d(0) = ph1 * (d0.d(0) * c1 - i * (dl1 * d0.d(0) + b1 * d0.d(2)) * s1);
    out.d(1) = ph2 * (d0.d(1) * c2 - i * (dl2 * d0.d(1) + b2 * d0.d(3)) * s2);
    out.d(2) = ph1 * (d0.d(2) * c1 + i * (dl1 * d0.d(2) - b1 * d0.d(0)) * s1);
    out.d(3) = ph2 * (d0.d(3) * c2 + i * (dl2 * d0.d(3) - b2 * d0.d(1)) * s2);
    return out;
}

PairConcurrences pair_concurrences_single(const AmplitudeVector& d) {
    require(d.sector == Sector::One,
            "pair_concurrences_single: one-excitation sector expected");
    const double a1 = std::abs(d.d(0)), a2 = std::abs(d.d(1));
    const double a3 = std::abs(d.d(2)), a4 = std::abs(d.d(3));
    PairConcurrences c;
    c.c_AB = 2.0 * a1 * a2;
    c.c_ab = 2.0 * a3 * a4;
    c.c_Aa = 2.0 * a1 * a3;
    c.c_Ab = 2.0 * a1 * a4;
    c.c_Ba = 2.0 * a2 * a3;
    c.c_Bb = 2.0 * a2 * a4;
    return c;
}

PairConcurrences resonant_equal_coupling_concurrences(double delta_scaled, double gt) {
    const double om = std::sqrt(1.0 + delta_scaled * delta_scaled);
    const double cs = std::cos(om * gt), sn = std::sin(om * gt);
    const double ratio = delta_scaled / om;
    PairConcurrences c;
    c.c_AB = cs * cs + ratio * ratio * sn * sn;
    c.c_ab = sn * sn / (om * om);
    const double cross = std::abs(sn) / om * std::sqrt(c.c_AB);
    c.c_Aa = c.c_Ab = c.c_Ba = c.c_Bb = cross;
    return c;
}

Eigen::Matrix4cd double_exc_coefficient_matrix(const JCParams& p) {
    const double dp = p.delta1 + p.delta2, dm = p.delta1 - p.delta2;
    Eigen::Matrix4cd m;
    m << dp, p.g2, p.g1, 0.0,
         p.g2, dm, 0.0, p.g1,
         p.g1, 0.0, -dm, p.g2,
         0.0, p.g1, p.g2, -dp;
    return m;
}

AmplitudeVector double_exc_evolve(const AmplitudeVector& d0, const JCParams& p, double t) {
    require(d0.sector == Sector::Two, "double_exc_evolve: two-excitation sector expected");
    d0.require_normalized();
    const Eigen::Matrix4cd u = (cxd(0.0, -1.0) * double_exc_coefficient_matrix(p) * t).exp();
    AmplitudeVector out;
    out.sector = Sector::Two;
    out.d = u * d0.d;
    out.d0 = d0.d0;  // decoupled from the Hamiltonian: a constant of motion
    return out;
}

PairConcurrences pair_concurrences_double(const AmplitudeVector& d) {
    require(d.sector == Sector::Two,
            "pair_concurrences_double: two-excitation sector expected");
    const double a1 = std::abs(d.d(0)), a2 = std::abs(d.d(1));
    const double a3 = std::abs(d.d(2)), a4 = std::abs(d.d(3));
    const double a0 = std::abs(d.d0);
    PairConcurrences c;
    c.c_Aa = 2.0 * std::abs(d.d(0) * std::conj(d.d(2)) + d.d(1) * std::conj(d.d(3)));
    c.c_Bb = 2.0 * std::abs(d.d(0) * std::conj(d.d(1)) + d.d(2) * std::conj(d.d(3)));
    c.c_AB = 2.0 * std::max(0.0, a1 * a0 - a2 * a3);
    c.c_ab = 2.0 * std::max(0.0, a4 * a0 - a2 * a3);
    c.c_Ab = 2.0 * std::max(0.0, a2 * a0 - a1 * a4);
    c.c_Ba = 2.0 * std::max(0.0, a3 * a0 - a1 * a4);
    return c;
}

PairConcurrences steered_transfer(double ratio_g2_over_g1, double gt) {
    require(ratio_g2_over_g1 > 0.0, "steered_transfer: coupling ratio must be positive");
    // normalize so g = (g1 + g2)/2 = 1
    const double g1 = 2.0 / (1.0 + ratio_g2_over_g1);
    const double g2 = 2.0 * ratio_g2_over_g1 / (1.0 + ratio_g2_over_g1);
    const double c1 = std::abs(std::cos(g1 * gt)), s1 = std::abs(std::sin(g1 * gt));
    const double c2 = std::abs(std::cos(g2 * gt)), s2 = std::abs(std::sin(g2 * gt));
    PairConcurrences c;
    c.c_AB = c1 * c2;
    c.c_ab = s1 * s2;
    c.c_Aa = c1 * s1;
    c.c_Ab = c1 * s2;
    c.c_Ba = c2 * s1;
    c.c_Bb = s2 * c2;
    return c;
}

TransferReport steered_transfer_report(double ratio, double horizon) {
    require(horizon > 0.0, "steered_transfer_report: horizon must be positive");
    TransferReport rep;
    rep.sup.fill(0.0);
    const int n = 20001;
    const double h = horizon / n;
    double best_t[6] = {0, 0, 0, 0, 0, 0};
    // start past t = 0: the initial atom-atom entanglement is the input,
    // not a transfer
    for (int k = 1; k <= n; ++k) {
        const double t = horizon * k / n;
        const auto c = steered_transfer(ratio, t).as_array();
        for (int j = 0; j < 6; ++j) {
            if (c[j] > rep.sup[j]) {
                rep.sup[j] = c[j];
                best_t[j] = t;
            }
        }
    }
    // local refinement by golden-section search around each grid maximum
    for (int j = 0; j < 6; ++j) {
        double lo = std::max(h, best_t[j] - h), hi = std::min(horizon, best_t[j] + h);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        for (int it = 0; it < 80; ++it) {
            const double f1 = steered_transfer(ratio, x1).as_array()[j];
            const double f2 = steered_transfer(ratio, x2).as_array()[j];
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                x2 = lo + gr * (hi - lo);
            } else {
                hi = x2;
                x2 = x1;
                x1 = hi - gr * (hi - lo);
            }
        }
        const double t = 0.5 * (lo + hi);
        rep.sup[j] = std::max(rep.sup[j], steered_transfer(ratio, t).as_array()[j]);
    }
    for (int j = 0; j < 6; ++j)
        if (rep.sup[j] >= 1.0 - 1e-6) {
            rep.complete_pair = j;
            break;
        }
    return rep;
}

AmplitudeVector frozen_initial(double theta, double phi, bool plus_branch) {
    const cxd i{0.0, 1.0};
    AmplitudeVector d;
    d.sector = Sector::One;
    const double sign = plus_branch ? 1.0 : -1.0;
    d.d(0) = 0.5;
    d.d(1) = 0.5 * std::exp(i * theta);
    d.d(2) = 0.5 * sign;
    d.d(3) = -0.5 * sign * std::exp(i * phi);
    return d;
}

PairConcurrences frozen_state_scan(double theta, double phi, double delta, double t) {
    JCParams p;
    p.g1 = p.g2 = 1.0;
    p.delta1 = p.delta2 = delta;
    const AmplitudeVector d = single_exc_evolve(frozen_initial(theta, phi), p, t);
    return pair_concurrences_single(d);
}

Vector embed_state(const AmplitudeVector& d) {
    Vector v = Vector::Zero(16);
    if (d.sector == Sector::One) {
        v(idx(1, 0, 0, 0)) = d.d(0);
        v(idx(0, 1, 0, 0)) = d.d(1);
        v(idx(0, 0, 1, 0)) = d.d(2);
        v(idx(0, 0, 0, 1)) = d.d(3);
    } else {
        v(idx(1, 1, 0, 0)) = d.d(0);
        v(idx(1, 0, 0, 1)) = d.d(1);
        v(idx(0, 1, 1, 0)) = d.d(2);
        v(idx(0, 0, 1, 1)) = d.d(3);
        v(idx(0, 0, 0, 0)) = d.d0;
    }
    return v;
}

DensityMatrix reduced_pair(const AmplitudeVector& d, Pair which) {
    const Vector v = embed_state(d);
    const DensityMatrix full(v * v.adjoint(), qstate::Basis::Product);
    std::vector<std::size_t> keep;
    switch (which) {
        case Pair::AB: keep = {0, 1}; break;
        case Pair::ab: keep = {2, 3}; break;
        case Pair::Aa: keep = {0, 2}; break;
        case Pair::Ab: keep = {0, 3}; break;
        case Pair::Ba: keep = {1, 2}; break;
        case Pair::Bb: keep = {1, 3}; break;
    }
    return qstate::partial_trace(full, {2, 2, 2, 2}, keep);
}

double reduced_pair_concurrence(const AmplitudeVector& d, Pair which) {
    return measures::concurrence(reduced_pair(d, which));
}

} // namespace entlab::double_jc
