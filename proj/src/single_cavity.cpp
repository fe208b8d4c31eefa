#include "entlab/single_cavity.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "entlab/measures.hpp"

namespace entlab::single_cavity {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// sin(d/2)/d with its d -> 0 limit 1/2.
double half_sinc(double d) {
    return std::abs(d) < 1e-8 ? 0.5 * (1.0 - d * d / 24.0) : std::sin(0.5 * d) / d;
}

struct Precession {
    double alpha, big_a, big_b;
};

Precession precession_constants(const BlochState& b0, double omega12, double delta12) {
    Precession c;
    c.alpha = std::hypot(2.0 * omega12, delta12);
    c.big_a = 2.0 * omega12 * b0.u - delta12 * b0.w;
    c.big_b = delta12 * b0.u + 2.0 * omega12 * b0.w;
    return c;
}

// Rotation part of the Bloch solution, i.e. (u, v, w) e^{+gamma t}.
std::array<double, 3> rotated_bloch(const BlochState& b0, double omega12, double delta12,
                                    double t) {
    const auto [alpha, big_a, big_b] = precession_constants(b0, omega12, delta12);
    if (alpha < 1e-15) return {b0.u, b0.v, b0.w};
    const double sn = std::sin(alpha * t), cs = std::cos(alpha * t);
    const double osc = b0.v * alpha * sn + big_b * cs;
    // Rodrigues rotation about (2 omega12, 0, -delta12); the coherence
    // quadrature picks up the precession with a minus sign on B.
    return {(2.0 * omega12 * big_a + delta12 * osc) / (alpha * alpha),
            (b0.v * alpha * cs - big_b * sn) / alpha,
            (-delta12 * big_a + 2.0 * omega12 * osc) / (alpha * alpha)};
}

} // namespace

std::pair<double, double> standing_wave_couplings(double r12_over_lambda) {
    require(r12_over_lambda >= 0.0, "standing_wave_couplings: separation must be >= 0");
    return {1.0, std::cos(2.0 * M_PI * r12_over_lambda)};
}

BlochState bloch_evolve(const BlochState& b0, double omega12, double delta12,
                        double gamma_sp, double t) {
    require(t >= 0.0, "bloch_evolve: time must be non-negative");
    const double decay = std::exp(-gamma_sp * t);
    const auto rot = rotated_bloch(b0, omega12, delta12, t);
    BlochState b;
    b.u = rot[0] * decay;
    b.v = rot[1] * decay;
    b.w = rot[2] * decay;
    b.rho44 = b0.rho44 * std::exp(-2.0 * gamma_sp * t);
    b.s = (b0.s + 2.0 * b0.rho44) * decay - 2.0 * b0.rho44 * std::exp(-2.0 * gamma_sp * t);
    b.rho11 = b0.rho11 + (b0.s - b.s) + (b0.rho44 - b.rho44);
    return b;
}

double concurrence_good_cavity(const BlochState& b0, double omega12, double delta12,
                               double gamma_sp, double t) {
    const auto rot = rotated_bloch(b0, omega12, delta12, t);
    const double wbar = rot[2];
    return std::sqrt(std::max(0.0, 1.0 - wbar * wbar)) * std::exp(-gamma_sp * t);
}

double diffraction_pattern(DiffractionInitial initial, double r12_over_lambda, double tau,
                           double Gamma) {
    require(tau >= 0.0 && Gamma >= 0.0, "diffraction_pattern: tau and Gamma must be >= 0");
    const double kr = 2.0 * M_PI * r12_over_lambda;
    const double c = std::cos(kr);
    const double s2 = std::sin(kr) * std::sin(kr);
    const double d = 0.5 * (1.0 + c * c) * tau;
    const double hs = half_sinc(d);  // sin(d/2)/d
    const double fourth = std::pow(hs, 4) * std::pow(tau, 4) * s2 * s2;
    if (initial == DiffractionInitial::Psi3) {
        const double first = std::pow(sinc(d) * tau, 2);
        return std::abs(c) * std::sqrt(first + fourth) * std::exp(-Gamma * tau);
    }
    return std::sqrt(std::max(0.0, 1.0 - fourth * c * c)) * std::exp(-Gamma * tau);
}

Eigen::Matrix4d bad_cavity_matrix(const CavityParams& p) {
    const double g1 = p.gamma_1(), g2 = p.gamma_2(), g12 = p.gamma_12();
    const double om = p.omega_12(), d12 = p.delta_12();
    const double g = g1 + g2;
    // Derived from the eliminated master equation; rows close on
    // (rho22, rho33, u, v) with u = rho23 + rho32, v = i(rho23 - rho32).
    Eigen::Matrix4d a;
    a << -g2 - p.gamma_sp, 0.0, -0.5 * g12, om,
         0.0, -g1 - p.gamma_sp, -0.5 * g12, -om,
         -g12, -g12, -0.5 * g - p.gamma_sp, d12,
         -2.0 * om, 2.0 * om, -d12, -0.5 * g - p.gamma_sp;
    return a;
}

Eigen::Vector4d bad_cavity_evolve(const Eigen::Vector4d& y0, const CavityParams& p,
                                  double t) {
    require(t >= 0.0, "bad_cavity_evolve: time must be non-negative");
    const Eigen::Matrix4d at = bad_cavity_matrix(p) * t;
    return at.exp() * y0;
}

double trapped_combination(const Eigen::Vector4d& y, const CavityParams& p) {
    return p.gamma_1() * y(0) + p.gamma_2() * y(1) - p.gamma_12() * y(2);
}

Vector trapping_state(double gamma1, double gamma2) {
    require(gamma1 + gamma2 > 0.0, "trapping_state: total rate must be positive");
    Vector v = Vector::Zero(4);
    const double g = gamma1 + gamma2;
    v(1) = std::sqrt(gamma1 / g);
    v(2) = -std::sqrt(gamma2 / g);
    return v;
}

double trapping_feed_rate(double gamma1, double gamma2) {
    require(gamma1 + gamma2 > 0.0, "trapping_feed_rate: total rate must be positive");
    return (gamma2 - gamma1) * (gamma2 - gamma1) / (gamma1 + gamma2);
}

double steady_concurrence(BadCavityInitial initial, double g1, double g2) {
    const double q1 = g1 * g1, q2 = g2 * g2;
    const double denom2 = (q1 + q2) * (q1 + q2);
    switch (initial) {
        case BadCavityInitial::Psi2: return 2.0 * std::abs(g1 * q1 * g2) / denom2;
        case BadCavityInitial::Psi3: return 2.0 * std::abs(g1 * g2 * q2) / denom2;
        case BadCavityInitial::Psi4:
            return 2.0 * std::abs(g1 * g2) * (q2 - q1) * (q2 - q1) /
                   (denom2 * (q1 + q2));
    }
    return 0.0;
}

double bad_cavity_concurrence_closed(BadCavityInitial initial, const CavityParams& p,
                                     double t) {
    require(initial != BadCavityInitial::Psi4,
            "bad_cavity_concurrence_closed: only the one-photon starts have closed forms");
    require(p.kappa > 0.0, "bad_cavity_concurrence_closed: needs kappa > 0");
    const double q1 = p.g1 * p.g1, q2 = p.g2 * p.g2;
    const double g = p.gamma_1() + p.gamma_2();
    const double eta = p.delta / p.kappa;
    const cxd i{0.0, 1.0};
    // oscillation at the full Stark splitting: exponents -g(1 -+ 2i eta)t/2
    const cxd slow = std::exp(-0.5 * g * (1.0 - 2.0 * i * eta) * t);
    const cxd slow_c = std::exp(-0.5 * g * (1.0 + 2.0 * i * eta) * t);
    const double fast = std::exp(-g * t);
    cxd inner;
    if (initial == BadCavityInitial::Psi2)
        inner = q1 - q2 * fast - q1 * slow + q2 * slow_c;
    else
        inner = q2 - q1 * fast - q2 * slow + q1 * slow_c;
    return 2.0 * std::abs(p.g1 * p.g2) / ((q1 + q2) * (q1 + q2)) * std::abs(inner);
}

Eigen::MatrixXcd master_liouvillian(const CavityParams& p) {
    using M4 = Eigen::Matrix4cd;
    M4 sm1 = M4::Zero(), sm2 = M4::Zero();
    sm1(0, 2) = 1.0;  // |gg><eg|
    sm1(1, 3) = 1.0;  // |ge><ee|
    sm2(0, 1) = 1.0;  // |gg><ge|
    sm2(2, 3) = 1.0;  // |eg><ee|
    const M4 sp1 = sm1.adjoint(), sp2 = sm2.adjoint();

    const M4 h = p.delta_1() * sp1 * sm1 + p.delta_2() * sp2 * sm2 +
                 p.omega_12() * (sp1 * sm2 + sp2 * sm1);

    Eigen::Matrix2d rates;
    rates << p.gamma_1(), p.gamma_12(), p.gamma_12(), p.gamma_2();

    const M4 eye = M4::Identity();
    auto vec_left = [&eye](const M4& a) { return qstate::kron(eye, a); };
    auto vec_right = [&eye](const M4& a) { return qstate::kron(a.transpose(), eye); };

    Eigen::MatrixXcd lv = Eigen::MatrixXcd::Zero(16, 16);
    lv += cxd(0.0, -1.0) * (vec_left(h) - vec_right(h));

    const std::array<M4, 2> sm{sm1, sm2};
    const std::array<M4, 2> sp{sp1, sp2};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Eigen::MatrixXcd jump =
                qstate::kron(Matrix(sp[i].transpose()), Matrix(sm[j]));
            const M4 anti = sp[i] * sm[j];
            lv += rates(i, j) * (jump - 0.5 * (vec_left(anti) + vec_right(anti)));
        }
        // residual free-space spontaneous emission
        const Eigen::MatrixXcd jump =
            qstate::kron(Matrix(sp[i].transpose()), Matrix(sm[i]));
        const M4 anti = sp[i] * sm[i];
        lv += p.gamma_sp * (jump - 0.5 * (vec_left(anti) + vec_right(anti)));
    }
    return lv;
}

DensityMatrix evolve_full(const DensityMatrix& rho0, const CavityParams& p, double t) {
    require(rho0.dim() == 4, "evolve_full: state must be 4x4");
    require(t >= 0.0, "evolve_full: time must be non-negative");
    const Eigen::MatrixXcd prop = (master_liouvillian(p) * t).exp();
    Eigen::VectorXcd v(16);
    for (int col = 0; col < 4; ++col)
        v.segment(4 * col, 4) = rho0.matrix().col(col);
    v = prop * v;
    Matrix out(4, 4);
    for (int col = 0; col < 4; ++col) out.col(col) = v.segment(4 * col, 4);
    // symmetrize round-off before validation
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(out, rho0.basis());
}

OnePhotonEigensystem one_photon_eigensystem(const DensityMatrix& rho) {
    require(rho.dim() == 4, "one_photon_eigensystem: state must be 4x4");
    const Matrix& m = rho.matrix();
    Matrix off = m;
    off(0, 0) = off(1, 1) = off(2, 2) = 0.0;
    off(1, 2) = off(2, 1) = 0.0;
    if (off.cwiseAbs().maxCoeff() > measures::PATTERN_TOL)
        throw PatternViolation("one_photon_eigensystem: matrix has entries outside the "
                               "one-photon pattern");
    const double r11 = m(0, 0).real(), r22 = m(1, 1).real(), r33 = m(2, 2).real();
    const cxd r23 = m(1, 2);
    const double radical = std::hypot(r22 - r33, 2.0 * std::abs(r23));
    OnePhotonEigensystem out;
    out.values = {r11, 0.5 * (r22 + r33 + radical), 0.5 * (r22 + r33 - radical), 0.0};

    Vector v1 = Vector::Zero(4), v4 = Vector::Zero(4);
    v1(0) = 1.0;
    v4(3) = 1.0;
    auto block_vec = [&](double lambda, bool prefer_psi2) {
        Vector v = Vector::Zero(4);
        if (std::abs(r23) < 1e-15) {
            v(prefer_psi2 ? 1 : 2) = 1.0;
            return v;
        }
        v(1) = r23;
        v(2) = cxd(lambda - r22, 0.0);
        v.normalize();
        return v;
    };
    const bool two_larger = r22 >= r33;
    out.states = {v1, block_vec(out.values[1], two_larger),
                  block_vec(out.values[2], !two_larger), v4};
    return out;
}

double triggered_concurrence(double delta12, double omega12, double gamma_sp, double t) {
    require(t >= 0.0, "triggered_concurrence: time must be non-negative");
    const double alpha = std::hypot(2.0 * omega12, delta12);
    const double decay = std::exp(-gamma_sp * t);
    if (alpha < 1e-15) return decay;
    const double ratio = delta12 / alpha;
    const cxd z = 1.0 - 2.0 * ratio * ratio * std::pow(std::sin(0.5 * alpha * t), 2) -
                  cxd(0.0, 1.0) * ratio * std::sin(alpha * t);
    return std::abs(z) * decay;
}

} // namespace entlab::single_cavity
