#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/numeric/odeint.hpp>

#include "entlab/measures.hpp"
#include "entlab/single_cavity.hpp"
#include "test_support.hpp"

using namespace entlab;
using namespace entlab::single_cavity;
using qstate::Basis;
using qstate::DensityMatrix;
using qstate::Matrix;
namespace ts = test_support;

namespace {

CavityParams sample_params(double g2 = 0.7, double delta = 20.0, double kappa = 1.0) {
    CavityParams p;
    p.g1 = 1.0;
    p.g2 = g2;
    p.delta = delta;
    p.kappa = kappa;
    return p;
}

BlochState north_pole() {
    BlochState b;
    b.w = 1.0;
    b.s = 1.0;
    return b;
}

// Direct integration of the good-cavity coherence equations as an
// independent oracle for the closed forms.
std::array<double, 3> integrate_bloch(const BlochState& b0, double om, double d12,
                                      double gamma, double t) {
    namespace ode = boost::numeric::odeint;
    std::vector<double> y{b0.u, b0.v, b0.w};
    auto rhs = [=](const std::vector<double>& y, std::vector<double>& dy, double) {
        dy.resize(3);
        dy[0] = -gamma * y[0] + d12 * y[1];
        dy[1] = -gamma * y[1] - d12 * y[0] - 2.0 * om * y[2];
        dy[2] = -gamma * y[2] + 2.0 * om * y[1];
    };
    if (t > 0.0)
        ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-12,
                                                     ode::runge_kutta_fehlberg78<
                                                         std::vector<double>>()),
                                rhs, y, 0.0, t, 1e-3);
    return {y[0], y[1], y[2]};
}

} // namespace

TEST_CASE("standing-wave couplings") {
    auto [g1, g2] = standing_wave_couplings(0.5);
    CHECK(g1 == doctest::Approx(1.0));
    CHECK(g2 == doctest::Approx(-1.0));
    CHECK(standing_wave_couplings(0.25).second == doctest::Approx(0.0));
    CHECK(standing_wave_couplings(0.1).second ==
          doctest::Approx(std::cos(0.2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("Bloch closed form against direct integration") {
    for (int it = 0; it < 30; ++it) {
        BlochState b0;
        const double th = ts::uniform(0.0, M_PI), ph = ts::uniform(0.0, 2.0 * M_PI);
        b0.u = std::sin(th) * std::cos(ph);
        b0.v = std::sin(th) * std::sin(ph);
        b0.w = std::cos(th);
        b0.s = 1.0;
        const double om = ts::uniform(-2.0, 2.0), d12 = ts::uniform(-2.0, 2.0);
        const double gamma = ts::uniform(0.0, 0.5), t = ts::uniform(0.0, 5.0);
        const auto b = bloch_evolve(b0, om, d12, gamma, t);
        const auto ref = integrate_bloch(b0, om, d12, gamma, t);
        CHECK(b.u == doctest::Approx(ref[0]).epsilon(1e-8));
        CHECK(b.v == doctest::Approx(ref[1]).epsilon(1e-8));
        CHECK(b.w == doctest::Approx(ref[2]).epsilon(1e-8));
    }
}

TEST_CASE("Bloch vector length identity and population closure") {
    for (int it = 0; it < 100; ++it) {
        BlochState b0;
        const double th = std::acos(ts::uniform(-1.0, 1.0));
        const double ph = ts::uniform(0.0, 2.0 * M_PI);
        b0.u = std::sin(th) * std::cos(ph);
        b0.v = std::sin(th) * std::sin(ph);
        b0.w = std::cos(th);
        b0.s = 1.0;
        const double om = ts::uniform(-3.0, 3.0), d12 = ts::uniform(-3.0, 3.0);
        const double gamma = ts::uniform(0.0, 1.0), t = ts::uniform(0.0, 4.0);
        const auto b = bloch_evolve(b0, om, d12, gamma, t);
        const double len2 = b.u * b.u + b.v * b.v + b.w * b.w;
        CHECK(std::abs(len2 - std::exp(-2.0 * gamma * t)) < 1e-10);
        CHECK(std::abs(b.rho11 + b.s + b.rho44 - 1.0) < 1e-12);
    }
}

TEST_CASE("equal couplings: full population return; unequal: no inversion") {
    const double om = 1.0;
    // delta12 = 0: w(t) = cos(2 om t) e^{-gamma t}
    for (double t : {0.2, 0.7, 1.9}) {
        const auto b = bloch_evolve(north_pole(), om, 0.0, 0.3, t);
        CHECK(b.w == doctest::Approx(std::cos(2.0 * om * t) * std::exp(-0.3 * t))
                         .epsilon(1e-10));
    }
    // delta12 != 0: the scaled inversion never reaches the south pole
    double min_wbar = 1.0;
    for (int k = 0; k <= 2000; ++k) {
        const double t = 20.0 * k / 2000;
        const auto b = bloch_evolve(north_pole(), om, 0.8, 0.0, t);
        min_wbar = std::min(min_wbar, b.w);
    }
    CHECK(min_wbar > -1.0 + 1e-3);
}

TEST_CASE("good-cavity concurrence zeros: period doubling under unequal shifts") {
    const double om = 0.9, d12 = 1.3;
    const double alpha = std::hypot(2.0 * om, d12);
    // equal shifts vanish at every half period
    for (int n = 1; n <= 5; ++n) {
        CHECK(concurrence_good_cavity(north_pole(), om, 0.0, 0.2, n * M_PI / (2.0 * om)) <
              5e-8);  // sqrt(1 - wbar^2) floor near wbar = 1 at double precision
    }
    // unequal shifts vanish only at full periods
    for (int n = 1; n <= 5; ++n) {
        const double t_even = 2.0 * n * M_PI / alpha;
        const double t_odd = (2.0 * n - 1) * M_PI / alpha;
        CHECK(concurrence_good_cavity(north_pole(), om, d12, 0.2, t_even) < 5e-8);
        CHECK(concurrence_good_cavity(north_pole(), om, d12, 0.2, t_odd) > 1e-3);
    }
}

TEST_CASE("symmetric initial coherence is frozen at equal couplings") {
    BlochState b0;
    b0.u = 1.0;
    b0.s = 1.0;
    for (double t : {0.0, 0.5, 2.0, 7.0})
        CHECK(concurrence_good_cavity(b0, 1.1, 0.0, 0.0, t) == doctest::Approx(1.0));
}

TEST_CASE("good-cavity concurrence equals twice the coherence magnitude") {
    for (int it = 0; it < 20; ++it) {
        BlochState b0;
        const double th = std::acos(ts::uniform(-1.0, 1.0));
        const double ph = ts::uniform(0.0, 2.0 * M_PI);
        b0.u = std::sin(th) * std::cos(ph);
        b0.v = std::sin(th) * std::sin(ph);
        b0.w = std::cos(th);
        const double om = ts::uniform(-2.0, 2.0), d12 = ts::uniform(-2.0, 2.0);
        const double gamma = ts::uniform(0.0, 0.4), t = ts::uniform(0.0, 4.0);
        const auto ref = integrate_bloch(b0, om, d12, gamma, t);
        const double two_rho23 = std::hypot(ref[0], ref[1]);  // 2|rho23| = sqrt(u^2+v^2)
        CHECK(concurrence_good_cavity(b0, om, d12, gamma, t) ==
              doctest::Approx(two_rho23).epsilon(1e-8));
    }
}

TEST_CASE("diffraction pattern limits") {
    // separable start, short times: shape follows the bare mode function
    const double tau0 = 1e-3;
    const double at_antinode = diffraction_pattern(DiffractionInitial::Psi3, 0.0, tau0, 0.0);
    for (double r : {0.05, 0.1, 0.2}) {
        const double shape =
            diffraction_pattern(DiffractionInitial::Psi3, r, tau0, 0.0) / at_antinode;
        CHECK(shape == doctest::Approx(std::abs(std::cos(2.0 * M_PI * r))).epsilon(1e-4));
    }
    // node: separable start gives nothing, symmetric start pure decay
    CHECK(diffraction_pattern(DiffractionInitial::Psi3, 0.25, 2.0, 0.1) ==
          doctest::Approx(0.0));
    CHECK(diffraction_pattern(DiffractionInitial::PsiS, 0.25, 2.0, 0.1) ==
          doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
}

TEST_CASE("diffraction closed forms agree with the Bloch route") {
    // omega12 = cos(kr), delta12 = sin^2(kr) in units 2 g0^2/Delta = 1,
    // with tau = t and Gamma = gamma in the same units.
    for (double r : {0.05, 0.13, 0.31, 0.42}) {
        const double kr = 2.0 * M_PI * r;
        const double om = 0.5 * std::cos(kr), d12 = 0.5 * std::sin(kr) * std::sin(kr);
        for (double tau : {0.3, 1.0, 4.0, 11.0}) {
            BlochState psi3;
            psi3.w = -1.0;
            psi3.s = 1.0;
            CHECK(diffraction_pattern(DiffractionInitial::Psi3, r, tau, 0.07) ==
                  doctest::Approx(concurrence_good_cavity(psi3, om, d12, 0.07, tau))
                      .epsilon(1e-10));
            BlochState sym;
            sym.u = 1.0;
            sym.s = 1.0;
            CHECK(diffraction_pattern(DiffractionInitial::PsiS, r, tau, 0.07) ==
                  doctest::Approx(concurrence_good_cavity(sym, om, d12, 0.07, tau))
                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("bad-cavity drift matrix is singular by construction") {
    for (int it = 0; it < 50; ++it) {
        const auto p = sample_params(ts::uniform(-1.0, 1.0), ts::uniform(5.0, 50.0),
                                     ts::uniform(0.5, 3.0));
        const Eigen::Matrix4d a = bad_cavity_matrix(p);
        const double scale = a.cwiseAbs().maxCoeff();
        CHECK(std::abs(a.determinant()) < 1e-12 * std::pow(scale, 4));
    }
}

TEST_CASE("trapped combination is conserved along the one-photon flow") {
    const auto p = sample_params();
    Eigen::Vector4d y0;
    y0 << 0.4, 0.6, 0.1, -0.05;
    const double c0 = trapped_combination(y0, p);
    for (double t : {1.0, 10.0, 300.0}) {
        const auto y = bad_cavity_evolve(y0, p, t / (p.gamma_1() + p.gamma_2()));
        CHECK(trapped_combination(y, p) == doctest::Approx(c0).epsilon(1e-10));
    }
}

TEST_CASE("dark state: weights, limits and decoupling") {
    const auto v = trapping_state(1.0, 1.0);
    CHECK(std::abs(v(1) - qstate::cxd(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
    CHECK(std::abs(v(2) + qstate::cxd(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);

    const auto v2 = trapping_state(1.0, 0.0);  // atom 2 uncoupled: |g1 e2> survives
    CHECK(std::abs(v2(1) - qstate::cxd(1.0, 0.0)) < 1e-12);

    CHECK(trapping_feed_rate(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(trapping_feed_rate(1.0, 2.0) == doctest::Approx(1.0 / 3.0));

    // populate the dark state and check it does not evolve
    const auto p = sample_params(0.6);
    const double g1 = p.gamma_1(), g2 = p.gamma_2(), g = g1 + g2;
    Eigen::Vector4d yd;
    yd << g1 / g, g2 / g, -2.0 * std::sqrt(g1 * g2) / g, 0.0;
    const auto yt = bad_cavity_evolve(yd, p, 50.0 / g);
    CHECK((yt - yd).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("bad-cavity closed forms against the matrix exponential") {
    for (double g2 : {1.0, 0.5, 2.0}) {
        const auto p = sample_params(g2);
        Eigen::Vector4d y2 = Eigen::Vector4d::Zero(), y3 = Eigen::Vector4d::Zero();
        y2(0) = 1.0;
        y3(1) = 1.0;
        for (double tau : {0.2, 1.0, 4.0, 20.0}) {
            const double t = tau / (p.gamma_1() + p.gamma_2());
            const auto a2 = bad_cavity_evolve(y2, p, t);
            const auto a3 = bad_cavity_evolve(y3, p, t);
            CHECK(std::hypot(a2(2), a2(3)) ==
                  doctest::Approx(bad_cavity_concurrence_closed(BadCavityInitial::Psi2, p, t))
                      .epsilon(1e-9));
            CHECK(std::hypot(a3(2), a3(3)) ==
                  doctest::Approx(bad_cavity_concurrence_closed(BadCavityInitial::Psi3, p, t))
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("stationary entanglement values") {
    CHECK(steady_concurrence(BadCavityInitial::Psi2, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(steady_concurrence(BadCavityInitial::Psi3, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(steady_concurrence(BadCavityInitial::Psi2, 1.0, 2.0) ==
          doctest::Approx(0.16).epsilon(1e-12));
    CHECK(steady_concurrence(BadCavityInitial::Psi3, 1.0, 2.0) ==
          doctest::Approx(0.64).epsilon(1e-12));
    CHECK(steady_concurrence(BadCavityInitial::Psi4, 1.0, 1.0) == doctest::Approx(0.0));
    CHECK(steady_concurrence(BadCavityInitial::Psi4, 1.0, std::sqrt(2.0)) ==
          doctest::Approx(2.0 * std::sqrt(2.0) * 1.0 / 27.0).epsilon(1e-12));
    // exchange symmetry
    for (int it = 0; it < 20; ++it) {
        const double a = ts::uniform(0.2, 2.0), b = ts::uniform(0.2, 2.0);
        CHECK(steady_concurrence(BadCavityInitial::Psi2, a, b) ==
              doctest::Approx(steady_concurrence(BadCavityInitial::Psi3, b, a))
                  .epsilon(1e-12));
    }
}

TEST_CASE("full generator: doubly excited start reaches the predicted steady state") {
    const auto p = sample_params(std::sqrt(2.0), 25.0, 1.0);
    const DensityMatrix rho0 = qstate::build_named_state(qstate::Psi4{});
    const double g = p.gamma_1() + p.gamma_2();
    const auto rho_inf = evolve_full(rho0, p, 300.0 / g);
    const double c = measures::concurrence(rho_inf);
    CHECK(c == doctest::Approx(steady_concurrence(BadCavityInitial::Psi4, p.g1, p.g2))
                   .epsilon(1e-6));
}

TEST_CASE("full generator: trapped-state population feeds at the predicted rate") {
    const auto p = sample_params(0.5, 25.0, 1.0);
    const double g1 = p.gamma_1(), g2 = p.gamma_2();
    const DensityMatrix rho0 = qstate::build_named_state(qstate::Psi4{});
    const auto vc = trapping_state(g1, g2);
    const double dt = 1e-3 / (g1 + g2);
    const auto rho_dt = evolve_full(rho0, p, dt);
    const double pc = (vc.adjoint() * rho_dt.matrix() * vc)(0, 0).real();
    // population feed is quadratic-free: dP_c/dt = feed * rho44
    CHECK(pc / dt == doctest::Approx(trapping_feed_rate(g1, g2)).epsilon(1e-2));
}

TEST_CASE("full generator reproduces the one-photon drift matrix") {
    const auto p = sample_params(0.8, 15.0, 2.0);
    Eigen::Vector4d y0;
    y0 << 0.3, 0.7, 0.2, -0.1;
    // embed as a density matrix (pad with ground population)
    Matrix m = Matrix::Zero(4, 4);
    m(1, 1) = y0(0);
    m(2, 2) = y0(1);
    m(1, 2) = 0.5 * qstate::cxd(y0(2), -y0(3));
    m(2, 1) = std::conj(m(1, 2));
    m(0, 0) = 1.0 - y0(0) - y0(1);
    const DensityMatrix rho0(m, Basis::Product);
    const double t = 0.8 / (p.gamma_1() + p.gamma_2());
    const auto rho_t = evolve_full(rho0, p, t);
    const auto y_t = bad_cavity_evolve(y0, p, t);
    CHECK(rho_t(1, 1).real() == doctest::Approx(y_t(0)).epsilon(1e-9));
    CHECK(rho_t(2, 2).real() == doctest::Approx(y_t(1)).epsilon(1e-9));
    CHECK(2.0 * rho_t(1, 2).real() == doctest::Approx(y_t(2)).epsilon(1e-9));
    CHECK(-2.0 * rho_t(1, 2).imag() == doctest::Approx(y_t(3)).epsilon(1e-9));
}

TEST_CASE("one-photon eigensystem") {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1.0;
    auto es = one_photon_eigensystem(DensityMatrix(m, Basis::Product));
    CHECK(es.values[0] == doctest::Approx(1.0));
    CHECK(es.values[1] == doctest::Approx(0.0));
    CHECK(es.values[2] == doctest::Approx(0.0));

    for (int it = 0; it < 30; ++it) {
        Matrix r = Matrix::Zero(4, 4);
        const double p1 = ts::uniform(0.0, 0.5);
        const double p2 = ts::uniform(0.0, 1.0 - p1);
        const double p3 = 1.0 - p1 - p2;
        r(0, 0) = p1;
        r(1, 1) = p2;
        r(2, 2) = p3;
        const qstate::cxd coh = ts::uniform(0.0, 1.0) * std::sqrt(p2 * p3) *
                                std::exp(qstate::cxd(0.0, ts::uniform(0.0, 2 * M_PI)));
        r(1, 2) = coh;
        r(2, 1) = std::conj(coh);
        const DensityMatrix rho(r, Basis::Product);
        es = one_photon_eigensystem(rho);
        const auto general = qstate::eig_hermitian(rho.matrix());
        std::array<double, 4> sorted = es.values;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        for (int i = 0; i < 4; ++i)
            CHECK(sorted[i] == doctest::Approx(general.values(i)).epsilon(1e-10));
        // eigenvector residuals
        for (int i = 0; i < 4; ++i) {
            const auto res = rho.matrix() * es.states[i] - es.values[i] * es.states[i];
            CHECK(res.norm() < 1e-10);
        }
    }
    CHECK_THROWS_AS(one_photon_eigensystem(qstate::build_named_state(qstate::PhiS{})),
                    PatternViolation);
}

TEST_CASE("pure-state spectrum without spontaneous emission") {
    // gamma = 0 one-photon dynamics keeps the state pure: spectrum (1,0,0,0)
    BlochState b0;
    b0.u = 1.0;
    b0.s = 1.0;
    const double om = 0.7, d12 = 0.9;
    for (double t : {0.5, 2.0}) {
        const auto b = bloch_evolve(b0, om, d12, 0.0, t);
        Matrix m = Matrix::Zero(4, 4);
        m(1, 1) = 0.5 * (b.s + b.w);
        m(2, 2) = 0.5 * (b.s - b.w);
        m(1, 2) = 0.5 * qstate::cxd(b.u, -b.v);
        m(2, 1) = std::conj(m(1, 2));
        const auto es = one_photon_eigensystem(DensityMatrix(m, Basis::Product));
        std::array<double, 4> sorted = es.values;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        CHECK(sorted[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(sorted[1]) < 1e-10);
    }
}

TEST_CASE("triggered evolution from the symmetric state") {
    // no shift difference: frozen
    for (double t : {0.0, 1.0, 5.0})
        CHECK(triggered_concurrence(0.0, 1.3, 0.0, t) == doctest::Approx(1.0));
    // pure shift, no exchange: phase evolution only
    for (double t : {0.3, 2.2})
        CHECK(triggered_concurrence(1.7, 0.0, 0.0, t) == doctest::Approx(1.0));
    // half period
    const double d12 = 1.1, om = 0.6;
    const double alpha = std::hypot(2.0 * om, d12);
    CHECK(triggered_concurrence(d12, om, 0.0, M_PI / alpha) ==
          doctest::Approx(std::abs(1.0 - 2.0 * d12 * d12 / (alpha * alpha)))
              .epsilon(1e-12));
    // agreement with the general good-cavity formula for u0 = 1
    BlochState b0;
    b0.u = 1.0;
    b0.s = 1.0;
    for (double t : {0.4, 1.7, 3.3})
        CHECK(triggered_concurrence(d12, om, 0.25, t) ==
              doctest::Approx(concurrence_good_cavity(b0, om, d12, 0.25, t))
                  .epsilon(1e-10));
}
