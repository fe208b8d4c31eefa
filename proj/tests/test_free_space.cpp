#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entlab/free_space.hpp"
#include "test_support.hpp"

using namespace entlab;
using namespace entlab::free_space;
using qstate::Basis;
using qstate::DensityMatrix;
namespace ts = test_support;

namespace {

std::vector<double> grid(double t_max, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = t_max * i / (n - 1);
    return g;
}

DensityMatrix dicke_state(const qstate::NamedState& s) {
    return qstate::basis_transform(qstate::build_named_state(s), Basis::Product,
                                   Basis::Dicke);
}

// random initial state whose Dicke matrix is dominated by the closed set
DensityMatrix random_dicke_state() {
    return DensityMatrix(ts::random_density(4), Basis::Dicke);
}

} // namespace

TEST_CASE("collective parameters at benchmark separations") {
    const auto p = collective_params(M_PI / 5.0, 0.0);
    CHECK(p.gamma12 == doctest::Approx(0.9228).epsilon(2e-4));
    CHECK(p.omega12 == doctest::Approx(2.5966).epsilon(2e-3));

    const auto half_wave = collective_params(M_PI, 0.0);
    CHECK(half_wave.gamma12 == doctest::Approx(-1.5 / (M_PI * M_PI)).epsilon(1e-12));

    const auto contact = collective_params(0.01, 0.0);
    CHECK(std::abs(contact.gamma12 - 1.0) < 1e-3);

    CHECK_THROWS_AS(collective_params(0.0, 0.0), ContractViolation);
    for (int it = 0; it < 100; ++it) {
        const auto q = collective_params(ts::uniform(0.02, 20.0), ts::uniform(0.0, 1.0));
        CHECK(std::abs(q.gamma12) <= q.gamma + 1e-9);
    }
}

TEST_CASE("quasistatic dipole-dipole potential") {
    CHECK(small_kr_potential(0.1, 0.0) == doctest::Approx(750.0).epsilon(1e-12));
    CHECK(small_kr_potential(0.1, 1.0 / std::sqrt(3.0)) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(small_kr_potential(0.5, 0.0), ContractViolation);
    // asymptotic agreement with the full shift
    const auto p = collective_params(0.05, 0.0);
    const double v = small_kr_potential(0.05, 0.0);
    CHECK(std::abs(p.omega12 - v) / v < 0.02);
}

TEST_CASE("population decay laws from the master equation") {
    const auto p = collective_params(M_PI / 5.0, 0.0);
    const auto g = grid(3.0, 31);

    // doubly excited start decays at twice the single-atom rate
    auto traj = evolve_master(dicke_state(qstate::Psi4{}), p, g);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(traj.elements[k].r44 == doctest::Approx(std::exp(-2.0 * g[k])).epsilon(1e-8));

    // antisymmetric start at small separation is nearly frozen
    const auto contact = collective_params(0.01, 0.0);
    traj = evolve_master(dicke_state(qstate::PsiA{}), contact, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double expected = std::exp(-(contact.gamma - contact.gamma12) * g[k]);
        CHECK(traj.elements[k].raa == doctest::Approx(expected).epsilon(1e-7));
        CHECK(traj.elements.back().raa > 0.99);  // remains stored
    }

    // independent atoms: symmetric and antisymmetric decay identically
    auto pi = CollectiveParams::independent();
    const auto t_s = evolve_master(dicke_state(qstate::PsiS{}), pi, g);
    const auto t_a = evolve_master(dicke_state(qstate::PsiA{}), pi, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(t_s.elements[k].rss ==
              doctest::Approx(std::exp(-g[k])).epsilon(1e-8));
        CHECK(t_a.elements[k].raa ==
              doctest::Approx(std::exp(-g[k])).epsilon(1e-8));
    }
}

TEST_CASE("trajectories preserve trace and positivity") {
    const auto p = collective_params(0.8, 0.3);
    const auto g = grid(6.0, 61);
    for (int it = 0; it < 10; ++it) {
        const auto traj = evolve_master(random_dicke_state(), p, g);
        for (const auto& e : traj.elements) {
            CHECK(std::abs(e.r11 + e.rss + e.raa + e.r44 - 1.0) < 1e-9);
            CHECK_NOTHROW(e.to_density());  // validates hermiticity/positivity
        }
    }
}

TEST_CASE("closed-form solution matches the integrator") {
    const auto g = grid(10.0, 21);
    for (int kr_case = 0; kr_case < 10; ++kr_case) {
        const double kr = ts::uniform(0.2, 3.0 * M_PI);
        const auto p = collective_params(kr, ts::uniform(0.0, 1.0));
        for (int it = 0; it < 10; ++it) {
            const DensityMatrix rho0 = random_dicke_state();
            const auto traj = evolve_master(rho0, p, g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const auto exact = analytic_solution(rho0, p, g[k]);
                const double dev =
                    (exact.matrix() - traj.elements[k].to_matrix()).cwiseAbs().maxCoeff();
                CHECK(dev < 1e-8);
            }
        }
    }
}

TEST_CASE("closed form is the identity at t = 0 and handles the Dicke limit") {
    const auto p = collective_params(1.3, 0.5);
    const DensityMatrix rho0 = random_dicke_state();
    CHECK((analytic_solution(rho0, p, 0.0).matrix() - rho0.matrix()).cwiseAbs().maxCoeff() <
          1e-12);

    // gamma12 -> gamma: the symmetric-state feed becomes 2 gamma t e^{-2t}
    CollectiveParams dicke = CollectiveParams::dicke_limit();
    const auto e = analytic_elements(DickeElements::from_density(dicke_state(qstate::Psi4{})),
                                     dicke, 0.7);
    CHECK(e.rss == doctest::Approx(2.0 * 0.7 * std::exp(-1.4)).epsilon(1e-12));
}

TEST_CASE("single-excitation coherence solution") {
    const auto p = collective_params(M_PI / 5.0, 0.0);
    const auto e0 = DickeElements::from_density(dicke_state(qstate::Psi3{}));
    CHECK(e0.rss == doctest::Approx(0.5));
    CHECK(e0.raa == doctest::Approx(0.5));
    CHECK(e0.rsa.real() == doctest::Approx(0.5));
    const auto e = analytic_elements(e0, p, 1.0);
    const qstate::cxd expected =
        0.5 * std::exp(-(p.gamma + 2.0 * qstate::I_UNIT * p.omega12) * 1.0);
    CHECK(std::abs(e.rsa - expected) < 1e-12);
}

TEST_CASE("single-excitation concurrence: buildup, steady value and cross-checks") {
    const auto p = collective_params(M_PI / 5.0, 0.0);
    CHECK(concurrence_single_excitation(p, 0.0) == doctest::Approx(0.0));

    const auto contact = collective_params(0.01, 0.0);
    CHECK(concurrence_single_excitation(contact, 50.0) ==
          doctest::Approx(0.5).epsilon(0.02));

    // agreement with the Dicke-basis criterion of the evolved state
    const DensityMatrix rho0 = dicke_state(qstate::Psi3{});
    for (double t : {0.3, 1.0, 2.5}) {
        const auto rho_t = analytic_solution(rho0, p, t);
        const double via_criterion = measures::concurrence_two_entangled(rho_t);
        CHECK(concurrence_single_excitation(p, t) ==
              doctest::Approx(via_criterion).epsilon(1e-8));
        const double via_general = measures::concurrence(
            qstate::basis_transform(rho_t, Basis::Dicke, Basis::Product));
        CHECK(concurrence_single_excitation(p, t) ==
              doctest::Approx(via_general).epsilon(1e-8));
    }
}

TEST_CASE("diagonalization of the one-photon block") {
    // equal populations with full coherence collapse to |e1 g2>
    qstate::Matrix m = qstate::Matrix::Zero(4, 4);
    m(1, 1) = m(2, 2) = 0.5;
    m(1, 2) = m(2, 1) = 0.5;
    auto ds = diagonal_states(DensityMatrix(m, Basis::Dicke));
    CHECK(ds.population_plus == doctest::Approx(1.0));
    CHECK(ds.population_minus == doctest::Approx(0.0));
    // the plus state is (psi_s + psi_a)/sqrt(2) = |e1 g2>
    CHECK(std::abs(std::abs(ds.state_plus(1)) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(std::abs(ds.state_plus(2)) - std::sqrt(0.5)) < 1e-12);

    // no coherence: the block states themselves
    m = qstate::Matrix::Zero(4, 4);
    m(1, 1) = 0.7;
    m(2, 2) = 0.3;
    ds = diagonal_states(DensityMatrix(m, Basis::Dicke));
    CHECK(std::abs(ds.state_plus(1)) == doctest::Approx(1.0));
    CHECK(std::abs(ds.state_minus(2)) == doctest::Approx(1.0));

    // evolved single-excitation family keeps the lower population empty
    const auto p = collective_params(M_PI / 5.0, 0.0);
    const auto rho_t = analytic_solution(dicke_state(qstate::Psi3{}), p, 1.0);
    ds = diagonal_states(rho_t);
    CHECK(ds.population_minus <= 1e-10);

    CHECK_THROWS_AS(diagonal_states(dicke_state(qstate::PhiS{})), PatternViolation);
}

TEST_CASE("small-sample limit: no entanglement from the doubly excited state") {
    DickePopulations rho0;
    rho0.r44 = 1.0;
    double peak = 0.0, peak_t = 0.0;
    for (int k = 0; k <= 10000; ++k) {
        const double t = 10.0 * k / 10000;
        const auto pt = dicke_model_trajectory(rho0, t);
        CHECK(pt.concurrence == 0.0);
        if (pt.populations.rss > peak) {
            peak = pt.populations.rss;
            peak_t = t;
        }
    }
    // the symmetric population peaks at exp(-1) at t = 1/(2 gamma)
    CHECK(peak == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(peak_t == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("small-sample limit: symmetric start decays monotonically") {
    DickePopulations rho0;
    rho0.rss = 1.0;
    for (double t : {0.0, 0.3, 1.0, 2.0}) {
        const auto pt = dicke_model_trajectory(rho0, t);
        CHECK(pt.concurrence == doctest::Approx(std::exp(-2.0 * t)).epsilon(1e-12));
    }
}

TEST_CASE("disentanglement time of the correlated two-photon state") {
    auto td = sudden_death_time(2.0 / 3.0);
    REQUIRE(td.has_value());
    CHECK(*td == doctest::Approx(std::log(2.0 + std::sqrt(2.0))).epsilon(1e-12));
    CHECK(!sudden_death_time(1.0 / 3.0).has_value());
    CHECK(!sudden_death_time(0.5).has_value());
}

TEST_CASE("closed-form criteria for the correlated initial state") {
    const auto pi = CollectiveParams::independent();
    for (double q : {0.3, 0.6, 0.9}) {
        const auto c0 = concurrence_correlated_q(q, pi, 0.0);
        CHECK(c0.c == doctest::Approx(2.0 * std::sqrt(q * (1.0 - q))).epsilon(1e-12));
    }
    // death-time consistency
    const double q = 2.0 / 3.0;
    const double td = *sudden_death_time(q);
    CHECK(std::abs(concurrence_correlated_q(q, pi, td).c) < 1e-6);
    // independent atoms populate both one-photon states equally, and the
    // one-photon criterion stays negative throughout
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
        const auto c = concurrence_correlated_q(q, pi, t);
        CHECK(c.c2 < 0.0);
    }
}

TEST_CASE("numerical zero crossing matches the disentanglement-time formula") {
    const auto pi = CollectiveParams::independent();
    std::vector<double> g;
    for (int i = 0; i <= 40000; ++i) g.push_back(4.0 * i / 40000);
    for (double q : {0.6, 2.0 / 3.0, 0.8, 0.9}) {
        auto criterion = [&](double t) {
            const auto c = concurrence_correlated_q(q, pi, t);
            return std::max(c.c1, c.c2);
        };
        const auto crossings = find_zero_crossings(criterion, g);
        REQUIRE(!crossings.empty());
        CHECK(std::abs(crossings.front() - *sudden_death_time(q)) < 1e-3);
    }
}

TEST_CASE("death and revival roots of the transcendental balance") {
    auto roots = revival_times(0.9);
    REQUIRE(roots.has_value());
    auto [td, tr] = *roots;
    CHECK(td == doctest::Approx(0.6191).epsilon(1e-3));
    CHECK(tr == doctest::Approx(1.5121).epsilon(1e-3));
    const double rhs = std::sqrt((1.0 - 0.9) / 0.9);
    CHECK(std::abs(td * std::exp(-td) - rhs) < 1e-10);
    CHECK(std::abs(tr * std::exp(-tr) - rhs) < 1e-10);
    CHECK(!revival_times(0.5).has_value());
}

TEST_CASE("asymptotic death of the antisymmetric-state entanglement") {
    auto p = CollectiveParams::independent();
    p.gamma12 = 0.9;
    CHECK(second_death_time(0.9, p) ==
          doctest::Approx(std::asinh(20.0 / 3.0)).epsilon(1e-12));
    p.gamma12 = 0.0;
    CHECK(second_death_time(0.9, p) ==
          doctest::Approx(std::asinh(2.0 / 3.0)).epsilon(1e-12));
    p.gamma12 = 1.0;
    CHECK(std::isinf(second_death_time(0.9, p)));
}

TEST_CASE("delayed creation of entanglement from the doubly excited state") {
    const auto g = grid(20.0, 2001);

    // equal populations for independent atoms: no entanglement ever
    const auto none = sudden_birth_trajectory(CollectiveParams::independent(), g);
    CHECK(!none.birth_time.has_value());
    for (double c : none.concurrence) CHECK(c == 0.0);

    // quarter-wavelength separation: birth within the expected window
    const auto p = collective_params(2.0 * M_PI * 0.25, 0.0);
    const auto res = sudden_birth_trajectory(p, g);
    REQUIRE(res.birth_time.has_value());
    CHECK(*res.birth_time > 1.0);
    CHECK(*res.birth_time < 8.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g[k] < 1.0) CHECK(res.concurrence[k] == 0.0);

    // distant atoms never entangle
    const auto far = sudden_birth_trajectory(collective_params(2.0 * M_PI * 3.0, 0.0), g);
    CHECK(!far.birth_time.has_value());
}

TEST_CASE("numerical concurrence along the correlated-q trajectory matches the criteria") {
    const auto p = collective_params(M_PI / 10.0, 0.0);
    const auto g = grid(6.0, 121);
    const auto traj =
        evolve_master(dicke_state(qstate::CorrelatedQ{0.9}), p, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto crit = concurrence_correlated_q(0.9, p, g[k]);
        CHECK(traj.concurrence[k] == doctest::Approx(crit.c).epsilon(1e-7));
    }
}

TEST_CASE("zero-crossing detector refines to the analytic root") {
    auto f = [](double t) { return std::sin(t); };
    std::vector<double> g;
    for (int i = 0; i <= 100; ++i) g.push_back(0.5 + 7.5 * i / 100);
    const auto roots = find_zero_crossings(f, g);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(M_PI).epsilon(1e-8));
    CHECK(roots[1] == doctest::Approx(2.0 * M_PI).epsilon(1e-8));
}
