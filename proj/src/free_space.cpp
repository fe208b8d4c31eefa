#include "entlab/free_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/numeric/odeint.hpp>

namespace entlab::free_space {

namespace {

namespace ode = boost::numeric::odeint;

void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

// (e^{eps t} - 1)/eps, stable through the removable singularity at eps = 0.
double expm1_over(double eps, double t) {
    if (std::abs(eps * t) < 1e-8) return t * (1.0 + 0.5 * eps * t);
    return std::expm1(eps * t) / eps;
}

struct CascadeRates {
    cxd g1, g2, g3, g4;  // decay constants of rho_s4, rho_a4, rho_1s, rho_1a
};

CascadeRates cascade_rates(const CollectiveParams& p) {
    const cxd i{0.0, 1.0};
    CascadeRates r;
    r.g1 = 0.5 * (3.0 * p.gamma + p.gamma12) - i * (p.omega0 - p.omega12);
    r.g2 = 0.5 * (3.0 * p.gamma - p.gamma12) - i * (p.omega0 + p.omega12);
    r.g3 = 0.5 * (p.gamma + p.gamma12) - i * (p.omega0 + p.omega12);
    r.g4 = 0.5 * (p.gamma - p.gamma12) - i * (p.omega0 - p.omega12);
    return r;
}

// State layout for the integrator: ten complex elements as 20 doubles in
// the order {r44, rss, raa, r11, rsa, r14, rs4, ra4, r1s, r1a}.
using OdeState = std::vector<double>;

OdeState pack(const DickeElements& e) {
    OdeState y(20, 0.0);
    auto put = [&y](int k, cxd v) {
        y[2 * k] = v.real();
        y[2 * k + 1] = v.imag();
    };
    put(0, e.r44);
    put(1, e.rss);
    put(2, e.raa);
    put(3, e.r11);
    put(4, e.rsa);
    put(5, e.r14);
    put(6, e.rs4);
    put(7, e.ra4);
    put(8, e.r1s);
    put(9, e.r1a);
    return y;
}

DickeElements unpack(const OdeState& y) {
    auto get = [&y](int k) { return cxd(y[2 * k], y[2 * k + 1]); };
    DickeElements e;
    e.r44 = get(0).real();
    e.rss = get(1).real();
    e.raa = get(2).real();
    e.r11 = get(3).real();
    e.rsa = get(4);
    e.r14 = get(5);
    e.rs4 = get(6);
    e.ra4 = get(7);
    e.r1s = get(8);
    e.r1a = get(9);
    return e;
}

struct MasterRhs {
    CollectiveParams p;
    CascadeRates rates;

    void operator()(const OdeState& y, OdeState& dydt, double /*t*/) const {
        auto get = [&y](int k) { return cxd(y[2 * k], y[2 * k + 1]); };
        auto put = [&dydt](int k, cxd v) {
            dydt[2 * k] = v.real();
            dydt[2 * k + 1] = v.imag();
        };
        const cxd i{0.0, 1.0};
        const double g = p.gamma, g12 = p.gamma12;
        const cxd r44 = get(0), rss = get(1), raa = get(2);
        const cxd rsa = get(4), r14 = get(5);
        const cxd rs4 = get(6), ra4 = get(7), r1s = get(8), r1a = get(9);

        const cxd d44 = -2.0 * g * r44;
        const cxd dss = -(g + g12) * (rss - r44);
        const cxd daa = -(g - g12) * (raa - r44);
        put(0, d44);
        put(1, dss);
        put(2, daa);
        put(3, -(d44 + dss + daa));  // exact floating-point trace closure
        put(4, -(g + 2.0 * i * p.omega12) * rsa);
        put(5, -(g - 2.0 * i * p.omega0) * r14);
        put(6, -rates.g1 * rs4);
        put(7, -rates.g2 * ra4);
        put(8, -rates.g3 * r1s + (g + g12) * rs4);
        put(9, -rates.g4 * r1a - (g - g12) * ra4);
    }
};

} // namespace

CollectiveParams collective_params(double kr12, double mu_dot_r) {
    require(kr12 > 1e-6, "collective_params: kr12 must exceed 1e-6; use the small-kr "
                         "potential for the contact limit");
    require(mu_dot_r >= 0.0 && mu_dot_r <= 1.0, "collective_params: |mu.r| must be in [0, 1]");
    const double x = kr12;
    const double a = 1.0 - mu_dot_r * mu_dot_r;        // transverse projector weight
    const double b = 1.0 - 3.0 * mu_dot_r * mu_dot_r;  // longitudinal weight
    const double sx = std::sin(x), cx = std::cos(x);
    CollectiveParams p;
    p.gamma = 1.0;
    p.gamma12 = 1.5 * (a * sx / x + b * (cx / (x * x) - sx / (x * x * x)));
    p.omega12 = 0.75 * (-a * cx / x + b * (sx / (x * x) + cx / (x * x * x)));
    p.kr12 = kr12;
    p.mu_dot_r = mu_dot_r;
    return p;
}

double small_kr_potential(double kr12, double mu_dot_r) {
    require(kr12 > 0.0 && kr12 < 0.3, "small_kr_potential: valid only for 0 < kr12 < 0.3");
    require(mu_dot_r >= 0.0 && mu_dot_r <= 1.0, "small_kr_potential: |mu.r| must be in [0, 1]");
    return 0.75 * (1.0 - 3.0 * mu_dot_r * mu_dot_r) / (kr12 * kr12 * kr12);
}

DickeElements DickeElements::from_density(const DensityMatrix& rho_dicke) {
    require(rho_dicke.basis() == qstate::Basis::Dicke,
            "DickeElements: state must be given in the Dicke basis");
    require(rho_dicke.dim() == 4, "DickeElements: state must be 4x4");
    DickeElements e;
    const Matrix& m = rho_dicke.matrix();
    e.r11 = m(0, 0).real();
    e.rss = m(1, 1).real();
    e.raa = m(2, 2).real();
    e.r44 = m(3, 3).real();
    e.rsa = m(1, 2);
    e.r14 = m(0, 3);
    e.rs4 = m(1, 3);
    e.ra4 = m(2, 3);
    e.r1s = m(0, 1);
    e.r1a = m(0, 2);
    return e;
}

Matrix DickeElements::to_matrix() const {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = r11;
    m(1, 1) = rss;
    m(2, 2) = raa;
    m(3, 3) = r44;
    m(1, 2) = rsa;
    m(2, 1) = std::conj(rsa);
    m(0, 3) = r14;
    m(3, 0) = std::conj(r14);
    m(1, 3) = rs4;
    m(3, 1) = std::conj(rs4);
    m(2, 3) = ra4;
    m(3, 2) = std::conj(ra4);
    m(0, 1) = r1s;
    m(1, 0) = std::conj(r1s);
    m(0, 2) = r1a;
    m(2, 0) = std::conj(r1a);
    return m;
}

DensityMatrix DickeElements::to_density() const {
    return DensityMatrix(to_matrix(), qstate::Basis::Dicke);
}

std::vector<DensityMatrix> DickeTrajectory::densities() const {
    std::vector<DensityMatrix> out;
    out.reserve(elements.size());
    for (const auto& e : elements) out.push_back(e.to_density());
    return out;
}

ConcurrenceBreakdown dicke_criteria(const DickeElements& e) {
    // Criteria of the Product-basis X pattern, written directly in Dicke
    // elements. rho23_prod = ((rss - raa) + 2i Im(rsa))/2 and the
    // one-photon populations are (rss + raa)/2 +- Re(rsa).
    const double re = e.rsa.real(), im = e.rsa.imag();
    const double p2 = 0.5 * (e.rss + e.raa) + re;
    const double p3 = 0.5 * (e.rss + e.raa) - re;
    ConcurrenceBreakdown out;
    out.c1 = 2.0 * (std::abs(e.r14) - std::sqrt(std::max(0.0, p2 * p3)));
    out.c2 = std::hypot(e.rss - e.raa, 2.0 * im) -
             2.0 * std::sqrt(std::max(0.0, e.r11 * e.r44));
    out.c = std::max({0.0, out.c1, out.c2});
    return out;
}

DickeTrajectory evolve_master(const DensityMatrix& rho0_dicke, const CollectiveParams& p,
                              const std::vector<double>& grid, double abs_tol,
                              double rel_tol) {
    require(!grid.empty() && grid.front() == 0.0,
            "evolve_master: time grid must start at 0");
    require(std::is_sorted(grid.begin(), grid.end()) &&
                std::adjacent_find(grid.begin(), grid.end()) == grid.end(),
            "evolve_master: time grid must be strictly increasing");

    MasterRhs rhs{p, cascade_rates(p)};
    OdeState y = pack(DickeElements::from_density(rho0_dicke));

    DickeTrajectory traj;
    traj.times = grid;
    traj.elements.reserve(grid.size());

    // Extrapolative stepper: at small separations the coherences oscillate
    // for ~1e4 periods at the dipole-dipole frequency, where fixed-order
    // Runge-Kutta pairs accumulate phase error well above the closed-form
    // agreement budget.
    ode::bulirsch_stoer<OdeState> stepper(abs_tol, rel_tol);
    const double fast_scale = std::max({p.gamma, std::abs(p.omega12), std::abs(p.omega0)});
    double dt0 = 0.05 / fast_scale;
    try {
        ode::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), dt0,
                             [&traj](const OdeState& s, double /*t*/) {
                                 traj.elements.push_back(unpack(s));
                             });
    } catch (const std::exception& ex) {
        throw NumericalFailure(std::string("evolve_master: integrator failed: ") + ex.what());
    }

    traj.concurrence.reserve(grid.size());
    const Matrix cob = qstate::change_of_basis(qstate::Basis::Dicke, qstate::Basis::Product);
    for (const auto& e : traj.elements) {
        // General Wootters concurrence of the Product-basis matrix is the
        // authoritative value; the X criteria are diagnostics. The raw
        // snapshot keeps its integration round-off (the trajectory trace
        // invariant is checked against it); the measure is evaluated on
        // the trace-normalized state.
        Matrix m = e.to_matrix();
        m /= m.trace().real();
        const DensityMatrix prod(cob.adjoint() * m * cob, qstate::Basis::Product);
        traj.concurrence.push_back(measures::concurrence(prod));
        const auto crit = dicke_criteria(e);
        traj.c1.push_back(crit.c1);
        traj.c2.push_back(crit.c2);
    }
    return traj;
}

DickeElements analytic_elements(const DickeElements& e0, const CollectiveParams& p, double t) {
    const double g = p.gamma, g12 = p.gamma12;
    const cxd i{0.0, 1.0};
    const CascadeRates rates = cascade_rates(p);
    DickeElements e;
    e.r44 = e0.r44 * std::exp(-2.0 * g * t);
    e.rss = e0.rss * std::exp(-(g + g12) * t) +
            e0.r44 * (g + g12) * expm1_over(g - g12, t) * std::exp(-2.0 * g * t);
    e.raa = e0.raa * std::exp(-(g - g12) * t) +
            e0.r44 * (g - g12) * expm1_over(g + g12, t) * std::exp(-2.0 * g * t);
    e.r11 = 1.0 - e.r44 - e.rss - e.raa +
            (e0.r11 + e0.rss + e0.raa + e0.r44 - 1.0);  // preserve any trace offset
    e.rsa = e0.rsa * std::exp(-(g + 2.0 * i * p.omega12) * t);
    e.r14 = e0.r14 * std::exp(-(g - 2.0 * i * p.omega0) * t);
    e.rs4 = e0.rs4 * std::exp(-rates.g1 * t);
    e.ra4 = e0.ra4 * std::exp(-rates.g2 * t);
    e.r1s = e0.r1s * std::exp(-rates.g3 * t) +
            e0.rs4 * (g + g12) / (g + 2.0 * i * p.omega12) *
                (std::exp(-rates.g3 * t) - std::exp(-rates.g1 * t));
    e.r1a = e0.r1a * std::exp(-rates.g4 * t) +
            e0.ra4 * (g - g12) / (g - 2.0 * i * p.omega12) *
                (std::exp(-rates.g2 * t) - std::exp(-rates.g4 * t));
    return e;
}

DensityMatrix analytic_solution(const DensityMatrix& rho0_dicke, const CollectiveParams& p,
                                double t) {
    require(t >= 0.0, "analytic_solution: time must be non-negative");
    const DickeElements e0 = DickeElements::from_density(rho0_dicke);
    return analytic_elements(e0, p, t).to_density();
}

double concurrence_single_excitation(const CollectiveParams& p, double t) {
    const double sh = std::sinh(p.gamma12 * t);
    const double sn = std::sin(2.0 * p.omega12 * t);
    return std::exp(-p.gamma * t) * std::hypot(sh, sn);
}

DiagonalStates diagonal_states(const DensityMatrix& rho_dicke) {
    require(rho_dicke.basis() == qstate::Basis::Dicke,
            "diagonal_states: state must be given in the Dicke basis");
    const Matrix& m = rho_dicke.matrix();
    // one-photon block only: no two-photon population or cascade coherences
    Matrix off = m;
    off(1, 1) = off(2, 2) = off(0, 0) = 0.0;
    off(1, 2) = off(2, 1) = 0.0;
    if (off.cwiseAbs().maxCoeff() > measures::PATTERN_TOL)
        throw PatternViolation("diagonal_states: matrix is not confined to the "
                               "one-photon {s, a} block");

    const double rss = m(1, 1).real(), raa = m(2, 2).real();
    const cxd rsa = m(1, 2);
    const double mean = 0.5 * (rss + raa);
    const double disc = std::hypot(0.5 * (raa - rss), std::abs(rsa));
    DiagonalStates out;
    out.population_plus = mean + disc;
    out.population_minus = std::max(0.0, mean - disc);

    auto eigvec = [&](double lambda) {
        Vector v = Vector::Zero(4);
        // eigenvector of [[rss, rsa], [rsa*, raa]] in the (s, a) block
        if (std::abs(rsa) < 1e-15 && std::abs(lambda - rss) < std::abs(lambda - raa)) {
            v(1) = 1.0;
        } else if (std::abs(rsa) < 1e-15) {
            v(2) = 1.0;
        } else {
            v(1) = rsa;
            v(2) = cxd(lambda - rss, 0.0);
            v.normalize();
        }
        return v;
    };
    out.state_plus = eigvec(out.population_plus);
    out.state_minus = eigvec(mean - disc);
    if (std::abs(rsa) >= 1e-15) {
        // orthogonal complement within the block
        Vector v = Vector::Zero(4);
        v(1) = -std::conj(out.state_plus(2));
        v(2) = std::conj(out.state_plus(1));
        out.state_minus = v;
    }
    return out;
}

DickeModelPoint dicke_model_trajectory(const DickePopulations& rho0, double t) {
    const double decay = std::exp(-2.0 * t);
    DickeModelPoint out;
    out.populations.r44 = rho0.r44 * decay;
    out.populations.rss = rho0.rss * decay + 2.0 * t * rho0.r44 * decay;
    out.populations.raa = rho0.raa;
    out.populations.r11 =
        1.0 - out.populations.r44 - out.populations.rss - out.populations.raa;
    out.concurrence =
        std::max(0.0, out.populations.rss -
                          2.0 * std::sqrt(std::max(
                                    0.0, out.populations.r11 * out.populations.r44)));
    return out;
}

std::optional<double> sudden_death_time(double q) {
    require(q >= 0.0 && q <= 1.0, "sudden_death_time: q must be in [0, 1]");
    if (q <= 0.5) return std::nullopt;
    return std::log((q + std::sqrt(q * (1.0 - q))) / (2.0 * q - 1.0));
}

ConcurrenceBreakdown concurrence_correlated_q(double q, const CollectiveParams& p, double t) {
    require(q >= 0.0 && q <= 1.0, "concurrence_correlated_q: q must be in [0, 1]");
    const double g = p.gamma, g12 = p.gamma12;
    const double r44 = q * std::exp(-2.0 * g * t);
    const double abs_r14 = std::sqrt(q * (1.0 - q)) * std::exp(-g * t);
    double rss, raa;
    if (g12 == 0.0) {
        rss = raa = q * (1.0 - std::exp(-g * t)) * std::exp(-g * t);
    } else {
        rss = q * (g + g12) * expm1_over(g - g12, t) * std::exp(-2.0 * g * t);
        raa = q * (g - g12) * expm1_over(g + g12, t) * std::exp(-2.0 * g * t);
    }
    const double r11 = 1.0 - r44 - rss - raa;
    ConcurrenceBreakdown out;
    out.c1 = 2.0 * abs_r14 - (rss + raa);
    out.c2 = std::abs(rss - raa) - 2.0 * std::sqrt(std::max(0.0, r11 * r44));
    out.c = std::max({0.0, out.c1, out.c2});
    return out;
}

std::optional<std::pair<double, double>> revival_times(double q) {
    require(q > 0.0 && q < 1.0, "revival_times: q must be in (0, 1)");
    const double rhs = std::sqrt((1.0 - q) / q);
    if (rhs > std::exp(-1.0)) return std::nullopt;
    auto f = [rhs](double t) { return t * std::exp(-t) - rhs; };
    auto bisect = [&f](double lo, double hi) {
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((f(lo) <= 0.0) == (f(mid) <= 0.0))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    double upper = 2.0;
    while (f(upper) > 0.0) upper *= 2.0;
    const double t_d = bisect(0.0, 1.0);
    const double t_r = bisect(1.0, upper);
    return std::make_pair(t_d, t_r);
}

double second_death_time(double q, const CollectiveParams& p) {
    require(q > 0.5 && q <= 1.0, "second_death_time: requires q > 1/2");
    require(p.gamma12 <= p.gamma, "second_death_time: requires gamma12 <= gamma");
    if (p.gamma - p.gamma12 < 1e-15) return std::numeric_limits<double>::infinity();
    const double arg =
        std::sqrt((1.0 - q) / q) * 2.0 * p.gamma / (p.gamma - p.gamma12);
    return std::asinh(arg) / p.gamma;
}

DickePopulations double_excitation_populations(const CollectiveParams& p, double t) {
    const double g = p.gamma, g12 = p.gamma12;
    DickePopulations pops;
    pops.r44 = std::exp(-2.0 * g * t);
    pops.rss = (g + g12) * expm1_over(g - g12, t) * std::exp(-2.0 * g * t);
    pops.raa = (g - g12) * expm1_over(g + g12, t) * std::exp(-2.0 * g * t);
    pops.r11 = 1.0 - pops.r44 - pops.rss - pops.raa;
    return pops;
}

std::vector<double> find_zero_crossings(const std::function<double(double)>& f,
                                        const std::vector<double>& grid) {
    std::vector<double> crossings;
    if (grid.size() < 2) return crossings;
    double prev = f(grid.front());
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double cur = f(grid[k]);
        if ((prev <= 0.0 && cur > 0.0) || (prev > 0.0 && cur <= 0.0)) {
            double lo = grid[k - 1], hi = grid[k];
            double flo = prev;
            for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = f(mid);
                if ((flo <= 0.0) == (fmid <= 0.0)) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
            }
            // only count crossings whose positive side is genuinely positive
            const double pos_side = std::max(prev, cur);
            if (pos_side > 1e-9) crossings.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return crossings;
}

SuddenBirthResult sudden_birth_trajectory(const CollectiveParams& p,
                                          const std::vector<double>& grid) {
    require(!grid.empty(), "sudden_birth_trajectory: empty grid");
    auto criterion = [&p](double t) {
        const DickePopulations pops = double_excitation_populations(p, t);
        return std::abs(pops.rss - pops.raa) -
               2.0 * std::sqrt(std::max(0.0, pops.r11 * pops.r44));
    };
    SuddenBirthResult out;
    out.times = grid;
    out.concurrence.reserve(grid.size());
    for (double t : grid) out.concurrence.push_back(std::max(0.0, criterion(t)));
    // birth = first crossing from non-positive to positive
    double prev = criterion(grid.front());
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double cur = criterion(grid[k]);
        if (prev <= 0.0 && cur > 1e-9) {
            double lo = grid[k - 1], hi = grid[k];
            double flo = prev;
            for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fmid = criterion(mid);
                if ((flo <= 0.0) == (fmid <= 0.0)) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
            }
            out.birth_time = 0.5 * (lo + hi);
            break;
        }
        prev = cur;
    }
    return out;
}

} // namespace entlab::free_space
