#include "entlab/scenario.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "entlab/double_jc.hpp"
#include "entlab/free_space.hpp"
#include "entlab/measures.hpp"
#include "entlab/nonrwa.hpp"
#include "entlab/single_cavity.hpp"

namespace entlab::scenario {

namespace {

namespace fs = free_space;
namespace sc = single_cavity;
namespace jc = double_jc;
namespace ga = gaussian;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

class ArtifactWriter {
public:
    ArtifactWriter(const ScenarioConfig& cfg) : cfg_(cfg) {}

    void write_table(const Table& t) const {
        std::ostringstream out;
        header_lines(out, "# ");
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << t.columns[c];
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << format_number(row[c]);
            out << "\n";
        }
        commit(out.str());
    }

    void write_json(nlohmann::json j) const {
        j["scenario"] = cfg_.scenario;
        j["version"] = VERSION;
        nlohmann::json params;
        for (const auto& [k, v] : cfg_.params) params[k] = v;
        j["params"] = params;
        if (cfg_.timestamp) j["written_at"] = std::time(nullptr);
        commit(j.dump(2) + "\n");
    }

    void write_text(const std::string& body) const {
        std::ostringstream out;
        header_lines(out, "# ");
        out << body;
        commit(out.str());
    }

private:
    void header_lines(std::ostringstream& out, const char* prefix) const {
        out << prefix << "scenario = " << cfg_.scenario << "\n";
        out << prefix << "version = " << VERSION << "\n";
        for (const auto& [k, v] : cfg_.params) out << prefix << k << " = " << v << "\n";
        if (cfg_.timestamp) out << prefix << "written_at = " << std::time(nullptr) << "\n";
    }

    void commit(const std::string& payload) const {
        const std::string path = cfg_.output.empty() ? cfg_.scenario + "." + cfg_.format
                                                     : cfg_.output;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + path + "'");
        f << payload;
    }

    const ScenarioConfig& cfg_;
};

fs::CollectiveParams params_from(const ScenarioConfig& cfg, double default_kr) {
    const double kr = cfg.number("kr12", default_kr);
    const bool mu_perp = cfg.flag("mu_perp", true);
    return fs::collective_params(kr, mu_perp ? 0.0 : cfg.number("mu_dot_r", 0.0));
}

qstate::NamedState named_from(const std::string& name) {
    using namespace qstate;
    if (name == "psi1") return Psi1{};
    if (name == "psi2") return Psi2{};
    if (name == "psi3") return Psi3{};
    if (name == "psi4") return Psi4{};
    if (name == "psi_s") return PsiS{};
    if (name == "psi_a") return PsiA{};
    if (name == "phi_s") return PhiS{};
    if (name == "phi_a") return PhiA{};
    throw ConfigError("unknown initial state '" + name + "'");
}

Table free_space_trajectory_table(const fs::DickeTrajectory& traj) {
    Table t;
    t.columns = {"t",         "rho11",     "rho_ss", "rho_aa", "rho44", "re_rho_sa",
                 "im_rho_sa", "abs_rho14", "C",      "C1",     "C2"};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& e = traj.elements[k];
        t.rows.push_back({traj.times[k], e.r11, e.rss, e.raa, e.r44, e.rsa.real(),
                          e.rsa.imag(), std::abs(e.r14), traj.concurrence[k], traj.c1[k],
                          traj.c2[k]});
    }
    return t;
}

void run_free_space_trajectory(const ScenarioConfig& cfg, const fs::CollectiveParams& p,
                               const qstate::DensityMatrix& rho0_dicke,
                               double default_t_max = 5.0, int default_n = 1001) {
    const double t_max = cfg.number("t_max", default_t_max);
    const int n = cfg.integer("n_points", default_n);
    const auto traj = fs::evolve_master(rho0_dicke, p, linspace(0.0, t_max, n));
    ArtifactWriter(cfg).write_table(free_space_trajectory_table(traj));
}

qstate::DensityMatrix dicke_initial(const qstate::NamedState& s) {
    return qstate::basis_transform(qstate::build_named_state(s), qstate::Basis::Product,
                                   qstate::Basis::Dicke);
}

// ---- individual scenario runners -------------------------------------

void run_fig2(const ScenarioConfig& cfg) {
    const auto p = params_from(cfg, M_PI / 5.0);
    run_free_space_trajectory(cfg, p,
                              dicke_initial(named_from(cfg.text("initial", "psi3"))));
}

void run_fig3(const ScenarioConfig& cfg) {
    const double q = cfg.number("q", 2.0 / 3.0);
    auto p = fs::CollectiveParams::independent();
    run_free_space_trajectory(cfg, p, dicke_initial(qstate::CorrelatedQ{q}));
}

void run_fig5(const ScenarioConfig& cfg) {
    const double q = cfg.number("q", 0.9);
    const double r = cfg.number("r12_over_lambda", 0.05);
    const auto p = fs::collective_params(2.0 * M_PI * r, 0.0);
    run_free_space_trajectory(cfg, p, dicke_initial(qstate::CorrelatedQ{q}), 10.0, 4001);
}

void run_fig6(const ScenarioConfig& cfg) {
    const double q = cfg.number("q", 0.9);
    const double r = cfg.number("r12_over_lambda", 0.05);
    const auto p = fs::collective_params(2.0 * M_PI * r, 0.0);
    const double t_max = cfg.number("t_max", 10.0);
    const int n = cfg.integer("n_points", 2001);
    Table t;
    t.columns = {"t", "C1", "two_photon_coherence", "rho_ss"};
    for (double time : linspace(0.0, t_max, n)) {
        const auto crit = fs::concurrence_correlated_q(q, p, time);
        const double r14 = std::sqrt(q * (1.0 - q)) * std::exp(-time);
        const double rss = q * (p.gamma + p.gamma12) *
                           (std::exp((p.gamma - p.gamma12) * time) - 1.0) /
                           (p.gamma - p.gamma12) * std::exp(-2.0 * time);
        t.rows.push_back({time, crit.c1, 2.0 * r14, rss});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig7(const ScenarioConfig& cfg) {
    const int n_r = cfg.integer("n_r", 60);
    const int n_t = cfg.integer("n_points", 401);
    const double t_max = cfg.number("t_max", 20.0);
    const auto rs = linspace(cfg.number("r_min", 0.05), cfg.number("r_max", 3.0), n_r);
    const auto ts = linspace(0.0, t_max, n_t);
    std::vector<std::vector<double>> cell(n_r);
    parallel_for_indexed(n_r, [&](std::size_t i) {
        const auto p = fs::collective_params(2.0 * M_PI * rs[i], 0.0);
        const auto res = fs::sudden_birth_trajectory(p, ts);
        cell[i] = res.concurrence;
    });
    Table t;
    t.columns = {"r12_over_lambda", "t", "C"};
    for (int i = 0; i < n_r; ++i)
        for (int k = 0; k < n_t; ++k) t.rows.push_back({rs[i], ts[k], cell[i][k]});
    ArtifactWriter(cfg).write_table(t);
}

void run_fig8(const ScenarioConfig& cfg) {
    const double r = cfg.number("r12_over_lambda", 0.25);
    const auto p = fs::collective_params(2.0 * M_PI * r, 0.0);
    const double t_max = cfg.number("t_max", 10.0);
    const int n = cfg.integer("n_points", 1001);
    Table t;
    t.columns = {"t", "rho44", "rho_ss", "rho_aa", "rho11"};
    for (double time : linspace(0.0, t_max, n)) {
        const auto pops = fs::double_excitation_populations(p, time);
        t.rows.push_back({time, pops.r44, pops.rss, pops.raa, pops.r11});
    }
    ArtifactWriter(cfg).write_table(t);
}

// good-cavity scalings in units g0^2/Delta = 1
struct GoodCavity {
    double omega12, delta12;
};
GoodCavity good_cavity_rates(double r12_over_lambda) {
    const auto [g1, g2] = sc::standing_wave_couplings(r12_over_lambda);
    return {g1 * g2, g1 * g1 - g2 * g2};
}

void run_fig11(const ScenarioConfig& cfg) {
    const double disp = cfg.number("displacement", 0.1);
    const double gamma = cfg.number("gamma", 0.0);
    const auto gc = good_cavity_rates(0.5 + disp);
    const double alpha = std::hypot(2.0 * gc.omega12, gc.delta12);
    const int n = cfg.integer("n_points", 1201);
    const double t_max = cfg.number("alpha_t_max", 30.0) / std::max(alpha, 1e-12);
    sc::BlochState b0;
    b0.w = 1.0;
    b0.s = 1.0;
    Table t;
    t.columns = {"alpha_t", "w"};
    for (double time : linspace(0.0, t_max, n)) {
        const auto b = sc::bloch_evolve(b0, gc.omega12, gc.delta12, gamma, time);
        t.rows.push_back({alpha * time, b.w});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig12(const ScenarioConfig& cfg) {
    const double gamma = cfg.number("gamma", 0.1);
    const int n_r = cfg.integer("n_r", 51);
    const int n_t = cfg.integer("n_points", 401);
    const auto rs = linspace(cfg.number("r_min", 0.25), cfg.number("r_max", 0.75), n_r);
    const auto ts = linspace(0.0, cfg.number("t_max", 20.0), n_t);
    sc::BlochState b0;
    b0.w = 1.0;
    b0.s = 1.0;
    Table t;
    t.columns = {"r12_over_lambda", "t", "C"};
    for (double r : rs) {
        const auto gc = good_cavity_rates(r);
        for (double time : ts)
            t.rows.push_back(
                {r, time, sc::concurrence_good_cavity(b0, gc.omega12, gc.delta12, gamma,
                                                      time)});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_diffraction(const ScenarioConfig& cfg, sc::DiffractionInitial initial) {
    const double Gamma = cfg.number("Gamma", 0.0);
    const int n_r = cfg.integer("n_r", 501);
    const std::array<double, 3> taus = {cfg.number("tau1", M_PI / 2.0),
                                        cfg.number("tau2", 7.0 * M_PI / 2.0),
                                        cfg.number("tau3", 31.0 * M_PI / 2.0)};
    Table t;
    t.columns = {"r12_over_lambda", "C_tau1", "C_tau2", "C_tau3"};
    for (double r : linspace(0.0, 0.5, n_r)) {
        std::vector<double> row{r};
        for (double tau : taus)
            row.push_back(sc::diffraction_pattern(initial, r, tau, Gamma));
        t.rows.push_back(row);
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig15(const ScenarioConfig& cfg) {
    const int n = cfg.integer("n_points", 1201);
    const double alpha_t_max = cfg.number("alpha_t_max", 25.0);
    const std::array<double, 3> rs = {0.3, 0.4, 0.5};
    sc::BlochState b0;
    b0.w = 1.0;
    b0.s = 1.0;
    Table t;
    t.columns = {"alpha_t", "abs_rho23_r03", "abs_rho23_r04", "abs_rho23_r05"};
    for (int k = 0; k < n; ++k) {
        std::vector<double> row{alpha_t_max * k / (n - 1)};
        for (double r : rs) {
            const auto gc = good_cavity_rates(r);
            const double alpha = std::max(std::hypot(2.0 * gc.omega12, gc.delta12), 1e-12);
            const double time = row[0] / alpha;
            row.push_back(
                0.5 * sc::concurrence_good_cavity(b0, gc.omega12, gc.delta12, 0.0, time));
        }
        t.rows.push_back(row);
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_bad_cavity_surface(const ScenarioConfig& cfg, sc::BadCavityInitial initial) {
    const double eta = cfg.number("delta_over_kappa", 30.0);
    const int n_r = cfg.integer("n_r", 51);
    const int n_t = cfg.integer("n_points", 301);
    const auto rs = linspace(cfg.number("r_min", 0.25), cfg.number("r_max", 0.75), n_r);
    Table t;
    t.columns = {"r12_over_lambda", "gamma0_t", "C"};
    for (double r : rs) {
        sc::CavityParams p;
        std::tie(p.g1, p.g2) = sc::standing_wave_couplings(r);
        p.kappa = 1.0;
        p.delta = eta;
        const double gamma0 = 1.0 / p.lorentz();  // rate unit g0^2 kappa / (k^2/4+D^2)
        Eigen::Vector4d y0 = Eigen::Vector4d::Zero();
        y0(initial == sc::BadCavityInitial::Psi2 ? 0 : 1) = 1.0;
        for (double tau : linspace(0.0, cfg.number("t_max", 10.0), n_t)) {
            const auto y = sc::bad_cavity_evolve(y0, p, tau / gamma0);
            t.rows.push_back({r, tau, std::hypot(y(2), y(3))});
        }
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig19(const ScenarioConfig& cfg) {
    const double delta = cfg.number("delta", 0.0);
    const int n = cfg.integer("n_points", 1001);
    Table t;
    t.columns = {"gt", "c_AB", "c_ab", "c_Aa", "c_Ab", "c_Ba", "c_Bb"};
    for (double gt : linspace(0.0, cfg.number("gt_max", 10.0), n)) {
        const auto c = jc::resonant_equal_coupling_concurrences(delta, gt);
        t.rows.push_back({gt, c.c_AB, c.c_ab, c.c_Aa, c.c_Ab, c.c_Ba, c.c_Bb});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig20(const ScenarioConfig& cfg) {
    const int n_d = cfg.integer("n_delta", 61);
    const int n_t = cfg.integer("n_points", 301);
    Table t;
    t.columns = {"delta_over_g", "gt", "c_AB"};
    for (double d : linspace(cfg.number("delta_min", -3.0), cfg.number("delta_max", 3.0),
                             n_d))
        for (double gt : linspace(0.0, cfg.number("gt_max", 12.0), n_t))
            t.rows.push_back({d, gt, jc::resonant_equal_coupling_concurrences(d, gt).c_AB});
    ArtifactWriter(cfg).write_table(t);
}

void run_fig21(const ScenarioConfig& cfg) {
    const int n = cfg.integer("n_points", 1001);
    Table t;
    t.columns = {"gt", "c_Aa_resonant", "c_Aa_detuned"};
    jc::AmplitudeVector chi1;
    chi1.sector = jc::Sector::Two;
    chi1.d(0) = 1.0;
    for (double gt : linspace(0.0, cfg.number("gt_max", 10.0), n)) {
        jc::JCParams res;
        const auto c0 = jc::pair_concurrences_double(jc::double_exc_evolve(chi1, res, gt));
        jc::JCParams det;
        det.delta1 = det.delta2 = cfg.number("delta", 1.0);
        const auto c1 = jc::pair_concurrences_double(jc::double_exc_evolve(chi1, det, gt));
        t.rows.push_back({gt, c0.c_Aa, c1.c_Aa});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig22(const ScenarioConfig& cfg) {
    const double alpha = cfg.number("alpha", M_PI / 12.0);
    const double beta = cfg.number("beta", 0.0);
    const int n_d = cfg.integer("n_delta", 41);
    const int n_t = cfg.integer("n_points", 401);
    jc::AmplitudeVector init;
    init.sector = jc::Sector::Two;
    init.d(0) = std::cos(alpha);
    init.d0 = std::exp(qstate::I_UNIT * beta) * std::sin(alpha);
    Table t;
    t.columns = {"delta_over_g", "gt", "c_AB"};
    for (double d : linspace(cfg.number("delta_min", 0.0), cfg.number("delta_max", 3.0),
                             n_d)) {
        jc::JCParams p;
        p.delta1 = p.delta2 = d;
        for (double gt : linspace(0.0, cfg.number("gt_max", 10.0), n_t))
            t.rows.push_back(
                {d, gt, jc::pair_concurrences_double(jc::double_exc_evolve(init, p, gt)).c_AB});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig23(const ScenarioConfig& cfg) {
    const double gamma_over_alpha = cfg.number("gamma_over_alpha", 0.1);
    const int n_r = cfg.integer("n_r", 51);
    const int n_t = cfg.integer("n_points", 301);
    Table t;
    t.columns = {"r12_over_lambda", "alpha_t", "C"};
    for (double r : linspace(cfg.number("r_min", 0.25), cfg.number("r_max", 0.75), n_r)) {
        const auto gc = good_cavity_rates(r);
        const double alpha = std::max(std::hypot(2.0 * gc.omega12, gc.delta12), 1e-12);
        for (double at : linspace(0.0, cfg.number("alpha_t_max", 25.0), n_t))
            t.rows.push_back({r, at,
                              sc::triggered_concurrence(gc.delta12, gc.omega12,
                                                        gamma_over_alpha * alpha,
                                                        at / alpha)});
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_fig24(const ScenarioConfig& cfg) {
    const double theta = cfg.number("theta", 0.0), phi = cfg.number("phi", 0.0);
    const int n_d = cfg.integer("n_delta", 41);
    const int n_t = cfg.integer("n_points", 301);
    Table t;
    t.columns = {"delta_over_g", "gt", "c_AB"};
    for (double d : linspace(cfg.number("delta_min", -2.0), cfg.number("delta_max", 2.0),
                             n_d))
        for (double gt : linspace(0.0, cfg.number("gt_max", 15.0), n_t))
            t.rows.push_back({d, gt, jc::frozen_state_scan(theta, phi, d, gt).c_AB});
    ArtifactWriter(cfg).write_table(t);
}

void run_fig25(const ScenarioConfig& cfg) {
    const double ratio = cfg.number("g_ratio", 2.0);
    const int n = cfg.integer("n_points", 2001);
    Table t;
    t.columns = {"gt", "c_AB", "c_ab", "c_Aa", "c_Ab", "c_Ba", "c_Bb"};
    for (double gt : linspace(0.0, cfg.number("gt_max", 12.0), n)) {
        const auto c = jc::steered_transfer(ratio, gt);
        t.rows.push_back({gt, c.c_AB, c.c_ab, c.c_Aa, c.c_Ab, c.c_Ba, c.c_Bb});
    }
    ArtifactWriter(cfg).write_table(t);
}

nonrwa::NonRwaParams nonrwa_params(const ScenarioConfig& cfg) {
    nonrwa::NonRwaParams p;
    p.g0 = cfg.number("g0_over_omega", 1.0);
    p.d_over_lambda = cfg.number("d_over_lambda", 0.0);
    p.n_half = cfg.number("n_half", 0.5);
    p.kappa = cfg.number("kappa_over_omega", 0.1);
    p.detuning = cfg.number("detuning_over_omega", 0.01);
    // the six-level struct default trips the 1e-6 adequacy gate at peak
    // coupling; the transient tail needs ~40 levels there
    p.n_max = cfg.integer("n_max", 42);
    return p;
}

void run_fig27(const ScenarioConfig& cfg) {
    // default resolution sized for a desktop run; raise n_d/n_points for
    // publication-quality surfaces
    const int n_d = cfg.integer("n_d", 13);
    const int n_t = cfg.integer("n_points", 121);
    const bool rwa = cfg.flag("rwa", false);
    const auto ds = linspace(cfg.number("d_min", 0.0), cfg.number("d_max", 0.45), n_d);
    const auto ts = linspace(0.0, cfg.number("t_max", 6.0), n_t);
    std::vector<std::vector<double>> cells(n_d);
    parallel_for_indexed(n_d, [&](std::size_t i) {
        nonrwa::NonRwaParams p = nonrwa_params(cfg);
        p.d_over_lambda = ds[i];
        const auto psi_s = qstate::named_state_vector(qstate::PsiS{});
        const auto traj = nonrwa::evolve_nonrwa(nonrwa::composite_vacuum_state(psi_s, p), p,
                                                rwa, ts);
        cells[i] = traj.concurrence;
    });
    Table t;
    t.columns = {"d_over_lambda", "omega_t", "C"};
    for (int i = 0; i < n_d; ++i)
        for (int k = 0; k < n_t; ++k) t.rows.push_back({ds[i], ts[k], cells[i][k]});
    ArtifactWriter(cfg).write_table(t);
}

void run_fig28(const ScenarioConfig& cfg) {
    nonrwa::NonRwaParams p = nonrwa_params(cfg);
    const int n = cfg.integer("n_points", 301);
    const bool rwa = cfg.flag("rwa", false);
    const auto ts = linspace(0.0, cfg.number("t_max", 6.0), n);
    const auto psi_s = qstate::named_state_vector(qstate::PsiS{});
    const auto traj =
        nonrwa::evolve_nonrwa(nonrwa::composite_vacuum_state(psi_s, p), p, rwa, ts);
    Table t;
    t.columns = {"t", "C", "rho44", "top_fock_pop"};
    for (int k = 0; k < n; ++k)
        t.rows.push_back({traj.times[k], traj.concurrence[k], traj.rho44[k],
                          traj.top_fock_pop[k]});
    ArtifactWriter(cfg).write_table(t);
}

// Generic single-cavity scan honoring the module's config-key interface.
void run_cavity_scan(const ScenarioConfig& cfg) {
    const std::string scheme = cfg.text("scheme", "good");
    const double r = cfg.number("r12_over_lambda", 0.35);
    const std::string initial = cfg.text("initial", "psi2");
    const double tau_max = cfg.number("tau_max", 20.0);
    const int n = cfg.integer("n_points", 801);
    Table t;
    t.columns = {"tau", "C"};
    if (scheme == "good") {
        const double gamma = cfg.number("gamma", 0.0);
        const auto gc = good_cavity_rates(r);
        sc::BlochState b0;
        b0.s = 1.0;
        if (initial == "psi2")
            b0.w = 1.0;
        else if (initial == "psi3")
            b0.w = -1.0;
        else if (initial == "psi_s")
            b0.u = 1.0;
        else
            throw ConfigError("cavity_scan: good-cavity initial must be psi2, psi3 or psi_s");
        for (double tau : linspace(0.0, tau_max, n))
            t.rows.push_back({tau, sc::concurrence_good_cavity(b0, gc.omega12, gc.delta12,
                                                               gamma, tau)});
    } else if (scheme == "bad") {
        sc::CavityParams p;
        std::tie(p.g1, p.g2) = sc::standing_wave_couplings(r);
        p.kappa = 1.0;
        p.delta = cfg.number("delta_over_kappa", 30.0);
        const double gamma0 = 1.0 / p.lorentz();
        if (initial == "psi2" || initial == "psi3") {
            Eigen::Vector4d y0 = Eigen::Vector4d::Zero();
            y0(initial == "psi2" ? 0 : 1) = 1.0;
            for (double tau : linspace(0.0, tau_max, n)) {
                const auto y = sc::bad_cavity_evolve(y0, p, tau / gamma0);
                t.rows.push_back({tau, std::hypot(y(2), y(3))});
            }
        } else if (initial == "psi4") {
            const auto rho0 = qstate::build_named_state(qstate::Psi4{});
            for (double tau : linspace(0.0, tau_max, n)) {
                const auto rho = sc::evolve_full(rho0, p, tau / gamma0);
                t.rows.push_back({tau, measures::concurrence(rho)});
            }
        } else {
            throw ConfigError("cavity_scan: bad-cavity initial must be psi2, psi3 or psi4");
        }
    } else {
        throw ConfigError("cavity_scan: scheme must be good or bad");
    }
    ArtifactWriter(cfg).write_table(t);
}

// Generic double-cavity scan honoring the module's config-key interface.
void run_jc_scan(const ScenarioConfig& cfg) {
    const std::string sector = cfg.text("sector", "one");
    const std::string initial = cfg.text("initial", sector == "one" ? "bell" : "chi1");
    const double ratio = cfg.number("g_ratio", 1.0);
    jc::JCParams p;
    p.g1 = 2.0 / (1.0 + ratio);
    p.g2 = 2.0 * ratio / (1.0 + ratio);
    p.delta1 = cfg.number("delta1", 0.0);
    p.delta2 = cfg.number("delta2", 0.0);
    const int n = cfg.integer("n_points", 1001);
    const double gt_max = cfg.number("gt_max", 10.0);
    Table t;
    t.columns = {"t", "c_AB", "c_ab", "c_Aa", "c_Ab", "c_Ba", "c_Bb"};
    for (double gt : linspace(0.0, gt_max, n)) {
        jc::PairConcurrences c;
        if (sector == "one") {
            jc::AmplitudeVector d0;
            d0.sector = jc::Sector::One;
            if (initial == "bell") {
                d0.d(0) = d0.d(1) = std::sqrt(0.5);
            } else if (initial == "uniform") {
                d0 = jc::frozen_initial(cfg.number("theta", 0.0), cfg.number("phi", 0.0));
            } else {
                throw ConfigError("jc_scan: one-excitation initial must be bell or uniform");
            }
            c = jc::pair_concurrences_single(jc::single_exc_evolve(d0, p, gt));
        } else if (sector == "two") {
            jc::AmplitudeVector d0;
            d0.sector = jc::Sector::Two;
            if (initial == "chi1") {
                d0.d(0) = 1.0;
            } else if (initial == "chi_sd") {
                const double alpha = cfg.number("alpha", M_PI / 12.0);
                const double beta = cfg.number("beta", 0.0);
                d0.d(0) = std::cos(alpha);
                d0.d0 = std::exp(qstate::I_UNIT * beta) * std::sin(alpha);
            } else {
                throw ConfigError("jc_scan: two-excitation initial must be chi1 or chi_sd");
            }
            c = jc::pair_concurrences_double(jc::double_exc_evolve(d0, p, gt));
        } else {
            throw ConfigError("jc_scan: sector must be one or two");
        }
        t.rows.push_back({gt, c.c_AB, c.c_ab, c.c_Aa, c.c_Ab, c.c_Ba, c.c_Bb});
    }
    ArtifactWriter(cfg).write_table(t);
}

// Time series of the nullifier variances along the pulse sequence,
// assembled from the public covariance primitives.
void run_cluster_series(const ScenarioConfig& cfg, ga::Protocol protocol, ga::Graph graph,
                        double r, double kappa, double beta, double tau) {
    const int per_step = cfg.integer("n_points", 160);
    const auto steps = ga::pulse_schedule(protocol, r);
    const auto cavity = ga::protocol_cavity_modes(protocol);
    const auto collective = ga::protocol_collective_modes(protocol);
    auto state = ga::CovarianceState::vacuum(ga::protocol_registry(protocol).count());

    Table t;
    t.columns = {"kappa_t"};
    for (const auto& nv : ga::cluster_variances(state.restricted(collective), graph))
        t.columns.push_back(nv.name);

    double elapsed = 0.0;
    auto record = [&] {
        std::vector<double> row{elapsed};
        for (const auto& nv : ga::cluster_variances(state.restricted(collective), graph))
            row.push_back(nv.value);
        t.rows.push_back(row);
    };
    record();
    for (const auto& st : steps) {
        const auto h = ga::build_step_hamiltonian(protocol, st, beta);
        const auto [a, d] = ga::drift_and_diffusion(h, kappa, cavity);
        const double dt = tau / kappa / per_step;
        for (int k = 0; k < per_step; ++k) {
            state = ga::evolve_covariance(state, a, d, dt).state;
            elapsed += dt * kappa;
            record();
        }
    }
    ArtifactWriter(cfg).write_table(t);
}

void run_cluster(const ScenarioConfig& cfg, ga::Protocol protocol, ga::Graph graph) {
    const double xi = cfg.number("xi", 1.0);
    const double r = cfg.number("r", std::tanh(xi));
    const double kappa = cfg.number("kappa", 1.0);
    const double beta = cfg.number("beta_scale", 5.0 * kappa);
    const double tau = cfg.number("tau_per_step", 4.0);

    if (cfg.format == "csv") {
        run_cluster_series(cfg, protocol, graph, r, kappa, beta, tau);
        return;
    }
    const auto target = ga::target_state(protocol, std::atanh(r));
    const auto run = ga::run_protocol(protocol, r, kappa, beta, tau);

    nlohmann::json j;
    j["r"] = r;
    j["xi"] = std::atanh(r);
    j["kappa"] = kappa;
    j["beta_scale"] = beta;
    j["tau_per_step"] = tau;
    auto vars = [&](const ga::CovarianceState& s) {
        nlohmann::json v;
        for (const auto& nv : ga::cluster_variances(s, graph)) v[nv.name] = nv.value;
        return v;
    };
    j["target_variances"] = vars(target);
    j["protocol_variances"] = vars(run.collective);
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : run.steps) {
        nlohmann::json sj;
        sj["lyapunov_residual"] = st.lyapunov_residual;
        sj["unstable"] = st.unstable;
        std::vector<std::vector<double>> eig;
        for (Eigen::Index k = 0; k < st.drift_eigenvalues.size(); ++k)
            eig.push_back({st.drift_eigenvalues(k).real(), st.drift_eigenvalues(k).imag()});
        sj["drift_eigenvalues"] = eig;
        steps.push_back(sj);
    }
    j["steps"] = steps;
    std::vector<std::vector<double>> sigma;
    for (Eigen::Index a = 0; a < run.collective.sigma.rows(); ++a) {
        sigma.emplace_back();
        for (Eigen::Index b = 0; b < run.collective.sigma.cols(); ++b)
            sigma.back().push_back(run.collective.sigma(a, b));
    }
    j["final_covariance"] = sigma;
    ArtifactWriter(cfg).write_json(j);
}

void run_ensemble_single(const ScenarioConfig& cfg) {
    const double r = cfg.number("r", std::tanh(1.0));
    const double kappa = cfg.number("kappa", 1.0);
    const double beta = cfg.number("beta_scale", 5.0 * kappa);
    const double tau = cfg.number("tau_per_step", 8.0);
    const double xi = std::atanh(r);

    const auto run = ga::run_protocol(ga::Protocol::SingleEnsemble12, r, kappa, beta, tau);
    const auto& s = run.collective;  // (C0k, C2k, C-2k)
    auto unit = [](int k, int n) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
        v(k) = 1.0;
        return v;
    };
    nlohmann::json j;
    j["xi"] = xi;
    j["V_q_C0k"] = s.variance(unit(0, 3));
    j["V_p_C0k"] = s.variance(unit(1, 3));
    Eigen::VectorXd qm = Eigen::VectorXd::Zero(6), qp = Eigen::VectorXd::Zero(6);
    qm(2) = 1.0;
    qm(4) = -1.0;
    qp(2) = 1.0;
    qp(4) = 1.0;
    j["V_q_minus"] = s.variance(qm);
    j["V_q_plus"] = s.variance(qp);
    j["target_V_q_C0k"] = 0.5 * std::exp(-2.0 * xi);
    j["target_V_p_C0k"] = 0.5 * std::exp(2.0 * xi);
    j["target_epr"] = std::exp(-2.0 * xi);
    ArtifactWriter(cfg).write_json(j);
}

void run_ensemble_four(const ScenarioConfig& cfg) {
    const double r = cfg.number("r", 0.5);
    const double kappa = cfg.number("kappa", 1.0);
    const double beta = cfg.number("beta_scale", 5.0 * kappa);
    const double tau = cfg.number("tau_per_step", 8.0);
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    const double xi = std::atanh(r) / golden;

    const auto run = ga::run_protocol(ga::Protocol::FourMode12, r, kappa, beta, tau);
    const auto target = ga::target_state(ga::Protocol::FourMode12, xi);
    nlohmann::json j;
    j["xi"] = xi;
    j["max_sigma_deviation"] =
        (run.collective.sigma - target.sigma).cwiseAbs().maxCoeff();
    std::vector<std::vector<double>> sigma;
    for (Eigen::Index a = 0; a < run.collective.sigma.rows(); ++a) {
        sigma.emplace_back();
        for (Eigen::Index b = 0; b < run.collective.sigma.cols(); ++b)
            sigma.back().push_back(run.collective.sigma(a, b));
    }
    j["final_covariance"] = sigma;
    j["uncertainty_min_eig"] = run.collective.uncertainty_min_eig();
    ArtifactWriter(cfg).write_json(j);
}

void run_tables(const ScenarioConfig& cfg, ga::Protocol protocol) {
    const double r = cfg.number("r", 0.5);
    ArtifactWriter(cfg).write_text(schedule_csv(protocol, r));
}

struct Runner {
    ScenarioInfo info;
    std::function<void(const ScenarioConfig&)> fn;
};

const std::vector<Runner>& runners() {
    static const std::vector<std::string> common = {"output", "format", "timestamp"};
    auto keys = [](std::initializer_list<std::string> extra) {
        std::vector<std::string> k = common;
        k.insert(k.end(), extra.begin(), extra.end());
        return k;
    };
    static const std::vector<Runner> table = {
        {{"fig2", "free space: transient entanglement from one excited atom",
          keys({"kr12", "mu_perp", "mu_dot_r", "initial", "t_max", "n_points"})},
         run_fig2},
        {{"fig3", "independent atoms: sudden death of a correlated two-photon state",
          keys({"q", "t_max", "n_points"})},
         run_fig3},
        {{"fig5", "interacting atoms: death and revival of entanglement",
          keys({"q", "r12_over_lambda", "t_max", "n_points"})},
         run_fig5},
        {{"fig6", "revival criteria: C1, two-photon coherence and rho_ss",
          keys({"q", "r12_over_lambda", "t_max", "n_points"})},
         run_fig6},
        {{"fig7", "sudden birth surface over atomic separation",
          keys({"r_min", "r_max", "n_r", "t_max", "n_points"})},
         run_fig7},
        {{"fig8", "populations of the doubly-excited decay at quarter-wavelength "
                  "separation",
          keys({"r12_over_lambda", "t_max", "n_points"})},
         run_fig8},
        {{"fig11", "good cavity: Bloch inversion for displaced atom",
          keys({"displacement", "gamma", "alpha_t_max", "n_points"})},
         run_fig11},
        {{"fig12", "good cavity: concurrence surface over time and position",
          keys({"gamma", "r_min", "r_max", "n_r", "t_max", "n_points"})},
         run_fig12},
        {{"fig13", "entanglement diffraction pattern, separable start",
          keys({"Gamma", "n_r", "tau1", "tau2", "tau3"})},
         [](const ScenarioConfig& c) { run_diffraction(c, sc::DiffractionInitial::Psi3); }},
        {{"fig14", "entanglement diffraction pattern, symmetric-state start",
          keys({"Gamma", "n_r", "tau1", "tau2", "tau3"})},
         [](const ScenarioConfig& c) { run_diffraction(c, sc::DiffractionInitial::PsiS); }},
        {{"fig15", "good cavity: coherence magnitude for three positions",
          keys({"alpha_t_max", "n_points"})},
         run_fig15},
        {{"fig16", "bad cavity: concurrence surface, one-photon start on atom 2",
          keys({"delta_over_kappa", "r_min", "r_max", "n_r", "t_max", "n_points"})},
         [](const ScenarioConfig& c) {
             run_bad_cavity_surface(c, sc::BadCavityInitial::Psi2);
         }},
        {{"fig17", "bad cavity: concurrence surface, one-photon start on atom 1",
          keys({"delta_over_kappa", "r_min", "r_max", "n_r", "t_max", "n_points"})},
         [](const ScenarioConfig& c) {
             run_bad_cavity_surface(c, sc::BadCavityInitial::Psi3);
         }},
        {{"fig19", "double cavity: six pair concurrences at resonance",
          keys({"delta", "gt_max", "n_points"})},
         run_fig19},
        {{"fig20", "double cavity: atom-atom concurrence over time and detuning",
          keys({"delta_min", "delta_max", "n_delta", "gt_max", "n_points"})},
         run_fig20},
        {{"fig21", "double cavity: atom-field entanglement, two excitations",
          keys({"delta", "gt_max", "n_points"})},
         run_fig21},
        {{"fig22", "double cavity: sudden death of the correlated superposition and its "
                   "removal by detuning",
          keys({"alpha", "beta", "delta_min", "delta_max", "n_delta", "gt_max",
                "n_points"})},
         run_fig22},
        {{"fig23", "single cavity: triggered evolution of frozen entanglement",
          keys({"gamma_over_alpha", "r_min", "r_max", "n_r", "alpha_t_max", "n_points"})},
         run_fig23},
        {{"fig24", "double cavity: triggered evolution of the uniform superposition",
          keys({"theta", "phi", "delta_min", "delta_max", "n_delta", "gt_max",
                "n_points"})},
         run_fig24},
        {{"fig25", "double cavity: steered entanglement transfer",
          keys({"g_ratio", "gt_max", "n_points"})},
         run_fig25},
        {{"fig27", "beyond RWA: sudden death surface over atomic distance",
          keys({"g0_over_omega", "d_min", "d_max", "n_d", "kappa_over_omega",
                "detuning_over_omega", "n_half", "n_max", "rwa", "t_max", "n_points"})},
         run_fig27},
        {{"fig28", "beyond RWA: two-photon population growth at the antinode",
          keys({"g0_over_omega", "d_over_lambda", "kappa_over_omega",
                "detuning_over_omega", "n_half", "n_max", "rwa", "t_max", "n_points"})},
         run_fig28},
        {{"cluster_linear", "linear cluster state: target and protocol nullifiers",
          keys({"xi", "r", "kappa", "beta_scale", "tau_per_step", "n_points"})},
         [](const ScenarioConfig& c) {
             run_cluster(c, ga::Protocol::Linear13, ga::Graph::Linear);
         }},
        {{"cluster_square", "square cluster state: target and protocol nullifiers",
          keys({"xi", "r", "kappa", "beta_scale", "tau_per_step", "n_points"})},
         [](const ScenarioConfig& c) {
             run_cluster(c, ga::Protocol::Square13, ga::Graph::Square);
         }},
        {{"cluster_tshape", "T-shape cluster state: target and protocol nullifiers",
          keys({"xi", "r", "kappa", "beta_scale", "tau_per_step", "n_points"})},
         [](const ScenarioConfig& c) {
             run_cluster(c, ga::Protocol::Tshape13, ga::Graph::Tshape);
         }},
        {{"ensemble_single", "ring cavity, one ensemble: squeezed collective modes",
          keys({"r", "kappa", "beta_scale", "tau_per_step"})},
         run_ensemble_single},
        {{"ensemble_four", "ring cavity, two ensembles: four-mode squeezed state",
          keys({"r", "kappa", "beta_scale", "tau_per_step"})},
         run_ensemble_four},
        {{"cavity_scan", "single cavity: concurrence trajectory for either regime",
          keys({"scheme", "r12_over_lambda", "delta_over_kappa", "gamma", "initial",
                "tau_max", "n_points"})},
         run_cavity_scan},
        {{"jc_scan", "double cavity: six pair concurrences for either excitation sector",
          keys({"sector", "initial", "g_ratio", "delta1", "delta2", "theta", "phi",
                "alpha", "beta", "gt_max", "n_points"})},
         run_jc_scan},
        {{"tables_linear", "pulse schedule for the linear cluster protocol", keys({"r"})},
         [](const ScenarioConfig& c) { run_tables(c, ga::Protocol::Linear13); }},
        {{"tables_square", "pulse schedule for the square cluster protocol", keys({"r"})},
         [](const ScenarioConfig& c) { run_tables(c, ga::Protocol::Square13); }},
        {{"tables_tshape", "pulse schedule for the T-shape cluster protocol", keys({"r"})},
         [](const ScenarioConfig& c) { run_tables(c, ga::Protocol::Tshape13); }},
    };
    return table;
}

} // namespace

ScenarioConfig ScenarioConfig::from_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (key == "scenario")
            cfg.scenario = value;
        else if (key == "output")
            cfg.output = value;
        else if (key == "format")
            cfg.format = value;
        else if (key == "timestamp")
            cfg.timestamp = (value == "true" || value == "1" || value == "on");
        else if (cfg.params.count(key))
            throw ConfigError("duplicate key '" + key + "'");
        else
            cfg.params[key] = value;
    }
    if (cfg.scenario.empty()) throw ConfigError("missing 'scenario' key");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str());
}

double ScenarioConfig::number(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + it->second + "'");
    }
}

int ScenarioConfig::integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw ConfigError("key '" + key + "': expected an integer");
    return static_cast<int>(v);
}

bool ScenarioConfig::flag(const std::string& key, bool fallback) const {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "on") return true;
    if (it->second == "false" || it->second == "0" || it->second == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean");
}

std::string ScenarioConfig::text(const std::string& key, const std::string& fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

const std::vector<ScenarioInfo>& catalog() {
    static const std::vector<ScenarioInfo> infos = [] {
        std::vector<ScenarioInfo> v;
        for (const auto& r : runners()) v.push_back(r.info);
        return v;
    }();
    return infos;
}

std::string list_scenarios() {
    std::ostringstream out;
    for (const auto& info : catalog()) {
        out << info.name << "  -  " << info.summary << "\n    keys:";
        for (const auto& k : info.keys) out << " " << k;
        out << "\n";
    }
    return out.str();
}

void run(const ScenarioConfig& config) {
    for (const auto& r : runners()) {
        if (r.info.name != config.scenario) continue;
        for (const auto& [k, v] : config.params) {
            if (std::find(r.info.keys.begin(), r.info.keys.end(), k) == r.info.keys.end())
                throw ConfigError("scenario '" + config.scenario + "': unknown key '" + k +
                                  "'");
        }
        r.fn(config);
        return;
    }
    throw ConfigError("unknown scenario '" + config.scenario + "'");
}

std::optional<gaussian::Protocol> protocol_from_string(const std::string& name) {
    using P = gaussian::Protocol;
    for (P p : {P::SingleEnsemble12, P::FourMode12, P::Linear13, P::Square13, P::Tshape13})
        if (gaussian::to_string(p) == name) return p;
    return std::nullopt;
}

std::string schedule_csv(gaussian::Protocol protocol, double r) {
    const auto steps = gaussian::pulse_schedule(protocol, r);
    std::ostringstream out;
    out << "step,duration_kappa,direction,ensemble,rabi_u,phase_u,rabi_s,phase_s\n";
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& st = steps[s];
        for (std::size_t m = 0; m < st.rabi_u.size(); ++m) {
            out << (s + 1) << "," << format_number(st.duration) << ","
                << (st.direction == gaussian::Direction::Clockwise ? "clockwise"
                                                                   : "anticlockwise")
                << "," << (m + 1) << "," << format_number(st.rabi_u[m]) << ","
                << format_number(st.phase_u[m]) << "," << format_number(st.rabi_s[m]) << ","
                << format_number(st.phase_s[m]) << "\n";
        }
    }
    return out.str();
}

void parallel_for_indexed(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("ENTLAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) workers = static_cast<unsigned>(v);
    }
    workers = std::max(1u, std::min<unsigned>(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace entlab::scenario
