// Release gate: one pass/fail line per criterion, nonzero exit on any failure.
// Takes the CLI binary path as argv[1] for the byte-stability criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sgcis/beam_sim.hpp"
#include "sgcis/cis_analysis.hpp"
#include "sgcis/errors.hpp"
#include "sgcis/field_model.hpp"
#include "sgcis/quadrature.hpp"
#include "sgcis/spin_algebra.hpp"
#include "sgcis/trajectory.hpp"

using namespace sgcis;

namespace {

std::string g_sgsim_path;
std::vector<std::string> g_notes;

void note(const std::string& text) { g_notes.push_back(text); }

bool expect(bool ok, const std::string& what) {
    if (!ok) note("failed: " + what);
    return ok;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- criterion 1 -----------------------------------------------------------
// Sampled misclassification rates against the quadrature beam average and the
// quarter-ratio-squared closed form, spin 1, ratio 0.25, b = 4a, N = 1e5.
bool sampled_rates_match_the_averaged_splitting_law() {
    bool ok = true;
    const Spin s = Spin::from_twice(2);
    const struct {
        int twice_m;
        double closed_form;
    } cases[] = {{0, 0.03125}, {2, 0.015625}, {-2, 0.015625}};

    for (const auto& c : cases) {
        const double quad =
            1.0 - mean_diagonal_probability(s, c.twice_m, 0.25, AverageMethod::quadrature);
        ok &= expect(std::abs(quad - c.closed_form) <= 0.10 * c.closed_form,
                     "quadrature rate " + fmt(quad) + " further than 10% from closed form " +
                         fmt(c.closed_form));

        BeamConfig cfg;
        cfg.spin = s;
        cfg.twice_m_lab = c.twice_m;
        cfg.reduced = ReducedParams{4.0, 0.25, 1.0};
        cfg.n_particles = 100000;
        cfg.seed = 12345;
        const SimulationResult res = run_simulation(cfg, 1);
        const long used = cfg.n_particles - res.stats.rejected;
        const double sigma = std::sqrt(quad * (1.0 - quad) / used);
        ok &= expect(std::abs(res.stats.misclassification_rate - quad) <= 3.0 * sigma,
                     "MC rate " + fmt(res.stats.misclassification_rate) +
                         " further than 3 sigma from quadrature " + fmt(quad));
    }
    return ok;
}

// --- criterion 2 -----------------------------------------------------------
// Beam-averaged diagonal probabilities on the standard ratio grid: start at
// unity, decay monotonically, and respect the projection-flip symmetry.
bool averaged_probabilities_decay_monotonically_from_unity() {
    bool ok = true;
    const Spin s = Spin::from_twice(2);
    const std::vector<double> ratios = {0.01, 0.05, 0.1, 0.25, 0.5, 1.0};

    std::vector<double> p_top, p_mid;
    for (const double r : ratios) {
        p_top.push_back(mean_diagonal_probability(s, 2, r, AverageMethod::quadrature));
        p_mid.push_back(mean_diagonal_probability(s, 0, r, AverageMethod::quadrature));
        const double p_bot = mean_diagonal_probability(s, -2, r, AverageMethod::quadrature);
        ok &= expect(std::abs(p_top.back() - p_bot) < 1e-12,
                     "projection-flip asymmetry " + fmt(std::abs(p_top.back() - p_bot)) +
                         " at ratio " + fmt(r));
    }
    ok &= expect(std::abs(p_top.front() - 1.0) < 1e-3,
                 "p(1,1) at ratio 0.01 is " + fmt(p_top.front()));
    ok &= expect(std::abs(p_mid.front() - 1.0) < 1e-3,
                 "p(0,0) at ratio 0.01 is " + fmt(p_mid.front()));
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        ok &= expect(p_top[i] <= p_top[i - 1],
                     "p(1,1) rises between ratios " + fmt(ratios[i - 1]) + " and " +
                         fmt(ratios[i]));
        ok &= expect(p_mid[i] <= p_mid[i - 1],
                     "p(0,0) rises between ratios " + fmt(ratios[i - 1]) + " and " +
                         fmt(ratios[i]));
    }
    return ok;
}

// --- criterion 3 -----------------------------------------------------------
// Correction operator over four spins and ten precession phases: negligible
// off-diagonal part, diagonal proportional to the universal shape factor, and
// agreement with an independent dense Riemann evaluation.
bool correction_operator_is_diagonal_with_the_universal_shape() {
    bool ok = true;
    const std::vector<int> twice_spins = {1, 2, 3, 4};
    std::vector<double> thetas;
    for (int j = 1; j <= 10; ++j) thetas.push_back(0.37 * M_PI * j);

    for (const int twice_i : twice_spins) {
        const Spin s = Spin::from_twice(twice_i);
        std::vector<DeltaMatrix> deltas;
        for (const double theta : thetas) {
            EvolutionParams p;
            p.tf = theta;
            deltas.push_back(delta_numeric(p, s));
            const DeltaMatrix& d = deltas.back();
            ok &= expect(d.max_offdiagonal() < 1e-10 * d.norm(),
                         "off-diagonal " + fmt(d.max_offdiagonal()) + " vs norm " +
                             fmt(d.norm()) + " at 2I=" + std::to_string(twice_i) +
                             " theta=" + fmt(theta));
        }

        double shape_sq = 0.0;
        double scale = 0.0;
        for (const DeltaMatrix& d : deltas) {
            const double f = delta_shape_factor(d.theta);
            shape_sq += f * f;
            scale = std::max(scale, d.norm());
        }
        double worst = 0.0;
        for (int k = 0; k < s.dim(); ++k) {
            double cross = 0.0;
            for (const DeltaMatrix& d : deltas)
                cross += d.matrix(k, k).real() * delta_shape_factor(d.theta);
            const double fitted = cross / shape_sq;
            for (const DeltaMatrix& d : deltas)
                worst = std::max(worst, std::abs(d.matrix(k, k).real() -
                                                 fitted * delta_shape_factor(d.theta)));
        }
        ok &= expect(worst < 1e-6 * scale, "shape-factor fit residual " + fmt(worst / scale) +
                                               " at 2I=" + std::to_string(twice_i));
    }

    // Dense-midpoint cross-check; node counts grow with the phase range the
    // oracle must resolve (its error scales as (m_max*theta/n)^2).
    const struct {
        int twice_i;
        double theta;
        int nodes;
    } oracle_cases[] = {{1, M_PI, 2000},          {2, M_PI, 2000}, {3, 0.37 * M_PI, 3000},
                        {3, M_PI, 3000},          {4, M_PI, 4000}, {4, 0.37 * M_PI, 4000}};
    for (const auto& c : oracle_cases) {
        const Spin s = Spin::from_twice(c.twice_i);
        EvolutionParams p;
        p.tf = c.theta;
        const DeltaMatrix d = delta_numeric(p, s, 1e-10);
        const Matrix reference = oracles::correction_by_riemann(s, c.theta, c.nodes);
        const double gap = (d.matrix - reference).cwiseAbs().maxCoeff();
        ok &= expect(gap < 1e-6 * d.norm(),
                     "Riemann-oracle gap " + fmt(gap / d.norm()) + " at 2I=" +
                         std::to_string(c.twice_i) + " theta=" + fmt(c.theta));
    }
    return ok;
}

// --- criterion 4 -----------------------------------------------------------
// Operator eigenvectors reproduce the field-aligned projection states at 50
// random frame angles per spin.
bool operator_eigenvectors_are_the_projection_states() {
    bool ok = true;
    std::mt19937_64 gen(2026);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (const int twice_i : {1, 2, 3, 4}) {
        const Spin s = Spin::from_twice(twice_i);
        EvolutionParams p;
        p.tf = 0.5 * M_PI;
        const DeltaMatrix delta = delta_numeric(p, s);
        for (int rep = 0; rep < 50; ++rep) {
            const double beta = angle(gen);
            const CISBasis basis = find_cis(delta, s, beta);
            const WignerSmallD d = wigner_small_d(s, beta);
            for (int k = 0; k < s.dim(); ++k) {
                Vector target(s.dim());
                for (int j = 0; j < s.dim(); ++j) target[j] = d.matrix(j, k);
                const double overlap =
                    std::abs(basis.states[static_cast<std::size_t>(k)].amplitudes.dot(target));
                ok &= expect(overlap >= 1.0 - 1e-10,
                             "overlap " + fmt(overlap) + " at 2I=" + std::to_string(twice_i) +
                                 " beta=" + fmt(beta));
                if (!ok) return ok;
            }
        }
    }
    return ok;
}

// --- criterion 5 -----------------------------------------------------------
// Integrator vs closed form on the full grid, fourth-order step convergence,
// and collinearity of all deflections with the field zero.
bool integrator_and_closed_form_trajectories_coincide() {
    bool ok = true;
    const Spin s = Spin::from_twice(2);
    KinematicParams k;
    k.tf = 2.0;
    k.td = 3.0;
    k.field = LinearSGField::make(1.0, 0.25);
    const double b = deflection_scale(k);

    const std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
    double worst = 0.0;
    for (const double x0 : grid)
        for (const double z0 : grid)
            for (const int twice_m : {2, 0, -2}) {
                const TrajectorySolution exact = analytic_trajectory(k, s, x0, z0, twice_m);
                const SpinState cis =
                    rotated_eigenstate(wigner_small_d(s, exact.beta), s, twice_m);
                const TrajectorySolution ode = integrate_trajectory(k, s, x0, z0, cis, 0.01);
                worst = std::max(worst, std::hypot(ode.at_detector.x - exact.at_detector.x,
                                                   ode.at_detector.z - exact.at_detector.z));
            }
    ok &= expect(worst < 1e-8 * b, "grid position error " + fmt(worst / b) + " in units of b");

    // Step halving on the position error of a deflected branch.
    auto position_error = [&](double dt) {
        const TrajectorySolution exact = analytic_trajectory(k, s, 1.0, 0.0, 2);
        const SpinState cis = rotated_eigenstate(wigner_small_d(s, exact.beta), s, 2);
        const TrajectorySolution ode = integrate_trajectory(k, s, 1.0, 0.0, cis, dt);
        return std::hypot(ode.at_detector.x - exact.at_detector.x,
                          ode.at_detector.z - exact.at_detector.z);
    };
    const double coarse = position_error(0.02);
    const double fine = position_error(0.01);
    const double ratio = coarse / fine;
    ok &= expect(coarse > 1e-14 && ratio > 10.0 && ratio < 22.0,
                 "position-error halving ratio " + fmt(ratio));

    // Step halving on the spinor phase in a uniform field, where the exact
    // evolution is a pure per-component phase.
    KinematicParams uniform = k;
    uniform.field = LinearSGField::make(1.0, 0.0);
    uniform.td = uniform.tf;
    SpinState flat;
    flat.amplitudes = Vector::Constant(3, Complex(1.0 / std::sqrt(3.0), 0.0));
    auto spinor_error = [&](double dt) {
        Vector exact(3);
        const double angle = uniform.omega0() * (uniform.tf - uniform.t0);
        exact[0] = std::polar(1.0 / std::sqrt(3.0), angle);
        exact[1] = Complex(1.0 / std::sqrt(3.0), 0.0);
        exact[2] = std::polar(1.0 / std::sqrt(3.0), -angle);
        return (integrate_trajectory(uniform, s, 0.0, 0.0, flat, dt).spinor_final.amplitudes -
                exact)
            .norm();
    };
    const double spinor_ratio = spinor_error(0.04) / spinor_error(0.02);
    ok &= expect(spinor_ratio > 12.0 && spinor_ratio < 20.0,
                 "spinor-error halving ratio " + fmt(spinor_ratio));

    // Collinearity of launch point, detector point, and the field zero.
    const Point2 c = convergence_point(k.field);
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_int_distribution<int> updown(0, 1);
    double worst_cross = 0.0;
    int checked = 0;
    while (checked < 1000) {
        const double x0 = coord(gen);
        const double z0 = coord(gen);
        if (field_magnitude(k.field, x0, z0) < 0.05) continue;
        const int twice_m = updown(gen) ? 2 : -2;
        const TrajectorySolution sol = analytic_trajectory(k, s, x0, z0, twice_m);
        const double dx = sol.at_detector.x - x0;
        const double dz = sol.at_detector.z - z0;
        const double rx = c.x - x0;
        const double rz = c.z - z0;
        worst_cross = std::max(worst_cross, std::abs(dx * rz - dz * rx) /
                                                (std::hypot(dx, dz) * std::hypot(rx, rz)));
        ++checked;
    }
    ok &= expect(worst_cross < 1e-10, "collinearity defect " + fmt(worst_cross));
    return ok;
}

// --- criterion 6 -----------------------------------------------------------
// Small-angle expansion error bounded by C*beta^4, confirmed by halving.
bool small_angle_law_has_fourth_order_accuracy() {
    bool ok = true;
    for (const int twice_i : {2, 3, 4}) {
        const Spin s = Spin::from_twice(twice_i);
        auto worst_error = [&](double beta) {
            double worst = 0.0;
            for (const int m_lab : s.twice_m_values()) {
                const Eigen::VectorXd exact = branch_probabilities(s, m_lab, beta);
                for (const int m_br : s.twice_m_values())
                    worst = std::max(worst,
                                     std::abs(exact[s.index_of_twice_m(m_br)] -
                                              small_angle_probability(s, m_lab, m_br, beta)));
            }
            return worst;
        };
        const double coarse = worst_error(0.1);
        const double fine = worst_error(0.05);
        const double quartic_constant = coarse / std::pow(0.1, 4);
        ok &= expect(fine <= quartic_constant * std::pow(0.05, 4) * 1.05 + 1e-14,
                     "halving bound violated at 2I=" + std::to_string(twice_i) + ": coarse " +
                         fmt(coarse) + " fine " + fmt(fine));
    }
    return ok;
}

// --- criterion 7 -----------------------------------------------------------
// Branch dispersion: the lowest projection focuses, the highest defocuses,
// the middle is untouched, and every detector point obeys the radial scaling
// map computed independently from the launch geometry.
bool branches_follow_the_radial_scaling_law() {
    bool ok = true;
    BeamConfig cfg;
    cfg.spin = Spin::from_twice(2);
    cfg.twice_m_lab = 0;
    cfg.reduced = ReducedParams{4.0, 0.25, 1.0};
    cfg.n_particles = 10000;
    cfg.seed = 777;
    const SimulationResult res = run_simulation(cfg, 1);

    const double b = cfg.reduced.b_over_a * cfg.reduced.a;
    const double cx = 0.0;
    const double cz = cfg.reduced.a / cfg.reduced.ratio;
    double worst_map = 0.0;
    for (const SimRecord& rec : res.records) {
        if (rec.rejected) continue;
        const double dist0 = std::hypot(rec.x0 - cx, rec.z0 - cz);
        const double scale = 1.0 + b * (0.5 * rec.twice_m_branch) / dist0;
        const double qx = cx + (rec.x0 - cx) * scale;
        const double qz = cz + (rec.z0 - cz) * scale;
        worst_map = std::max(worst_map, std::hypot(qx - rec.xd, qz - rec.zd));
    }
    ok &= expect(worst_map < 1e-10 * cfg.reduced.a,
                 "radial-map deviation " + fmt(worst_map) + " in units of a");

    const FocusingReport report = focusing_stats(res.records, cfg.reduced);
    ok &= expect(report.branches.size() == 3, "expected three populated branches");
    if (report.branches.size() == 3) {
        const BranchFocusing& top = report.branches[0];
        const BranchFocusing& mid = report.branches[1];
        const BranchFocusing& bot = report.branches[2];
        ok &= expect(top.twice_m == 2 && mid.twice_m == 0 && bot.twice_m == -2,
                     "branch ordering is not descending");
        ok &= expect(bot.transverse_final < bot.transverse_initial,
                     "lowest branch failed to focus: " + fmt(bot.transverse_final) + " vs " +
                         fmt(bot.transverse_initial));
        ok &= expect(top.transverse_final > top.transverse_initial,
                     "highest branch failed to defocus: " + fmt(top.transverse_final) + " vs " +
                         fmt(top.transverse_initial));
        ok &= expect(std::abs(mid.transverse_final - mid.transverse_initial) <
                         1e-12 * cfg.reduced.a,
                     "middle branch spread changed");
    }
    return ok;
}

// --- criterion 8 -----------------------------------------------------------
// Byte-identical beam CSV across reruns and thread counts.
bool beam_output_is_byte_identical_across_thread_counts() {
    auto run_to_file = [&](const std::string& extra, const std::string& path) {
        const std::string cmd = "\"" + g_sgsim_path +
                                "\" fig2 --n_particles 10000 --seed 42 " + extra + " --out " +
                                path;
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };

    bool ok = true;
    ok &= expect(run_to_file("--threads 1", "acceptance_fig2_serial.csv"), "serial run failed");
    ok &= expect(run_to_file("--threads 1", "acceptance_fig2_rerun.csv"), "second run failed");
    ok &= expect(run_to_file("--threads 8", "acceptance_fig2_pooled.csv"), "pooled run failed");
    if (!ok) return ok;

    const std::string serial = slurp("acceptance_fig2_serial.csv");
    const std::string rerun = slurp("acceptance_fig2_rerun.csv");
    const std::string pooled = slurp("acceptance_fig2_pooled.csv");
    ok &= expect(!serial.empty(), "serial output is empty");
    ok &= expect(serial == rerun, "rerun output differs from the first run");
    ok &= expect(serial == pooled, "threaded output differs from the serial run");

    std::remove("acceptance_fig2_serial.csv");
    std::remove("acceptance_fig2_rerun.csv");
    std::remove("acceptance_fig2_pooled.csv");
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-sgsim>\n", argv[0]);
        return 2;
    }
    g_sgsim_path = argv[1];

    struct Criterion {
        const char* name;
        std::function<bool()> run;
        double time_limit_s;  // 0 = bounded only by the whole-suite budget
    };
    const std::vector<Criterion> criteria = {
        {"sampled misclassification rates match the averaged splitting law",
         sampled_rates_match_the_averaged_splitting_law, 10.0},
        {"averaged diagonal probabilities decay monotonically from unity",
         averaged_probabilities_decay_monotonically_from_unity, 0.0},
        {"correction operator is diagonal with the universal shape factor",
         correction_operator_is_diagonal_with_the_universal_shape, 30.0},
        {"operator eigenvectors are the field aligned projection states",
         operator_eigenvectors_are_the_projection_states, 0.0},
        {"integrator and closed form trajectories coincide",
         integrator_and_closed_form_trajectories_coincide, 0.0},
        {"small angle law has fourth order accuracy",
         small_angle_law_has_fourth_order_accuracy, 0.0},
        {"branches follow the radial scaling law", branches_follow_the_radial_scaling_law, 0.0},
        {"beam output is byte identical across thread counts",
         beam_output_is_byte_identical_across_thread_counts, 0.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        g_notes.clear();
        bool ok = false;
        std::string error;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = criteria[i].run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].time_limit_s > 0.0 && elapsed > criteria[i].time_limit_s) {
            ok = false;
            note("runtime " + fmt(elapsed) + "s exceeds the " + fmt(criteria[i].time_limit_s) +
                 "s budget");
        }
        if (!error.empty()) {
            ok = false;
            note("exception: " + error);
        }
        std::printf("%s %zu. %s (%.2fs)\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    elapsed);
        for (const std::string& n : g_notes) std::printf("       %s\n", n.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
