// Command-line front end: figure data, operator reports, and consistency
// checks, all through the C API.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgcis/sgcis.h"

using nlohmann::json;

namespace {

[[noreturn]] void die(int code, const std::string& message) {
    std::fprintf(stderr, "sgsim: %s\n", message.c_str());
    std::exit(code);
}

int exit_code_for(int status) {
    switch (status) {
        case SGCIS_ERR_INVALID_ARGUMENT:
        case SGCIS_ERR_FIELD_ZERO:
            return 2;
        case SGCIS_ERR_NO_CONVERGENCE:
            return 3;
        default:
            return 1;
    }
}

void check(int status) {
    if (status != SGCIS_OK) die(exit_code_for(status), sgcis_last_error());
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_m(int twice) {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", twice / 2.0);
    return buf;
}

int parse_twice_value(const std::string& text, bool allow_negative, const char* what) {
    long twice = 0;
    try {
        const std::size_t slash = text.find('/');
        if (slash != std::string::npos) {
            const long num = std::stol(text.substr(0, slash));
            const long den = std::stol(text.substr(slash + 1));
            if (den == 2) twice = num;
            else if (den == 1) twice = 2 * num;
            else die(2, std::string(what) + " must be an integer or half-integer: " + text);
        } else {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            twice = std::llround(2.0 * v);
            if (std::abs(2.0 * v - static_cast<double>(twice)) > 1e-9)
                die(2, std::string(what) + " must be an integer or half-integer: " + text);
        }
    } catch (const std::exception&) {
        die(2, std::string("cannot parse ") + what + ": " + text);
    }
    if (!allow_negative && twice < 0) die(2, std::string(what) + " must be nonnegative: " + text);
    return static_cast<int>(twice);
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) die(2, "cannot open output path: " + path);
    f << content;
    f.close();
    if (!f) die(2, "failed writing output: " + path);
}

json finite_or_sentinel(double v) {
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

// ---- configuration -------------------------------------------------------

json load_config_doc(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    }
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) die(2, "cannot read config file: " + path);
    try {
        return json::parse(f);
    } catch (const std::exception& e) {
        die(2, std::string("config parse error: ") + e.what());
    }
}

void check_keys(const json& section, const std::string& name,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : section.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known) die(2, "unknown key '" + item.key() + "' in config section '" + name + "'");
    }
}

template <typename T>
void read_key(const json& section, const char* key, T& out) {
    if (!section.contains(key)) return;
    try {
        out = section.at(key).get<T>();
    } catch (const std::exception&) {
        die(2, std::string("config key '") + key + "' has the wrong type");
    }
}

struct Fig1Config {
    std::string spin = "1";
    std::vector<double> ratios = {0.01, 0.05, 0.1, 0.25, 0.5, 1.0};
    long quad_order = 64;
    long mc_samples = 100000;
    std::uint64_t seed = 1;
    std::string out = "fig1.csv";
    int threads = 1;

    void load(const json& sec) {
        check_keys(sec, "fig1",
                   {"spin", "ratios", "quad_order", "mc_samples", "seed", "out", "threads"});
        read_key(sec, "spin", spin);
        read_key(sec, "ratios", ratios);
        read_key(sec, "quad_order", quad_order);
        read_key(sec, "mc_samples", mc_samples);
        read_key(sec, "seed", seed);
        read_key(sec, "out", out);
        read_key(sec, "threads", threads);
    }
    json to_json() const {
        return {{"spin", spin},     {"ratios", ratios}, {"quad_order", quad_order},
                {"mc_samples", mc_samples}, {"seed", seed},     {"out", out},
                {"threads", threads}};
    }
};

struct Fig2Config {
    std::string spin = "1";
    std::string m_lab = "all";
    double ratio = 0.25;
    double b_over_a = 4.0;
    double a = 1.0;
    long n_particles = 1000;
    std::uint64_t seed = 1;
    std::string out = "fig2.csv";
    int threads = 1;

    void load(const json& sec) {
        check_keys(sec, "fig2", {"spin", "m_lab", "ratio", "b_over_a", "a", "n_particles", "seed",
                                 "out", "threads"});
        read_key(sec, "spin", spin);
        read_key(sec, "m_lab", m_lab);
        read_key(sec, "ratio", ratio);
        read_key(sec, "b_over_a", b_over_a);
        read_key(sec, "a", a);
        read_key(sec, "n_particles", n_particles);
        read_key(sec, "seed", seed);
        read_key(sec, "out", out);
        read_key(sec, "threads", threads);
    }
    json to_json() const {
        return {{"spin", spin},
                {"m_lab", m_lab},
                {"ratio", ratio},
                {"b_over_a", b_over_a},
                {"a", a},
                {"n_particles", n_particles},
                {"seed", seed},
                {"out", out},
                {"threads", threads}};
    }
};

struct DeltaConfig {
    std::string spin = "1";
    std::vector<double> thetas;
    double rel_tol = 1e-8;
    long max_nodes = 1024;
    std::uint64_t seed = 0;
    std::string out = "delta.json";
    int threads = 1;

    DeltaConfig() {
        for (int j = 1; j <= 10; ++j) thetas.push_back(0.37 * M_PI * j);
    }
    void load(const json& sec) {
        check_keys(sec, "delta",
                   {"spin", "thetas", "rel_tol", "max_nodes", "seed", "out", "threads"});
        read_key(sec, "spin", spin);
        read_key(sec, "thetas", thetas);
        read_key(sec, "rel_tol", rel_tol);
        read_key(sec, "max_nodes", max_nodes);
        read_key(sec, "seed", seed);
        read_key(sec, "out", out);
        read_key(sec, "threads", threads);
    }
    json to_json() const {
        return {{"spin", spin},           {"thetas", thetas}, {"rel_tol", rel_tol},
                {"max_nodes", max_nodes}, {"seed", seed},     {"out", out},
                {"threads", threads}};
    }
};

struct CondConfig {
    double mass = 1.0, mu0 = 1.0, v_y = 1.0;
    double t0 = 0.0, tf = 400.0, td = 400.0;
    double b0 = 1.0, b1 = 0.25, hbar = 1.0;
    double a = 1.0, threshold = 10.0;
    std::uint64_t seed = 0;
    std::string out = "-";
    int threads = 1;

    void load(const json& sec) {
        check_keys(sec, "conditions", {"mass", "mu0", "v_y", "t0", "tf", "td", "b0", "b1", "hbar",
                                       "a", "threshold", "seed", "out", "threads"});
        read_key(sec, "mass", mass);
        read_key(sec, "mu0", mu0);
        read_key(sec, "v_y", v_y);
        read_key(sec, "t0", t0);
        read_key(sec, "tf", tf);
        read_key(sec, "td", td);
        read_key(sec, "b0", b0);
        read_key(sec, "b1", b1);
        read_key(sec, "hbar", hbar);
        read_key(sec, "a", a);
        read_key(sec, "threshold", threshold);
        read_key(sec, "seed", seed);
        read_key(sec, "out", out);
        read_key(sec, "threads", threads);
    }
    json to_json() const {
        return {{"mass", mass},   {"mu0", mu0},   {"v_y", v_y},
                {"t0", t0},       {"tf", tf},     {"td", td},
                {"b0", b0},       {"b1", b1},     {"hbar", hbar},
                {"a", a},         {"threshold", threshold}, {"seed", seed},
                {"out", out},     {"threads", threads}};
    }
};

struct TrajConfig {
    std::string spin = "1";
    std::string branches = "all";
    std::vector<double> x0s = {-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<double> z0s = {-1.0, -0.5, 0.0, 0.5, 1.0};
    // |B| reaches ~1.3*b0 on the default grid, so the step must stay well
    // under omega0*dt ~ 0.03 to respect the norm-drift gate.
    double dt = 0.01;
    double mass = 1.0, mu0 = 1.0, v_y = 1.0;
    double t0 = 0.0, tf = 2.0, td = 3.0;
    double b0 = 1.0, b1 = 0.25, hbar = 1.0;
    std::uint64_t seed = 0;
    std::string out = "-";
    int threads = 1;

    void load(const json& sec) {
        check_keys(sec, "traj-check",
                   {"spin", "branches", "x0s", "z0s", "dt", "mass", "mu0", "v_y", "t0", "tf", "td",
                    "b0", "b1", "hbar", "seed", "out", "threads"});
        read_key(sec, "spin", spin);
        read_key(sec, "branches", branches);
        read_key(sec, "x0s", x0s);
        read_key(sec, "z0s", z0s);
        read_key(sec, "dt", dt);
        read_key(sec, "mass", mass);
        read_key(sec, "mu0", mu0);
        read_key(sec, "v_y", v_y);
        read_key(sec, "t0", t0);
        read_key(sec, "tf", tf);
        read_key(sec, "td", td);
        read_key(sec, "b0", b0);
        read_key(sec, "b1", b1);
        read_key(sec, "hbar", hbar);
        read_key(sec, "seed", seed);
        read_key(sec, "out", out);
        read_key(sec, "threads", threads);
    }
    json to_json() const {
        return {{"spin", spin}, {"branches", branches},
                {"x0s", x0s},   {"z0s", z0s},
                {"dt", dt},     {"mass", mass},
                {"mu0", mu0},   {"v_y", v_y},
                {"t0", t0},     {"tf", tf},
                {"td", td},     {"b0", b0},
                {"b1", b1},     {"hbar", hbar},
                {"seed", seed}, {"out", out},
                {"threads", threads}};
    }
};

std::vector<int> branch_list(const std::string& text, int twice_i) {
    std::vector<int> out;
    if (text == "all") {
        for (int twice_m = twice_i; twice_m >= -twice_i; twice_m -= 2) out.push_back(twice_m);
    } else {
        out.push_back(parse_twice_value(text, true, "m"));
    }
    return out;
}

// ---- subcommands ---------------------------------------------------------

int run_fig1(const Fig1Config& c) {
    const int twice_i = parse_twice_value(c.spin, false, "spin");
    if (c.ratios.empty()) die(2, "ratio grid must be non-empty");
    for (std::size_t i = 1; i < c.ratios.size(); ++i)
        if (!(c.ratios[i] > c.ratios[i - 1])) die(2, "ratio grid must be strictly ascending");
    if (c.quad_order < 1 || c.mc_samples < 1) die(2, "orders and sample counts must be positive");

    int dim = 0;
    check(sgcis_spin_dim(twice_i, &dim));

    std::string csv = "ratio,m,p_mm,method,n_nodes_or_samples\n";
    for (const double ratio : c.ratios) {
        for (int k = 0; k < dim; ++k) {
            const int twice_m = twice_i - 2 * k;
            double p = 0.0;
            check(sgcis_mean_diagonal_probability(twice_i, twice_m, ratio,
                                                  SGCIS_METHOD_QUADRATURE, c.quad_order, 0, &p));
            csv += fmt17(ratio) + "," + format_m(twice_m) + "," + fmt17(p) + ",quadrature," +
                   std::to_string(c.quad_order) + "\n";
            check(sgcis_mean_diagonal_probability(twice_i, twice_m, ratio,
                                                  SGCIS_METHOD_MONTE_CARLO, c.mc_samples, c.seed,
                                                  &p));
            csv += fmt17(ratio) + "," + format_m(twice_m) + "," + fmt17(p) + ",mc," +
                   std::to_string(c.mc_samples) + "\n";
        }
    }
    write_output(c.out, csv);
    return 0;
}

int run_fig2(const Fig2Config& c) {
    const int twice_i = parse_twice_value(c.spin, false, "spin");
    const std::vector<int> blocks = branch_list(c.m_lab, twice_i);

    std::string csv = "index,m_lab,m_branch,x0_over_a,z0_over_a,xd_over_a,zd_over_a,rejected\n";
    for (std::size_t block = 0; block < blocks.size(); ++block) {
        std::uint64_t block_seed = c.seed;
        if (blocks.size() > 1) check(sgcis_derive_seed(c.seed, block, &block_seed));

        sgcis_sim_config* cfg = sgcis_sim_config_new();
        if (!cfg) die(1, "out of memory");
        check(sgcis_sim_config_set_spin(cfg, twice_i));
        check(sgcis_sim_config_set_m_lab(cfg, blocks[block]));
        check(sgcis_sim_config_set_geometry(cfg, c.b_over_a, c.ratio, c.a));
        check(sgcis_sim_config_set_n_particles(cfg, c.n_particles));
        check(sgcis_sim_config_set_seed(cfg, block_seed));

        sgcis_sim_result* res = nullptr;
        const int status = sgcis_sim_run(cfg, c.threads, &res);
        sgcis_sim_config_free(cfg);
        check(status);

        long n = 0;
        check(sgcis_sim_result_count(res, &n));
        for (long i = 0; i < n; ++i) {
            sgcis_record rec;
            check(sgcis_sim_result_record(res, i, &rec));
            csv += std::to_string(rec.index) + "," + format_m(rec.twice_m_lab) + "," +
                   format_m(rec.twice_m_branch) + "," + fmt17(rec.x0 / c.a) + "," +
                   fmt17(rec.z0 / c.a) + "," + fmt17(rec.xd / c.a) + "," + fmt17(rec.zd / c.a) +
                   "," + std::to_string(rec.rejected) + "\n";
        }
        sgcis_sim_result_free(res);
    }
    write_output(c.out, csv);
    return 0;
}

int run_delta(const DeltaConfig& c) {
    const int twice_i = parse_twice_value(c.spin, false, "spin");
    if (c.thetas.empty()) die(2, "theta grid must be non-empty");
    for (const double theta : c.thetas)
        if (!(theta > 0.0)) die(2, "theta values must be positive");

    int dim = 0;
    check(sgcis_spin_dim(twice_i, &dim));

    json entries = json::array();
    std::vector<std::vector<double>> diagonals;
    std::vector<double> shapes;
    for (const double theta : c.thetas) {
        sgcis_delta* d = nullptr;
        check(sgcis_delta_compute(twice_i, 1.0, 0.0, theta, 1.0, 1.0, 1.0, 1.0, c.rel_tol,
                                  static_cast<int>(c.max_nodes), &d));
        int nodes = 0;
        double offdiag = 0.0, norm = 0.0;
        std::vector<double> diag(static_cast<std::size_t>(dim));
        check(sgcis_delta_nodes(d, &nodes));
        check(sgcis_delta_max_offdiagonal(d, &offdiag));
        check(sgcis_delta_norm(d, &norm));
        check(sgcis_delta_diagonal(d, diag.data()));
        sgcis_delta_free(d);

        double shape = 0.0;
        check(sgcis_delta_shape_factor(theta, &shape));
        entries.push_back({{"theta", theta},
                           {"nodes", nodes},
                           {"max_offdiagonal", offdiag},
                           {"norm", norm},
                           {"shape_factor", shape},
                           {"diagonal", diag}});
        diagonals.push_back(diag);
        shapes.push_back(shape);
    }

    double shape_sq = 0.0;
    for (const double f : shapes) shape_sq += f * f;
    if (shape_sq == 0.0) die(2, "theta grid hits only zeros of the shape factor");

    std::vector<double> m_values, constants, residuals;
    double global_scale = 0.0;
    for (const auto& diag : diagonals)
        for (const double v : diag) global_scale = std::max(global_scale, std::abs(v));
    double max_residual = 0.0;
    for (int k = 0; k < dim; ++k) {
        double cross = 0.0;
        for (std::size_t j = 0; j < shapes.size(); ++j)
            cross += diagonals[j][static_cast<std::size_t>(k)] * shapes[j];
        const double fitted = cross / shape_sq;
        double worst = 0.0;
        for (std::size_t j = 0; j < shapes.size(); ++j)
            worst = std::max(worst, std::abs(diagonals[j][static_cast<std::size_t>(k)] -
                                             fitted * shapes[j]));
        m_values.push_back((twice_i - 2 * k) / 2.0);
        constants.push_back(fitted);
        residuals.push_back(worst);
        max_residual = std::max(max_residual, worst);
    }

    json doc = {
        {"spin", c.spin},
        {"rel_tol", c.rel_tol},
        {"max_nodes", c.max_nodes},
        {"theta_grid", c.thetas},
        {"entries", entries},
        {"fit",
         {{"m_values", m_values},
          {"constants", constants},
          {"max_abs_residuals", residuals},
          {"relative_residual", global_scale > 0.0 ? max_residual / global_scale : 0.0},
          {"shape", "2 - 2*cos(theta) - theta*sin(theta)"}}},
    };
    write_output(c.out, doc.dump(2) + "\n");
    return 0;
}

int run_conditions(const CondConfig& c) {
    const sgcis_kinematics k{c.mass, c.mu0, c.v_y, c.t0, c.tf, c.td, c.b0, c.b1, c.hbar};
    sgcis_conditions_report rep;
    check(sgcis_check_conditions(&k, c.a, c.threshold, &rep));

    json doc = {
        {"precession_angle", finite_or_sentinel(rep.precession_angle)},
        {"frame_ratio", finite_or_sentinel(rep.frame_ratio)},
        {"threshold", rep.threshold},
        {"theta_exceeds_frame_ratio", rep.theta_exceeds_frame_ratio != 0},
        {"frame_ratio_exceeds_one", rep.frame_ratio_exceeds_one != 0},
        {"chain_satisfied", rep.chain_satisfied != 0},
        {"action_scale", rep.action_scale},
        {"hbar", rep.hbar},
        {"action_over_hbar", rep.action_over_hbar},
    };
    write_output(c.out, doc.dump(2) + "\n");
    return 0;
}

int run_traj_check(const TrajConfig& c) {
    const int twice_i = parse_twice_value(c.spin, false, "spin");
    const std::vector<int> branches = branch_list(c.branches, twice_i);
    if (c.x0s.empty() || c.z0s.empty()) die(2, "trajectory grid must be non-empty");
    if (!(c.dt > 0.0)) die(2, "dt must be positive");

    const sgcis_kinematics k{c.mass, c.mu0, c.v_y, c.t0, c.tf, c.td, c.b0, c.b1, c.hbar};
    double b = 0.0;
    check(sgcis_deflection_scale(&k, &b));

    json cases = json::array();
    double max_error_over_b = 0.0;
    double max_norm_drift = 0.0;
    for (const double x0 : c.x0s) {
        for (const double z0 : c.z0s) {
            for (const int twice_m : branches) {
                sgcis_traj_comparison cmp;
                check(sgcis_traj_compare(&k, twice_i, x0, z0, twice_m, c.dt, &cmp));
                const double error_over_b =
                    b > 0.0 ? cmp.position_error / b
                            : std::numeric_limits<double>::infinity();
                cases.push_back({{"x0", x0},
                                 {"z0", z0},
                                 {"m", twice_m / 2.0},
                                 {"beta", cmp.beta},
                                 {"analytic", {cmp.analytic_xd, cmp.analytic_zd}},
                                 {"ode", {cmp.ode_xd, cmp.ode_zd}},
                                 {"position_error", cmp.position_error},
                                 {"error_over_b", finite_or_sentinel(error_over_b)},
                                 {"norm_drift", cmp.norm_drift}});
                if (b > 0.0) max_error_over_b = std::max(max_error_over_b, error_over_b);
                max_norm_drift = std::max(max_norm_drift, cmp.norm_drift);
            }
        }
    }

    json doc = {
        {"deflection_scale", b},
        {"dt", c.dt},
        {"n_cases", cases.size()},
        {"max_error_over_b", max_error_over_b},
        {"max_norm_drift", max_norm_drift},
        {"cases", cases},
    };
    write_output(c.out, doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const json doc = load_config_doc(argc, argv);

    Fig1Config fig1;
    Fig2Config fig2;
    DeltaConfig delta;
    CondConfig conditions;
    TrajConfig traj;
    if (doc.contains("fig1")) fig1.load(doc.at("fig1"));
    if (doc.contains("fig2")) fig2.load(doc.at("fig2"));
    if (doc.contains("delta")) delta.load(doc.at("delta"));
    if (doc.contains("conditions")) conditions.load(doc.at("conditions"));
    if (doc.contains("traj-check")) traj.load(doc.at("traj-check"));

    CLI::App app{"Stern-Gerlach beam simulator in the rotated-frame internal-state picture"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with per-subcommand sections");

    bool print1 = false, print2 = false, print3 = false, print4 = false, print5 = false;

    CLI::App* s1 = app.add_subcommand("fig1", "Beam-averaged diagonal probabilities vs ratio");
    s1->add_option("--spin", fig1.spin);
    s1->add_option("--ratios", fig1.ratios);
    s1->add_option("--quad_order", fig1.quad_order);
    s1->add_option("--mc_samples", fig1.mc_samples);
    s1->add_option("--seed", fig1.seed);
    s1->add_option("--out", fig1.out);
    s1->add_option("--threads", fig1.threads);
    s1->add_flag("--print-config", print1);

    CLI::App* s2 = app.add_subcommand("fig2", "Monte Carlo beam through the magnet");
    s2->add_option("--spin", fig2.spin);
    s2->add_option("--m_lab", fig2.m_lab);
    s2->add_option("--ratio", fig2.ratio);
    s2->add_option("--b_over_a", fig2.b_over_a);
    s2->add_option("--a", fig2.a);
    s2->add_option("--n_particles", fig2.n_particles);
    s2->add_option("--seed", fig2.seed);
    s2->add_option("--out", fig2.out);
    s2->add_option("--threads", fig2.threads);
    s2->add_flag("--print-config", print2);

    CLI::App* s3 = app.add_subcommand("delta", "Correction-operator diagonality report");
    s3->add_option("--spin", delta.spin);
    s3->add_option("--thetas", delta.thetas);
    s3->add_option("--rel_tol", delta.rel_tol);
    s3->add_option("--max_nodes", delta.max_nodes);
    s3->add_option("--seed", delta.seed);
    s3->add_option("--out", delta.out);
    s3->add_option("--threads", delta.threads);
    s3->add_flag("--print-config", print3);

    CLI::App* s4 = app.add_subcommand("conditions", "Classical-readout validity report");
    s4->add_option("--mass", conditions.mass);
    s4->add_option("--mu0", conditions.mu0);
    s4->add_option("--v_y", conditions.v_y);
    s4->add_option("--t0", conditions.t0);
    s4->add_option("--tf", conditions.tf);
    s4->add_option("--td", conditions.td);
    s4->add_option("--b0", conditions.b0);
    s4->add_option("--b1", conditions.b1);
    s4->add_option("--hbar", conditions.hbar);
    s4->add_option("--a", conditions.a);
    s4->add_option("--threshold", conditions.threshold);
    s4->add_option("--seed", conditions.seed);
    s4->add_option("--out", conditions.out);
    s4->add_option("--threads", conditions.threads);
    s4->add_flag("--print-config", print4);

    CLI::App* s5 = app.add_subcommand("traj-check", "Integrator-vs-closed-form comparison");
    s5->add_option("--spin", traj.spin);
    s5->add_option("--branches", traj.branches);
    s5->add_option("--x0s", traj.x0s);
    s5->add_option("--z0s", traj.z0s);
    s5->add_option("--dt", traj.dt);
    s5->add_option("--mass", traj.mass);
    s5->add_option("--mu0", traj.mu0);
    s5->add_option("--v_y", traj.v_y);
    s5->add_option("--t0", traj.t0);
    s5->add_option("--tf", traj.tf);
    s5->add_option("--td", traj.td);
    s5->add_option("--b0", traj.b0);
    s5->add_option("--b1", traj.b1);
    s5->add_option("--hbar", traj.hbar);
    s5->add_option("--seed", traj.seed);
    s5->add_option("--out", traj.out);
    s5->add_option("--threads", traj.threads);
    s5->add_flag("--print-config", print5);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (s1->parsed()) {
        if (print1) {
            write_output("-", json{{"fig1", fig1.to_json()}}.dump(2) + "\n");
            return 0;
        }
        return run_fig1(fig1);
    }
    if (s2->parsed()) {
        if (print2) {
            write_output("-", json{{"fig2", fig2.to_json()}}.dump(2) + "\n");
            return 0;
        }
        return run_fig2(fig2);
    }
    if (s3->parsed()) {
        if (print3) {
            write_output("-", json{{"delta", delta.to_json()}}.dump(2) + "\n");
            return 0;
        }
        return run_delta(delta);
    }
    if (s4->parsed()) {
        if (print4) {
            write_output("-", json{{"conditions", conditions.to_json()}}.dump(2) + "\n");
            return 0;
        }
        return run_conditions(conditions);
    }
    if (s5->parsed()) {
        if (print5) {
            write_output("-", json{{"traj-check", traj.to_json()}}.dump(2) + "\n");
            return 0;
        }
        return run_traj_check(traj);
    }
    return 2;
}
