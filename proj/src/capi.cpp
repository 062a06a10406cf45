#include "sgcis/sgcis.h"

#include <cmath>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>

#include "sgcis/beam_sim.hpp"
#include "sgcis/cis_analysis.hpp"
#include "sgcis/errors.hpp"
#include "sgcis/field_model.hpp"
#include "sgcis/rng.hpp"
#include "sgcis/spin_algebra.hpp"
#include "sgcis/trajectory.hpp"

struct sgcis_delta {
    sgcis::DeltaMatrix value;
};

struct sgcis_sim_config {
    sgcis::BeamConfig value;
};

struct sgcis_sim_result {
    sgcis::SimulationResult value;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return SGCIS_OK;
    } catch (const sgcis::FieldZeroError& e) {
        return fail(SGCIS_ERR_FIELD_ZERO, e.what());
    } catch (const sgcis::ConvergenceError& e) {
        return fail(SGCIS_ERR_NO_CONVERGENCE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SGCIS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(SGCIS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SGCIS_ERR_INTERNAL, "unknown error");
    }
}

sgcis::KinematicParams to_kinematics(const sgcis_kinematics& k) {
    sgcis::KinematicParams kp;
    kp.mass = k.mass;
    kp.mu0 = k.mu0;
    kp.v_y = k.v_y;
    kp.t0 = k.t0;
    kp.tf = k.tf;
    kp.td = k.td;
    kp.field.b0 = k.b0;
    kp.field.b1 = k.b1;
    kp.hbar = k.hbar;
    return kp;
}

}  // namespace

extern "C" {

const char* sgcis_version(void) { return "1.0.0"; }

const char* sgcis_last_error(void) { return g_last_error.c_str(); }

int sgcis_spin_dim(int twice_i, int* out_dim) {
    if (!out_dim) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] { *out_dim = sgcis::Spin::from_twice(twice_i).dim(); });
}

int sgcis_beta_angle(double b0, double b1, double x, double z, double* out_beta) {
    if (!out_beta) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::LinearSGField f = sgcis::LinearSGField::make(b0, b1);
        *out_beta = sgcis::beta_angle(f, x, z);
    });
}

int sgcis_wigner_small_d(int twice_i, double beta, double* out_matrix) {
    if (!out_matrix) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        const sgcis::WignerSmallD d = sgcis::wigner_small_d(s, beta);
        const int dim = s.dim();
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) out_matrix[r * dim + c] = d.matrix(r, c);
    });
}

int sgcis_decompose_lab_state(int twice_i, int twice_m_lab, double beta, double* out_amplitudes) {
    if (!out_amplitudes) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        const Eigen::VectorXd amps = sgcis::decompose_lab_state(s, twice_m_lab, beta);
        for (int k = 0; k < amps.size(); ++k) out_amplitudes[k] = amps[k];
    });
}

int sgcis_branch_probabilities(int twice_i, int twice_m_lab, double beta, double* out_probs) {
    if (!out_probs) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        const Eigen::VectorXd probs = sgcis::branch_probabilities(s, twice_m_lab, beta);
        for (int k = 0; k < probs.size(); ++k) out_probs[k] = probs[k];
    });
}

int sgcis_small_angle_probability(int twice_i, int twice_m_lab, int twice_m_branch, double beta,
                                  double* out_p) {
    if (!out_p) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        *out_p = sgcis::small_angle_probability(s, twice_m_lab, twice_m_branch, beta);
    });
}

int sgcis_error_probability_exact(int twice_i, int twice_m_lab, double beta, double* out_p) {
    if (!out_p) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        *out_p = sgcis::error_probability_exact(s, twice_m_lab, beta);
    });
}

int sgcis_mean_error_closed_form(int twice_i, int twice_m_lab, double ratio, double* out_p) {
    if (!out_p) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        *out_p = sgcis::mean_error_probability_closed_form(s, twice_m_lab, ratio);
    });
}

int sgcis_mean_diagonal_probability(int twice_i, int twice_m, double ratio, int method,
                                    long order_or_samples, uint64_t seed, double* out_p) {
    if (!out_p) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    if (method != SGCIS_METHOD_QUADRATURE && method != SGCIS_METHOD_MONTE_CARLO)
        return fail(SGCIS_ERR_INVALID_ARGUMENT, "unknown averaging method");
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        const sgcis::AverageMethod m = method == SGCIS_METHOD_QUADRATURE
                                           ? sgcis::AverageMethod::quadrature
                                           : sgcis::AverageMethod::monte_carlo;
        *out_p = sgcis::mean_diagonal_probability(s, twice_m, ratio, m, order_or_samples, seed);
    });
}

int sgcis_delta_shape_factor(double theta, double* out_f) {
    if (!out_f) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    *out_f = sgcis::delta_shape_factor(theta);
    return SGCIS_OK;
}

int sgcis_delta_compute(int twice_i, double omega0, double t0, double tf, double mass, double mu0,
                        double b1, double hbar, double rel_tol, int max_nodes, sgcis_delta** out) {
    if (!out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = nullptr;
    return guarded([&] {
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        sgcis::EvolutionParams p;
        p.omega0 = omega0;
        p.t0 = t0;
        p.tf = tf;
        p.mass = mass;
        p.mu0 = mu0;
        p.b1 = b1;
        p.hbar = hbar;
        auto holder = std::make_unique<sgcis_delta>();
        holder->value = sgcis::delta_numeric(p, s, rel_tol, max_nodes);
        *out = holder.release();
    });
}

void sgcis_delta_free(sgcis_delta* d) { delete d; }

int sgcis_delta_dim(const sgcis_delta* d, int* out_dim) {
    if (!d || !out_dim) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out_dim = d->value.s.dim();
    return SGCIS_OK;
}

int sgcis_delta_theta(const sgcis_delta* d, double* out_theta) {
    if (!d || !out_theta) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out_theta = d->value.theta;
    return SGCIS_OK;
}

int sgcis_delta_prefactor(const sgcis_delta* d, double* out_prefactor) {
    if (!d || !out_prefactor) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out_prefactor = d->value.prefactor;
    return SGCIS_OK;
}

int sgcis_delta_nodes(const sgcis_delta* d, int* out_nodes) {
    if (!d || !out_nodes) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out_nodes = d->value.nodes;
    return SGCIS_OK;
}

int sgcis_delta_matrix(const sgcis_delta* d, double* out_re, double* out_im) {
    if (!d || !out_re || !out_im) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    const int dim = d->value.s.dim();
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            out_re[r * dim + c] = d->value.matrix(r, c).real();
            out_im[r * dim + c] = d->value.matrix(r, c).imag();
        }
    }
    return SGCIS_OK;
}

int sgcis_delta_diagonal(const sgcis_delta* d, double* out_diag) {
    if (!d || !out_diag) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    const int dim = d->value.s.dim();
    for (int k = 0; k < dim; ++k) out_diag[k] = d->value.matrix(k, k).real();
    return SGCIS_OK;
}

int sgcis_delta_max_offdiagonal(const sgcis_delta* d, double* out) {
    if (!d || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out = d->value.max_offdiagonal();
    return SGCIS_OK;
}

int sgcis_delta_norm(const sgcis_delta* d, double* out) {
    if (!d || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out = d->value.norm();
    return SGCIS_OK;
}

int sgcis_deflection_scale(const sgcis_kinematics* k, double* out_b) {
    if (!k || !out_b) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    return guarded([&] { *out_b = sgcis::deflection_scale(to_kinematics(*k)); });
}

int sgcis_check_conditions(const sgcis_kinematics* k, double a, double threshold,
                           sgcis_conditions_report* out) {
    if (!k || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    return guarded([&] {
        const sgcis::ConditionsReport rep =
            sgcis::check_validity_conditions(to_kinematics(*k), a, threshold);
        out->precession_angle = rep.precession_angle;
        out->frame_ratio = rep.frame_ratio;
        out->threshold = rep.threshold;
        out->theta_exceeds_frame_ratio = rep.theta_exceeds_frame_ratio ? 1 : 0;
        out->frame_ratio_exceeds_one = rep.frame_ratio_exceeds_one ? 1 : 0;
        out->chain_satisfied = rep.chain_satisfied ? 1 : 0;
        out->action_scale = rep.action_scale;
        out->hbar = rep.hbar;
        out->action_over_hbar = rep.action_over_hbar;
    });
}

int sgcis_traj_compare(const sgcis_kinematics* k, int twice_i, double x0, double z0,
                       int twice_m_branch, double dt, sgcis_traj_comparison* out) {
    if (!k || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    return guarded([&] {
        const sgcis::KinematicParams kp = to_kinematics(*k);
        const sgcis::Spin s = sgcis::Spin::from_twice(twice_i);
        const sgcis::TrajectorySolution analytic =
            sgcis::analytic_trajectory(kp, s, x0, z0, twice_m_branch);
        const sgcis::SpinState chi0 = sgcis::rotated_eigenstate(
            sgcis::wigner_small_d(s, analytic.beta), s, twice_m_branch);
        const sgcis::TrajectorySolution ode =
            sgcis::integrate_trajectory(kp, s, x0, z0, chi0, dt);
        out->analytic_xd = analytic.at_detector.x;
        out->analytic_zd = analytic.at_detector.z;
        out->ode_xd = ode.at_detector.x;
        out->ode_zd = ode.at_detector.z;
        out->position_error = std::hypot(ode.at_detector.x - analytic.at_detector.x,
                                         ode.at_detector.z - analytic.at_detector.z);
        out->deflection_scale = sgcis::deflection_scale(kp);
        out->norm_drift = std::abs(ode.spinor_final.norm() - 1.0);
        out->beta = analytic.beta;
    });
}

sgcis_sim_config* sgcis_sim_config_new(void) { return new (std::nothrow) sgcis_sim_config{}; }

void sgcis_sim_config_free(sgcis_sim_config* cfg) { delete cfg; }

int sgcis_sim_config_set_spin(sgcis_sim_config* cfg, int twice_i) {
    if (!cfg) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null config");
    return guarded([&] { cfg->value.spin = sgcis::Spin::from_twice(twice_i); });
}

int sgcis_sim_config_set_m_lab(sgcis_sim_config* cfg, int twice_m) {
    if (!cfg) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null config");
    cfg->value.twice_m_lab = twice_m;
    return SGCIS_OK;
}

int sgcis_sim_config_set_geometry(sgcis_sim_config* cfg, double b_over_a, double ratio, double a) {
    if (!cfg) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null config");
    return guarded([&] {
        sgcis::ReducedParams r;
        r.b_over_a = b_over_a;
        r.ratio = ratio;
        r.a = a;
        r.validate();
        cfg->value.reduced = r;
    });
}

int sgcis_sim_config_set_n_particles(sgcis_sim_config* cfg, long n) {
    if (!cfg) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null config");
    if (n < 1) return fail(SGCIS_ERR_INVALID_ARGUMENT, "n_particles must be at least 1");
    cfg->value.n_particles = n;
    return SGCIS_OK;
}

int sgcis_sim_config_set_seed(sgcis_sim_config* cfg, uint64_t seed) {
    if (!cfg) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null config");
    cfg->value.seed = seed;
    return SGCIS_OK;
}

int sgcis_sim_run(const sgcis_sim_config* cfg, int threads, sgcis_sim_result** out) {
    if (!cfg || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out = nullptr;
    return guarded([&] {
        auto holder = std::make_unique<sgcis_sim_result>();
        holder->value = sgcis::run_simulation(cfg->value, threads);
        *out = holder.release();
    });
}

void sgcis_sim_result_free(sgcis_sim_result* res) { delete res; }

int sgcis_sim_result_count(const sgcis_sim_result* res, long* out_n) {
    if (!res || !out_n) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    *out_n = static_cast<long>(res->value.records.size());
    return SGCIS_OK;
}

int sgcis_sim_result_record(const sgcis_sim_result* res, long i, sgcis_record* out) {
    if (!res || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    if (i < 0 || i >= static_cast<long>(res->value.records.size()))
        return fail(SGCIS_ERR_INVALID_ARGUMENT, "record index out of range");
    const sgcis::SimRecord& rec = res->value.records[static_cast<std::size_t>(i)];
    out->index = rec.index;
    out->x0 = rec.x0;
    out->z0 = rec.z0;
    out->beta = rec.beta;
    out->twice_m_lab = rec.twice_m_lab;
    out->twice_m_branch = rec.twice_m_branch;
    out->xd = rec.xd;
    out->zd = rec.zd;
    out->rejected = rec.rejected ? 1 : 0;
    return SGCIS_OK;
}

int sgcis_sim_result_summary(const sgcis_sim_result* res, sgcis_summary* out) {
    if (!res || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    const sgcis::SummaryStats& st = res->value.stats;
    out->n_particles = st.n_particles;
    out->rejected = st.rejected;
    out->misclassified = st.misclassified;
    out->misclassification_rate = st.misclassification_rate;
    out->binomial_stderr = st.binomial_stderr;
    out->n_branches = static_cast<int>(st.branches.size());
    return SGCIS_OK;
}

int sgcis_sim_result_branch(const sgcis_sim_result* res, int k, sgcis_branch_stats* out) {
    if (!res || !out) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null pointer");
    const sgcis::SummaryStats& st = res->value.stats;
    if (k < 0 || k >= static_cast<int>(st.branches.size()))
        return fail(SGCIS_ERR_INVALID_ARGUMENT, "branch index out of range");
    const sgcis::BranchStats& bs = st.branches[static_cast<std::size_t>(k)];
    out->twice_m = bs.twice_m;
    out->count = bs.count;
    out->mean_xd = bs.mean_xd;
    out->mean_zd = bs.mean_zd;
    out->cov_xx = bs.cov_xx;
    out->cov_xz = bs.cov_xz;
    out->cov_zz = bs.cov_zz;
    return SGCIS_OK;
}

int sgcis_derive_seed(uint64_t master, uint64_t stream, uint64_t* out_seed) {
    if (!out_seed) return fail(SGCIS_ERR_INVALID_ARGUMENT, "null output pointer");
    *out_seed = sgcis::derive_stream_seed(master, stream);
    return SGCIS_OK;
}

}  // extern "C"
