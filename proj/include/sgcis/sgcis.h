/* C interface to the Stern-Gerlach coherent-internal-states simulator.
 *
 * Conventions:
 *   - Spin quantum numbers are passed doubled (twice_i = 2I, twice_m = 2m)
 *     so half-integer spins stay integral.
 *   - Basis order is descending m everywhere; matrices are row-major.
 *   - Every function returns a status code; outputs go through pointers.
 *     On failure sgcis_last_error() describes the problem (thread-local,
 *     valid until the next failing call on the same thread).
 */
#ifndef SGCIS_H
#define SGCIS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    SGCIS_OK = 0,
    SGCIS_ERR_INVALID_ARGUMENT = 1,
    SGCIS_ERR_FIELD_ZERO = 2,
    SGCIS_ERR_NO_CONVERGENCE = 3,
    SGCIS_ERR_INTERNAL = 4
};

const char* sgcis_version(void);
const char* sgcis_last_error(void);

/* Dimension 2I+1. */
int sgcis_spin_dim(int twice_i, int* out_dim);

/* Frame angle of the field (b1*x, 0, b0 - b1*z); fails at the field zero. */
int sgcis_beta_angle(double b0, double b1, double x, double z, double* out_beta);

/* Rotation matrix d(beta), (2I+1)x(2I+1) row-major. */
int sgcis_wigner_small_d(int twice_i, double beta, double* out_matrix);

/* Amplitudes of the lab projection state over the field-aligned basis
 * (out_amplitudes, 2I+1 entries) and their squares (out_probs). */
int sgcis_decompose_lab_state(int twice_i, int twice_m_lab, double beta, double* out_amplitudes);
int sgcis_branch_probabilities(int twice_i, int twice_m_lab, double beta, double* out_probs);

int sgcis_small_angle_probability(int twice_i, int twice_m_lab, int twice_m_branch, double beta,
                                  double* out_p);
int sgcis_error_probability_exact(int twice_i, int twice_m_lab, double beta, double* out_p);
int sgcis_mean_error_closed_form(int twice_i, int twice_m_lab, double ratio, double* out_p);

#define SGCIS_METHOD_QUADRATURE 0
#define SGCIS_METHOD_MONTE_CARLO 1

/* <p(m,m)> over the Gaussian beam; order_or_samples <= 0 picks the default
 * (64 quadrature nodes per axis, or 100000 samples). */
int sgcis_mean_diagonal_probability(int twice_i, int twice_m, double ratio, int method,
                                    long order_or_samples, uint64_t seed, double* out_p);

/* f(theta) = 2 - 2*cos(theta) - theta*sin(theta). */
int sgcis_delta_shape_factor(double theta, double* out_f);

/* First-order correction operator, computed by adaptive nested quadrature. */
typedef struct sgcis_delta sgcis_delta;

int sgcis_delta_compute(int twice_i, double omega0, double t0, double tf, double mass, double mu0,
                        double b1, double hbar, double rel_tol, int max_nodes, sgcis_delta** out);
void sgcis_delta_free(sgcis_delta* d);
int sgcis_delta_dim(const sgcis_delta* d, int* out_dim);
int sgcis_delta_theta(const sgcis_delta* d, double* out_theta);
int sgcis_delta_prefactor(const sgcis_delta* d, double* out_prefactor);
int sgcis_delta_nodes(const sgcis_delta* d, int* out_nodes);
/* Dimensionless Hermitian matrix, row-major real and imaginary parts. */
int sgcis_delta_matrix(const sgcis_delta* d, double* out_re, double* out_im);
/* Real diagonal, descending m. */
int sgcis_delta_diagonal(const sgcis_delta* d, double* out_diag);
int sgcis_delta_max_offdiagonal(const sgcis_delta* d, double* out);
int sgcis_delta_norm(const sgcis_delta* d, double* out);

typedef struct {
    double mass;  /* kg */
    double mu0;   /* J/T */
    double v_y;   /* m/s */
    double t0;    /* s */
    double tf;    /* s */
    double td;    /* s */
    double b0;    /* T */
    double b1;    /* T/m */
    double hbar;  /* J s; 1.0 for reduced units */
} sgcis_kinematics;

/* b = mu0*b1*(tf-t0)*(2*td-tf-t0)/(2*mass). */
int sgcis_deflection_scale(const sgcis_kinematics* k, double* out_b);

typedef struct {
    double precession_angle;
    double frame_ratio; /* +inf when b1 = 0 */
    double threshold;
    int theta_exceeds_frame_ratio;
    int frame_ratio_exceeds_one;
    int chain_satisfied;
    double action_scale;
    double hbar;
    double action_over_hbar;
} sgcis_conditions_report;

int sgcis_check_conditions(const sgcis_kinematics* k, double a, double threshold,
                           sgcis_conditions_report* out);

typedef struct {
    double analytic_xd;
    double analytic_zd;
    double ode_xd;
    double ode_zd;
    double position_error;   /* euclidean distance between the two endpoints */
    double deflection_scale; /* b, the natural yardstick for position_error */
    double norm_drift;       /* | |spinor| - 1 | after integration */
    double beta;
} sgcis_traj_comparison;

/* Runs the branch eigenstate through the RK4 co-integrator and compares the
 * detector point against the closed-form trajectory. */
int sgcis_traj_compare(const sgcis_kinematics* k, int twice_i, double x0, double z0,
                       int twice_m_branch, double dt, sgcis_traj_comparison* out);

/* Beam Monte Carlo: opaque config and result handles. */
typedef struct sgcis_sim_config sgcis_sim_config;
typedef struct sgcis_sim_result sgcis_sim_result;

sgcis_sim_config* sgcis_sim_config_new(void); /* NULL on allocation failure */
void sgcis_sim_config_free(sgcis_sim_config* cfg);
int sgcis_sim_config_set_spin(sgcis_sim_config* cfg, int twice_i);
int sgcis_sim_config_set_m_lab(sgcis_sim_config* cfg, int twice_m);
int sgcis_sim_config_set_geometry(sgcis_sim_config* cfg, double b_over_a, double ratio, double a);
int sgcis_sim_config_set_n_particles(sgcis_sim_config* cfg, long n);
int sgcis_sim_config_set_seed(sgcis_sim_config* cfg, uint64_t seed);

int sgcis_sim_run(const sgcis_sim_config* cfg, int threads, sgcis_sim_result** out);
void sgcis_sim_result_free(sgcis_sim_result* res);

typedef struct {
    long index;
    double x0;
    double z0;
    double beta;
    int twice_m_lab;
    int twice_m_branch;
    double xd;
    double zd;
    int rejected;
} sgcis_record;

int sgcis_sim_result_count(const sgcis_sim_result* res, long* out_n);
int sgcis_sim_result_record(const sgcis_sim_result* res, long i, sgcis_record* out);

typedef struct {
    long n_particles;
    long rejected;
    long misclassified;
    double misclassification_rate;
    double binomial_stderr;
    int n_branches;
} sgcis_summary;

typedef struct {
    int twice_m;
    long count;
    double mean_xd;
    double mean_zd;
    double cov_xx;
    double cov_xz;
    double cov_zz;
} sgcis_branch_stats;

int sgcis_sim_result_summary(const sgcis_sim_result* res, sgcis_summary* out);
int sgcis_sim_result_branch(const sgcis_sim_result* res, int k, sgcis_branch_stats* out);

/* Substream seed derivation, exposed so callers can replay per-block runs. */
int sgcis_derive_seed(uint64_t master, uint64_t stream, uint64_t* out_seed);

#ifdef __cplusplus
}
#endif

#endif /* SGCIS_H */
