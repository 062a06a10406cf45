#pragma once

#include <cstdint>
#include <vector>

#include "sgcis/field_model.hpp"
#include "sgcis/spin_algebra.hpp"
#include "sgcis/trajectory.hpp"

namespace sgcis {

/// One Monte Carlo run: a Gaussian beam (per-coordinate sigma = a/sqrt(2))
/// of particles prepared with lab projection m_lab, split into branches and
/// deflected per the reduced geometry.
struct BeamConfig {
    Spin spin = Spin::from_twice(2);
    int twice_m_lab = 0;
    ReducedParams reduced{4.0, 0.25, 1.0};
    long n_particles = 1000;
    std::uint64_t seed = 0;

    double a() const { return reduced.a; }
    void validate() const;
};

struct SimRecord {
    long index = 0;
    double x0 = 0.0;
    double z0 = 0.0;
    double beta = 0.0;
    int twice_m_lab = 0;
    int twice_m_branch = 0;
    double xd = 0.0;
    double zd = 0.0;
    bool rejected = false;
};

struct BranchStats {
    int twice_m = 0;
    long count = 0;
    double mean_xd = 0.0;
    double mean_zd = 0.0;
    double cov_xx = 0.0;
    double cov_xz = 0.0;
    double cov_zz = 0.0;
};

/// Branch counts plus the rejected count sum to n_particles; rates exclude
/// rejected particles.
struct SummaryStats {
    long n_particles = 0;
    long rejected = 0;
    long misclassified = 0;
    double misclassification_rate = 0.0;
    double binomial_stderr = 0.0;
    std::vector<BranchStats> branches;  // descending m', nonempty only
};

struct SimulationResult {
    std::vector<SimRecord> records;
    SummaryStats stats;
};

/// Initial position of particle `index`: the first draws of its private
/// stream, so it replays identically inside run_simulation.
Point2 sample_gaussian_beam(const BeamConfig& cfg, long index);

/// Reference Monte Carlo path: sample position, compute the frame angle,
/// sample one branch from the splitting probabilities, deflect analytically.
/// Particles at near-zero field are flagged rejected and excluded from
/// rates.  Results are independent of `threads`.
SimulationResult run_simulation(const BeamConfig& cfg, int threads = 1);

/// Variance-reduced companion to run_simulation: every branch keeps its
/// probability weight instead of being sampled.
struct WeightedSummary {
    std::vector<double> branch_weights;  // descending m', mean probability
    double mean_diagonal = 0.0;          // <p(m_lab, m_lab)> estimate
    double mean_error = 0.0;
    long used = 0;
    long rejected = 0;
};
WeightedSummary run_simulation_weighted(const BeamConfig& cfg);

enum class AverageMethod { quadrature, monte_carlo };

/// <p(m, m)> over the Gaussian beam with the full nonlinear frame angle.
/// Quadrature (Gauss-Hermite, `order_or_samples` nodes per axis, default 64)
/// is the reference; Monte Carlo (default 100000 samples) cross-checks it.
/// ratio = 0 returns exactly 1.
double mean_diagonal_probability(Spin s, int twice_m, double ratio, AverageMethod method,
                                 long order_or_samples = 0, std::uint64_t seed = 0);

struct BranchFocusing {
    int twice_m = 0;
    long count = 0;
    double rms_initial = 0.0;           // about the branch's initial centroid
    double rms_final = 0.0;             // about the branch's final centroid
    double spread_ratio = 0.0;          // rms_final / rms_initial
    double rms_to_center_initial = 0.0; // distance to the field zero; inf at ratio 0
    double rms_to_center_final = 0.0;
    double transverse_initial = 0.0;    // spread perpendicular to the mean deflection
    double transverse_final = 0.0;
};

struct FocusingReport {
    std::vector<BranchFocusing> branches;  // descending m', nonempty only
    long used = 0;
    long rejected_excluded = 0;
};

/// Per-branch dispersion of detector points versus the same particles'
/// initial positions.  Empty branches are omitted.
FocusingReport focusing_stats(const std::vector<SimRecord>& records, const ReducedParams& reduced);

/// The three dimensionless figures governing the classical-readout regime:
/// precession angle Theta = omega0*(tf-t0), frame ratio R = B0/(B1*a), and
/// the chain Theta >> R >> 1 judged with a multiplicative threshold.  Also
/// reports the action scale mu0*B1*a*(tf-t0) against hbar.
struct ConditionsReport {
    double precession_angle = 0.0;
    double frame_ratio = 0.0;  // infinity when B1 = 0
    double threshold = 10.0;
    bool theta_exceeds_frame_ratio = false;
    bool frame_ratio_exceeds_one = false;
    bool chain_satisfied = false;
    double action_scale = 0.0;
    double hbar = 1.0;
    double action_over_hbar = 0.0;
};

ConditionsReport check_validity_conditions(const KinematicParams& k, double a,
                                           double threshold = 10.0);

}  // namespace sgcis
