#include "sgcis/beam_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <thread>

#include "sgcis/cis_analysis.hpp"
#include "sgcis/quadrature.hpp"
#include "sgcis/rng.hpp"

namespace sgcis {

void BeamConfig::validate() const {
    if (n_particles < 1) throw std::invalid_argument("n_particles must be at least 1");
    reduced.validate();
    spin.index_of_twice_m(twice_m_lab);
}

Point2 sample_gaussian_beam(const BeamConfig& cfg, long index) {
    cfg.validate();
    CounterRng rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(index)));
    const auto [g1, g2] = rng.gaussian_pair();
    const double sigma = cfg.a() / std::numbers::sqrt2;
    return {g1 * sigma, g2 * sigma};
}

namespace {

// Field weaker than this fraction of B0 puts the particle inside the
// undefined-frame neighborhood of the zero.
constexpr double kRejectFraction = 1e-9;

SummaryStats summarize(const BeamConfig& cfg, const std::vector<SimRecord>& records) {
    SummaryStats stats;
    stats.n_particles = static_cast<long>(records.size());
    for (const SimRecord& rec : records) {
        if (rec.rejected) ++stats.rejected;
        else if (rec.twice_m_branch != rec.twice_m_lab) ++stats.misclassified;
    }
    const long n_used = stats.n_particles - stats.rejected;
    if (n_used > 0) {
        const double p = static_cast<double>(stats.misclassified) / n_used;
        stats.misclassification_rate = p;
        stats.binomial_stderr = std::sqrt(p * (1.0 - p) / n_used);
    }

    const int dim = cfg.spin.dim();
    for (int k = 0; k < dim; ++k) {
        const int twice_m = cfg.spin.twice_m_at(k);
        KahanSum sx, sz;
        long count = 0;
        for (const SimRecord& rec : records) {
            if (rec.rejected || rec.twice_m_branch != twice_m) continue;
            sx.add(rec.xd);
            sz.add(rec.zd);
            ++count;
        }
        if (count == 0) continue;
        BranchStats bs;
        bs.twice_m = twice_m;
        bs.count = count;
        bs.mean_xd = sx.value() / count;
        bs.mean_zd = sz.value() / count;
        KahanSum cxx, cxz, czz;
        for (const SimRecord& rec : records) {
            if (rec.rejected || rec.twice_m_branch != twice_m) continue;
            const double dx = rec.xd - bs.mean_xd;
            const double dz = rec.zd - bs.mean_zd;
            cxx.add(dx * dx);
            cxz.add(dx * dz);
            czz.add(dz * dz);
        }
        bs.cov_xx = cxx.value() / count;
        bs.cov_xz = cxz.value() / count;
        bs.cov_zz = czz.value() / count;
        stats.branches.push_back(bs);
    }
    return stats;
}

}  // namespace

SimulationResult run_simulation(const BeamConfig& cfg, int threads) {
    cfg.validate();
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");

    const WignerEvaluator evaluator(cfg.spin);
    const LinearSGField field = cfg.reduced.unit_field();
    const double b = cfg.reduced.b_over_a * cfg.reduced.a;
    const double sigma = cfg.a() / std::numbers::sqrt2;
    const int dim = cfg.spin.dim();
    const int lab_col = cfg.spin.index_of_twice_m(cfg.twice_m_lab);

    std::vector<SimRecord> records(static_cast<std::size_t>(cfg.n_particles));
    auto worker = [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
            CounterRng rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const auto [g1, g2] = rng.gaussian_pair();
            SimRecord rec;
            rec.index = i;
            rec.x0 = g1 * sigma;
            rec.z0 = g2 * sigma;
            rec.twice_m_lab = cfg.twice_m_lab;
            const FieldVector bv = field_at(field, rec.x0, rec.z0);
            rec.beta = std::atan2(bv.bx, bv.bz);
            if (std::hypot(bv.bx, bv.bz) < kRejectFraction * field.b0) {
                rec.rejected = true;
                rec.twice_m_branch = cfg.twice_m_lab;
                rec.xd = rec.x0;
                rec.zd = rec.z0;
            } else {
                const WignerSmallD d = evaluator(rec.beta);
                const double u = rng.uniform();
                int pick = dim - 1;
                double acc = 0.0;
                for (int k = 0; k < dim; ++k) {
                    const double amp = d.matrix(k, lab_col);
                    acc += amp * amp;
                    if (u <= acc) {
                        pick = k;
                        break;
                    }
                }
                rec.twice_m_branch = cfg.spin.twice_m_at(pick);
                const double mprime = 0.5 * rec.twice_m_branch;
                rec.xd = rec.x0 + b * mprime * std::sin(rec.beta);
                rec.zd = rec.z0 - b * mprime * std::cos(rec.beta);
            }
            records[static_cast<std::size_t>(i)] = rec;
        }
    };

    if (threads == 1 || cfg.n_particles < 2) {
        worker(0, cfg.n_particles);
    } else {
        const long chunk = (cfg.n_particles + threads - 1) / threads;
        std::vector<std::thread> pool;
        for (long begin = 0; begin < cfg.n_particles; begin += chunk)
            pool.emplace_back(worker, begin, std::min(begin + chunk, cfg.n_particles));
        for (std::thread& t : pool) t.join();
    }

    SimulationResult out;
    out.records = std::move(records);
    out.stats = summarize(cfg, out.records);
    return out;
}

WeightedSummary run_simulation_weighted(const BeamConfig& cfg) {
    cfg.validate();
    const WignerEvaluator evaluator(cfg.spin);
    const LinearSGField field = cfg.reduced.unit_field();
    const double sigma = cfg.a() / std::numbers::sqrt2;
    const int dim = cfg.spin.dim();
    const int lab_col = cfg.spin.index_of_twice_m(cfg.twice_m_lab);

    std::vector<KahanSum> weight(static_cast<std::size_t>(dim));
    KahanSum diagonal;
    WeightedSummary out;
    for (long i = 0; i < cfg.n_particles; ++i) {
        CounterRng rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        const auto [g1, g2] = rng.gaussian_pair();
        const double x0 = g1 * sigma;
        const double z0 = g2 * sigma;
        const FieldVector bv = field_at(field, x0, z0);
        if (std::hypot(bv.bx, bv.bz) < kRejectFraction * field.b0) {
            ++out.rejected;
            continue;
        }
        const WignerSmallD d = evaluator(std::atan2(bv.bx, bv.bz));
        for (int k = 0; k < dim; ++k) {
            const double amp = d.matrix(k, lab_col);
            weight[static_cast<std::size_t>(k)].add(amp * amp);
        }
        const double amp = d.matrix(lab_col, lab_col);
        diagonal.add(amp * amp);
        ++out.used;
    }
    if (out.used == 0) throw std::runtime_error("all particles rejected");
    out.branch_weights.resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k)
        out.branch_weights[static_cast<std::size_t>(k)] =
            weight[static_cast<std::size_t>(k)].value() / out.used;
    out.mean_diagonal = diagonal.value() / out.used;
    out.mean_error = 1.0 - out.mean_diagonal;
    return out;
}

double mean_diagonal_probability(Spin s, int twice_m, double ratio, AverageMethod method,
                                 long order_or_samples, std::uint64_t seed) {
    const int idx = s.index_of_twice_m(twice_m);
    if (ratio < 0.0) throw std::invalid_argument("ratio must be nonnegative");
    if (ratio == 0.0) return 1.0;

    if (method == AverageMethod::quadrature) {
        const int order = order_or_samples > 0 ? static_cast<int>(order_or_samples) : 64;
        return 1.0 - mean_error_probability_exact(s, twice_m, ratio, order);
    }

    const long n = order_or_samples > 0 ? order_or_samples : 100000;
    const WignerEvaluator evaluator(s);
    KahanSum acc;
    for (long i = 0; i < n; ++i) {
        CounterRng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(i)));
        const auto [g1, g2] = rng.gaussian_pair();
        const double xi = g1 / std::numbers::sqrt2;
        const double zeta = g2 / std::numbers::sqrt2;
        const double beta = std::atan2(ratio * xi, 1.0 - ratio * zeta);
        const double amp = evaluator(beta).matrix(idx, idx);
        acc.add(amp * amp);
    }
    return acc.value() / static_cast<double>(n);
}

FocusingReport focusing_stats(const std::vector<SimRecord>& records, const ReducedParams& reduced) {
    reduced.validate();
    const bool has_center = reduced.ratio > 0.0;
    const Point2 center{0.0, has_center ? reduced.a / reduced.ratio : 0.0};
    const double inf = std::numeric_limits<double>::infinity();

    std::set<int, std::greater<int>> labels;
    FocusingReport report;
    for (const SimRecord& rec : records) {
        if (rec.rejected) {
            ++report.rejected_excluded;
            continue;
        }
        labels.insert(rec.twice_m_branch);
        ++report.used;
    }

    for (int twice_m : labels) {
        BranchFocusing bf;
        bf.twice_m = twice_m;
        KahanSum ix, iz, fx, fz;
        for (const SimRecord& rec : records) {
            if (rec.rejected || rec.twice_m_branch != twice_m) continue;
            ix.add(rec.x0);
            iz.add(rec.z0);
            fx.add(rec.xd);
            fz.add(rec.zd);
            ++bf.count;
        }
        const double cix = ix.value() / bf.count;
        const double ciz = iz.value() / bf.count;
        const double cfx = fx.value() / bf.count;
        const double cfz = fz.value() / bf.count;

        double axis_x = 1.0;
        double axis_z = 0.0;
        const double dx = cfx - cix;
        const double dz = cfz - ciz;
        const double dnorm = std::hypot(dx, dz);
        if (dnorm > 1e-12 * reduced.a) {
            axis_x = -dz / dnorm;
            axis_z = dx / dnorm;
        }

        KahanSum ri, rf, rci, rcf, ti, tf;
        for (const SimRecord& rec : records) {
            if (rec.rejected || rec.twice_m_branch != twice_m) continue;
            const double dix = rec.x0 - cix;
            const double diz = rec.z0 - ciz;
            const double dfx = rec.xd - cfx;
            const double dfz = rec.zd - cfz;
            ri.add(dix * dix + diz * diz);
            rf.add(dfx * dfx + dfz * dfz);
            ti.add((dix * axis_x + diz * axis_z) * (dix * axis_x + diz * axis_z));
            tf.add((dfx * axis_x + dfz * axis_z) * (dfx * axis_x + dfz * axis_z));
            if (has_center) {
                const double eix = rec.x0 - center.x;
                const double eiz = rec.z0 - center.z;
                const double efx = rec.xd - center.x;
                const double efz = rec.zd - center.z;
                rci.add(eix * eix + eiz * eiz);
                rcf.add(efx * efx + efz * efz);
            }
        }
        bf.rms_initial = std::sqrt(ri.value() / bf.count);
        bf.rms_final = std::sqrt(rf.value() / bf.count);
        bf.spread_ratio = bf.rms_initial > 0.0
                              ? bf.rms_final / bf.rms_initial
                              : std::numeric_limits<double>::quiet_NaN();
        bf.rms_to_center_initial = has_center ? std::sqrt(rci.value() / bf.count) : inf;
        bf.rms_to_center_final = has_center ? std::sqrt(rcf.value() / bf.count) : inf;
        bf.transverse_initial = std::sqrt(ti.value() / bf.count);
        bf.transverse_final = std::sqrt(tf.value() / bf.count);
        report.branches.push_back(bf);
    }
    return report;
}

ConditionsReport check_validity_conditions(const KinematicParams& k, double a, double threshold) {
    k.validate();
    if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");

    ConditionsReport rep;
    rep.precession_angle = k.omega0() * (k.tf - k.t0);
    rep.frame_ratio = k.field.b1 > 0.0 ? k.field.b0 / (k.field.b1 * a)
                                       : std::numeric_limits<double>::infinity();
    rep.threshold = threshold;
    rep.theta_exceeds_frame_ratio = rep.precession_angle > threshold * rep.frame_ratio;
    rep.frame_ratio_exceeds_one = rep.frame_ratio > threshold;
    rep.chain_satisfied = rep.theta_exceeds_frame_ratio && rep.frame_ratio_exceeds_one;
    rep.action_scale = k.mu0 * k.field.b1 * a * (k.tf - k.t0);
    rep.hbar = k.hbar;
    rep.action_over_hbar = rep.action_scale / k.hbar;
    return rep;
}

}  // namespace sgcis
