#include "clumem/membership.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "clumem/rng.hpp"

namespace clumem {

const char* distance_name(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::MV: return "mv";
        case DistanceKind::WS: return "ws";
        case DistanceKind::MMD: return "mmd";
    }
    return "?";
}

const char* variant_name(Variant variant) {
    return variant == Variant::GaussianReference ? "gaussian" : "closest";
}

namespace {

// bump helper: e^(-1/u) for u > 0, else 0
double bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

} // namespace

double confidence_F(double s, double R) {
    if (s <= R) return 0.0;
    if (s >= R + 1.0) return 1.0;
    const double a = bump(s - R);
    const double b = bump(1.0 - (s - R));
    return a / (a + b);
}

double confidence_G(double s, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("confidence_G: h must be positive");
    if (s >= 2.0 * h) return 1.0;
    const double u = s / h - 1.0;
    return std::min(1.0, u * u);
}

std::vector<QuadTerm> radius_terms(const SimulationRecord& record, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("radius_terms: R must be positive");
    std::vector<QuadTerm> terms;
    terms.reserve(record.T);
    for (std::size_t t = 0; t < record.T; ++t) {
        double dist = std::numeric_limits<double>::infinity();
        if (record.N > 0)
            dist = nearest_cluster(record.particle_at(t), record.clusters_at(t),
                                   record.N, record.d)
                       .second;
        QuadTerm term;
        term.t = t + 1;
        term.target = dist <= R ? 1 : 0;
        term.weight = confidence_F(dist, R);
        term.tag = BetaTag::Radius;
        terms.push_back(term);
    }
    return terms;
}

std::vector<std::size_t> observed_nearest(const SimulationRecord& record) {
    if (record.N == 0)
        throw std::invalid_argument("observed_nearest: record has no clusters");
    std::vector<std::size_t> out(record.T);
    for (std::size_t t = 0; t < record.T; ++t)
        out[t] = nearest_cluster(record.particle_at(t), record.clusters_at(t),
                                 record.N, record.d)
                     .first;
    return out;
}

std::size_t smallest_mode(const std::size_t* values, std::size_t count) {
    if (count == 0) throw std::invalid_argument("smallest_mode: empty window");
    std::vector<std::size_t> sorted(values, values + count);
    std::sort(sorted.begin(), sorted.end());
    std::size_t best = sorted[0], best_run = 0;
    std::size_t i = 0;
    while (i < count) {
        std::size_t j = i;
        while (j < count && sorted[j] == sorted[i]) ++j;
        if (j - i > best_run) { // strict: ties keep the smaller value
            best_run = j - i;
            best = sorted[i];
        }
        i = j;
    }
    return best;
}

QuadTerm similarity_term_from_distance(std::size_t t, double dist, double h) {
    QuadTerm term;
    term.t = t;
    term.target = dist <= h ? 1 : 0;
    term.weight = confidence_G(dist, h);
    term.tag = BetaTag::Similarity;
    return term;
}

namespace {

double distance_between(DistanceKind kind, const EmpiricalMeasure& a,
                        const EmpiricalMeasure& b) {
    return kind == DistanceKind::WS ? wasserstein2(a, b) : mmd_riesz(a, b);
}

ThresholdEstimate analytic_part(double e_in, double e_out, std::uint64_t seed) {
    ThresholdEstimate est;
    est.E_in = e_in;
    est.E_out = e_out;
    est.h = (est.E_in + est.E_out) / 2.0;
    est.trials = 0;
    est.seed = seed;
    return est;
}

ThresholdSet analytic_mv_thresholds(const GmmParams& params,
                                    std::uint64_t seed) {
    double sq = 0.0;
    for (std::size_t c = 0; c < params.dim(); ++c) {
        const double diff = params.mu_in[c] - params.mu_out[c];
        sq += diff * diff;
    }
    ThresholdSet set;
    set.kind = DistanceKind::MV;
    set.parts.push_back(analytic_part(0.0, std::sqrt(sq), seed));
    set.parts.push_back(analytic_part(params.var_in, params.var_out, seed));
    return set;
}

EmpiricalMeasure draw_window(Stream& stream, const std::vector<double>& mu,
                             double sd, std::size_t count) {
    const std::size_t d = mu.size();
    EmpiricalMeasure m;
    m.d = d;
    m.atoms.resize(count * d);
    m.weights.assign(count, 1.0 / static_cast<double>(count));
    for (std::size_t i = 0; i < count * d; ++i)
        m.atoms[i] = mu[i % d] + sd * stream.gaussian();
    return m;
}

} // namespace

ThresholdSet threshold_gaussian(const GmmParams& params, std::size_t k,
                                DistanceKind kind, std::size_t trials,
                                std::uint64_t seed,
                                const EmpiricalMeasure* reference) {
    params.validate();
    if (kind == DistanceKind::MV) return analytic_mv_thresholds(params, seed);
    if (trials < 1) throw std::invalid_argument("threshold_gaussian: trials >= 1");
    if (k == 0) throw std::invalid_argument("threshold_gaussian: k >= 1");
    if (!reference)
        throw std::invalid_argument("threshold_gaussian: reference measure required");
    reference->validate();

    const std::size_t window = 2 * k;
    const double sd_in = std::sqrt(params.var_in);
    const double sd_out = std::sqrt(params.var_out);
    double acc_in = 0.0, acc_out = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Stream s_in(seed, trial, "in");
        Stream s_out(seed, trial, "out");
        const EmpiricalMeasure m_in =
            draw_window(s_in, params.mu_in, sd_in, window);
        const EmpiricalMeasure m_out =
            draw_window(s_out, params.mu_out, sd_out, window);
        acc_in += distance_between(kind, m_in, *reference);
        acc_out += distance_between(kind, m_out, *reference);
    }
    ThresholdSet set;
    set.kind = kind;
    ThresholdEstimate est;
    est.E_in = acc_in / static_cast<double>(trials);
    est.E_out = acc_out / static_cast<double>(trials);
    est.h = (est.E_in + est.E_out) / 2.0;
    est.trials = trials;
    est.seed = seed;
    set.parts.push_back(est);
    return set;
}

ThresholdSet threshold_closest(const GmmParams& params,
                               const ClusterMotion& motion, std::size_t k,
                               DistanceKind kind, std::size_t trials,
                               std::uint64_t seed) {
    params.validate();
    if (motion.mean.size() != params.dim())
        throw std::invalid_argument("threshold_closest: dimension mismatch");
    if (params.var_in < motion.var)
        throw std::runtime_error(
            "threshold_closest: negative within-cluster wiggle variance "
            "(fitted var_in " +
            std::to_string(params.var_in) + " below cluster var " +
            std::to_string(motion.var) + ")");
    if (kind == DistanceKind::MV) return analytic_mv_thresholds(params, seed);
    if (trials < 1) throw std::invalid_argument("threshold_closest: trials >= 1");
    if (k == 0) throw std::invalid_argument("threshold_closest: k >= 1");

    const std::size_t d = params.dim();
    const std::size_t window = 2 * k;
    const double sd_c = std::sqrt(motion.var);
    const double sd_x = std::sqrt(params.var_in - motion.var);
    const double sd_out = std::sqrt(params.var_out);
    const std::vector<double> zero(d, 0.0);

    double acc_in = 0.0, acc_out = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Stream s_y(seed, trial, "y");
        Stream s_x(seed, trial, "x");
        Stream s_w(seed, trial, "w");
        const EmpiricalMeasure m_y = draw_window(s_y, motion.mean, sd_c, window);
        EmpiricalMeasure m_z = draw_window(s_x, zero, sd_x, window);
        for (std::size_t i = 0; i < m_z.atoms.size(); ++i)
            m_z.atoms[i] += m_y.atoms[i]; // rider shares the cluster's draw
        const EmpiricalMeasure m_w =
            draw_window(s_w, params.mu_out, sd_out, window);
        acc_in += distance_between(kind, m_y, m_z);
        acc_out += distance_between(kind, m_y, m_w);
    }
    ThresholdSet set;
    set.kind = kind;
    ThresholdEstimate est;
    est.E_in = acc_in / static_cast<double>(trials);
    est.E_out = acc_out / static_cast<double>(trials);
    est.h = (est.E_in + est.E_out) / 2.0;
    est.trials = trials;
    est.seed = seed;
    set.parts.push_back(est);
    return set;
}

namespace {

void check_interior(const SimulationRecord& record, std::size_t k) {
    if (k == 0) throw std::invalid_argument("similarity terms: k >= 1");
    if (record.T < 2 * k + 1)
        throw std::invalid_argument("similarity terms: horizon too short for k");
}

void check_threshold_shape(const ThresholdSet& thresholds, DistanceKind kind) {
    const std::size_t want = kind == DistanceKind::MV ? 2u : 1u;
    if (thresholds.kind != kind || thresholds.parts.size() != want)
        throw std::invalid_argument("similarity terms: threshold set mismatch");
}

} // namespace

std::vector<QuadTerm> similarity_terms_gaussian(
    const SimulationRecord& record, const GmmParams& params, std::size_t k,
    DistanceKind kind, const ThresholdSet& thresholds,
    const EmpiricalMeasure* reference) {
    check_interior(record, k);
    check_threshold_shape(thresholds, kind);
    params.validate();
    if (kind != DistanceKind::MV) {
        if (!reference)
            throw std::invalid_argument(
                "similarity_terms_gaussian: reference measure required");
        reference->validate();
    }

    std::vector<QuadTerm> terms;
    terms.reserve(record.T - 2 * k);
    for (std::size_t t = k + 1; t + k <= record.T; ++t) {
        const EmpiricalMeasure mpt =
            window_measure(record.particle, record.T, record.d, k, t);
        if (kind == DistanceKind::MV) {
            const MvDist mv = mv_distances(mpt, params.mu_in, params.var_in);
            terms.push_back(similarity_term_from_distance(
                t, mv.d_mean, thresholds.parts[0].h));
            terms.push_back(similarity_term_from_distance(
                t, mv.d_var, thresholds.parts[1].h));
        } else {
            const double dist = distance_between(kind, mpt, *reference);
            terms.push_back(
                similarity_term_from_distance(t, dist, thresholds.parts[0].h));
        }
    }
    return terms;
}

std::vector<QuadTerm> similarity_terms_closest(const SimulationRecord& record,
                                               std::size_t k,
                                               DistanceKind kind,
                                               const ThresholdSet& thresholds) {
    check_interior(record, k);
    check_threshold_shape(thresholds, kind);
    const std::vector<std::size_t> nearest = observed_nearest(record);

    std::vector<QuadTerm> terms;
    terms.reserve(record.T - 2 * k);
    std::vector<std::size_t> window_idx;
    for (std::size_t t = k + 1; t + k <= record.T; ++t) {
        const std::int64_t lo = window_lo(k, t, record.T);
        const std::int64_t hi = window_hi(k, t, record.T);
        window_idx.clear();
        for (std::int64_t i = lo; i <= hi; ++i)
            window_idx.push_back(
                nearest[static_cast<std::size_t>(static_cast<std::int64_t>(t) + i - 1)]);
        const std::size_t n_hat = smallest_mode(window_idx.data(), window_idx.size());

        const EmpiricalMeasure mpt =
            window_measure(record.particle, record.T, record.d, k, t);
        const EmpiricalMeasure mct =
            window_measure(record.clusters.data() + n_hat * record.d, record.T,
                           record.d, k, t, record.N * record.d);
        if (kind == DistanceKind::MV) {
            const MvDist mv = mv_distances(mpt, mct);
            terms.push_back(similarity_term_from_distance(
                t, mv.d_mean, thresholds.parts[0].h));
            terms.push_back(similarity_term_from_distance(
                t, mv.d_var, thresholds.parts[1].h));
        } else {
            const double dist = distance_between(kind, mpt, mct);
            terms.push_back(
                similarity_term_from_distance(t, dist, thresholds.parts[0].h));
        }
    }
    return terms;
}

MembershipObjective assemble_objective(const std::vector<QuadTerm>& radius,
                                       const std::vector<QuadTerm>& similarity,
                                       double beta_r, double beta_s,
                                       std::size_t T, std::size_t k) {
    if (!(beta_r >= 0.0) || !(beta_s >= 0.0))
        throw std::invalid_argument("assemble_objective: betas must be nonnegative");
    if (T == 0) throw std::invalid_argument("assemble_objective: T == 0");
    if (!similarity.empty() && T < 2 * k + 1)
        throw std::invalid_argument(
            "assemble_objective: horizon too short for similarity terms");

    MembershipObjective obj;
    obj.T = T;
    obj.k = k;
    obj.beta_r = beta_r;
    obj.beta_s = beta_s;
    obj.terms.reserve(radius.size() + similarity.size());

    auto push_checked = [&obj, T, k](const QuadTerm& term, BetaTag expected) {
        if (term.tag != expected)
            throw std::invalid_argument("assemble_objective: term tag mismatch");
        if (term.t < 1 || term.t > T)
            throw std::invalid_argument("assemble_objective: term time out of range");
        if (expected == BetaTag::Similarity &&
            (term.t < k + 1 || term.t > T - k))
            throw std::invalid_argument(
                "assemble_objective: similarity term outside interior");
        if (!(term.weight >= 0.0) || !(term.weight <= 1.0))
            throw std::invalid_argument("assemble_objective: weight outside [0,1]");
        if (term.target > 1)
            throw std::invalid_argument("assemble_objective: target must be 0 or 1");
        obj.terms.push_back(term);
    };
    for (const QuadTerm& term : radius) push_checked(term, BetaTag::Radius);
    for (const QuadTerm& term : similarity) push_checked(term, BetaTag::Similarity);
    return obj;
}

} // namespace clumem
