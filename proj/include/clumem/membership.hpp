#pragma once

// The variational membership objective: a radius loss that trusts geometry
// near the known cluster radius bound, and a similarity loss that compares
// the particle's sliding-window increment measure against a reference (the
// fitted inside-mode Gaussian, or the nearest cluster's own window).
// Decision thresholds come from Monte-Carlo estimates of the expected
// distance under each motion hypothesis.

#include <cstdint>
#include <vector>

#include "clumem/gmm.hpp"
#include "clumem/measures.hpp"
#include "clumem/sim.hpp"

namespace clumem {

enum class DistanceKind { MV, WS, MMD };
enum class Variant { GaussianReference, ClosestCluster };
enum class BetaTag : std::uint8_t { Radius, Similarity };

const char* distance_name(DistanceKind kind);
const char* variant_name(Variant variant);

struct QuadTerm {
    std::size_t t = 0; // 1-based timepoint
    std::uint8_t target = 0;
    double weight = 0.0; // confidence in [0,1]
    BetaTag tag = BetaTag::Radius;
};

struct MembershipObjective {
    std::size_t T = 0;
    std::size_t k = 0;
    double beta_r = 1.0;
    double beta_s = 1.0;
    std::vector<QuadTerm> terms;

    double beta_of(BetaTag tag) const {
        return tag == BetaTag::Radius ? beta_r : beta_s;
    }
};

struct ThresholdEstimate {
    double h = 0.0;
    double E_in = 0.0;
    double E_out = 0.0;
    std::size_t trials = 0; // 0 for analytic closed forms
    std::uint64_t seed = 0;
};

// one part for WS/MMD; two parts (mean, variance) for MV
struct ThresholdSet {
    DistanceKind kind = DistanceKind::WS;
    std::vector<ThresholdEstimate> parts;
};

// F: 0 at or below R, 1 at or beyond R+1, smooth and increasing between,
// exactly 1/2 at R + 1/2
double confidence_F(double s, double R);

// G: (s/h - 1)^2 clipped at 1; zero exactly at the threshold, h > 0 required
double confidence_G(double s, double h);

// one term per t in [1, T]: target = (distance to nearest cluster <= R),
// weight = F(distance). With no clusters every distance is infinite, so the
// terms degrade to target 0, weight 1.
std::vector<QuadTerm> radius_terms(const SimulationRecord& record, double R);

// nearest cluster index per t, recomputed from stored positions. The
// analysis side never reads the ground-truth labels.
std::vector<std::size_t> observed_nearest(const SimulationRecord& record);

// smallest value among those occurring most often
std::size_t smallest_mode(const std::size_t* values, std::size_t count);

// the shared decision rule: target = (dist <= h), weight = G(dist, h)
QuadTerm similarity_term_from_distance(std::size_t t, double dist, double h);

// Monte-Carlo threshold against the realized Gaussian reference measure.
// For WS/MMD, `reference` must point at the experiment's reference measure
// and each trial compares a fresh 2k-sample window draw against it. The MV
// thresholds are analytic: h_mean = ||mu_in - mu_out||/2 with (E_in, E_out)
// = (0, ||mu_in - mu_out||), and h_var = (var_in + var_out)/2 with
// (E_in, E_out) = (var_in, var_out).
ThresholdSet threshold_gaussian(const GmmParams& params, std::size_t k,
                                DistanceKind kind, std::size_t trials,
                                std::uint64_t seed,
                                const EmpiricalMeasure* reference);

// Cluster-relative threshold: each trial realizes a cluster window Y, a
// rider window Z = Y + X with X ~ N(0, (var_in - var_c) I) on the same Y,
// and an outsider window W. Rejects with a diagnostic when the fitted
// var_in falls below the cluster-motion estimate var_c (the implied wiggle
// variance would be negative). MV parts use the same closed forms as
// threshold_gaussian.
ThresholdSet threshold_closest(const GmmParams& params,
                               const ClusterMotion& motion, std::size_t k,
                               DistanceKind kind, std::size_t trials,
                               std::uint64_t seed);

// similarity terms for interior t in [k+1, T-k]; reference must be non-null
// for WS/MMD and is ignored for MV (analytic moments are used)
std::vector<QuadTerm> similarity_terms_gaussian(
    const SimulationRecord& record, const GmmParams& params, std::size_t k,
    DistanceKind kind, const ThresholdSet& thresholds,
    const EmpiricalMeasure* reference);

// similarity terms against the modal nearest cluster's windowed measure
std::vector<QuadTerm> similarity_terms_closest(const SimulationRecord& record,
                                               std::size_t k,
                                               DistanceKind kind,
                                               const ThresholdSet& thresholds);

MembershipObjective assemble_objective(const std::vector<QuadTerm>& radius,
                                       const std::vector<QuadTerm>& similarity,
                                       double beta_r, double beta_s,
                                       std::size_t T, std::size_t k);

} // namespace clumem
