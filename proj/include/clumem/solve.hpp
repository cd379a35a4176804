#pragma once

// Minimization of the membership objective over [0,1]^T. The objective is a
// separable convex quadratic, so a closed-form weighted average serves as an
// exact oracle; ADAM with box clipping is the production path and must land
// within 1e-3 of the oracle on every coordinate that carries weight.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "clumem/membership.hpp"

namespace clumem {

struct SolverConfig {
    double learning_rate = 0.05;
    std::size_t iterations = 500;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double epsilon = 1e-8;
    double init_value = 0.5; // coordinates with zero total weight stay here

    void validate() const; // throws std::invalid_argument
};

struct MembershipEstimate {
    std::vector<double> e;            // T values in [0,1], index t-1
    std::vector<std::uint8_t> labels; // interior t in [k+1, T-k]
};

double objective_value(const MembershipObjective& objective,
                       const std::vector<double>& e);
void objective_gradient(const MembershipObjective& objective,
                        const std::vector<double>& e,
                        std::vector<double>& grad);

// exact per-coordinate weighted average of targets
MembershipEstimate closed_form_minimize(const MembershipObjective& objective,
                                        double init_value = 0.5);

// ADAM with post-step clipping to [0,1]. value_trace, when given, receives
// the objective value after every iteration (used by the descent tests).
MembershipEstimate adam_minimize(const MembershipObjective& objective,
                                 const SolverConfig& config,
                                 std::vector<double>* value_trace = nullptr);

// labels for t in [k+1, T-k]: e_t >= 1/2 maps to 1
std::vector<std::uint8_t> classify(const std::vector<double>& e, std::size_t k,
                                   std::size_t T);

// fraction of agreements between label sequences of equal length
double accuracy(const std::vector<std::uint8_t>& labels,
                const std::vector<std::uint8_t>& truth);

// truth restricted to the interior timepoints of the record
std::vector<std::uint8_t> interior_truth(const SimulationRecord& record,
                                         std::size_t k);

} // namespace clumem
