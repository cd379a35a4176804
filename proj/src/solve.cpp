#include "clumem/solve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clumem {

void SolverConfig::validate() const {
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("solver: learning_rate must be positive");
    if (iterations == 0)
        throw std::invalid_argument("solver: iterations must be positive");
    if (!(adam_beta1 > 0.0) || !(adam_beta1 < 1.0) || !(adam_beta2 > 0.0) ||
        !(adam_beta2 < 1.0))
        throw std::invalid_argument("solver: adam betas must lie in (0,1)");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("solver: epsilon must be positive");
    if (!(init_value >= 0.0) || !(init_value <= 1.0))
        throw std::invalid_argument("solver: init_value must lie in [0,1]");
}

double objective_value(const MembershipObjective& objective,
                       const std::vector<double>& e) {
    if (e.size() != objective.T)
        throw std::invalid_argument("objective_value: e size mismatch");
    double value = 0.0;
    for (const QuadTerm& term : objective.terms) {
        const double diff = e[term.t - 1] - static_cast<double>(term.target);
        value += objective.beta_of(term.tag) * term.weight * diff * diff;
    }
    return value;
}

void objective_gradient(const MembershipObjective& objective,
                        const std::vector<double>& e,
                        std::vector<double>& grad) {
    if (e.size() != objective.T)
        throw std::invalid_argument("objective_gradient: e size mismatch");
    grad.assign(objective.T, 0.0);
    for (const QuadTerm& term : objective.terms) {
        const double diff = e[term.t - 1] - static_cast<double>(term.target);
        grad[term.t - 1] += 2.0 * objective.beta_of(term.tag) * term.weight * diff;
    }
}

MembershipEstimate closed_form_minimize(const MembershipObjective& objective,
                                        double init_value) {
    if (!(init_value >= 0.0) || !(init_value <= 1.0))
        throw std::invalid_argument("closed_form_minimize: init_value outside [0,1]");
    std::vector<double> mass(objective.T, 0.0), pull(objective.T, 0.0);
    for (const QuadTerm& term : objective.terms) {
        const double w = objective.beta_of(term.tag) * term.weight;
        mass[term.t - 1] += w;
        pull[term.t - 1] += w * static_cast<double>(term.target);
    }
    MembershipEstimate est;
    est.e.resize(objective.T);
    for (std::size_t i = 0; i < objective.T; ++i) {
        const double v = mass[i] > 0.0 ? pull[i] / mass[i] : init_value;
        est.e[i] = std::clamp(v, 0.0, 1.0);
    }
    est.labels = classify(est.e, objective.k, objective.T);
    return est;
}

MembershipEstimate adam_minimize(const MembershipObjective& objective,
                                 const SolverConfig& config,
                                 std::vector<double>* value_trace) {
    config.validate();
    const std::size_t T = objective.T;
    MembershipEstimate est;
    est.e.assign(T, config.init_value);
    std::vector<double> m(T, 0.0), v(T, 0.0), grad;
    if (value_trace) value_trace->clear();

    double b1_pow = 1.0, b2_pow = 1.0;
    for (std::size_t step = 1; step <= config.iterations; ++step) {
        objective_gradient(objective, est.e, grad);
        b1_pow *= config.adam_beta1;
        b2_pow *= config.adam_beta2;
        for (std::size_t i = 0; i < T; ++i) {
            const double g = grad[i];
            if (!std::isfinite(g))
                throw std::runtime_error("adam_minimize: non-finite gradient");
            m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * g;
            v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * g * g;
            const double m_hat = m[i] / (1.0 - b1_pow);
            const double v_hat = v[i] / (1.0 - b2_pow);
            const double next =
                est.e[i] -
                config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
            est.e[i] = std::clamp(next, 0.0, 1.0);
        }
        if (value_trace)
            value_trace->push_back(objective_value(objective, est.e));
    }
    est.labels = classify(est.e, objective.k, objective.T);
    return est;
}

std::vector<std::uint8_t> classify(const std::vector<double>& e, std::size_t k,
                                   std::size_t T) {
    if (e.size() != T) throw std::invalid_argument("classify: e size mismatch");
    if (T < 2 * k + 1) return {};
    std::vector<std::uint8_t> labels;
    labels.reserve(T - 2 * k);
    for (std::size_t t = k + 1; t + k <= T; ++t)
        labels.push_back(e[t - 1] >= 0.5 ? 1 : 0);
    return labels;
}

double accuracy(const std::vector<std::uint8_t>& labels,
                const std::vector<std::uint8_t>& truth) {
    if (labels.size() != truth.size() || labels.empty())
        throw std::invalid_argument("accuracy: label sequences must match");
    std::size_t agree = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        agree += (labels[i] != 0) == (truth[i] != 0);
    return static_cast<double>(agree) / static_cast<double>(labels.size());
}

std::vector<std::uint8_t> interior_truth(const SimulationRecord& record,
                                         std::size_t k) {
    if (record.T < 2 * k + 1)
        throw std::invalid_argument("interior_truth: horizon too short");
    std::vector<std::uint8_t> truth;
    truth.reserve(record.T - 2 * k);
    for (std::size_t t = k + 1; t + k <= record.T; ++t)
        truth.push_back(record.inside[t - 1]);
    return truth;
}

} // namespace clumem
