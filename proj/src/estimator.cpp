#include "stackcast/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stackcast {

namespace {

double log_sum_exp(const double* x, std::size_t n) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) hi = std::max(hi, x[i]);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(x[i] - hi);
    return hi + std::log(acc);
}

std::vector<double> safe_log(const std::vector<double>& w) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = w[i] > 0.0 ? std::log(w[i]) : -std::numeric_limits<double>::infinity();
    return out;
}

// Column-normalize exp(bias_m + scores[m,t]) in log space.
ResponsibilityMatrix normalized_responsibilities(const LogScoreMatrix& scores,
                                                 const std::vector<double>& bias) {
    const std::size_t m_count = scores.num_models();
    const std::size_t t_count = scores.num_obs();
    if (bias.size() != m_count) throw DomainError("responsibilities: dimension mismatch");
    std::vector<double> values(m_count * t_count);
    std::vector<double> col(m_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t m = 0; m < m_count; ++m) col[m] = bias[m] + scores.at(m, t);
        const double lse = log_sum_exp(col.data(), m_count);
        if (!std::isfinite(lse))
            throw DomainError("degenerate column " + std::to_string(t) +
                              ": all components have zero weighted mass");
        for (std::size_t m = 0; m < m_count; ++m)
            values[m * t_count + t] = std::exp(col[m] - lse);
    }
    return ResponsibilityMatrix(m_count, t_count, std::move(values));
}

}  // namespace

double alpha_of_t(const PriorSchedule& schedule, std::size_t n_train) {
    if (schedule.rho < 0.0 || schedule.rho > 1.0) throw DomainError("rho must lie in [0, 1]");
    if (schedule.num_models == 0) throw DomainError("schedule needs num_models >= 1");
    return schedule.rho * static_cast<double>(n_train) / static_cast<double>(schedule.num_models);
}

DirichletState::DirichletState(std::vector<double> gamma) : gamma_(std::move(gamma)) {
    if (gamma_.empty()) throw DomainError("empty Dirichlet state");
    for (double g : gamma_)
        if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("Dirichlet concentrations must be > 0");
}

ResponsibilityMatrix::ResponsibilityMatrix(std::size_t m, std::size_t t, std::vector<double> values)
    : m_(m), t_(t), values_(std::move(values)) {
    if (values_.size() != m * t) throw DomainError("ResponsibilityMatrix dimension mismatch");
}

std::vector<double> ResponsibilityMatrix::row_sums() const {
    std::vector<double> out(m_, 0.0);
    for (std::size_t m = 0; m < m_; ++m)
        for (std::size_t t = 0; t < t_; ++t) out[m] += values_[m * t_ + t];
    return out;
}

double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma defined here for x > 0 only");
    // Recurrence up to x >= 6, then the asymptotic series.
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv;
    // Bernoulli-number series through x^-12
    result -= inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
              inv2 * (1.0 / 252.0 -
              inv2 * (1.0 / 240.0 -
              inv2 * (1.0 / 132.0 -
              inv2 * (691.0 / 32760.0))))));
    return result;
}

std::vector<double> expected_log_pi(const DirichletState& state) {
    double total = 0.0;
    for (double g : state.gamma()) total += g;
    const double psi_total = digamma(total);
    std::vector<double> out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) out[i] = digamma(state.gamma()[i]) - psi_total;
    return out;
}

double log_likelihood(const LogScoreMatrix& scores, const WeightVector& pi) {
    if (pi.size() != scores.num_models()) throw DomainError("log_likelihood: dimension mismatch");
    const std::vector<double> log_pi = safe_log(pi.values());
    const std::size_t m_count = scores.num_models();
    std::vector<double> col(m_count);
    double total = 0.0;
    for (std::size_t t = 0; t < scores.num_obs(); ++t) {
        for (std::size_t m = 0; m < m_count; ++m) col[m] = log_pi[m] + scores.at(m, t);
        total += log_sum_exp(col.data(), m_count);
    }
    return total;
}

ResponsibilityMatrix em_responsibilities(const LogScoreMatrix& scores, const WeightVector& pi) {
    if (pi.size() != scores.num_models()) throw DomainError("em_responsibilities: dimension mismatch");
    return normalized_responsibilities(scores, safe_log(pi.values()));
}

ResponsibilityMatrix vi_responsibilities(const LogScoreMatrix& scores, const DirichletState& state) {
    if (state.size() != scores.num_models()) throw DomainError("vi_responsibilities: dimension mismatch");
    return normalized_responsibilities(scores, expected_log_pi(state));
}

FitTrace fit_em(const LogScoreMatrix& scores, const WeightVector& init, const FitOptions& opts) {
    if (init.size() != scores.num_models()) throw DomainError("fit_em: init dimension mismatch");
    if (scores.num_obs() == 0) throw DomainError("fit_em: no observations");

    FitTrace trace;
    WeightVector pi = init;
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        const ResponsibilityMatrix r = em_responsibilities(scores, pi);
        std::vector<double> sums = r.row_sums();
        double total = 0.0;
        for (double s : sums) total += s;
        for (double& s : sums) s /= total;
        pi = WeightVector(std::move(sums));
        const double ll = log_likelihood(scores, pi);
        trace.objective_path.push_back(ll);
        trace.iterations = iter + 1;
        if (iter > 0 && ll - trace.objective_path[iter - 1] < opts.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.final_weights = pi;
    return trace;
}

WeightVector map_weights(const DirichletState& state) {
    double total = 0.0;
    for (double g : state.gamma()) total += g;
    std::vector<double> w(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) w[i] = state.gamma()[i] / total;
    return WeightVector(std::move(w));
}

double elbo(const LogScoreMatrix& scores, const DirichletState& state,
            const ResponsibilityMatrix& r, double alpha) {
    const std::size_t m_count = scores.num_models();
    const std::size_t t_count = scores.num_obs();
    if (state.size() != m_count || r.num_models() != m_count || r.num_obs() != t_count)
        throw DomainError("elbo: dimension mismatch");

    const std::vector<double> e_log_pi = expected_log_pi(state);

    // E_q[log p(D, Z | pi)] and the q(Z) entropy term.
    double data_term = 0.0;
    double entropy_z = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t t = 0; t < t_count; ++t) {
            const double rmt = r.at(m, t);
            if (rmt > 0.0) {
                data_term += rmt * (e_log_pi[m] + scores.at(m, t));
                entropy_z += rmt * std::log(rmt);
            }
        }
    }

    // E_q[log p(pi)] under the symmetric Dir(alpha) prior; the constant
    // normalizer is dropped at alpha == 0 (improper prior limit).
    double sum_e_log_pi = 0.0;
    for (double v : e_log_pi) sum_e_log_pi += v;
    double prior_term = (alpha - 1.0) * sum_e_log_pi;
    if (alpha > 0.0)
        prior_term += std::lgamma(static_cast<double>(m_count) * alpha) -
                      static_cast<double>(m_count) * std::lgamma(alpha);

    // E_q[log q(pi)] for Dir(gamma).
    double gamma_total = 0.0;
    double q_pi = 0.0;
    for (double g : state.gamma()) gamma_total += g;
    q_pi += std::lgamma(gamma_total);
    for (std::size_t i = 0; i < m_count; ++i) {
        q_pi -= std::lgamma(state.gamma()[i]);
        q_pi += (state.gamma()[i] - 1.0) * e_log_pi[i];
    }

    return data_term + prior_term - entropy_z - q_pi;
}

FitTrace fit_vi(const LogScoreMatrix& scores, const PriorSchedule& schedule,
                const WeightVector& init, const FitOptions& opts) {
    if (init.size() != scores.num_models()) throw DomainError("fit_vi: init dimension mismatch");
    if (schedule.num_models != scores.num_models()) throw DomainError("fit_vi: schedule mismatch");
    if (scores.num_obs() == 0) throw DomainError("fit_vi: no observations");
    const double alpha = alpha_of_t(schedule, scores.num_obs());

    FitTrace trace;
    // Responsibilities reuse the EM responsibility function, evaluated at the
    // regularized weights gamma / sum(gamma); the unregularized (alpha = 0)
    // iteration is then identical to fit_em.  The recorded objective is the
    // penalized log-likelihood  LL(pi) + alpha * sum_m log pi_m, which this
    // coordinate iteration ascends monotonically.
    std::vector<double> bias = safe_log(init.values());
    std::optional<DirichletState> state;
    WeightVector pi = init;
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        const ResponsibilityMatrix r = normalized_responsibilities(scores, bias);
        std::vector<double> gamma = r.row_sums();
        for (double& g : gamma) {
            g += alpha;
            // With alpha == 0 a fully dominated component can underflow to a
            // zero responsibility sum; keep gamma strictly positive so the
            // posterior stays well defined (the weight is effectively zero).
            if (!(g > 0.0)) g = 1e-12;
        }
        state.emplace(std::move(gamma));
        pi = map_weights(*state);
        bias = safe_log(pi.values());
        double objective = log_likelihood(scores, pi);
        if (alpha > 0.0)
            for (std::size_t m = 0; m < pi.size(); ++m) objective += alpha * std::log(pi[m]);
        trace.objective_path.push_back(objective);
        trace.iterations = iter + 1;
        if (iter > 0 && objective - trace.objective_path[iter - 1] < opts.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.final_state = state;
    trace.final_weights = pi;
    return trace;
}

}  // namespace stackcast
