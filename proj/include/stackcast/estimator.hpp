#ifndef STACKCAST_ESTIMATOR_HPP
#define STACKCAST_ESTIMATOR_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "stackcast/forecast.hpp"
#include "stackcast/score_matrix.hpp"

namespace stackcast {

// Symmetric Dirichlet prior whose concentration grows with the training set:
// alpha(t) = rho * N(t) / M, so the pull toward equal weights stays constant.
struct PriorSchedule {
    double rho = 0.0;          // in [0, 1]
    std::size_t num_models = 0;
};

double alpha_of_t(const PriorSchedule& schedule, std::size_t n_train);

// Variational Dirichlet posterior over the mixture weights.
class DirichletState {
  public:
    explicit DirichletState(std::vector<double> gamma);

    std::size_t size() const { return gamma_.size(); }
    const std::vector<double>& gamma() const { return gamma_; }

  private:
    std::vector<double> gamma_;
};

// r(m,t): probability component m generated observation t. Columns sum to 1.
class ResponsibilityMatrix {
  public:
    ResponsibilityMatrix(std::size_t m, std::size_t t, std::vector<double> values);

    std::size_t num_models() const { return m_; }
    std::size_t num_obs() const { return t_; }
    double at(std::size_t m, std::size_t t) const { return values_[m * t_ + t]; }

    // Per-model responsibility totals (row sums).
    std::vector<double> row_sums() const;

  private:
    std::size_t m_, t_;
    std::vector<double> values_;
};

struct FitTrace {
    std::size_t iterations = 0;
    std::vector<double> objective_path;  // loglikelihood (EM) or penalized loglikelihood (VI)
    bool converged = false;
    WeightVector final_weights{std::vector<double>{1.0}};
    std::optional<DirichletState> final_state;
};

struct FitOptions {
    double tol = 1e-8;
    std::size_t max_iters = 10000;
};

// Digamma, accurate to ~1e-12 for arguments >= 1e-6.
double digamma(double x);

// E[log pi_k] = psi(gamma_k) - psi(sum gamma) under Dir(gamma).
std::vector<double> expected_log_pi(const DirichletState& state);

// Mixture loglikelihood sum_t log(sum_m pi_m exp(scores[m,t])), log-sum-exp stabilized.
double log_likelihood(const LogScoreMatrix& scores, const WeightVector& pi);

// EM responsibilities: r(m,t) = pi_m f_m(i_t) / sum_m pi_m f_m(i_t).
ResponsibilityMatrix em_responsibilities(const LogScoreMatrix& scores, const WeightVector& pi);

// VI responsibilities: column-normalized exp(E[log pi_m] + scores[m,t]).
ResponsibilityMatrix vi_responsibilities(const LogScoreMatrix& scores, const DirichletState& state);

FitTrace fit_em(const LogScoreMatrix& scores, const WeightVector& init, const FitOptions& opts = {});

// Regularized weight estimation: alternates the EM responsibility function at
// the current regularized weights with gamma_m = alpha(t) + sum_t r(m,t), so
// the alpha = 0 iteration reduces exactly to fit_em. The trace objective is
// the penalized loglikelihood LL(pi) + alpha * sum_m log pi_m.
FitTrace fit_vi(const LogScoreMatrix& scores, const PriorSchedule& schedule,
                const WeightVector& init, const FitOptions& opts = {});

// Posterior MAP weights gamma_m / sum gamma. Equals the convex combination
// (rho/(1+rho)) * 1/M + (1/(1+rho)) * data responsibility share.
WeightVector map_weights(const DirichletState& state);

// Evidence lower bound E_q[log p(D,Z,pi)] - E_q[log q(Z)] - E_q[log q(pi)].
// With alpha == 0 (improper prior limit) the constant prior normalizer is dropped.
double elbo(const LogScoreMatrix& scores, const DirichletState& state,
            const ResponsibilityMatrix& r, double alpha);

}  // namespace stackcast

#endif
