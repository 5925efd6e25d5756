#ifndef SPECFIT_MONTE_CARLO_HPP
#define SPECFIT_MONTE_CARLO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "specfit/estimator.hpp"

namespace specfit {

enum class NoiseFamily { StandardNormal, StudentT3, ChiSquared1 };

NoiseFamily noise_from_string(const std::string& name);
std::string to_string(NoiseFamily f);

/// Simulation recipe: X_t = nu_B + xi_B Z_t before floor(lambda*T),
/// nu_A + xi_A Z_t after, with Z standardized to mean 0 and variance 1.
struct Scenario {
    double nu_B = 0, xi_B = 1;
    double nu_A = 0, xi_A = 1;
    double lambda = 0.25;
    Eigen::Index T = 1024;
    NoiseFamily noise = NoiseFamily::StandardNormal;
    std::uint64_t seed = 0;
    std::string name;

    double true_sigma2() const;  // lambda_T xi_B^2 + (1 - lambda_T) xi_A^2
    double true_mu2() const;     // (nu_B - nu_A)^2
    Eigen::Index tau() const;    // floor(lambda * T)
};

struct ScenarioSummary {
    Scenario scenario;
    int replications = 0;
    int converged = 0;
    int no_change = 0;
    int failed = 0;
    // means and sds over replications that produced an estimate
    std::array<double, 3> mean{0, 0, 0};  // (sigma2, mu2, lambda_resolved-or-raw)
    std::array<double, 3> sd{0, 0, 0};
};

/// Counter-based per-replication seed derivation (splitmix64 mix).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// One standardized draw stream; exposed for the standardization tests.
Vector standardized_draws(NoiseFamily family, Eigen::Index n, std::uint64_t seed);

/// Deterministic for a fixed seed; change index is floor(lambda*T).
TimeSeries generate(const Scenario& scenario);

/// Fit every replication (seed split by index) and aggregate with an
/// index-ordered reduction; `threads` > 1 fans replications out.
ScenarioSummary run_scenario(const Scenario& scenario, int replications,
                             const FitConfig& config = {}, int threads = 1,
                             bool resolve = true);

struct MomentReport {
    int replications = 0;
    Eigen::Index T = 0;
    Vector mean_I;              // sample mean of I_k over replications
    Vector var_I;               // sample variance of I_k
    Vector expected_I;          // finite-T Theorem value at lambda_T
    double sigma4 = 0;          // (lambda_T s_B^2 + (1-lambda_T) s_A^2)^2
    double mean_within_3se = 0; // fraction of frequencies
    double var_within_15pct = 0;
    int cov_pairs_checked = 0;
    int cov_pairs_within_3se = 0;
};

/// Monte Carlo check of the periodogram mean/variance/cross-covariance limits.
MomentReport verify_moments(const Scenario& scenario, int replications);

}  // namespace specfit

#endif
