#ifndef SPECFIT_ESTIMATOR_HPP
#define SPECFIT_ESTIMATOR_HPP

#include <array>
#include <string>
#include <vector>

#include "specfit/spectral.hpp"
#include "specfit/types.hpp"

namespace specfit {

/// Parameter triple of the spectral model f_k = sigma2 + mu2 * g_k(lambda).
struct Theta {
    double sigma2 = 1.0;  // pooled variance, > 0
    double mu2 = 0.0;     // squared mean shift, >= 0
    double lambda = 0.25; // change location, in (0, 1/2) before resolution
};

struct FitConfig {
    int max_iterations = 100;
    double tolerance = 1e-8;        // relative parameter change
    int grid_points = 0;            // 0: floor(T/4) capped at 256
    double damping = 0.5;           // backtracking factor for the lambda step
    int max_halvings = 20;
    double mu2_floor_scale = 1e-10; // floor = scale * mean(I)^2
};

struct SegmentStats {
    Eigen::Index split = 0;  // first index of the second segment
    double mean_before = 0, mean_after = 0;
    double var_before = 0, var_after = 0;
};

struct FitResult {
    Theta theta;                 // lambda in (0, 1/2)
    double lambda_resolved = 0;  // in (0, 1), set by resolve_ambiguity
    Eigen::Index tau_hat = 0;    // floor(lambda_resolved * T)
    double objective = 0;
    int iterations = 0;
    bool converged = false;
    std::array<double, 3> standard_errors{0, 0, 0};  // (sigma2, mu2, lambda)
    SegmentStats segment_stats;
    // diagnostic flags
    bool no_change = false;       // mu2 collapsed below the floor
    bool sigma2_clamped = false;
    bool mu2_clamped = false;
    bool lambda_step_skipped = false;
    bool ambiguity_tie = false;
    bool se_unavailable = false;  // lambda too close to 1/2 for Theorem-style se
    bool resolved = false;
};

/// u_k = I_k - sigma2 - mu2 * g_k(lambda).
Vector residuals(const Periodogram& pgram, const Theta& theta);

/// S_T(theta) = <u, u>.
double objective(const Periodogram& pgram, const Theta& theta);

/// Closed-form sigma2 update with the (M-1) divisor; clamped at a small
/// positive floor when the raw value is nonpositive.
double update_sigma2(const Periodogram& pgram, const Theta& prev,
                     bool* clamped = nullptr);

/// Increment-form mu2 update: mu2 + <g, u>/<g, g>, clamped below at 0.
double update_mu2(const Periodogram& pgram, const Theta& prev,
                  bool* clamped = nullptr);

/// Gauss-Newton lambda step with backtracking against S_T, clamped into
/// [1/T, 1/2 - 1/T]. The step is skipped when mu2 is below the floor.
double update_lambda(const Periodogram& pgram, const Theta& prev,
                     const FitConfig& config, bool* skipped = nullptr);

/// Grid search over lambda with an exact linear solve for (sigma2, mu2).
Theta init_theta(const Periodogram& pgram, const FitConfig& config);

/// Full hybrid iteration (closed-form sigma2/mu2, Gauss-Newton lambda),
/// Jacobi schedule, monotone in S_T. Pre-resolution: lambda in (0, 1/2).
FitResult fit(const Periodogram& pgram, const FitConfig& config = {});

/// Pooled segment variance lambda*var[0,tau) + (1-lambda)*var[tau,T) at
/// tau = floor(x*T); used by the time-domain ambiguity rule.
double pooled_variance(const TimeSeries& series, double x);

/// Picks lambda_hat or 1 - lambda_hat by comparing pooled segment variances.
FitResult resolve_ambiguity(const TimeSeries& series, const FitResult& prefit);

}  // namespace specfit

#endif
