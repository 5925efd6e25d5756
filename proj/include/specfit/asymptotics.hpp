#ifndef SPECFIT_ASYMPTOTICS_HPP
#define SPECFIT_ASYMPTOTICS_HPP

#include <array>
#include <utility>

#include "specfit/estimator.hpp"

namespace specfit {

/// Limiting covariance of (sqrt(T)(s2-s2_0), T(m2-m2_0), T(l-l_0)),
/// up to the sigma^4 scale factor.
struct SigmaMatrix {
    Eigen::Matrix3d sigma;    // Sigma
    Eigen::Matrix3d inverse;  // closed-form Sigma^{-1}
};

struct JtJMatrix {
    enum class Mode { Exact, Asymptotic };
    Eigen::Matrix3d value;
    Mode mode;
};

/// M x 3 Jacobian with columns (1, g_k, mu2 * dg_k).
Eigen::MatrixXd jacobian(const Theta& theta, const FrequencyGrid& grid);

/// J'J as finite sums over k = 1..M.
JtJMatrix jtj_exact(const Theta& theta, const FrequencyGrid& grid);

/// Leading-order J'J for lambda in (0, 1/2).
JtJMatrix jtj_asymptotic(const Theta& theta, Eigen::Index T);

/// Requires 0 < lambda < 1/2 strictly and mu2 > 0.
SigmaMatrix sigma_matrix(const Theta& theta);

/// Plug-in standard errors (sigma2, mu2, lambda); note the sqrt(T) vs T rates.
std::array<double, 3> standard_errors(const Theta& theta, Eigen::Index T);

struct ConfidenceInterval {
    double lower, upper;
    bool truncated = false;
};

/// Normal-quantile interval estimate +- z * se; [lo_bound, hi_bound] clip the
/// result (used to keep the lambda interval inside (0, 1)).
ConfidenceInterval confidence_interval(double estimate, double se, double level,
                                       double lo_bound = -HUGE_VAL,
                                       double hi_bound = HUGE_VAL);

/// The five (exact finite sum, leading asymptotic) pairs behind the J'J
/// approximation.
std::array<std::pair<double, double>, 5> trig_sum_pairs(double lambda, Eigen::Index T);

}  // namespace specfit

#endif
