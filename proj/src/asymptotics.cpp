#include "specfit/asymptotics.hpp"

#include <cmath>

namespace specfit {

Eigen::MatrixXd jacobian(const Theta& theta, const FrequencyGrid& grid) {
    const ModelVector mv = model_g_deriv(theta.lambda, grid);
    Eigen::MatrixXd J(grid.size(), 3);
    J.col(0).setOnes();
    J.col(1) = mv.g;
    J.col(2) = theta.mu2 * mv.dg;
    return J;
}

JtJMatrix jtj_exact(const Theta& theta, const FrequencyGrid& grid) {
    const Eigen::MatrixXd J = jacobian(theta, grid);
    JtJMatrix out{J.transpose() * J, JtJMatrix::Mode::Exact};
    return out;
}

JtJMatrix jtj_asymptotic(const Theta& theta, Eigen::Index T) {
    const double l = theta.lambda, m2 = theta.mu2;
    if (!(l > 0.0 && l < 0.5))
        throw std::invalid_argument("jtj_asymptotic: lambda outside (0, 1/2)");
    const double Td = double(T), T2 = Td * Td;
    Eigen::Matrix3d A;
    A(0, 0) = Td / 2.0;
    A(0, 1) = l * (1.0 - l) / 2.0 * Td;
    A(0, 2) = m2 * (0.5 - l) * Td;
    A(1, 1) = 0.5 * (2.0 * l * l * l / 3.0 - l * l * l * l) * T2;
    A(1, 2) = m2 / 2.0 * (l * l - 2.0 * l * l * l) * T2;
    A(2, 2) = m2 * m2 * (l - 2.0 * l * l) * T2;
    A(1, 0) = A(0, 1);
    A(2, 0) = A(0, 2);
    A(2, 1) = A(1, 2);
    return {A, JtJMatrix::Mode::Asymptotic};
}

SigmaMatrix sigma_matrix(const Theta& theta) {
    const double l = theta.lambda, m2 = theta.mu2;
    if (!(l > 0.0 && l < 0.5))
        throw std::invalid_argument("sigma_matrix: lambda outside (0, 1/2)");
    if (!(m2 > 0.0)) throw std::invalid_argument("sigma_matrix: mu2 must be positive");

    SigmaMatrix out;
    Eigen::Matrix3d& S = out.sigma;
    S.setZero();
    S(0, 0) = 2.0;
    S(1, 1) = 12.0 / (l * l * l);
    S(1, 2) = S(2, 1) = -6.0 / (m2 * l * l);
    S(2, 2) = 2.0 * (2.0 - 3.0 * l) / (m2 * m2 * l * (1.0 - 2.0 * l));

    Eigen::Matrix3d& P = out.inverse;
    P.setZero();
    P(0, 0) = 0.5;
    P(1, 1) = l * l * l * (1.0 / 3.0 - l / 2.0);
    P(1, 2) = P(2, 1) = l * l * m2 * (0.5 - l);
    P(2, 2) = l * m2 * m2 * (1.0 - 2.0 * l);
    return out;
}

std::array<double, 3> standard_errors(const Theta& theta, Eigen::Index T) {
    const SigmaMatrix sm = sigma_matrix(theta);
    const double s2 = theta.sigma2, Td = double(T);
    return {s2 * std::sqrt(sm.sigma(0, 0) / Td),
            s2 * std::sqrt(sm.sigma(1, 1)) / Td,
            s2 * std::sqrt(sm.sigma(2, 2)) / Td};
}

namespace {

// Inverse standard normal CDF (Acklam's rational approximation, refined by a
// Halley step against erfc); accurate to ~1e-15 over (0, 1).
double norm_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

}  // namespace

ConfidenceInterval confidence_interval(double estimate, double se, double level,
                                       double lo_bound, double hi_bound) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("confidence_interval: level outside (0, 1)");
    if (se < 0.0) throw std::invalid_argument("confidence_interval: negative se");
    const double z = norm_quantile((1.0 + level) / 2.0);
    ConfidenceInterval ci{estimate - z * se, estimate + z * se, false};
    if (ci.lower < lo_bound) {
        ci.lower = lo_bound;
        ci.truncated = true;
    }
    if (ci.upper > hi_bound) {
        ci.upper = hi_bound;
        ci.truncated = true;
    }
    return ci;
}

std::array<std::pair<double, double>, 5> trig_sum_pairs(double lambda, Eigen::Index T) {
    if (!(lambda > 0.0 && lambda < 0.5))
        throw std::invalid_argument("trig_sum_pairs: lambda outside (0, 1/2)");
    const Eigen::Index M = T / 2;
    const double Td = double(T), l = lambda;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0;
    for (Eigen::Index k = 1; k <= M; ++k) {
        const double kd = double(k);
        const double den = std::sin(M_PI * kd / Td);
        const double den2 = den * den;
        const double sl = std::sin(l * M_PI * kd);
        const double sl2 = sl * sl;
        const double s2l = std::sin(2.0 * l * M_PI * kd);
        s1 += sl2 / den2;
        s2 += sl2 * sl2 / (den2 * den2);
        s3 += kd * M_PI * s2l / den2;
        s4 += kd * M_PI * s2l * sl2 / (den2 * den2);
        s5 += kd * kd * M_PI * M_PI * s2l * s2l / (den2 * den2);
    }
    const double T2 = Td * Td;
    return {{{s1 / Td, (l - l * l) / 2.0 * Td},
             {s2 / T2, 0.5 * (2.0 * l * l * l / 3.0 - l * l * l * l) * T2},
             {s3 / Td, (0.5 - l) * Td},
             {s4 / T2, 0.5 * (l * l - 2.0 * l * l * l) * T2},
             {s5 / T2, (l - 2.0 * l * l) * T2}}};
}

}  // namespace specfit
