#include "specfit/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace specfit {

namespace {

double mu2_floor(const Periodogram& pgram, const FitConfig& config) {
    const double m = pgram.values().mean();
    return config.mu2_floor_scale * m * m;
}

double rel_change(double next, double prev) {
    const double scale = std::max(std::abs(prev), std::abs(next));
    if (scale == 0.0) return 0.0;
    return std::abs(next - prev) / scale;
}

int default_grid_points(const FitConfig& config, Eigen::Index T) {
    if (config.grid_points > 0) return config.grid_points;
    return int(std::min<Eigen::Index>(T / 4, 256));
}

}  // namespace

Vector residuals(const Periodogram& pgram, const Theta& theta) {
    const ModelVector mv = model_g(theta.lambda, pgram.grid());
    return pgram.values() - Vector::Constant(pgram.size(), theta.sigma2) -
           theta.mu2 * mv.g;
}

double objective(const Periodogram& pgram, const Theta& theta) {
    const Vector u = residuals(pgram, theta);
    return u.squaredNorm();
}

double update_sigma2(const Periodogram& pgram, const Theta& prev, bool* clamped) {
    const Eigen::Index M = pgram.size();
    const ModelVector mv = model_g(prev.lambda, pgram.grid());
    double s2 = (pgram.values() - prev.mu2 * mv.g).sum() / double(M - 1);
    bool clip = false;
    if (s2 <= 0.0) {
        s2 = 1e-12 * pgram.values().mean();
        clip = true;
    }
    if (clamped) *clamped = clip;
    return s2;
}

double update_mu2(const Periodogram& pgram, const Theta& prev, bool* clamped) {
    const ModelVector mv = model_g(prev.lambda, pgram.grid());
    const double gg = mv.g.squaredNorm();
    if (gg <= 0.0) throw std::domain_error("update_mu2: degenerate g vector");
    const Vector u = residuals(pgram, prev);
    double m2 = prev.mu2 + mv.g.dot(u) / gg;
    bool clip = false;
    if (m2 < 0.0) {
        m2 = 0.0;
        clip = true;
    }
    if (clamped) *clamped = clip;
    return m2;
}

double update_lambda(const Periodogram& pgram, const Theta& prev,
                     const FitConfig& config, bool* skipped) {
    const Eigen::Index T = pgram.grid().T();
    const double lo = 1.0 / double(T), hi = 0.5 - 1.0 / double(T);
    if (skipped) *skipped = false;
    if (prev.mu2 <= 0.0 || prev.mu2 < mu2_floor(pgram, config)) {
        if (skipped) *skipped = true;
        return prev.lambda;
    }
    const ModelVector mv = model_g_deriv(prev.lambda, pgram.grid());
    const double dd = mv.dg.squaredNorm();
    if (dd <= 0.0) {
        if (skipped) *skipped = true;
        return prev.lambda;
    }
    const Vector u = pgram.values() - Vector::Constant(pgram.size(), prev.sigma2) -
                     prev.mu2 * mv.g;
    double step = mv.dg.dot(u) / (prev.mu2 * dd);
    const double S_prev = u.squaredNorm();
    for (int h = 0; h <= config.max_halvings; ++h) {
        const double cand = std::clamp(prev.lambda + step, lo, hi);
        Theta t = prev;
        t.lambda = cand;
        if (objective(pgram, t) <= S_prev) return cand;
        step *= config.damping;
    }
    return std::clamp(prev.lambda, lo, hi);
}

Theta init_theta(const Periodogram& pgram, const FitConfig& config) {
    const Eigen::Index M = pgram.size();
    const int gp = default_grid_points(config, pgram.grid().T());
    const Vector& I = pgram.values();
    const double mean_I = I.mean();

    Theta best;
    double best_S = HUGE_VAL;
    for (int j = 1; j < gp; ++j) {
        const double lambda = double(j) / (2.0 * double(gp));
        const ModelVector mv = model_g(lambda, pgram.grid());
        // normal equations for I ~ s2 * 1 + m2 * g
        const double g1 = mv.g.sum(), gg = mv.g.squaredNorm(), gI = mv.g.dot(I);
        const double det = double(M) * gg - g1 * g1;
        double s2, m2;
        if (det > 0.0) {
            s2 = (gg * I.sum() - g1 * gI) / det;
            m2 = (double(M) * gI - g1 * I.sum()) / det;
        } else {
            s2 = mean_I;
            m2 = 0.0;
        }
        if (m2 < 0.0) {
            m2 = 0.0;
            s2 = mean_I;
        }
        if (s2 <= 0.0) s2 = std::max(1e-12 * mean_I, 1e-300);
        const Theta cand{s2, m2, lambda};
        const double S = objective(pgram, cand);
        if (S < best_S) {
            best_S = S;
            best = cand;
        }
    }
    return best;
}

FitResult fit(const Periodogram& pgram, const FitConfig& config) {
    const Eigen::Index T = pgram.grid().T();
    const double lo = 1.0 / double(T), hi = 0.5 - 1.0 / double(T);
    const double floor = mu2_floor(pgram, config);

    FitResult res;
    Theta th = init_theta(pgram, config);
    th.lambda = std::clamp(th.lambda, lo, hi);
    double S = objective(pgram, th);

    for (int it = 0; it < config.max_iterations; ++it) {
        res.iterations = it + 1;
        bool s2_clip = false, m2_clip = false, lam_skip = false;

        const double s2n = update_sigma2(pgram, th, &s2_clip);
        const double m2n = update_mu2(pgram, th, &m2_clip);

        // Gauss-Newton lambda step, backtracked against the joint candidate.
        double lam_n = th.lambda;
        double step = 0.0;
        if (th.mu2 > 0.0 && th.mu2 >= floor) {
            const ModelVector mv = model_g_deriv(th.lambda, pgram.grid());
            const double dd = mv.dg.squaredNorm();
            if (dd > 0.0) {
                const Vector u = pgram.values() -
                                 Vector::Constant(pgram.size(), th.sigma2) -
                                 th.mu2 * mv.g;
                step = mv.dg.dot(u) / (th.mu2 * dd);
            }
        } else {
            lam_skip = true;
        }

        Theta cand{s2n, m2n, th.lambda};
        double S_cand = HUGE_VAL;
        bool accepted = false;
        double st = step;
        for (int h = 0; h <= config.max_halvings; ++h) {
            cand.lambda = std::clamp(th.lambda + st, lo, hi);
            S_cand = objective(pgram, cand);
            if (S_cand <= S) {
                accepted = true;
                break;
            }
            st *= config.damping;
        }
        if (!accepted) {
            // The joint update overshoots even with a zero lambda step; damp
            // the whole increment, and stop at a stationary point if nothing
            // improves the objective.
            double a = 1.0;
            for (int h = 0; h < config.max_halvings; ++h) {
                a *= 0.5;
                cand.sigma2 = th.sigma2 + a * (s2n - th.sigma2);
                cand.mu2 = th.mu2 + a * (m2n - th.mu2);
                cand.lambda = std::clamp(th.lambda + a * step, lo, hi);
                S_cand = objective(pgram, cand);
                if (S_cand <= S) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                res.converged = true;
                break;
            }
        }

        res.sigma2_clamped = res.sigma2_clamped || s2_clip;
        res.mu2_clamped = res.mu2_clamped || m2_clip;
        res.lambda_step_skipped = res.lambda_step_skipped || lam_skip;

        const double rel = std::max({rel_change(cand.sigma2, th.sigma2),
                                     rel_change(cand.mu2, th.mu2),
                                     rel_change(cand.lambda, th.lambda)});
        th = cand;
        S = S_cand;
        if (rel <= config.tolerance) {
            res.converged = true;
            break;
        }
    }

    if (th.mu2 <= 0.0 || th.mu2 < floor) {
        res.no_change = true;
        th.mu2 = 0.0;
        th.sigma2 = pgram.values().mean();
        S = objective(pgram, th);
    }
    res.theta = th;
    res.objective = S;
    res.lambda_resolved = th.lambda;
    res.tau_hat = Eigen::Index(std::floor(th.lambda * double(T)));
    return res;
}

double pooled_variance(const TimeSeries& series, double x) {
    const Eigen::Index T = series.size();
    const auto tau = Eigen::Index(std::floor(x * double(T)));
    if (tau < 2 || T - tau < 2)
        throw std::invalid_argument("pooled_variance: segment shorter than 2");
    const auto& v = series.values();
    const auto head = v.head(tau);
    const auto tail = v.tail(T - tau);
    const double vB = (head.array() - head.mean()).square().sum() / double(tau - 1);
    const double vA = (tail.array() - tail.mean()).square().sum() / double(T - tau - 1);
    return x * vB + (1.0 - x) * vA;
}

FitResult resolve_ambiguity(const TimeSeries& series, const FitResult& prefit) {
    FitResult res = prefit;
    const Eigen::Index T = series.size();
    const double lam = prefit.theta.lambda;
    if (!(lam > 0.0 && lam < 0.5))
        throw std::invalid_argument("resolve_ambiguity: lambda not in (0, 1/2)");

    // too close to the edge for a segment-variance comparison
    if (Eigen::Index(std::floor(lam * double(T))) < 2) {
        res.lambda_resolved = lam;
        res.tau_hat = Eigen::Index(std::floor(lam * double(T)));
        return res;
    }

    const double p1 = pooled_variance(series, lam);
    const double p2 = pooled_variance(series, 1.0 - lam);
    double resolved = lam;
    if (std::abs(p1 - p2) < 1e-12) {
        res.ambiguity_tie = true;
    } else if (p1 > p2) {
        resolved = 1.0 - lam;
    }
    res.lambda_resolved = resolved;
    res.tau_hat = Eigen::Index(std::floor(resolved * double(T)));
    res.resolved = true;

    const auto& v = series.values();
    const auto head = v.head(res.tau_hat);
    const auto tail = v.tail(T - res.tau_hat);
    res.segment_stats.split = res.tau_hat;
    res.segment_stats.mean_before = head.mean();
    res.segment_stats.mean_after = tail.mean();
    res.segment_stats.var_before =
        (head.array() - head.mean()).square().sum() / double(res.tau_hat - 1);
    res.segment_stats.var_after =
        (tail.array() - tail.mean()).square().sum() / double(T - res.tau_hat - 1);
    return res;
}

}  // namespace specfit
