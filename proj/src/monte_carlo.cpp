#include "specfit/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace specfit {

NoiseFamily noise_from_string(const std::string& name) {
    if (name == "standard-normal" || name == "normal") return NoiseFamily::StandardNormal;
    if (name == "student-t-3" || name == "t3") return NoiseFamily::StudentT3;
    if (name == "chi-squared-1" || name == "chisq1") return NoiseFamily::ChiSquared1;
    throw std::invalid_argument("unknown noise family: " + name);
}

std::string to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::StandardNormal: return "standard-normal";
        case NoiseFamily::StudentT3: return "student-t-3";
        case NoiseFamily::ChiSquared1: return "chi-squared-1";
    }
    return "?";
}

double Scenario::true_sigma2() const {
    const double lt = double(tau()) / double(T);
    return lt * xi_B * xi_B + (1.0 - lt) * xi_A * xi_A;
}

double Scenario::true_mu2() const {
    const double d = nu_B - nu_A;
    return d * d;
}

Eigen::Index Scenario::tau() const {
    return Eigen::Index(std::floor(lambda * double(T)));
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over (master ^ golden-ratio-multiplied index)
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vector standardized_draws(NoiseFamily family, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Vector z(n);
    switch (family) {
        case NoiseFamily::StandardNormal: {
            std::normal_distribution<double> dist(0.0, 1.0);
            for (Eigen::Index i = 0; i < n; ++i) z[i] = dist(rng);
            break;
        }
        case NoiseFamily::StudentT3: {
            // Var(t_3) = 3
            std::student_t_distribution<double> dist(3.0);
            const double s = std::sqrt(3.0);
            for (Eigen::Index i = 0; i < n; ++i) z[i] = dist(rng) / s;
            break;
        }
        case NoiseFamily::ChiSquared1: {
            // mean 1, variance 2
            std::chi_squared_distribution<double> dist(1.0);
            const double s = std::sqrt(2.0);
            for (Eigen::Index i = 0; i < n; ++i) z[i] = (dist(rng) - 1.0) / s;
            break;
        }
    }
    return z;
}

TimeSeries generate(const Scenario& sc) {
    if (!(sc.xi_B >= 0.0 && sc.xi_A >= 0.0))
        throw std::invalid_argument("generate: negative scale");
    const Eigen::Index tau = sc.tau();
    if (tau < 2 || tau > sc.T - 2)
        throw std::invalid_argument("generate: change index too close to the boundary");
    const Vector z = standardized_draws(sc.noise, sc.T, sc.seed);
    Vector x(sc.T);
    for (Eigen::Index t = 0; t < sc.T; ++t)
        x[t] = t < tau ? sc.nu_B + sc.xi_B * z[t] : sc.nu_A + sc.xi_A * z[t];
    return TimeSeries(std::move(x));
}

ScenarioSummary run_scenario(const Scenario& scenario, int replications,
                             const FitConfig& config, int threads, bool resolve) {
    if (replications < 1) throw std::invalid_argument("run_scenario: replications < 1");

    struct RepOut {
        double s2 = 0, m2 = 0, lam = 0;
        bool usable = false, converged = false, no_change = false, failed = false;
    };
    std::vector<RepOut> out(static_cast<std::size_t>(replications));

    auto run_one = [&](int r) {
        RepOut& o = out[std::size_t(r)];
        try {
            Scenario sc = scenario;
            sc.seed = split_seed(scenario.seed, std::uint64_t(r));
            const TimeSeries x = generate(sc);
            const Periodogram pg = periodogram(x);
            FitResult fr = fit(pg, config);
            o.converged = fr.converged;
            o.no_change = fr.no_change;
            if (fr.no_change) return;
            if (resolve) fr = resolve_ambiguity(x, fr);
            o.s2 = fr.theta.sigma2;
            o.m2 = fr.theta.mu2;
            o.lam = resolve ? fr.lambda_resolved : fr.theta.lambda;
            o.usable = true;
        } catch (const std::exception&) {
            o.failed = true;
        }
    };

    if (threads <= 1) {
        for (int r = 0; r < replications; ++r) run_one(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < replications; r = next.fetch_add(1))
                    run_one(r);
            });
        for (auto& t : pool) t.join();
    }

    ScenarioSummary sum;
    sum.scenario = scenario;
    sum.replications = replications;
    // index-ordered reduction: identical result regardless of thread count
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    Eigen::Vector3d acc2 = Eigen::Vector3d::Zero();
    int n = 0;
    for (const RepOut& o : out) {
        sum.converged += o.converged ? 1 : 0;
        sum.no_change += o.no_change ? 1 : 0;
        sum.failed += o.failed ? 1 : 0;
        if (!o.usable) continue;
        const Eigen::Vector3d v(o.s2, o.m2, o.lam);
        acc += v;
        acc2 += v.cwiseProduct(v);
        ++n;
    }
    if (n > 0) {
        const Eigen::Vector3d mean = acc / double(n);
        for (int i = 0; i < 3; ++i) {
            sum.mean[std::size_t(i)] = mean[i];
            const double var =
                n > 1 ? std::max(0.0, (acc2[i] - double(n) * mean[i] * mean[i]) /
                                          double(n - 1))
                      : 0.0;
            sum.sd[std::size_t(i)] = std::sqrt(var);
        }
    }
    return sum;
}

MomentReport verify_moments(const Scenario& scenario, int replications) {
    if (replications < 500)
        throw std::invalid_argument("verify_moments: need at least 500 replications");
    const Eigen::Index M = scenario.T / 2;

    MomentReport rep;
    rep.replications = replications;
    rep.T = scenario.T;

    Vector sum = Vector::Zero(M), sum2 = Vector::Zero(M);

    // 10 random frequency pairs, k != j, fixed by the scenario seed
    std::mt19937_64 pair_rng(split_seed(scenario.seed, 0xC0FFEEULL));
    std::uniform_int_distribution<Eigen::Index> pick(0, M - 1);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    while (pairs.size() < 10) {
        Eigen::Index a = pick(pair_rng), b = pick(pair_rng);
        if (a != b) pairs.emplace_back(a, b);
    }
    std::vector<double> cross(pairs.size(), 0.0);

    for (int r = 0; r < replications; ++r) {
        Scenario sc = scenario;
        sc.seed = split_seed(scenario.seed, std::uint64_t(r));
        const Periodogram pg = periodogram(generate(sc));
        const Vector& I = pg.values();
        sum += I;
        sum2 += I.cwiseProduct(I).eval();
        for (std::size_t p = 0; p < pairs.size(); ++p)
            cross[p] += I[pairs[p].first] * I[pairs[p].second];
    }

    const double n = double(replications);
    rep.mean_I = sum / n;
    rep.var_I = (sum2 - n * rep.mean_I.cwiseProduct(rep.mean_I)) / (n - 1.0);

    const double lt = double(scenario.tau()) / double(scenario.T);
    const Theta truth{scenario.true_sigma2(), scenario.true_mu2(), lt};
    rep.expected_I = expected_periodogram(truth, FrequencyGrid(scenario.T));
    rep.sigma4 = truth.sigma2 * truth.sigma2;

    int mean_ok = 0, var_ok = 0;
    for (Eigen::Index k = 0; k < M; ++k) {
        const double se = std::sqrt(rep.var_I[k] / n);
        if (std::abs(rep.mean_I[k] - rep.expected_I[k]) <= 3.0 * se) ++mean_ok;
        if (std::abs(rep.var_I[k] / rep.sigma4 - 1.0) <= 0.15) ++var_ok;
    }
    rep.mean_within_3se = double(mean_ok) / double(M);
    rep.var_within_15pct = double(var_ok) / double(M);

    rep.cov_pairs_checked = int(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [a, b] = pairs[p];
        const double cov = (cross[p] - n * rep.mean_I[a] * rep.mean_I[b]) / (n - 1.0);
        const double se = std::sqrt((rep.var_I[a] * rep.var_I[b] + cov * cov) / n);
        if (std::abs(cov) <= 3.0 * se) ++rep.cov_pairs_within_3se;
    }
    return rep;
}

}  // namespace specfit
