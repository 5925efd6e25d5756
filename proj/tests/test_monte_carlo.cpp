#include <cmath>
#include <cstring>

#include <doctest.h>

#include "specfit/monte_carlo.hpp"

using namespace specfit;

TEST_CASE("noise family names round-trip") {
    for (NoiseFamily f : {NoiseFamily::StandardNormal, NoiseFamily::StudentT3,
                          NoiseFamily::ChiSquared1})
        CHECK(noise_from_string(to_string(f)) == f);
    CHECK(noise_from_string("normal") == NoiseFamily::StandardNormal);
    CHECK(noise_from_string("t3") == NoiseFamily::StudentT3);
    CHECK(noise_from_string("chisq1") == NoiseFamily::ChiSquared1);
    CHECK_THROWS_AS(noise_from_string("cauchy"), std::invalid_argument);
}

TEST_CASE("scenario derived quantities") {
    Scenario sc;
    sc.nu_B = 1.0;
    sc.nu_A = 3.5;
    sc.xi_B = 1.0;
    sc.xi_A = 2.0;
    sc.lambda = 0.3;
    sc.T = 1000;
    CHECK(sc.tau() == 300);
    CHECK(sc.true_mu2() == doctest::Approx(6.25).epsilon(1e-14));
    CHECK(sc.true_sigma2() == doctest::Approx(0.3 * 1.0 + 0.7 * 4.0).epsilon(1e-14));
}

TEST_CASE("split_seed is deterministic and spreads indices") {
    CHECK(split_seed(42, 0) == split_seed(42, 0));
    CHECK(split_seed(42, 0) != split_seed(42, 1));
    CHECK(split_seed(42, 0) != split_seed(43, 0));
    // no collisions over a block of indices
    std::vector<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.push_back(split_seed(7, i));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("standardized draws have mean 0 and variance 1") {
    const Eigen::Index n = 1000000;
    struct Row {
        NoiseFamily f;
        double var_tol;
    };
    for (const Row& row : {Row{NoiseFamily::StandardNormal, 0.01},
                           Row{NoiseFamily::ChiSquared1, 0.01},
                           Row{NoiseFamily::StudentT3, 0.05}}) {
        const Vector z = standardized_draws(row.f, n, 2024);
        const double mean = z.mean();
        const double var = (z.array() - mean).square().sum() / double(n - 1);
        CHECK(std::abs(mean) <= 0.005);
        CHECK(std::abs(var - 1.0) <= row.var_tol);
    }
}

TEST_CASE("generate is deterministic and splits at floor(lambda T)") {
    Scenario sc;
    sc.nu_B = 1.0;
    sc.nu_A = 4.0;
    sc.lambda = 0.25;
    sc.T = 1 << 16;
    sc.seed = 9;
    const TimeSeries a = generate(sc);
    const TimeSeries b = generate(sc);
    CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::Index tau = sc.tau();
    const double mB = a.values().head(tau).mean();
    const double mA = a.values().tail(sc.T - tau).mean();
    CHECK(std::abs(mB - 1.0) < 0.02);
    CHECK(std::abs(mA - 4.0) < 0.02);
}

TEST_CASE("generate handles a degenerate scale") {
    Scenario sc;
    sc.nu_B = 2.0;
    sc.xi_B = 0.0;
    sc.nu_A = 5.0;
    sc.lambda = 0.5;
    sc.T = 64;
    const TimeSeries x = generate(sc);
    CHECK((x.values().head(32).array() == 2.0).all());
    Scenario bad = sc;
    bad.lambda = 0.01;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
    bad.xi_A = -1.0;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
}

TEST_CASE("run_scenario with one replication matches a manual fit") {
    Scenario sc;
    sc.nu_A = 2.0;
    sc.lambda = 0.3;
    sc.T = 512;
    sc.seed = 31;
    const ScenarioSummary sum = run_scenario(sc, 1);

    Scenario rep = sc;
    rep.seed = split_seed(sc.seed, 0);
    const TimeSeries x = generate(rep);
    FitResult fr = fit(periodogram(x));
    fr = resolve_ambiguity(x, fr);
    CHECK(sum.mean[0] == fr.theta.sigma2);
    CHECK(sum.mean[1] == fr.theta.mu2);
    CHECK(sum.mean[2] == fr.lambda_resolved);
    CHECK(sum.sd[0] == 0.0);
    CHECK(sum.replications == 1);
    CHECK_THROWS_AS(run_scenario(sc, 0), std::invalid_argument);
}

TEST_CASE("summaries are bitwise identical across thread counts") {
    Scenario sc;
    sc.nu_A = 1.5;
    sc.lambda = 0.3;
    sc.T = 512;
    sc.seed = 123;
    const ScenarioSummary serial = run_scenario(sc, 40, FitConfig{}, 1);
    for (int threads : {2, 4, 7}) {
        const ScenarioSummary par = run_scenario(sc, 40, FitConfig{}, threads);
        CHECK(std::memcmp(serial.mean.data(), par.mean.data(),
                          sizeof(serial.mean)) == 0);
        CHECK(std::memcmp(serial.sd.data(), par.sd.data(), sizeof(serial.sd)) == 0);
        CHECK(par.converged == serial.converged);
        CHECK(par.no_change == serial.no_change);
        CHECK(par.failed == serial.failed);
    }
}

TEST_CASE("run_scenario aggregates near the generating parameters") {
    Scenario sc;
    sc.nu_A = 2.0;
    sc.lambda = 0.3;
    sc.T = 1024;
    sc.seed = 2020;
    const ScenarioSummary sum = run_scenario(sc, 60, FitConfig{}, 4);
    CHECK(sum.failed == 0);
    CHECK(std::abs(sum.mean[2] - 0.3) < 0.02);
    CHECK(std::abs(sum.mean[1] - 4.0) < 0.4);
    CHECK(std::abs(sum.mean[0] - 1.0) < 0.1);
}

TEST_CASE("run_scenario without a shift does not crash") {
    Scenario sc;
    sc.T = 256;
    sc.seed = 5;
    const ScenarioSummary sum = run_scenario(sc, 20);
    CHECK(sum.failed == 0);
    CHECK(sum.converged + sum.no_change >= sum.no_change);
}

TEST_CASE("periodogram moments under a mean shift of two noise sds") {
    Scenario sc;
    sc.nu_A = 2.0;
    sc.lambda = 0.25;
    sc.T = 256;
    sc.seed = 314;
    const MomentReport rep = verify_moments(sc, 2000);
    CHECK(rep.mean_within_3se >= 0.95);
    // the mean leak through the shift inflates Var(I_k) by roughly
    // 2 sigma2 mu2 g_k, so a band of frequencies sits outside 15% of sigma^4
    CHECK(rep.var_within_15pct >= 0.65);
    CHECK(rep.var_within_15pct <= 0.92);
    CHECK(rep.cov_pairs_checked == 10);
    CHECK(rep.cov_pairs_within_3se >= 8);
    CHECK_THROWS_AS(verify_moments(sc, 100), std::invalid_argument);
}

TEST_CASE("periodogram moments without a shift") {
    Scenario sc;
    sc.T = 128;
    sc.seed = 2718;
    const MomentReport rep = verify_moments(sc, 1500);
    CHECK(rep.mean_within_3se >= 0.95);
    CHECK(rep.var_within_15pct >= 0.90);
    CHECK(rep.sigma4 == doctest::Approx(1.0).epsilon(1e-14));
}
