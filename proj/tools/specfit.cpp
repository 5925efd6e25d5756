// Command-line surface: fit / simulate / periodogram / clean.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specfit/asymptotics.hpp"
#include "specfit/monte_carlo.hpp"
#include "specfit/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specfit;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

void fill_standard_errors(FitResult& fr, Eigen::Index T) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fr.standard_errors = {nan, nan, nan};
    if (fr.no_change || fr.theta.mu2 <= 0.0) {
        fr.se_unavailable = true;
        return;
    }
    // Sigma is evaluated on the (0, 1/2) side; the model is symmetric in
    // lambda <-> 1-lambda so the sampling spread of the mirrored estimate
    // is the same.
    const double lam = std::min(fr.lambda_resolved, 1.0 - fr.lambda_resolved);
    if (lam >= 0.5 - 5.0 / double(T) || lam <= 0.0) {
        fr.se_unavailable = true;
        return;
    }
    Theta th = fr.theta;
    th.lambda = lam;
    fr.standard_errors = standard_errors(th, T);
}

FitReport make_report(const std::string& input, const TimeSeries& x,
                      const FitConfig& config, bool cleaned, int replaced) {
    const auto t0 = std::chrono::steady_clock::now();
    const Periodogram pg = periodogram(x);
    FitResult fr = fit(pg, config);
    if (!fr.no_change) fr = resolve_ambiguity(x, fr);
    fill_standard_errors(fr, x.size());

    FitReport rep;
    rep.input_path = input;
    rep.T = x.size();
    rep.result = fr;
    rep.cleaned = cleaned;
    rep.outliers_replaced = replaced;
    const auto se = fr.standard_errors;
    auto ci_or_null = [&](double est, double s, double lo, double hi) {
        if (!std::isfinite(s)) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return ConfidenceInterval{nan, nan, false};
        }
        return confidence_interval(est, s, rep.level, lo, hi);
    };
    rep.ci_sigma2 = ci_or_null(fr.theta.sigma2, se[0], -HUGE_VAL, HUGE_VAL);
    rep.ci_mu2 = ci_or_null(fr.theta.mu2, se[1], -HUGE_VAL, HUGE_VAL);
    rep.ci_lambda = ci_or_null(fr.lambda_resolved, se[2],
                               std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.timestamp = iso_timestamp();
    return rep;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text << "\n";
}

Scenario scenario_from_json(const json& j, int index) {
    try {
        Scenario sc;
        sc.nu_B = j.at("nu_B").get<double>();
        sc.xi_B = j.at("xi_B").get<double>();
        sc.nu_A = j.at("nu_A").get<double>();
        sc.xi_A = j.at("xi_A").get<double>();
        sc.lambda = j.at("lambda").get<double>();
        sc.T = j.at("T").get<Eigen::Index>();
        sc.noise = noise_from_string(j.at("noise").get<std::string>());
        sc.seed = j.value("seed", std::uint64_t(0));
        sc.name = j.value("name", "scenario_" + std::to_string(index));
        return sc;
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed scenario entry " + std::to_string(index) +
                                 ": " + e.what());
    }
}

json summary_to_json(const ScenarioSummary& s) {
    const Scenario& sc = s.scenario;
    return json{
        {"name", sc.name},
        {"noise", to_string(sc.noise)},
        {"T", sc.T},
        {"seed", sc.seed},
        {"true", {{"mu2", sc.true_mu2()}, {"sigma2", sc.true_sigma2()}, {"lambda", sc.lambda}}},
        {"replications", s.replications},
        {"converged", s.converged},
        {"no_change", s.no_change},
        {"failed", s.failed},
        {"mean", {{"sigma2", s.mean[0]}, {"mu2", s.mean[1]}, {"lambda", s.mean[2]}}},
        {"sd", {{"sigma2", s.sd[0]}, {"mu2", s.sd[1]}, {"lambda", s.sd[2]}}},
    };
}

std::string summary_table(const std::vector<ScenarioSummary>& all) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %-15s %8s %8s %8s %10s %10s %10s %6s\n",
                  "scenario", "noise", "mu2", "sigma2", "lambda", "mu2_hat",
                  "sigma2_hat", "lambda_hat", "reps");
    out += line;
    for (const auto& s : all) {
        std::snprintf(line, sizeof line,
                      "%-18s %-15s %8.4f %8.4f %8.4f %10.4f %10.4f %10.4f %6d\n",
                      s.scenario.name.c_str(), to_string(s.scenario.noise).c_str(),
                      s.scenario.true_mu2(), s.scenario.true_sigma2(),
                      s.scenario.lambda, s.mean[1], s.mean[0], s.mean[2],
                      s.replications);
        out += line;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-domain change-point estimation"};
    app.require_subcommand(1);

    std::string input, output, report_path;
    std::uint64_t seed = 0;
    FitConfig config;
    bool do_clean = false, with_fit = false;
    int reps = 300, threads = 1, column = 0;
    CleanConfig cc;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--input,-i", input, "input CSV file")->required();
        cmd->add_option("--output,-o", output, "output path ('-' for stdout)");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--tol", config.tolerance, "convergence tolerance");
        cmd->add_option("--max-iters", config.max_iterations, "iteration cap");
        cmd->add_option("--column", column, "zero-based CSV column");
    };

    auto* cmd_fit = app.add_subcommand("fit", "fit the change-point model");
    add_common(cmd_fit);
    cmd_fit->add_flag("--clean", do_clean, "replace outliers before fitting");
    cmd_fit->add_option("--window", cc.window, "cleaning window");
    cmd_fit->add_option("--threshold", cc.threshold, "cleaning threshold");

    auto* cmd_sim = app.add_subcommand("simulate", "run Monte Carlo scenarios");
    cmd_sim->add_option("--input,-i", input, "scenario JSON file")->required();
    cmd_sim->add_option("--output,-o", output, "output directory");
    cmd_sim->add_option("--reps", reps, "replications per scenario");
    cmd_sim->add_option("--seed", seed, "master seed override");
    cmd_sim->add_option("--threads", threads, "worker threads");
    cmd_sim->add_option("--tol", config.tolerance, "convergence tolerance");
    cmd_sim->add_option("--max-iters", config.max_iterations, "iteration cap");

    auto* cmd_pgram = app.add_subcommand("periodogram", "dump (frequency, power)");
    add_common(cmd_pgram);
    cmd_pgram->add_flag("--fit", with_fit, "append the fitted spectrum column");

    auto* cmd_cln = app.add_subcommand("clean", "outlier replacement only");
    add_common(cmd_cln);
    cmd_cln->add_option("--window", cc.window, "cleaning window");
    cmd_cln->add_option("--threshold", cc.threshold, "cleaning threshold");
    cmd_cln->add_option("--report", report_path, "where to write the clean report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_fit->parsed()) {
            TimeSeries x = load_series(input, column);
            int replaced = 0;
            if (do_clean) {
                cc.seed = seed;
                auto [clean, rep] = clean_outliers(x, cc);
                replaced = int(rep.replaced_indices.size());
                x = std::move(clean);
            }
            const FitReport rep = make_report(input, x, config, do_clean, replaced);
            write_text(output, report_to_json(rep));
            return (rep.result.converged && !rep.result.no_change) ? 0 : 2;
        }

        if (cmd_sim->parsed()) {
            std::ifstream in(input);
            if (!in) throw std::runtime_error("cannot open scenario file: " + input);
            json doc = json::parse(in);
            if (!doc.is_array()) doc = json::array({doc});
            std::vector<ScenarioSummary> all;
            for (int i = 0; i < int(doc.size()); ++i) {
                Scenario sc = scenario_from_json(doc[std::size_t(i)], i);
                if (cmd_sim->count("--seed")) sc.seed = seed;
                all.push_back(run_scenario(sc, reps, config, threads));
            }
            if (!output.empty() && output != "-") {
                fs::create_directories(output);
                for (const auto& s : all) {
                    std::ofstream o(fs::path(output) / (s.scenario.name + ".json"));
                    o << summary_to_json(s).dump(2) << "\n";
                }
                std::ofstream t(fs::path(output) / "table.txt");
                t << summary_table(all);
            }
            std::cout << summary_table(all);
            return 0;
        }

        if (cmd_pgram->parsed()) {
            const TimeSeries x = load_series(input, column);
            const Periodogram pg = periodogram(x);
            Vector fitted;
            if (with_fit) {
                const FitResult fr = fit(pg, config);
                fitted = expected_periodogram(fr.theta, pg.grid());
            }
            std::string text = with_fit ? "frequency,power,fitted" : "frequency,power";
            char line[128];
            for (Eigen::Index k = 0; k < pg.size(); ++k) {
                if (with_fit)
                    std::snprintf(line, sizeof line, "\n%.17g,%.17g,%.17g",
                                  pg.grid().frequency(k + 1), pg.values()[k], fitted[k]);
                else
                    std::snprintf(line, sizeof line, "\n%.17g,%.17g",
                                  pg.grid().frequency(k + 1), pg.values()[k]);
                text += line;
            }
            write_text(output, text);
            return 0;
        }

        if (cmd_cln->parsed()) {
            const TimeSeries x = load_series(input, column);
            cc.seed = seed;
            auto [clean, rep] = clean_outliers(x, cc);
            if (!output.empty() && output != "-") save_series(clean, output);
            json jr = {{"replaced_indices", rep.replaced_indices},
                       {"replacement_values", rep.replacement_values},
                       {"window", rep.config.window},
                       {"threshold", rep.config.threshold},
                       {"seed", rep.config.seed}};
            write_text(report_path, jr.dump(2));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
