#include "specfit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace specfit {

namespace {

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::string field_at(const std::string& line, int column) {
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; std::getline(ss, cell, ','); ++c)
        if (c == column) return cell;
    return {};
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double m = v[n / 2];
    if (n % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
        m = 0.5 * (m + v[n / 2 - 1]);
    }
    return m;
}

}  // namespace

TimeSeries load_series(const std::string& path, int column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);

    std::vector<double> values;
    std::string line;
    int lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            // trailing newline is fine; a blank line mid-data is not
            std::string rest;
            if (std::getline(in, rest))
                throw std::runtime_error(path + ": blank line at row " +
                                         std::to_string(lineno));
            break;
        }
        const std::string cell = field_at(line, column);
        double x;
        if (!parse_double(cell, x)) {
            if (first) {
                first = false;  // single header line allowed
                continue;
            }
            throw std::runtime_error(path + ": non-numeric value at row " +
                                     std::to_string(lineno) + ": '" + cell + "'");
        }
        first = false;
        values.push_back(x);
    }
    if (values.size() < 8)
        throw std::runtime_error(path + ": fewer than 8 data rows");
    return TimeSeries(Eigen::Map<Vector>(values.data(), Eigen::Index(values.size())));
}

void save_series(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "value\n";
    out.precision(17);
    for (Eigen::Index t = 0; t < series.size(); ++t) out << series[t] << "\n";
}

std::pair<TimeSeries, CleanReport> clean_outliers(const TimeSeries& series,
                                                  const CleanConfig& config) {
    const Eigen::Index T = series.size();
    if (config.window < 2) throw std::invalid_argument("clean_outliers: window < 2");
    if (!(config.threshold > 0)) throw std::invalid_argument("clean_outliers: threshold <= 0");
    if (2 * config.window + 1 > T)
        throw std::invalid_argument("clean_outliers: window too large for series");

    const Eigen::Index w = config.window;
    std::vector<bool> outlier(std::size_t(T), false);

    for (Eigen::Index t = 0; t < T; ++t) {
        std::vector<double> nb;
        for (Eigen::Index s = std::max<Eigen::Index>(0, t - w);
             s < std::min(T, t + w + 1); ++s)
            if (s != t) nb.push_back(series[s]);
        const double med = median_of(nb);
        std::vector<double> dev(nb.size());
        for (std::size_t i = 0; i < nb.size(); ++i) dev[i] = std::abs(nb[i] - med);
        const double mad = median_of(dev);
        const double scale =
            std::max(1.4826 * mad, 1e-12 * (1.0 + std::abs(med)));
        if (std::abs(series[t] - med) > config.threshold * scale)
            outlier[std::size_t(t)] = true;
    }

    CleanReport report;
    report.config = config;
    const auto max_count = Eigen::Index(config.max_fraction * double(T));
    Eigen::Index count = 0;
    for (bool b : outlier) count += b ? 1 : 0;
    if (count > max_count)
        throw std::runtime_error("clean_outliers: " + std::to_string(count) +
                                 " outliers exceed the allowed fraction");

    Vector cleaned = series.values();
    std::mt19937_64 rng(config.seed);
    for (Eigen::Index t = 0; t < T; ++t) {
        if (!outlier[std::size_t(t)]) continue;
        // window clean points on each side parameterize the replacement draw
        std::vector<double> ref;
        for (Eigen::Index s = t - 1; s >= 0 && Eigen::Index(ref.size()) < w; --s)
            if (!outlier[std::size_t(s)]) ref.push_back(series[s]);
        const auto before = Eigen::Index(ref.size());
        for (Eigen::Index s = t + 1; s < T && Eigen::Index(ref.size()) < before + w; ++s)
            if (!outlier[std::size_t(s)]) ref.push_back(series[s]);
        double mean = 0, sd = 0;
        if (!ref.empty()) {
            for (double x : ref) mean += x;
            mean /= double(ref.size());
            if (ref.size() > 1) {
                for (double x : ref) sd += (x - mean) * (x - mean);
                sd = std::sqrt(sd / double(ref.size() - 1));
            }
        }
        std::normal_distribution<double> dist(mean, std::max(sd, 0.0));
        const double repl = sd > 0 ? dist(rng) : mean;
        cleaned[t] = repl;
        report.replaced_indices.push_back(t);
        report.replacement_values.push_back(repl);
    }
    return {TimeSeries(std::move(cleaned)), std::move(report)};
}

std::string report_to_json(const FitReport& report) {
    using nlohmann::json;
    const FitResult& r = report.result;
    json flags = {
        {"no_change", r.no_change},
        {"sigma2_clamped", r.sigma2_clamped},
        {"mu2_clamped", r.mu2_clamped},
        {"lambda_step_skipped", r.lambda_step_skipped},
        {"ambiguity_tie", r.ambiguity_tie},
        {"se_unavailable", r.se_unavailable},
        {"resolved", r.resolved},
    };
    auto num_or_null = [](double x) -> json {
        return std::isfinite(x) ? json(x) : json(nullptr);
    };
    auto ci = [&](const ConfidenceInterval& c) -> json {
        return {{"lower", num_or_null(c.lower)},
                {"upper", num_or_null(c.upper)},
                {"truncated", c.truncated}};
    };
    json j = {
        {"input", report.input_path},
        {"T", report.T},
        {"sigma2", num_or_null(r.theta.sigma2)},
        {"mu2", num_or_null(r.theta.mu2)},
        {"lambda", num_or_null(r.theta.lambda)},
        {"lambda_resolved", num_or_null(r.lambda_resolved)},
        {"tau_hat", r.tau_hat},
        {"se_sigma2", num_or_null(r.standard_errors[0])},
        {"se_mu2", num_or_null(r.standard_errors[1])},
        {"se_lambda", num_or_null(r.standard_errors[2])},
        {"ci_level", report.level},
        {"ci_sigma2", ci(report.ci_sigma2)},
        {"ci_mu2", ci(report.ci_mu2)},
        {"ci_lambda", ci(report.ci_lambda)},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"objective", num_or_null(r.objective)},
        {"segment_means", {num_or_null(r.segment_stats.mean_before),
                           num_or_null(r.segment_stats.mean_after)}},
        {"segment_variances", {num_or_null(r.segment_stats.var_before),
                               num_or_null(r.segment_stats.var_after)}},
        {"cleaned", report.cleaned},
        {"outliers_replaced", report.outliers_replaced},
        {"elapsed_seconds", report.elapsed_seconds},
        {"timestamp", report.timestamp},
        {"flags", flags},
    };
    return j.dump(2);
}

}  // namespace specfit
