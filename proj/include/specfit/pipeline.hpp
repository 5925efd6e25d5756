#ifndef SPECFIT_PIPELINE_HPP
#define SPECFIT_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "specfit/asymptotics.hpp"
#include "specfit/estimator.hpp"

namespace specfit {

/// Reads a comma-separated file, one observation per row, optional single
/// header line. Column selected by zero-based index.
TimeSeries load_series(const std::string& path, int column = 0);
void save_series(const TimeSeries& series, const std::string& path);

struct CleanConfig {
    int window = 5;          // points on each side
    double threshold = 4.0;  // robust z threshold
    double max_fraction = 0.10;
    std::uint64_t seed = 0;
};

struct CleanReport {
    std::vector<Eigen::Index> replaced_indices;  // strictly increasing
    std::vector<double> replacement_values;
    CleanConfig config;
};

/// Sliding-window median/MAD outlier detection; each outlier is replaced by a
/// normal draw parameterized by the clean points in the window before and
/// after it. Errors out if more than max_fraction of the series would change.
std::pair<TimeSeries, CleanReport> clean_outliers(const TimeSeries& series,
                                                  const CleanConfig& config = {});

struct FitReport {
    std::string input_path;
    Eigen::Index T = 0;
    FitResult result;
    double level = 0.95;
    ConfidenceInterval ci_sigma2, ci_mu2, ci_lambda;
    bool cleaned = false;
    int outliers_replaced = 0;
    double elapsed_seconds = 0;
    std::string timestamp;
};

/// Keyed JSON document; every field is present on every exit path.
std::string report_to_json(const FitReport& report);

}  // namespace specfit

#endif
