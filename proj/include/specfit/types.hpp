#ifndef SPECFIT_TYPES_HPP
#define SPECFIT_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace specfit {

using Vector = Eigen::VectorXd;

/// Ordered real observations X_0..X_{T-1}.
class TimeSeries {
public:
    explicit TimeSeries(Vector values) : values_(std::move(values)) {
        if (values_.size() < 8)
            throw std::invalid_argument("TimeSeries: need at least 8 observations");
        if (!values_.allFinite())
            throw std::invalid_argument("TimeSeries: non-finite value in input");
    }

    const Vector& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double operator[](Eigen::Index t) const { return values_[t]; }

private:
    Vector values_;
};

/// Fourier frequencies omega_k = 2*pi*k/T for k = 1..floor(T/2).
/// k = 0 is excluded; it carries the sample mean.
class FrequencyGrid {
public:
    explicit FrequencyGrid(Eigen::Index T) : T_(T) {
        if (T < 8) throw std::invalid_argument("FrequencyGrid: T < 8");
    }

    Eigen::Index T() const { return T_; }
    Eigen::Index size() const { return T_ / 2; }
    double frequency(Eigen::Index k) const { return 2.0 * M_PI * double(k) / double(T_); }

    Vector frequencies() const {
        Vector w(size());
        for (Eigen::Index k = 1; k <= size(); ++k) w[k - 1] = frequency(k);
        return w;
    }

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
        return a.T_ == b.T_;
    }

private:
    Eigen::Index T_;
};

/// Half-spectrum periodogram values I(omega_k), k = 1..floor(T/2).
class Periodogram {
public:
    Periodogram(FrequencyGrid grid, Vector values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("Periodogram: value count does not match grid");
        if ((values_.array() < 0).any())
            throw std::invalid_argument("Periodogram: negative power");
    }

    const FrequencyGrid& grid() const { return grid_; }
    const Vector& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }

private:
    FrequencyGrid grid_;
    Vector values_;
};

/// Model vector g(lambda, omega_T), optionally with its lambda-derivative.
struct ModelVector {
    FrequencyGrid grid;
    Vector g;
    Vector dg;  // empty unless the derivative was requested
};

}  // namespace specfit

#endif
