#include "specfit/spectral.hpp"

#include <cmath>

#include "specfit/estimator.hpp"

namespace specfit {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT with the exp(+i t omega) sign convention.
void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / double(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j];
                auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace

std::complex<double> dft(const TimeSeries& series, Eigen::Index k) {
    const Eigen::Index T = series.size();
    if (k < 0 || k >= T) throw std::out_of_range("dft: frequency index out of range");
    const double w = 2.0 * M_PI * double(k) / double(T);
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index t = 0; t < T; ++t)
        acc += series[t] * std::complex<double>(std::cos(w * double(t)),
                                                std::sin(w * double(t)));
    return acc;
}

std::vector<std::complex<double>> dft_all(const TimeSeries& series) {
    const Eigen::Index T = series.size();
    std::vector<std::complex<double>> out(static_cast<std::size_t>(T));
    if (is_power_of_two(T)) {
        for (Eigen::Index t = 0; t < T; ++t) out[std::size_t(t)] = series[t];
        fft_inplace(out);
        return out;
    }
    for (Eigen::Index k = 0; k < T; ++k) out[std::size_t(k)] = dft(series, k);
    return out;
}

Periodogram periodogram(const TimeSeries& series) {
    const Eigen::Index T = series.size();
    const auto d = dft_all(series);
    FrequencyGrid grid(T);
    Vector I(grid.size());
    for (Eigen::Index k = 1; k <= grid.size(); ++k)
        I[k - 1] = std::norm(d[std::size_t(k)]) / double(T);
    return Periodogram(grid, I);
}

Vector full_power(const TimeSeries& series) {
    const Eigen::Index T = series.size();
    const auto d = dft_all(series);
    Vector I(T);
    for (Eigen::Index k = 0; k < T; ++k) I[k] = std::norm(d[std::size_t(k)]) / double(T);
    return I;
}

double dirichlet_magnitude(Eigen::Index tau, double omega) {
    if (tau < 1) throw std::invalid_argument("dirichlet_magnitude: tau < 1");
    const double s = std::sin(omega / 2.0);
    if (s == 0.0)
        throw std::domain_error("dirichlet_magnitude: omega is 0 mod 2*pi; value degenerates to tau");
    return std::abs(std::sin(double(tau) * omega / 2.0) / s);
}

ModelVector model_g(double lambda, const FrequencyGrid& grid) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("model_g: lambda outside (0, 1)");
    const Eigen::Index T = grid.T();
    ModelVector mv{grid, Vector(grid.size()), Vector()};
    for (Eigen::Index k = 1; k <= grid.size(); ++k) {
        const double s = std::sin(M_PI * double(k) / double(T));
        const double num = std::sin(lambda * M_PI * double(k));
        mv.g[k - 1] = num * num / (double(T) * s * s);
    }
    return mv;
}

ModelVector model_g_deriv(double lambda, const FrequencyGrid& grid) {
    ModelVector mv = model_g(lambda, grid);
    const Eigen::Index T = grid.T();
    mv.dg.resize(grid.size());
    for (Eigen::Index k = 1; k <= grid.size(); ++k) {
        const double s = std::sin(M_PI * double(k) / double(T));
        mv.dg[k - 1] = M_PI * double(k) * std::sin(2.0 * lambda * M_PI * double(k)) /
                       (double(T) * s * s);
    }
    return mv;
}

Vector expected_periodogram(const Theta& theta, const FrequencyGrid& grid) {
    if (theta.mu2 == 0.0) return Vector::Constant(grid.size(), theta.sigma2);
    const ModelVector mv = model_g(theta.lambda, grid);
    return (theta.sigma2 + theta.mu2 * mv.g.array()).matrix();
}

}  // namespace specfit
