#ifndef SPECFIT_SPECTRAL_HPP
#define SPECFIT_SPECTRAL_HPP

#include <complex>
#include <vector>

#include "specfit/types.hpp"

namespace specfit {

struct Theta;  // estimator.hpp

/// DFT coefficient d(omega_k) = sum_t X_t * exp(+i t omega_k), 0 <= k <= T-1.
std::complex<double> dft(const TimeSeries& series, Eigen::Index k);

/// All T coefficients of the forward transform (exp(+i t omega_k) convention).
/// Radix-2 FFT for power-of-two T, direct evaluation otherwise.
std::vector<std::complex<double>> dft_all(const TimeSeries& series);

/// Half-spectrum periodogram I_k = |d(omega_k)|^2 / T, k = 1..floor(T/2).
Periodogram periodogram(const TimeSeries& series);

/// Full-length power vector |d(omega_k)|^2 / T for k = 0..T-1 (Parseval checks).
Vector full_power(const TimeSeries& series);

/// |sin(tau*omega/2) / sin(omega/2)|, the Dirichlet kernel magnitude.
/// omega must not be 0 mod 2*pi; the degenerate value there is tau.
double dirichlet_magnitude(Eigen::Index tau, double omega);

/// g_k = sin^2(lambda*pi*k) / (T sin^2(pi*k/T)), k = 1..floor(T/2).
ModelVector model_g(double lambda, const FrequencyGrid& grid);

/// Same vector with dg_k = pi*k*sin(2*lambda*pi*k) / (T sin^2(pi*k/T)) filled in.
ModelVector model_g_deriv(double lambda, const FrequencyGrid& grid);

/// f_k = sigma^2 + mu^2 * g_k(lambda), the expected periodogram.
Vector expected_periodogram(const Theta& theta, const FrequencyGrid& grid);

}  // namespace specfit

#endif
