#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

// Independent reference implementations used to check the library: direct
// O(N^2) DFT summation and a zero-crossing instantaneous-frequency
// estimator on a band-limited upsampled window. These deliberately share
// no code with the implementation under test.

namespace oracles {

inline std::vector<std::complex<double>> direct_dft(
    std::span<const std::complex<double>> input) {
    const std::size_t n = input.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        long double re = 0.0L;
        long double im = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                      static_cast<long double>(k) * static_cast<long double>(j) /
                                      static_cast<long double>(n);
            const long double c = std::cos(angle);
            const long double s = std::sin(angle);
            re += input[j].real() * c - input[j].imag() * s;
            im += input[j].real() * s + input[j].imag() * c;
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

inline std::vector<std::complex<double>> direct_dft_real(std::span<const double> input,
                                                         std::size_t fft_length) {
    std::vector<std::complex<double>> padded(fft_length, {0.0, 0.0});
    for (std::size_t i = 0; i < input.size(); ++i) padded[i] = {input[i], 0.0};
    return direct_dft(padded);
}

inline std::vector<std::complex<double>> direct_dft_2d(
    std::span<const std::complex<double>> input, std::size_t n0, std::size_t n1) {
    std::vector<std::complex<double>> out(n0 * n1);
    for (std::size_t k0 = 0; k0 < n0; ++k0) {
        for (std::size_t k1 = 0; k1 < n1; ++k1) {
            long double re = 0.0L;
            long double im = 0.0L;
            for (std::size_t j0 = 0; j0 < n0; ++j0) {
                for (std::size_t j1 = 0; j1 < n1; ++j1) {
                    const long double angle =
                        -2.0L * std::numbers::pi_v<long double> *
                        (static_cast<long double>(k0 * j0) / static_cast<long double>(n0) +
                         static_cast<long double>(k1 * j1) / static_cast<long double>(n1));
                    const auto& v = input[j0 * n1 + j1];
                    const long double c = std::cos(angle);
                    const long double s = std::sin(angle);
                    re += v.real() * c - v.imag() * s;
                    im += v.real() * s + v.imag() * c;
                }
            }
            out[k0 * n1 + k1] = {static_cast<double>(re), static_cast<double>(im)};
        }
    }
    return out;
}

/// Band-limited upsampling of a real window by trigonometric interpolation
/// (direct DFT, spectrum zero-padding, direct evaluation).
inline std::vector<double> upsample_window(std::span<const double> window, int factor) {
    const std::size_t n = window.size();
    std::vector<std::complex<double>> cplx(n);
    for (std::size_t i = 0; i < n; ++i) cplx[i] = {window[i], 0.0};
    const auto spectrum = direct_dft(cplx);

    const std::size_t n_up = n * static_cast<std::size_t>(factor);
    std::vector<double> out(n_up, 0.0);
    const std::size_t half = n / 2;
    for (std::size_t m = 0; m < n_up; ++m) {
        const double t = static_cast<double>(m) / factor;  // in input samples
        long double acc = spectrum[0].real();
        for (std::size_t k = 1; k < half; ++k) {
            const long double angle =
                2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) * t /
                static_cast<long double>(n);
            acc += 2.0L * (spectrum[k].real() * std::cos(angle) -
                           spectrum[k].imag() * std::sin(angle));
        }
        if (n % 2 == 0) {
            const long double angle = std::numbers::pi_v<long double> * t;
            acc += spectrum[half].real() * std::cos(angle);
        } else {
            const long double angle =
                2.0L * std::numbers::pi_v<long double> * static_cast<long double>(half) * t /
                static_cast<long double>(n);
            acc += 2.0L * (spectrum[half].real() * std::cos(angle) -
                           spectrum[half].imag() * std::sin(angle));
        }
        out[m] = static_cast<double>(acc / static_cast<long double>(n));
    }
    return out;
}

/// Zero-crossing frequency estimate over a window of `signal` centered at
/// sample index `center`: upsample a wider slice, interpolate up-crossing
/// times, keep crossings within +/- keep_s of the center and return
/// (count-1)/span. Returns 0 when fewer than two crossings are found.
inline double zero_crossing_frequency(std::span<const double> signal, double sample_rate_hz,
                                      std::size_t center, double keep_s, int upsample = 16) {
    const auto wide = static_cast<std::size_t>(std::llround(2.0 * keep_s * sample_rate_hz));
    const std::size_t lo = center > wide ? center - wide : 0;
    const std::size_t hi = std::min(signal.size(), center + wide + 1);
    std::vector<double> window(signal.begin() + static_cast<std::ptrdiff_t>(lo),
                               signal.begin() + static_cast<std::ptrdiff_t>(hi));
    const auto up = upsample_window(window, upsample);
    const double f_up = sample_rate_hz * upsample;
    const double t_center = static_cast<double>(center - lo) / sample_rate_hz;

    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < up.size(); ++i) {
        if (up[i] < 0.0 && up[i + 1] >= 0.0) {
            const double frac = -up[i] / (up[i + 1] - up[i]);
            const double t = (static_cast<double>(i) + frac) / f_up;
            if (t >= t_center - keep_s && t <= t_center + keep_s) crossings.push_back(t);
        }
    }
    if (crossings.size() < 2) return 0.0;
    return static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

}  // namespace oracles
