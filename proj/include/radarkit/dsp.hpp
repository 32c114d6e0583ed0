#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "radarkit/radar_sim.hpp"

// Signal-processing chains for the two experiments: chirp characterization
// (STFT -> per-column peak interpolation -> instantaneous-frequency track
// -> linear regression) and chirp-sequence processing (fast/slow-time
// reshape -> windowed 2D DFT -> range-Doppler map -> peak extraction),
// plus two-channel phase-comparison direction of arrival.

namespace radarkit::dsp {

enum class Window { Hann, Rect };

struct StftConfig {
    std::size_t window_length = 256;
    std::size_t hop = 64;
    Window window = Window::Hann;
    std::size_t fft_length = 256;  // >= window_length, even

    void validate() const;
};

struct Spectrogram {
    // magnitudes[bin][frame], linear scale
    std::vector<std::vector<double>> magnitudes;
    std::vector<double> frame_times_s;
    std::vector<double> bin_frequencies_hz;

    std::size_t bins() const { return magnitudes.size(); }
    std::size_t frames() const { return frame_times_s.size(); }
    std::vector<double> column(std::size_t frame) const;
};

/// Frame k covers samples [k*hop, k*hop + L); magnitude of the windowed
/// DFT per frame; frame time is the window center (k*hop + L/2)/f_s.
Spectrogram stft(std::span<const double> samples, double sample_rate_hz, const StftConfig& cfg);

struct PeakEstimate {
    double frequency_hz = 0.0;
    std::size_t peak_bin = 0;
    double delta_bins = 0.0;  // fractional offset, clamped to [-0.5, 0.5]
    bool degenerate = false;  // edge-bin peak or flat column
};

/// Quadratic interpolation around the column argmax: with values a, b, g
/// at bins p-1, p, p+1, the offset is 0.5*(a-g)/(a-2b+g). Edge-bin peaks
/// return the bin frequency unmodified and are flagged; flat columns tie-
/// break to the lowest bin. Operates on the column values as given
/// (callers choose linear or log magnitudes).
PeakEstimate interpolate_peak(std::span<const double> column,
                              std::span<const double> bin_frequencies);

struct LinearFit {
    double slope = 0.0;      // Hz/s
    double intercept = 0.0;  // Hz
    std::vector<double> residuals;

    double residual_rms() const;
};

/// Ordinary least squares of f against t. Requires >= 2 points with
/// distinct t; throws std::invalid_argument otherwise.
LinearFit fit_linear_ramp(std::span<const double> t_s, std::span<const double> f_hz);

struct InstFreqTrack {
    std::vector<double> times_s;
    std::vector<double> freqs_hz;
    LinearFit fit;
};

/// Chirp-characterization chain: per-frame peak interpolation on
/// log magnitudes, restricted to frames whose window lies entirely within
/// [0, ramp_duration_s], then a linear fit with residuals.
InstFreqTrack track_instantaneous_frequency(const Spectrogram& spec, const StftConfig& cfg,
                                            double sample_rate_hz, double ramp_duration_s);

struct RangeDopplerParams {
    double bandwidth_hz = 0.0;         // W
    double chirp_duration_s = 0.0;     // T_c
    double center_frequency_hz = 0.0;  // f_c at mid-ramp
    double sample_rate_hz = 0.0;       // f_s
};

struct RangeDopplerMap {
    // Row-major [range bin][doppler bin]; Doppler axis fftshifted so zero
    // velocity sits at column n_doppler/2.
    std::vector<std::complex<double>> values;
    std::size_t n_range = 0;
    std::size_t n_doppler = 0;
    std::vector<double> range_axis_m;
    std::vector<double> velocity_axis_mps;
    RangeDopplerParams params;

    const std::complex<double>& at(std::size_t r, std::size_t d) const {
        return values[r * n_doppler + d];
    }
    double range_bin_m() const { return range_axis_m.size() > 1 ? range_axis_m[1] : 0.0; }
    double velocity_bin_mps() const;
    /// Peak magnitude over the map, linear scale.
    double max_magnitude() const;
};

/// Chirp m occupies column m; the first `skip` samples of each chirp are
/// dropped (settle time). Hann windows along both dimensions, then an
/// unpadded 2D DFT. Needs n_slow*(n_fast+skip) samples.
RangeDopplerMap range_doppler(std::span<const std::complex<double>> samples, std::size_t n_fast,
                              std::size_t n_slow, std::size_t skip,
                              const RangeDopplerParams& params);

enum class ChannelMode { IqPair, RealChannel1, RealChannel2 };

/// Capture front end: IqPair combines ch1 + j*ch2; the real modes process
/// a single channel as real-valued input.
RangeDopplerMap range_doppler(const sim::Capture& capture, ChannelMode mode, std::size_t n_fast,
                              std::size_t n_slow, std::size_t skip,
                              const RangeDopplerParams& params);

std::vector<std::complex<double>> iq_baseband(const sim::Capture& capture);

struct Detection {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double magnitude_db = 0.0;  // relative to map maximum
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0;
};

struct PeakDetectConfig {
    double threshold_db = 20.0;  // dB below the map maximum
    std::size_t max_peaks = 10;
    bool mask_zero_range = true;  // drop the zero-range leakage row
};

/// 8-neighborhood local maxima above the threshold, strongest first; ties
/// broken by lower range bin, then lower Doppler bin.
std::vector<Detection> detect_peaks(const RangeDopplerMap& map, const PeakDetectConfig& cfg);

/// Phase-comparison direction of arrival from the complex map values at a
/// common peak bin. Returns degrees; throws std::domain_error when the
/// wrapped phase difference maps outside the unambiguous arcsine domain.
double doa_phase_comparison(std::complex<double> peak_ch1, std::complex<double> peak_ch2,
                            double spacing_m, double wavelength_m);

}  // namespace radarkit::dsp
