#include "radarkit/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "radarkit/fft.hpp"

namespace radarkit::dsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> make_window(Window kind, std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (kind == Window::Hann) {
        for (std::size_t i = 0; i < length; ++i)
            w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) /
                                        static_cast<double>(length));
    }
    return w;
}

}  // namespace

void StftConfig::validate() const {
    if (hop == 0 || hop > window_length)
        throw std::invalid_argument("stft hop must satisfy 0 < hop <= window length");
    if (fft_length < window_length)
        throw std::invalid_argument("stft fft length must be >= window length");
    if (fft_length % 2 != 0) throw std::invalid_argument("stft fft length must be even");
}

std::vector<double> Spectrogram::column(std::size_t frame) const {
    std::vector<double> col(bins());
    for (std::size_t b = 0; b < bins(); ++b) col[b] = magnitudes[b][frame];
    return col;
}

Spectrogram stft(std::span<const double> samples, double sample_rate_hz, const StftConfig& cfg) {
    cfg.validate();
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("sample rate must be positive");
    if (samples.size() < cfg.window_length)
        throw std::invalid_argument("input shorter than the stft window");

    const std::size_t n_frames = (samples.size() - cfg.window_length) / cfg.hop + 1;
    const std::size_t n_bins = cfg.fft_length / 2 + 1;
    const auto window = make_window(cfg.window, cfg.window_length);

    Spectrogram spec;
    spec.magnitudes.assign(n_bins, std::vector<double>(n_frames, 0.0));
    spec.frame_times_s.resize(n_frames);
    spec.bin_frequencies_hz.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b)
        spec.bin_frequencies_hz[b] =
            static_cast<double>(b) * sample_rate_hz / static_cast<double>(cfg.fft_length);

    std::vector<double> frame(cfg.window_length);
    for (std::size_t k = 0; k < n_frames; ++k) {
        const std::size_t start = k * cfg.hop;
        for (std::size_t i = 0; i < cfg.window_length; ++i)
            frame[i] = samples[start + i] * window[i];
        auto bins = rfft(frame, cfg.fft_length);
        for (std::size_t b = 0; b < n_bins; ++b) spec.magnitudes[b][k] = std::abs(bins[b]);
        spec.frame_times_s[k] =
            (static_cast<double>(start) + static_cast<double>(cfg.window_length) / 2.0) /
            sample_rate_hz;
    }
    return spec;
}

PeakEstimate interpolate_peak(std::span<const double> column,
                              std::span<const double> bin_frequencies) {
    if (column.size() < 3) throw std::invalid_argument("peak interpolation needs >= 3 bins");
    if (column.size() != bin_frequencies.size())
        throw std::invalid_argument("column/bin-frequency length mismatch");

    // argmax; ties resolve to the lowest bin
    std::size_t p = 0;
    for (std::size_t i = 1; i < column.size(); ++i) {
        if (column[i] > column[p]) p = i;
    }

    PeakEstimate est;
    est.peak_bin = p;
    const double bin_spacing = bin_frequencies[1] - bin_frequencies[0];

    if (p == 0 || p + 1 == column.size()) {
        est.frequency_hz = bin_frequencies[p];
        est.degenerate = true;
        return est;
    }

    const double a = column[p - 1];
    const double b = column[p];
    const double g = column[p + 1];
    const double denom = a - 2.0 * b + g;
    if (denom == 0.0) {
        // Flat stencil: no curvature to interpolate against.
        est.frequency_hz = bin_frequencies[p];
        est.degenerate = true;
        return est;
    }
    double delta = 0.5 * (a - g) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    est.delta_bins = delta;
    est.frequency_hz = (static_cast<double>(p) + delta) * bin_spacing + bin_frequencies[0];
    return est;
}

double LinearFit::residual_rms() const {
    if (residuals.empty()) return 0.0;
    double acc = 0.0;
    for (double r : residuals) acc += r * r;
    return std::sqrt(acc / static_cast<double>(residuals.size()));
}

LinearFit fit_linear_ramp(std::span<const double> t_s, std::span<const double> f_hz) {
    if (t_s.size() != f_hz.size()) throw std::invalid_argument("t/f length mismatch");
    const std::size_t n = t_s.size();
    if (n < 2) throw std::invalid_argument("linear fit needs >= 2 points");

    double t_mean = 0.0;
    double f_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_mean += t_s[i];
        f_mean += f_hz[i];
    }
    t_mean /= static_cast<double>(n);
    f_mean /= static_cast<double>(n);

    double stt = 0.0;
    double stf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = t_s[i] - t_mean;
        stt += dt * dt;
        stf += dt * (f_hz[i] - f_mean);
    }
    if (stt == 0.0) throw std::invalid_argument("linear fit needs distinct time points");

    LinearFit fit;
    fit.slope = stf / stt;
    fit.intercept = f_mean - fit.slope * t_mean;
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        fit.residuals[i] = f_hz[i] - (fit.intercept + fit.slope * t_s[i]);
    return fit;
}

InstFreqTrack track_instantaneous_frequency(const Spectrogram& spec, const StftConfig& cfg,
                                            double sample_rate_hz, double ramp_duration_s) {
    InstFreqTrack track;
    for (std::size_t k = 0; k < spec.frames(); ++k) {
        // Keep only frames whose window lies entirely inside the ramp, so
        // no window straddles the post-burst hold segment.
        const double window_end =
            (static_cast<double>(k) * static_cast<double>(cfg.hop) +
             static_cast<double>(cfg.window_length)) /
            sample_rate_hz;
        if (window_end > ramp_duration_s) break;
        auto column = spec.column(k);
        for (auto& v : column) v = std::log(v + 1e-300);
        const auto est = interpolate_peak(column, spec.bin_frequencies_hz);
        track.times_s.push_back(spec.frame_times_s[k]);
        track.freqs_hz.push_back(est.frequency_hz);
    }
    if (track.times_s.size() < 2)
        throw std::invalid_argument("ramp too short for the configured stft");
    track.fit = fit_linear_ramp(track.times_s, track.freqs_hz);
    return track;
}

double RangeDopplerMap::velocity_bin_mps() const {
    return velocity_axis_mps.size() > 1 ? velocity_axis_mps[1] - velocity_axis_mps[0] : 0.0;
}

double RangeDopplerMap::max_magnitude() const {
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, std::abs(v));
    return best;
}

RangeDopplerMap range_doppler(std::span<const std::complex<double>> samples, std::size_t n_fast,
                              std::size_t n_slow, std::size_t skip,
                              const RangeDopplerParams& params) {
    if (n_fast == 0 || n_slow == 0) throw std::invalid_argument("empty range-Doppler shape");
    if (params.bandwidth_hz <= 0.0 || params.chirp_duration_s <= 0.0 ||
        params.center_frequency_hz <= 0.0 || params.sample_rate_hz <= 0.0)
        throw std::invalid_argument("range-Doppler parameters must be positive");
    const std::size_t stride = n_fast + skip;
    if (samples.size() < n_slow * stride)
        throw std::invalid_argument("capture too short for the requested reshape");

    const auto w_fast = make_window(Window::Hann, n_fast);
    const auto w_slow = make_window(Window::Hann, n_slow);

    // Row-major [fast][slow], windowed along both dimensions.
    std::vector<std::complex<double>> matrix(n_fast * n_slow);
    for (std::size_t m = 0; m < n_slow; ++m) {
        for (std::size_t i = 0; i < n_fast; ++i) {
            matrix[i * n_slow + m] = samples[m * stride + skip + i] * (w_fast[i] * w_slow[m]);
        }
    }
    fft2_inplace(matrix, n_fast, n_slow);

    RangeDopplerMap map;
    map.n_range = n_fast;
    map.n_doppler = n_slow;
    map.params = params;
    map.values.resize(n_fast * n_slow);

    // fftshift along the Doppler axis: output column d holds input bin
    // (d + n_slow/2) mod n_slow, putting zero Doppler at the center.
    const std::size_t half = n_slow / 2;
    for (std::size_t r = 0; r < n_fast; ++r) {
        for (std::size_t d = 0; d < n_slow; ++d) {
            map.values[r * n_slow + d] = matrix[r * n_slow + (d + half) % n_slow];
        }
    }

    const double c = sim::kSpeedOfLight;
    const double range_per_bin = c * params.chirp_duration_s *
                                 (params.sample_rate_hz / static_cast<double>(n_fast)) /
                                 (2.0 * params.bandwidth_hz);
    const double lambda = c / params.center_frequency_hz;
    const double velocity_per_bin =
        lambda / (2.0 * static_cast<double>(n_slow) * params.chirp_duration_s);

    map.range_axis_m.resize(n_fast);
    for (std::size_t r = 0; r < n_fast; ++r)
        map.range_axis_m[r] = static_cast<double>(r) * range_per_bin;
    map.velocity_axis_mps.resize(n_slow);
    for (std::size_t d = 0; d < n_slow; ++d)
        map.velocity_axis_mps[d] =
            (static_cast<double>(d) - static_cast<double>(half)) * velocity_per_bin;
    return map;
}

std::vector<std::complex<double>> iq_baseband(const sim::Capture& capture) {
    if (capture.channels.size() != 2)
        throw std::invalid_argument("IQ baseband needs a two-channel capture");
    const auto& i = capture.channels[0];
    const auto& q = capture.channels[1];
    std::vector<std::complex<double>> out(i.size());
    for (std::size_t k = 0; k < i.size(); ++k) out[k] = {i[k], q[k]};
    return out;
}

RangeDopplerMap range_doppler(const sim::Capture& capture, ChannelMode mode, std::size_t n_fast,
                              std::size_t n_slow, std::size_t skip,
                              const RangeDopplerParams& params) {
    std::vector<std::complex<double>> baseband;
    switch (mode) {
        case ChannelMode::IqPair:
            baseband = iq_baseband(capture);
            break;
        case ChannelMode::RealChannel1:
        case ChannelMode::RealChannel2: {
            const std::size_t ch = mode == ChannelMode::RealChannel1 ? 0 : 1;
            if (capture.channels.size() <= ch)
                throw std::invalid_argument("capture has no such channel");
            baseband.assign(capture.channels[ch].begin(), capture.channels[ch].end());
            break;
        }
    }
    return range_doppler(baseband, n_fast, n_slow, skip, params);
}

std::vector<Detection> detect_peaks(const RangeDopplerMap& map, const PeakDetectConfig& cfg) {
    std::vector<Detection> out;
    if (map.values.empty()) return out;
    const double max_mag = map.max_magnitude();
    if (max_mag <= 0.0) return out;
    const double floor_mag = max_mag * std::pow(10.0, -cfg.threshold_db / 20.0);

    const std::size_t r0 = cfg.mask_zero_range ? 1 : 0;
    for (std::size_t r = r0; r < map.n_range; ++r) {
        for (std::size_t d = 0; d < map.n_doppler; ++d) {
            const double mag = std::abs(map.at(r, d));
            if (mag < floor_mag) continue;
            bool is_max = true;
            for (int dr = -1; dr <= 1 && is_max; ++dr) {
                for (int dd = -1; dd <= 1; ++dd) {
                    if (dr == 0 && dd == 0) continue;
                    const auto rr = static_cast<long long>(r) + dr;
                    const auto ddd = static_cast<long long>(d) + dd;
                    if (rr < 0 || ddd < 0 || rr >= static_cast<long long>(map.n_range) ||
                        ddd >= static_cast<long long>(map.n_doppler))
                        continue;
                    if (std::abs(map.at(static_cast<std::size_t>(rr),
                                        static_cast<std::size_t>(ddd))) > mag) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max) continue;
            Detection det;
            det.range_bin = r;
            det.doppler_bin = d;
            det.range_m = map.range_axis_m[r];
            det.velocity_mps = map.velocity_axis_mps[d];
            det.magnitude_db = 20.0 * std::log10(mag / max_mag);
            out.push_back(det);
        }
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        if (a.magnitude_db != b.magnitude_db) return a.magnitude_db > b.magnitude_db;
        if (a.range_bin != b.range_bin) return a.range_bin < b.range_bin;
        return a.doppler_bin < b.doppler_bin;
    });
    if (out.size() > cfg.max_peaks) out.resize(cfg.max_peaks);
    return out;
}

double doa_phase_comparison(std::complex<double> peak_ch1, std::complex<double> peak_ch2,
                            double spacing_m, double wavelength_m) {
    if (spacing_m <= 0.0 || wavelength_m <= 0.0)
        throw std::invalid_argument("spacing and wavelength must be positive");
    const double dphi = std::arg(peak_ch2 * std::conj(peak_ch1));  // wrapped to (-pi, pi]
    const double ratio = dphi * wavelength_m / (kTwoPi * spacing_m);
    if (std::abs(ratio) >= 1.0)
        throw std::domain_error("phase difference outside the unambiguous bearing range");
    return std::asin(ratio) * 180.0 / std::numbers::pi;
}

}  // namespace radarkit::dsp
