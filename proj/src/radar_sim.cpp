#include "radarkit/radar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace radarkit::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

}  // namespace

bool decimation_allowed(int decimation) {
    return std::find(kAllowedDecimations.begin(), kAllowedDecimations.end(), decimation) !=
           kAllowedDecimations.end();
}

std::string_view to_string(FrontEndKind kind) {
    return kind == FrontEndKind::IVS947 ? "IVS947" : "IVS565";
}

FrontEndModel FrontEndModel::ivs947() {
    FrontEndModel fe;
    fe.kind = FrontEndKind::IVS947;
    fe.has_lna = true;
    return fe;
}

FrontEndModel FrontEndModel::ivs565() {
    FrontEndModel fe;
    fe.kind = FrontEndKind::IVS565;
    fe.has_lna = false;
    // Half-wavelength at the 24.108 GHz mid-ramp RF, about 6.22 mm.
    fe.rx_spacing_m = kSpeedOfLight / 24.108e9 / 2.0;
    return fe;
}

void FrontEndModel::validate() const {
    if (k_vco_hz_per_v <= 0.0) throw std::invalid_argument("k_vco must be positive");
    if (f_base_hz <= 0.0) throw std::invalid_argument("f_base must be positive");
    if (kind == FrontEndKind::IVS947 && prescaler_ratio != 8192)
        throw std::invalid_argument("IVS947 prescaler ratio is fixed at 8192");
    if (prescaler_ratio <= 0) throw std::invalid_argument("prescaler ratio must be positive");
    if (kind == FrontEndKind::IVS565 && rx_spacing_m <= 0.0)
        throw std::invalid_argument("IVS565 rx spacing must be positive");
}

TuningRamp TuningRamp::linear(double v_lo, double v_hi, double duration_s,
                              std::size_t n_samples, int n_chirps) {
    if (n_samples < 2) throw std::invalid_argument("ramp needs at least 2 samples");
    TuningRamp ramp;
    ramp.v_lo = v_lo;
    ramp.v_hi = v_hi;
    ramp.n_chirps = n_chirps;
    ramp.mode = n_chirps > 1 ? RampMode::ChirpSequence : RampMode::SingleUpsweep;
    ramp.dac_rate_hz = static_cast<double>(n_samples) / duration_s;
    ramp.samples.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        ramp.samples[i] = v_lo + (v_hi - v_lo) * static_cast<double>(i) /
                                     static_cast<double>(n_samples - 1);
    ramp.validate();
    return ramp;
}

void TuningRamp::validate() const {
    if (samples.empty()) throw std::invalid_argument("ramp has no samples");
    if (samples.size() > kMaxBlockSamples)
        throw std::invalid_argument("ramp exceeds the 16384-sample Tx block-RAM limit");
    if (dac_rate_hz <= 0.0) throw std::invalid_argument("DAC rate must be positive");
    if (n_chirps < 1) throw std::invalid_argument("chirp count must be >= 1");
    if (v_lo < 0.0) throw std::invalid_argument("v_lo must be >= 0");
    if (v_hi < v_lo) throw std::invalid_argument("v_hi must be >= v_lo");
    for (double v : samples) {
        if (!(v >= v_lo && v <= v_hi))
            throw std::invalid_argument("ramp sample outside [v_lo, v_hi]");
    }
}

double TuningRamp::voltage_at(double t_s) const {
    if (t_s < 0.0) throw std::out_of_range("time before ramp start");
    const std::size_t n = samples.size();
    const double g = t_s * dac_rate_hz;  // global DAC sample index
    const double g_end = static_cast<double>(n) * n_chirps;
    if (g >= g_end - 1.0) return samples.back();
    const auto i = static_cast<std::size_t>(g);
    const double frac = g - static_cast<double>(i);
    const double v0 = samples[i % n];
    const double v1 = samples[(i + 1) % n];
    return v0 + (v1 - v0) * frac;
}

void PointTarget::validate() const {
    if (range_m <= 0.0) throw std::invalid_argument("target range must be positive");
    if (amplitude_v < 0.0) throw std::invalid_argument("target amplitude must be >= 0");
    if (!(std::abs(bearing_deg) < 90.0))
        throw std::invalid_argument("target bearing must satisfy |bearing| < 90 deg");
}

void Scene::validate() const {
    if (noise_std_v < 0.0) throw std::invalid_argument("noise std must be >= 0");
    if (coupling_amplitude_v < 0.0) throw std::invalid_argument("coupling amplitude must be >= 0");
    for (const auto& t : targets) t.validate();
}

double instantaneous_rf_frequency(const TuningRamp& ramp, const FrontEndModel& fe, double t_s) {
    if (t_s < 0.0 || t_s >= ramp.duration_s())
        throw std::out_of_range("time outside ramp duration");
    return fe.f_base_hz + fe.k_vco_hz_per_v * (ramp.voltage_at(t_s) - ramp.v_lo);
}

double center_rf_frequency(const TuningRamp& ramp, const FrontEndModel& fe) {
    return fe.f_base_hz + fe.k_vco_hz_per_v * (ramp.v_hi - ramp.v_lo) / 2.0;
}

double doppler_frequency(const TuningRamp& ramp, const FrontEndModel& fe, double velocity_mps) {
    return 2.0 * velocity_mps * center_rf_frequency(ramp, fe) / kSpeedOfLight;
}

double beat_frequency(const TuningRamp& ramp, const FrontEndModel& fe, const PointTarget& target) {
    const double slope = fe.k_vco_hz_per_v * (ramp.v_hi - ramp.v_lo) / ramp.chirp_duration_s();
    return 2.0 * slope * target.range_m / kSpeedOfLight +
           doppler_frequency(ramp, fe, target.velocity_mps);
}

namespace {

// Exact integral of the piecewise-linear RF frequency from 0 to each
// requested time. The frequency is linear between consecutive DAC samples
// and constant after the burst end, so trapezoids are exact.
class RfPhaseIntegrator {
  public:
    RfPhaseIntegrator(const TuningRamp& ramp, const FrontEndModel& fe)
        : ramp_(ramp), fe_(fe), dt_(1.0 / ramp.dac_rate_hz) {
        total_samples_ = ramp.samples.size() * static_cast<std::size_t>(ramp.n_chirps);
    }

    // Integral of f_rf over [0, t]; must be called with non-decreasing t.
    double integral_to(double t_s) {
        const double g = t_s * ramp_.dac_rate_hz;
        while (static_cast<double>(segment_) + 1.0 <= g) advance_segment();
        const double tau = t_s - static_cast<double>(segment_) * dt_;
        const double f0 = freq_of(voltage_at_index(segment_));
        const double f1 = freq_of(voltage_at_index(segment_ + 1));
        const double slope = (f1 - f0) / dt_;
        return cum_ + f0 * tau + 0.5 * slope * tau * tau;
    }

  private:
    void advance_segment() {
        const double f0 = freq_of(voltage_at_index(segment_));
        const double f1 = freq_of(voltage_at_index(segment_ + 1));
        cum_ += 0.5 * (f0 + f1) * dt_;
        ++segment_;
    }

    double voltage_at_index(std::size_t i) const {
        if (i + 1 >= total_samples_) return ramp_.samples.back();
        return ramp_.samples[i % ramp_.samples.size()];
    }

    double freq_of(double v) const {
        return fe_.f_base_hz + fe_.k_vco_hz_per_v * (v - ramp_.v_lo);
    }

    const TuningRamp& ramp_;
    const FrontEndModel& fe_;
    double dt_;
    std::size_t total_samples_;
    std::size_t segment_ = 0;
    double cum_ = 0.0;
};

void check_capture_args(const TuningRamp& ramp, const FrontEndModel& fe, double sample_rate_hz,
                        std::size_t n) {
    ramp.validate();
    fe.validate();
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("sample rate must be positive");
    if (n > kMaxBlockSamples)
        throw std::invalid_argument("capture exceeds the 16384-sample Rx block-RAM limit");
}

int decimation_for_rate(double sample_rate_hz) {
    for (int d : kAllowedDecimations) {
        if (sample_rate_hz == kNativeSampleRate / d) return d;
    }
    throw std::invalid_argument("sample rate does not match an allowed decimation of 125 MS/s");
}

}  // namespace

std::vector<double> prescaler_output(const TuningRamp& ramp, const FrontEndModel& fe,
                                     double sample_rate_hz, std::size_t n) {
    check_capture_args(ramp, fe, sample_rate_hz, n);
    std::vector<double> out(n);
    RfPhaseIntegrator integrator(ramp, fe);
    const double scale = kTwoPi / fe.prescaler_ratio;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        out[i] = kPrescalerAmplitudeV * std::sin(scale * integrator.integral_to(t));
    }
    return out;
}

std::vector<std::vector<double>> simulate_rx_analog(const TuningRamp& ramp,
                                                    const FrontEndModel& fe, const Scene& scene,
                                                    double sample_rate_hz, std::size_t n) {
    check_capture_args(ramp, fe, sample_rate_hz, n);
    scene.validate();

    const double t_chirp = ramp.chirp_duration_s();
    const double f_c = center_rf_frequency(ramp, fe);
    const double lambda = kSpeedOfLight / f_c;
    const double nyquist = sample_rate_hz / 2.0;
    const bool iq = fe.kind == FrontEndKind::IVS947;

    std::vector<std::vector<double>> channels(2, std::vector<double>(n, 0.0));

    struct Tone {
        double f_beat;
        double phase_step;   // per-chirp phase progression
        double phase0;       // carrier phase at zero time
        double amplitude;
        double channel_phase;  // IVS565 inter-channel offset
    };
    std::vector<Tone> tones;
    tones.reserve(scene.targets.size() + 1);
    for (const auto& target : scene.targets) {
        Tone tone;
        tone.f_beat = beat_frequency(ramp, fe, target);
        const double f_d = doppler_frequency(ramp, fe, target.velocity_mps);
        tone.phase_step = kTwoPi * f_d * t_chirp;
        tone.phase0 = 2.0 * kTwoPi * f_c * target.range_m / kSpeedOfLight;
        tone.amplitude = target.amplitude_v;
        tone.channel_phase =
            kTwoPi * (fe.rx_spacing_m / lambda) *
            std::sin(target.bearing_deg * std::numbers::pi / 180.0);
        // Ideal brickwall anti-alias at the decimated Nyquist.
        if (std::abs(tone.f_beat) > nyquist) continue;
        tones.push_back(tone);
    }
    if (scene.coupling_amplitude_v > 0.0) {
        // Direct Tx->Rx leakage: a zero-range, zero-Doppler component.
        tones.push_back(Tone{0.0, 0.0, 0.0, scene.coupling_amplitude_v, 0.0});
    }

    // Quarter-sample guard so samples landing a rounding error short of a
    // chirp boundary are still assigned to the new chirp.
    const double boundary_guard = 0.25 / sample_rate_hz;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        auto chirp = static_cast<long long>((t + boundary_guard) / t_chirp);
        chirp = std::min<long long>(chirp, ramp.n_chirps - 1);
        const double tau = t - static_cast<double>(chirp) * t_chirp;
        for (const auto& tone : tones) {
            const double phase =
                kTwoPi * tone.f_beat * tau + tone.phase_step * static_cast<double>(chirp) +
                tone.phase0;
            if (iq) {
                channels[0][i] += tone.amplitude * std::cos(phase);
                channels[1][i] += tone.amplitude * std::sin(phase);
            } else {
                channels[0][i] += tone.amplitude * std::cos(phase);
                channels[1][i] += tone.amplitude * std::cos(phase + tone.channel_phase);
            }
        }
    }
    return channels;
}

namespace {

Capture finish_capture(std::vector<std::vector<double>>&& channels, double noise_std_v,
                       double sample_rate_hz, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_std_v);
    Capture capture;
    capture.sample_rate_hz = sample_rate_hz;
    capture.decimation = decimation_for_rate(sample_rate_hz);
    capture.trigger_offset = 0;
    for (auto& ch : channels) {
        if (noise_std_v > 0.0) {
            for (auto& v : ch) v += gauss(rng);
        }
        for (auto& v : ch) v = quantize_adc(v);
    }
    capture.channels = std::move(channels);
    return capture;
}

}  // namespace

Capture simulate_rx(const TuningRamp& ramp, const FrontEndModel& fe, const Scene& scene,
                    double sample_rate_hz, std::size_t n, std::uint64_t seed) {
    decimation_for_rate(sample_rate_hz);
    auto channels = simulate_rx_analog(ramp, fe, scene, sample_rate_hz, n);
    return finish_capture(std::move(channels), scene.noise_std_v, sample_rate_hz, seed);
}

Capture capture_prescaler(const TuningRamp& ramp, const FrontEndModel& fe, double noise_std_v,
                          double sample_rate_hz, std::size_t n, std::uint64_t seed) {
    decimation_for_rate(sample_rate_hz);
    auto signal = prescaler_output(ramp, fe, sample_rate_hz, n);
    // The divided carrier sits above the decimated Nyquist: the anti-alias
    // filter removes it entirely.
    const double f_max =
        (fe.f_base_hz + fe.k_vco_hz_per_v * (ramp.v_hi - ramp.v_lo)) / fe.prescaler_ratio;
    if (f_max > sample_rate_hz / 2.0) std::fill(signal.begin(), signal.end(), 0.0);
    std::vector<std::vector<double>> channels;
    channels.push_back(std::move(signal));
    return finish_capture(std::move(channels), noise_std_v, sample_rate_hz, seed);
}

double quantize_adc(double v) {
    constexpr double kLevels = 1 << (kAdcBits - 1);  // 8192 steps per volt
    double k = std::round(v * kLevels);              // round() is half-away-from-zero
    k = std::clamp(k, -kLevels, kLevels);
    return k / kLevels;
}

}  // namespace radarkit::sim
