#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

// Physics model of the analog radar chain: DAC control voltage -> VCO ->
// scene reflection -> mixer (IQ or dual real) -> anti-alias lowpass ->
// 14-bit ADC, plus the divide-by-8192 prescaler path. All functions are
// pure; randomness comes in through an explicit seed.

namespace radarkit::sim {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kNativeSampleRate = 125e6;
inline constexpr std::size_t kMaxBlockSamples = 16384;  // Tx/Rx block-RAM depth
inline constexpr double kAdcFullScale = 1.0;            // volts
inline constexpr int kAdcBits = 14;
inline constexpr std::array<int, 6> kAllowedDecimations = {1, 8, 64, 1024, 8192, 65536};

bool decimation_allowed(int decimation);

enum class FrontEndKind { IVS947, IVS565 };

std::string_view to_string(FrontEndKind kind);

/// 24 GHz CW/FMCW front-end parameters. IVS947 carries one IQ receive
/// channel and the prescaler tap; IVS565 carries two real-valued receive
/// channels on spaced antennas and no LNA.
struct FrontEndModel {
    FrontEndKind kind = FrontEndKind::IVS947;
    double f_base_hz = 24.0e9;       // RF at v_tune == ramp v_lo
    double k_vco_hz_per_v = 720e6;   // VCO sensitivity
    int prescaler_ratio = 8192;
    double rx_spacing_m = 0.0;       // IVS565 only
    bool has_lna = false;

    static FrontEndModel ivs947();
    static FrontEndModel ivs565();

    /// Number of ADC channels the receive path drives (always 2: I/Q for
    /// the IVS947, two real channels for the IVS565).
    int rx_channel_count() const { return 2; }

    void validate() const;  // throws std::invalid_argument
};

enum class RampMode { SingleUpsweep, ChirpSequence };

/// DAC control-voltage waveform. `samples` holds one playback period (one
/// chirp); the generator repeats it `n_chirps` times back to back and
/// holds the final sample value afterwards. Voltage between DAC samples is
/// linearly interpolated.
struct TuningRamp {
    std::vector<double> samples;  // volts, <= kMaxBlockSamples
    double dac_rate_hz = 0.0;
    RampMode mode = RampMode::SingleUpsweep;
    int n_chirps = 1;
    double v_lo = 0.0;
    double v_hi = 0.0;

    double period_s() const { return static_cast<double>(samples.size()) / dac_rate_hz; }
    double chirp_duration_s() const { return period_s(); }
    double duration_s() const { return n_chirps * period_s(); }

    /// Linear sweep v_lo -> v_hi over `duration_s` seconds in `n_samples`
    /// DAC samples (last sample exactly v_hi), repeated `n_chirps` times.
    static TuningRamp linear(double v_lo, double v_hi, double duration_s,
                             std::size_t n_samples, int n_chirps);

    /// Tuning voltage at time t >= 0; holds the last sample beyond the
    /// ramp duration.
    double voltage_at(double t_s) const;

    void validate() const;  // throws std::invalid_argument
};

struct PointTarget {
    double range_m = 0.0;
    double velocity_mps = 0.0;  // radial, negative = approaching
    double amplitude_v = 0.0;   // at mixer output
    double bearing_deg = 0.0;   // off boresight, IVS565 only

    void validate() const;
};

struct Scene {
    std::vector<PointTarget> targets;
    double noise_std_v = 0.0;          // AWGN RMS per ADC channel
    double coupling_amplitude_v = 0.0; // direct Tx->Rx leakage at zero range
    FrontEndKind front_end = FrontEndKind::IVS947;

    void validate() const;
};

/// Parse the scene JSON document. Field names are fixed
/// ("targets", "noise_std", "front_end", optional "coupling_amplitude";
/// targets carry "range_m", "amplitude" and optional "velocity_mps",
/// "bearing_deg"). Unknown fields are rejected.
Scene parse_scene_json(std::string_view text);
Scene load_scene(const std::filesystem::path& path);
std::string scene_to_json(const Scene& scene);

/// One or two channels of 14-bit-quantized ADC samples.
struct Capture {
    std::vector<std::vector<double>> channels;  // volts, on the ADC grid
    double sample_rate_hz = 0.0;
    int decimation = 1;
    std::size_t trigger_offset = 0;
};

/// RF frequency f_base + k_vco * (v_tune(t) - v_lo) at 0 <= t < ramp
/// duration; throws std::out_of_range otherwise.
double instantaneous_rf_frequency(const TuningRamp& ramp, const FrontEndModel& fe, double t_s);

/// Divided-VCO output: sine of phase (2*pi/R) * integral of f_rf, sampled
/// at `sample_rate_hz`, n <= kMaxBlockSamples samples. Unquantized.
std::vector<double> prescaler_output(const TuningRamp& ramp, const FrontEndModel& fe,
                                     double sample_rate_hz, std::size_t n);

inline constexpr double kPrescalerAmplitudeV = 0.5;

/// Mixer-output channels before noise and quantization. IVS947: {I, Q};
/// IVS565: two real channels with bearing-dependent phase offset.
std::vector<std::vector<double>> simulate_rx_analog(const TuningRamp& ramp,
                                                    const FrontEndModel& fe, const Scene& scene,
                                                    double sample_rate_hz, std::size_t n);

/// Full receive simulation: beat tones per target, AWGN, brickwall
/// anti-alias at the decimated Nyquist, 14-bit quantization. sample_rate
/// must equal 125 MS/s divided by an allowed decimation.
Capture simulate_rx(const TuningRamp& ramp, const FrontEndModel& fe, const Scene& scene,
                    double sample_rate_hz, std::size_t n, std::uint64_t seed);

/// Prescaler path through the same acquisition chain (noise + ADC).
Capture capture_prescaler(const TuningRamp& ramp, const FrontEndModel& fe, double noise_std_v,
                          double sample_rate_hz, std::size_t n, std::uint64_t seed);

/// Clip to +/-1 V and round half-away-from-zero onto the 14-bit grid
/// (step 2/2^14, zero on-grid, both full-scale endpoints representable).
double quantize_adc(double v);

/// Beat frequency of a point target under dechirp reception:
/// 2*S*r/c + 2*v*f_c/c with S = k_vco*(v_hi-v_lo)/T_c.
double beat_frequency(const TuningRamp& ramp, const FrontEndModel& fe, const PointTarget& target);

/// Doppler shift 2*v*f_c/c at the mid-ramp RF frequency.
double doppler_frequency(const TuningRamp& ramp, const FrontEndModel& fe, double velocity_mps);

/// RF frequency at the chirp midpoint, f_base + k_vco*(v_hi-v_lo)/2.
double center_rf_frequency(const TuningRamp& ramp, const FrontEndModel& fe);

}  // namespace radarkit::sim
