#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "radarkit/dsp.hpp"
#include "radarkit/radar_sim.hpp"

// SCPI client and experiment orchestrator. Runs the chirp-characterization
// and chirp-sequence experiments against the emulator (or any instrument
// speaking the same dialect) and writes CSV/JSON artifacts.

namespace radarkit::client {

/// Network failure or SCPI error response (CLI exit code 2).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Post-acquisition processing failure (CLI exit code 3).
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Blocking request/response connection; every command yields exactly one
/// response line. ERR responses raise ProtocolError with the server text.
class ScpiConnection {
  public:
    ScpiConnection(const std::string& host, std::uint16_t port,
                   std::chrono::milliseconds timeout);
    ~ScpiConnection();

    ScpiConnection(const ScpiConnection&) = delete;
    ScpiConnection& operator=(const ScpiConnection&) = delete;

    /// Send one command and return the response payload (terminator
    /// stripped). Throws ProtocolError on ERR responses and I/O failures.
    std::string exchange(const std::string& command);

  private:
    std::string read_line();

    int fd_ = -1;
    std::string rx_buffer_;
    std::chrono::milliseconds timeout_;
};

struct ExperimentConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 5025;
    std::uint64_t seed = 1;
    double timeout_s = 10.0;
    std::filesystem::path out_dir = ".";

    // Ramp parameters (§ defaults reproduce the shipped experiments).
    double v_lo = 0.7;
    double v_hi = 1.0;
    double ramp_duration_s = 800e-6;  // single upsweep length (chirp-char)
    int n_chirps = 128;               // chirp-seq sequence length
    std::size_t waveform_samples = 16384;

    // Front-end datasheet constants used for unit conversion.
    double k_vco_hz_per_v = 720e6;
    double f_base_hz = 24.0e9;
    int prescaler_ratio = 8192;

    // Acquisition.
    int decimation_chirp_char = 8;     // 15.625 MS/s
    int decimation_chirp_seq = 1024;   // 122.07 kS/s

    // Analysis.
    std::size_t stft_window = 256;
    std::size_t stft_hop = 64;
    std::size_t stft_fft_length = 2048;
    std::size_t rd_skip = 2;           // settle samples dropped per chirp
    double detect_threshold_db = 20.0;
    std::size_t detect_max_peaks = 10;

    std::chrono::milliseconds timeout() const {
        return std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0));
    }
};

struct ChirpCharReport {
    double slope_prescaler_hz_per_s = 0.0;
    double slope_rf_hz_per_s = 0.0;
    double intercept_hz = 0.0;
    double rf_bandwidth_hz = 0.0;   // fitted slope at RF times the ramp duration
    double residual_rms_hz = 0.0;
    std::size_t n_points = 0;
    std::filesystem::path spectrogram_csv;
    std::filesystem::path track_csv;
    std::filesystem::path report_json;
};

struct ChirpSeqReport {
    std::vector<dsp::Detection> detections;
    double range_bin_m = 0.0;
    double velocity_bin_mps = 0.0;
    std::filesystem::path map_csv;
    std::filesystem::path detections_csv;
    std::filesystem::path report_json;
};

/// Experiment A: upload the single upsweep, route the prescaler to ch1,
/// acquire 16384 samples, then STFT + peak interpolation + linear fit.
ChirpCharReport run_chirp_characterization(const ExperimentConfig& cfg);

/// Experiment B: upload one chirp played n_chirps times, route IQ, acquire
/// both channels, then the 2D range-Doppler processing and peak list.
ChirpSeqReport run_chirp_sequence(const ExperimentConfig& cfg);

}  // namespace radarkit::client
