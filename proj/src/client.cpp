#include "radarkit/client.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "radarkit/scpi.hpp"

#include <json.hpp>

namespace radarkit::client {

namespace {

constexpr double kDbFloor = -300.0;

double magnitude_db(double value, double reference) {
    if (value <= 0.0 || reference <= 0.0) return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(value / reference));
}

std::string fmt(double v) { return scpi::format_double(v); }

}  // namespace

ScpiConnection::ScpiConnection(const std::string& host, std::uint16_t port,
                               std::chrono::milliseconds timeout)
    : timeout_(timeout) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &result) != 0 || !result)
        throw ProtocolError("cannot resolve host '" + host + "'");

    fd_ = ::socket(result->ai_family, result->ai_socktype, result->ai_protocol);
    if (fd_ < 0) {
        ::freeaddrinfo(result);
        throw ProtocolError("socket() failed");
    }
    const int rc = ::connect(fd_, result->ai_addr, result->ai_addrlen);
    ::freeaddrinfo(result);
    if (rc < 0) {
        ::close(fd_);
        fd_ = -1;
        throw ProtocolError("cannot connect to " + host + ":" + service + ": " +
                            std::strerror(errno));
    }
}

ScpiConnection::~ScpiConnection() {
    if (fd_ >= 0) ::close(fd_);
}

std::string ScpiConnection::read_line() {
    while (true) {
        const auto pos = rx_buffer_.find('\n');
        if (pos != std::string::npos) {
            std::string line = rx_buffer_.substr(0, pos);
            rx_buffer_.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        pollfd pfd{fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
        if (rc == 0) throw ProtocolError("timeout waiting for instrument response");
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw ProtocolError("poll() failed");
        }
        char chunk[65536];
        const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n <= 0) throw ProtocolError("connection closed by instrument");
        rx_buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string ScpiConnection::exchange(const std::string& command) {
    std::string framed = command;
    framed += scpi::kTerminator;
    std::size_t sent = 0;
    while (sent < framed.size()) {
        const ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ProtocolError("send failed: " + std::string(std::strerror(errno)));
        }
        sent += static_cast<std::size_t>(n);
    }
    std::string response = read_line();
    if (response.rfind("ERR:", 0) == 0)
        throw ProtocolError("instrument rejected '" + command.substr(0, 64) +
                            "': " + response);
    return response;
}

namespace {

// Keeps track of artifacts written so far and removes them if a later
// step fails, so aborted runs leave no partial CSVs behind.
class ArtifactSet {
  public:
    ~ArtifactSet() {
        if (!committed_) {
            for (const auto& p : paths_) {
                std::error_code ec;
                std::filesystem::remove(p, ec);
            }
        }
    }

    std::ofstream open(const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw AnalysisError("cannot write " + path.string());
        paths_.push_back(path);
        return out;
    }

    void commit() { committed_ = true; }

  private:
    std::vector<std::filesystem::path> paths_;
    bool committed_ = false;
};

std::vector<double> linear_waveform(double v_lo, double v_hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = v_lo + (v_hi - v_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::string waveform_upload_command(const std::vector<double>& waveform) {
    std::string cmd = "SOUR1:TRAC:DATA:DATA ";
    for (std::size_t i = 0; i < waveform.size(); ++i) {
        if (i > 0) cmd += ',';
        cmd += scpi::format_double(waveform[i]);
    }
    return cmd;
}

std::vector<double> read_channel(ScpiConnection& conn, int channel) {
    const std::string payload =
        conn.exchange("ACQ:SOUR" + std::to_string(channel) + ":DATA?");
    auto parsed = scpi::parse_buffer_response(payload);
    if (!parsed.ok())
        throw ProtocolError("malformed buffer response: " + parsed.error().message);
    return std::move(parsed).value();
}

void configure_session(ScpiConnection& conn, const ExperimentConfig& cfg,
                       const std::vector<double>& waveform, double freq_fix_hz, int ncycles,
                       const char* routing, int decimation) {
    conn.exchange("*RST");
    conn.exchange("SIM:SEED " + std::to_string(cfg.seed));
    conn.exchange("GEN:RST");
    conn.exchange("SOUR1:FUNC ARBITRARY");
    conn.exchange(waveform_upload_command(waveform));
    conn.exchange("SOUR1:FREQ:FIX " + scpi::format_double(freq_fix_hz));
    conn.exchange("SOUR1:BURS:STAT BURST");
    conn.exchange("SOUR1:BURS:NCYC " + std::to_string(ncycles));
    conn.exchange(std::string("SIM:ROUTE ") + routing);
    conn.exchange("ACQ:RST");
    conn.exchange("ACQ:DEC " + std::to_string(decimation));
    conn.exchange("ACQ:START");
    conn.exchange("ACQ:TRIG NOW");
    while (conn.exchange("ACQ:TRIG:STAT?") != "TD") {
    }
}

}  // namespace

ChirpCharReport run_chirp_characterization(const ExperimentConfig& cfg) {
    const double sample_rate = sim::kNativeSampleRate / cfg.decimation_chirp_char;
    const auto waveform = linear_waveform(cfg.v_lo, cfg.v_hi, cfg.waveform_samples);

    ScpiConnection conn(cfg.host, cfg.port, cfg.timeout());
    configure_session(conn, cfg, waveform, 1.0 / cfg.ramp_duration_s, 1, "PRESCALER",
                      cfg.decimation_chirp_char);
    const auto samples = read_channel(conn, 1);

    dsp::StftConfig stft_cfg;
    stft_cfg.window_length = cfg.stft_window;
    stft_cfg.hop = cfg.stft_hop;
    stft_cfg.fft_length = cfg.stft_fft_length;

    dsp::Spectrogram spec;
    dsp::InstFreqTrack track;
    try {
        spec = dsp::stft(samples, sample_rate, stft_cfg);
        track = dsp::track_instantaneous_frequency(spec, stft_cfg, sample_rate,
                                                   cfg.ramp_duration_s);
    } catch (const std::exception& e) {
        throw AnalysisError(e.what());
    }

    ChirpCharReport report;
    report.slope_prescaler_hz_per_s = track.fit.slope;
    report.slope_rf_hz_per_s = track.fit.slope * cfg.prescaler_ratio;
    report.intercept_hz = track.fit.intercept;
    report.rf_bandwidth_hz = report.slope_rf_hz_per_s * cfg.ramp_duration_s;
    report.residual_rms_hz = track.fit.residual_rms();
    report.n_points = track.times_s.size();

    std::filesystem::create_directories(cfg.out_dir);
    ArtifactSet artifacts;

    report.spectrogram_csv = cfg.out_dir / "spectrogram.csv";
    {
        auto out = artifacts.open(report.spectrogram_csv);
        out << "t,f,mag_db\n";
        double max_mag = 0.0;
        for (const auto& row : spec.magnitudes)
            for (double v : row) max_mag = std::max(max_mag, v);
        for (std::size_t k = 0; k < spec.frames(); ++k) {
            for (std::size_t b = 0; b < spec.bins(); ++b) {
                out << fmt(spec.frame_times_s[k]) << ',' << fmt(spec.bin_frequencies_hz[b])
                    << ',' << fmt(magnitude_db(spec.magnitudes[b][k], max_mag)) << '\n';
            }
        }
    }

    report.track_csv = cfg.out_dir / "inst_freq.csv";
    {
        auto out = artifacts.open(report.track_csv);
        out << "t,f_meas,f_fit,residual\n";
        for (std::size_t i = 0; i < track.times_s.size(); ++i) {
            const double f_fit = track.fit.intercept + track.fit.slope * track.times_s[i];
            out << fmt(track.times_s[i]) << ',' << fmt(track.freqs_hz[i]) << ',' << fmt(f_fit)
                << ',' << fmt(track.fit.residuals[i]) << '\n';
        }
    }

    report.report_json = cfg.out_dir / "chirp_char_report.json";
    {
        nlohmann::json doc;
        doc["experiment"] = "chirp_char";
        doc["slope_prescaler_hz_per_s"] = report.slope_prescaler_hz_per_s;
        doc["slope_rf_hz_per_s"] = report.slope_rf_hz_per_s;
        doc["intercept_hz"] = report.intercept_hz;
        doc["rf_bandwidth_hz"] = report.rf_bandwidth_hz;
        doc["residual_rms_hz"] = report.residual_rms_hz;
        doc["points"] = report.n_points;
        doc["ramp"] = {{"v_lo", cfg.v_lo},
                       {"v_hi", cfg.v_hi},
                       {"duration_s", cfg.ramp_duration_s},
                       {"samples", cfg.waveform_samples}};
        doc["sample_rate_hz"] = sample_rate;
        doc["seed"] = cfg.seed;
        auto out = artifacts.open(report.report_json);
        out << doc.dump(2) << '\n';
    }

    artifacts.commit();
    return report;
}

ChirpSeqReport run_chirp_sequence(const ExperimentConfig& cfg) {
    const double sample_rate = sim::kNativeSampleRate / cfg.decimation_chirp_seq;
    const double capture_duration =
        static_cast<double>(sim::kMaxBlockSamples) / sample_rate;
    const double t_chirp = capture_duration / cfg.n_chirps;
    const auto n_per_chirp = sim::kMaxBlockSamples / static_cast<std::size_t>(cfg.n_chirps);
    if (n_per_chirp * static_cast<std::size_t>(cfg.n_chirps) != sim::kMaxBlockSamples)
        throw AnalysisError("chirp count must divide the 16384-sample capture");
    if (n_per_chirp <= cfg.rd_skip + 2)
        throw AnalysisError("too few fast-time samples per chirp");
    const auto waveform = linear_waveform(cfg.v_lo, cfg.v_hi, cfg.waveform_samples);

    ScpiConnection conn(cfg.host, cfg.port, cfg.timeout());
    configure_session(conn, cfg, waveform, 1.0 / t_chirp, cfg.n_chirps, "IQ",
                      cfg.decimation_chirp_seq);
    sim::Capture capture;
    capture.sample_rate_hz = sample_rate;
    capture.decimation = cfg.decimation_chirp_seq;
    capture.channels.push_back(read_channel(conn, 1));
    capture.channels.push_back(read_channel(conn, 2));

    dsp::RangeDopplerParams params;
    params.bandwidth_hz = cfg.k_vco_hz_per_v * (cfg.v_hi - cfg.v_lo);
    params.chirp_duration_s = t_chirp;
    params.center_frequency_hz = cfg.f_base_hz + cfg.k_vco_hz_per_v * (cfg.v_hi - cfg.v_lo) / 2.0;
    params.sample_rate_hz = sample_rate;

    dsp::RangeDopplerMap map;
    std::vector<dsp::Detection> detections;
    try {
        map = dsp::range_doppler(capture, dsp::ChannelMode::IqPair, n_per_chirp - cfg.rd_skip,
                                 cfg.n_chirps, cfg.rd_skip, params);
        dsp::PeakDetectConfig det_cfg;
        det_cfg.threshold_db = cfg.detect_threshold_db;
        det_cfg.max_peaks = cfg.detect_max_peaks;
        detections = dsp::detect_peaks(map, det_cfg);
    } catch (const std::exception& e) {
        throw AnalysisError(e.what());
    }

    ChirpSeqReport report;
    report.detections = detections;
    report.range_bin_m = map.range_bin_m();
    report.velocity_bin_mps = map.velocity_bin_mps();

    std::filesystem::create_directories(cfg.out_dir);
    ArtifactSet artifacts;

    report.map_csv = cfg.out_dir / "range_doppler.csv";
    {
        auto out = artifacts.open(report.map_csv);
        out << "range_m,velocity_mps,mag_db\n";
        const double max_mag = map.max_magnitude();
        for (std::size_t r = 0; r < map.n_range; ++r) {
            for (std::size_t d = 0; d < map.n_doppler; ++d) {
                out << fmt(map.range_axis_m[r]) << ',' << fmt(map.velocity_axis_mps[d]) << ','
                    << fmt(magnitude_db(std::abs(map.at(r, d)), max_mag)) << '\n';
            }
        }
    }

    report.detections_csv = cfg.out_dir / "detections.csv";
    {
        auto out = artifacts.open(report.detections_csv);
        out << "range_m,velocity_mps,mag_db\n";
        for (const auto& det : detections) {
            out << fmt(det.range_m) << ',' << fmt(det.velocity_mps) << ','
                << fmt(det.magnitude_db) << '\n';
        }
    }

    report.report_json = cfg.out_dir / "chirp_seq_report.json";
    {
        nlohmann::json doc;
        doc["experiment"] = "chirp_seq";
        doc["n_chirps"] = cfg.n_chirps;
        doc["chirp_duration_s"] = t_chirp;
        doc["bandwidth_hz"] = params.bandwidth_hz;
        doc["center_frequency_hz"] = params.center_frequency_hz;
        doc["sample_rate_hz"] = sample_rate;
        doc["range_bin_m"] = report.range_bin_m;
        doc["velocity_bin_mps"] = report.velocity_bin_mps;
        doc["seed"] = cfg.seed;
        doc["detections"] = nlohmann::json::array();
        for (const auto& det : detections) {
            doc["detections"].push_back({{"range_m", det.range_m},
                                         {"velocity_mps", det.velocity_mps},
                                         {"magnitude_db", det.magnitude_db},
                                         {"range_bin", det.range_bin},
                                         {"doppler_bin", det.doppler_bin}});
        }
        auto out = artifacts.open(report.report_json);
        out << doc.dump(2) << '\n';
    }

    artifacts.commit();
    return report;
}

}  // namespace radarkit::client
