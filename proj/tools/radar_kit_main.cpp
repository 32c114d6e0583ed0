#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "radarkit/client.hpp"
#include "radarkit/instrument.hpp"
#include "radarkit/tcp_server.hpp"

#include <CLI11.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitProtocol = 2;
constexpr int kExitAnalysis = 3;

radarkit::server::TcpServer* g_server = nullptr;

void handle_signal(int) {
    if (g_server) g_server->stop();
}

std::uint16_t default_port() {
    if (const char* env = std::getenv("RADAR_KIT_PORT")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0 && v <= 65535) return static_cast<std::uint16_t>(v);
    }
    return radarkit::server::kDefaultPort;
}

int run_serve(const std::string& scene_path, const std::string& front_end, std::uint16_t port,
              std::uint64_t seed, bool emulate_latency) {
    radarkit::server::Instrument::Config config;
    try {
        config.scene = radarkit::sim::load_scene(scene_path);
    } catch (const std::exception& e) {
        std::cerr << "radar-kit serve: " << e.what() << "\n";
        return kExitUsage;
    }
    if (front_end == "IVS947")
        config.front_end_override = radarkit::sim::FrontEndKind::IVS947;
    else if (front_end == "IVS565")
        config.front_end_override = radarkit::sim::FrontEndKind::IVS565;
    config.seed = seed;
    config.emulate_latency = emulate_latency;

    radarkit::server::Instrument instrument(std::move(config));
    try {
        radarkit::server::TcpServer server(instrument, port);
        g_server = &server;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        std::cout << "radar-kit instrument listening on port " << server.port() << " ("
                  << radarkit::sim::to_string(instrument.front_end().kind) << ", routing "
                  << radarkit::server::to_string(instrument.routing()) << ")\n";
        server.run();
        g_server = nullptr;
    } catch (const std::exception& e) {
        std::cerr << "radar-kit serve: " << e.what() << "\n";
        return kExitProtocol;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Software radar kit: STEMlab + 24 GHz FMCW front-end emulator and experiments"};
    app.require_subcommand(1);

    // serve
    auto* serve = app.add_subcommand("serve", "Run the SCPI instrument emulator");
    std::string scene_path;
    std::string front_end = "";
    std::uint16_t port = default_port();
    std::uint64_t seed = 1;
    bool emulate_latency = false;
    serve->add_option("--scene", scene_path, "Scene JSON file")->required();
    serve->add_option("--front-end", front_end, "Override the scene's front end")
        ->check(CLI::IsMember({"IVS947", "IVS565"}));
    serve->add_option("--port", port, "TCP port (0 = ephemeral; env RADAR_KIT_PORT)");
    serve->add_option("--seed", seed, "Noise seed");
    serve->add_flag("--emulate-latency", emulate_latency,
                    "Insert the ~450 ms hardware SCPI repetition delay per trigger");

    // shared client options
    radarkit::client::ExperimentConfig cfg;
    cfg.port = default_port();
    auto add_client_options = [&](CLI::App* cmd) {
        cmd->add_option("--host", cfg.host, "Instrument host");
        cmd->add_option("--port", cfg.port, "Instrument port");
        cmd->add_option("--out", cfg.out_dir, "Output directory for CSV/JSON artifacts");
        cmd->add_option("--seed", cfg.seed, "Noise seed sent to the simulator");
        cmd->add_option("--timeout", cfg.timeout_s, "I/O timeout in seconds");
        cmd->add_option("--v-lo", cfg.v_lo, "Ramp start voltage");
        cmd->add_option("--v-hi", cfg.v_hi, "Ramp end voltage");
    };

    auto* chirp_char = app.add_subcommand(
        "chirp-char", "Experiment A: chirp characterization via the prescaler");
    add_client_options(chirp_char);
    chirp_char->add_option("--ramp-duration", cfg.ramp_duration_s, "Upsweep duration in seconds");
    chirp_char->add_option("--decimation", cfg.decimation_chirp_char, "ADC decimation");
    chirp_char->add_option("--fft-length", cfg.stft_fft_length, "STFT transform length");

    auto* chirp_seq = app.add_subcommand(
        "chirp-seq", "Experiment B: chirp-sequence range-Doppler measurement");
    add_client_options(chirp_seq);
    chirp_seq->add_option("--chirps", cfg.n_chirps, "Number of chirps");
    chirp_seq->add_option("--decimation", cfg.decimation_chirp_seq, "ADC decimation");
    chirp_seq->add_option("--threshold-db", cfg.detect_threshold_db,
                          "Detection threshold below map maximum");
    chirp_seq->add_option("--max-peaks", cfg.detect_max_peaks, "Maximum reported detections");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (serve->parsed()) {
            return run_serve(scene_path, front_end, port, seed, emulate_latency);
        }
        if (chirp_char->parsed()) {
            const auto report = radarkit::client::run_chirp_characterization(cfg);
            std::cout << "chirp-char: RF slope " << report.slope_rf_hz_per_s << " Hz/s, bandwidth "
                      << report.rf_bandwidth_hz / 1e6 << " MHz, residual RMS "
                      << report.residual_rms_hz << " Hz over " << report.n_points
                      << " points\n"
                      << "artifacts: " << report.spectrogram_csv.string() << ", "
                      << report.track_csv.string() << ", " << report.report_json.string() << "\n";
            return kExitOk;
        }
        if (chirp_seq->parsed()) {
            const auto report = radarkit::client::run_chirp_sequence(cfg);
            std::cout << "chirp-seq: " << report.detections.size() << " detection(s)\n";
            for (const auto& det : report.detections) {
                std::cout << "  r = " << det.range_m << " m, v = " << det.velocity_mps
                          << " m/s, " << det.magnitude_db << " dB\n";
            }
            std::cout << "artifacts: " << report.map_csv.string() << ", "
                      << report.detections_csv.string() << ", " << report.report_json.string()
                      << "\n";
            return kExitOk;
        }
    } catch (const radarkit::client::ProtocolError& e) {
        std::cerr << "radar-kit: " << e.what() << "\n";
        return kExitProtocol;
    } catch (const radarkit::client::AnalysisError& e) {
        std::cerr << "radar-kit: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const std::exception& e) {
        std::cerr << "radar-kit: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
