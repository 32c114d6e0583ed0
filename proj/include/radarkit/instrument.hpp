#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "radarkit/radar_sim.hpp"
#include "radarkit/scpi.hpp"

// STEMlab-style instrument emulator: waveform-generator and acquisition
// state machines backed by the radar simulator, driven by the SCPI dialect
// documented in the README. One session at a time; commands are processed
// strictly in arrival order. Acquisition is buffer-based: the capture is
// computed in one shot at trigger time with generator playback and
// sampling sharing t = 0.

namespace radarkit::server {

enum class Routing { Prescaler, Iq, DualReal };

std::string_view to_string(Routing routing);

struct GeneratorState {
    std::vector<double> waveform;  // uploaded volts, one playback period
    double freq_fix_hz = 0.0;      // playback rate of one waveform period
    bool burst = false;
    int ncycles = 1;
    bool func_arbitrary = false;

    bool armed() const {
        return func_arbitrary && burst && !waveform.empty() && freq_fix_hz > 0.0;
    }
};

enum class AcqStatus { Idle, Armed, Complete };

struct AcquisitionState {
    int decimation = 8;
    AcqStatus status = AcqStatus::Idle;
    std::optional<sim::Capture> buffer;
};

/// One response per command: payload for queries, "OK" for accepted set
/// commands, "ERR:<code>,<message>" on failure. Failures never change
/// state and never close the connection.
struct Response {
    std::string payload;
    bool is_error = false;
};

// Error codes used in ERR responses.
inline constexpr int kErrSyntax = 100;
inline constexpr int kErrUnknownCommand = 101;
inline constexpr int kErrBadArgument = 102;
inline constexpr int kErrInvalidState = 103;
inline constexpr int kErrBufferLimit = 104;
inline constexpr int kErrRouting = 105;
inline constexpr int kErrScene = 106;
inline constexpr int kErrBusy = 110;

inline constexpr std::string_view kIdnString = "RADAR-KIT,STEMLAB-125-14-SIM,0,1.0";

class Instrument {
  public:
    struct Config {
        sim::Scene scene;
        std::optional<sim::FrontEndKind> front_end_override;
        std::uint64_t seed = 1;
        bool emulate_latency = false;  // insert the ~450 ms SCPI repetition delay
    };

    explicit Instrument(Config config);

    /// Parse and dispatch one message line (no terminator). Never throws.
    Response handle_line(std::string_view line);
    Response handle_command(const scpi::Command& cmd);

    /// Fresh session: equivalent to *RST.
    void reset_session();

    const GeneratorState& generator() const { return generator_; }
    const AcquisitionState& acquisition() const { return acquisition_; }
    Routing routing() const { return routing_; }
    const sim::FrontEndModel& front_end() const { return front_end_; }
    const sim::Scene& scene() const { return scene_; }

  private:
    using Handler = Response (Instrument::*)(const scpi::Command&);

    Response dispatch(const scpi::Command& cmd);
    void apply_front_end(sim::FrontEndKind kind);
    Routing default_routing() const;
    std::uint64_t next_trigger_seed();

    Response cmd_idn(const scpi::Command&);
    Response cmd_rst(const scpi::Command&);
    Response cmd_gen_rst(const scpi::Command&);
    Response cmd_sour_func(const scpi::Command&);
    Response cmd_sour_trac_data(const scpi::Command&);
    Response cmd_sour_burs_stat(const scpi::Command&);
    Response cmd_sour_burs_ncyc(const scpi::Command&);
    Response cmd_sour_freq_fix(const scpi::Command&);
    Response cmd_acq_rst(const scpi::Command&);
    Response cmd_acq_dec(const scpi::Command&);
    Response cmd_acq_dec_query(const scpi::Command&);
    Response cmd_acq_start(const scpi::Command&);
    Response cmd_acq_trig(const scpi::Command&);
    Response cmd_acq_trig_stat_query(const scpi::Command&);
    Response cmd_acq_data_query(const scpi::Command&);
    Response cmd_sim_route(const scpi::Command&);
    Response cmd_sim_scene_load(const scpi::Command&);
    Response cmd_sim_seed(const scpi::Command&);

    sim::Scene scene_;
    sim::FrontEndModel front_end_;
    std::uint64_t base_seed_;
    bool emulate_latency_;

    GeneratorState generator_;
    AcquisitionState acquisition_;
    Routing routing_;
    std::uint64_t trigger_counter_ = 0;

    std::unordered_map<std::string, Handler> table_;
};

}  // namespace radarkit::server
