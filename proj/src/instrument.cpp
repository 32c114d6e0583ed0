#include "radarkit/instrument.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace radarkit::server {

namespace {

std::string err(int code, std::string_view message) {
    return "ERR:" + std::to_string(code) + "," + std::string(message);
}

Response error_response(int code, std::string_view message) {
    return Response{err(code, message), true};
}

Response ok_response() { return Response{"OK", false}; }

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

// Per-trigger seed derivation (splitmix64 step over base seed + counter).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t counter) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string_view to_string(Routing routing) {
    switch (routing) {
        case Routing::Prescaler: return "PRESCALER";
        case Routing::Iq: return "IQ";
        case Routing::DualReal: return "DUALREAL";
    }
    return "?";
}

Instrument::Instrument(Config config)
    : scene_(std::move(config.scene)),
      base_seed_(config.seed),
      emulate_latency_(config.emulate_latency) {
    apply_front_end(config.front_end_override.value_or(scene_.front_end));
    reset_session();

    table_ = {
        {"*IDN?", &Instrument::cmd_idn},
        {"*RST", &Instrument::cmd_rst},
        {"GEN:RST", &Instrument::cmd_gen_rst},
        {"SOUR:FUNC", &Instrument::cmd_sour_func},
        {"SOUR:TRAC:DATA:DATA", &Instrument::cmd_sour_trac_data},
        {"SOUR:BURS:STAT", &Instrument::cmd_sour_burs_stat},
        {"SOUR:BURS:NCYC", &Instrument::cmd_sour_burs_ncyc},
        {"SOUR:FREQ:FIX", &Instrument::cmd_sour_freq_fix},
        {"ACQ:RST", &Instrument::cmd_acq_rst},
        {"ACQ:DEC", &Instrument::cmd_acq_dec},
        {"ACQ:DEC?", &Instrument::cmd_acq_dec_query},
        {"ACQ:START", &Instrument::cmd_acq_start},
        {"ACQ:TRIG", &Instrument::cmd_acq_trig},
        {"ACQ:TRIG:STAT?", &Instrument::cmd_acq_trig_stat_query},
        {"ACQ:SOUR:DATA?", &Instrument::cmd_acq_data_query},
        {"SIM:ROUTE", &Instrument::cmd_sim_route},
        {"SIM:SCENE:LOAD", &Instrument::cmd_sim_scene_load},
        {"SIM:SEED", &Instrument::cmd_sim_seed},
    };
}

void Instrument::apply_front_end(sim::FrontEndKind kind) {
    front_end_ = kind == sim::FrontEndKind::IVS947 ? sim::FrontEndModel::ivs947()
                                                   : sim::FrontEndModel::ivs565();
    routing_ = default_routing();
}

Routing Instrument::default_routing() const {
    return front_end_.kind == sim::FrontEndKind::IVS947 ? Routing::Iq : Routing::DualReal;
}

void Instrument::reset_session() {
    generator_ = GeneratorState{};
    acquisition_ = AcquisitionState{};
    routing_ = default_routing();
    trigger_counter_ = 0;
}

std::uint64_t Instrument::next_trigger_seed() {
    return mix_seed(base_seed_, trigger_counter_++);
}

Response Instrument::handle_line(std::string_view line) {
    auto parsed = scpi::parse_message(line);
    if (!parsed.ok()) {
        return error_response(kErrSyntax, "parse error at byte " +
                                              std::to_string(parsed.error().offset) + ": " +
                                              parsed.error().message);
    }
    return handle_command(parsed.value());
}

Response Instrument::handle_command(const scpi::Command& cmd) {
    try {
        return dispatch(cmd);
    } catch (const std::exception& e) {
        return error_response(kErrInvalidState, e.what());
    }
}

Response Instrument::dispatch(const scpi::Command& cmd) {
    auto it = table_.find(cmd.dispatch_key());
    if (it == table_.end())
        return error_response(kErrUnknownCommand, "unknown command " + cmd.dispatch_key());
    return (this->*it->second)(cmd);
}

Response Instrument::cmd_idn(const scpi::Command& cmd) {
    if (!cmd.args.empty()) return error_response(kErrBadArgument, "query takes no arguments");
    return Response{std::string(kIdnString), false};
}

Response Instrument::cmd_rst(const scpi::Command&) {
    reset_session();
    return ok_response();
}

Response Instrument::cmd_gen_rst(const scpi::Command&) {
    generator_ = GeneratorState{};
    return ok_response();
}

namespace {

bool source_suffix_ok(const scpi::Command& cmd) {
    return cmd.path[0].suffix.has_value() && *cmd.path[0].suffix == 1;
}

}  // namespace

Response Instrument::cmd_sour_func(const scpi::Command& cmd) {
    if (!source_suffix_ok(cmd)) return error_response(kErrBadArgument, "unknown source channel");
    if (cmd.args.size() != 1 || cmd.args[0].kind != scpi::ValueKind::Keyword)
        return error_response(kErrBadArgument, "expected a waveform function keyword");
    if (upper(cmd.args[0].text) != "ARBITRARY")
        return error_response(kErrBadArgument, "only ARBITRARY waveforms are supported");
    generator_.func_arbitrary = true;
    return ok_response();
}

Response Instrument::cmd_sour_trac_data(const scpi::Command& cmd) {
    if (!source_suffix_ok(cmd)) return error_response(kErrBadArgument, "unknown source channel");
    if (cmd.args.size() != 1 ||
        (cmd.args[0].kind != scpi::ValueKind::Array &&
         cmd.args[0].kind != scpi::ValueKind::Decimal &&
         cmd.args[0].kind != scpi::ValueKind::Integer))
        return error_response(kErrBadArgument, "expected comma-separated waveform values");
    std::vector<double> values;
    try {
        values = cmd.args[0].as_doubles();
    } catch (const std::exception& e) {
        return error_response(kErrBadArgument, e.what());
    }
    if (values.empty()) return error_response(kErrBadArgument, "empty waveform");
    if (values.size() > sim::kMaxBlockSamples)
        return error_response(kErrBufferLimit,
                              "waveform exceeds the 16384-sample Tx block-RAM limit");
    for (double v : values) {
        if (!std::isfinite(v) || std::abs(v) > sim::kAdcFullScale)
            return error_response(kErrBadArgument, "waveform value outside the +/-1 V DAC range");
    }
    generator_.waveform = std::move(values);
    return ok_response();
}

Response Instrument::cmd_sour_burs_stat(const scpi::Command& cmd) {
    if (!source_suffix_ok(cmd)) return error_response(kErrBadArgument, "unknown source channel");
    if (cmd.args.size() != 1 || cmd.args[0].kind != scpi::ValueKind::Keyword)
        return error_response(kErrBadArgument, "expected BURST or CONTINUOUS");
    const std::string mode = upper(cmd.args[0].text);
    if (mode == "BURST")
        generator_.burst = true;
    else if (mode == "CONTINUOUS")
        generator_.burst = false;
    else
        return error_response(kErrBadArgument, "expected BURST or CONTINUOUS");
    return ok_response();
}

Response Instrument::cmd_sour_burs_ncyc(const scpi::Command& cmd) {
    if (!source_suffix_ok(cmd)) return error_response(kErrBadArgument, "unknown source channel");
    if (cmd.args.size() != 1) return error_response(kErrBadArgument, "expected a cycle count");
    long long n = 0;
    try {
        n = cmd.args[0].as_int();
    } catch (const std::exception&) {
        return error_response(kErrBadArgument, "cycle count must be an integer");
    }
    if (n < 1 || n > 65536)
        return error_response(kErrBadArgument, "cycle count must be in [1, 65536]");
    generator_.ncycles = static_cast<int>(n);
    return ok_response();
}

Response Instrument::cmd_sour_freq_fix(const scpi::Command& cmd) {
    if (!source_suffix_ok(cmd)) return error_response(kErrBadArgument, "unknown source channel");
    if (cmd.args.size() != 1) return error_response(kErrBadArgument, "expected a frequency");
    double f = 0.0;
    try {
        f = cmd.args[0].as_double();
    } catch (const std::exception&) {
        return error_response(kErrBadArgument, "frequency must be numeric");
    }
    if (!(f > 0.0)) return error_response(kErrBadArgument, "frequency must be positive");
    generator_.freq_fix_hz = f;
    return ok_response();
}

Response Instrument::cmd_acq_rst(const scpi::Command&) {
    acquisition_ = AcquisitionState{};
    return ok_response();
}

Response Instrument::cmd_acq_dec(const scpi::Command& cmd) {
    if (cmd.args.size() != 1) return error_response(kErrBadArgument, "expected a decimation");
    long long d = 0;
    try {
        d = cmd.args[0].as_int();
    } catch (const std::exception&) {
        return error_response(kErrBadArgument, "decimation must be an integer");
    }
    if (d < 1 || d > 65536 || !sim::decimation_allowed(static_cast<int>(d)))
        return error_response(kErrBadArgument,
                              "decimation must be one of 1,8,64,1024,8192,65536");
    acquisition_.decimation = static_cast<int>(d);
    acquisition_.status = AcqStatus::Idle;
    acquisition_.buffer.reset();
    return ok_response();
}

Response Instrument::cmd_acq_dec_query(const scpi::Command& cmd) {
    if (!cmd.args.empty()) return error_response(kErrBadArgument, "query takes no arguments");
    return Response{std::to_string(acquisition_.decimation), false};
}

Response Instrument::cmd_acq_start(const scpi::Command&) {
    acquisition_.status = AcqStatus::Armed;
    acquisition_.buffer.reset();
    return ok_response();
}

Response Instrument::cmd_acq_trig(const scpi::Command& cmd) {
    if (cmd.args.size() != 1 || cmd.args[0].kind != scpi::ValueKind::Keyword ||
        upper(cmd.args[0].text) != "NOW")
        return error_response(kErrBadArgument, "expected ACQ:TRIG NOW");
    if (acquisition_.status != AcqStatus::Armed)
        return error_response(kErrInvalidState, "acquisition is not armed");
    if (!generator_.armed())
        return error_response(kErrInvalidState,
                              "generator is not ready (waveform, ARBITRARY function, burst "
                              "mode and playback rate required)");

    sim::TuningRamp ramp;
    ramp.samples = generator_.waveform;
    ramp.dac_rate_hz = static_cast<double>(generator_.waveform.size()) * generator_.freq_fix_hz;
    ramp.n_chirps = generator_.ncycles;
    ramp.mode = generator_.ncycles > 1 ? sim::RampMode::ChirpSequence
                                       : sim::RampMode::SingleUpsweep;
    const auto [lo, hi] = std::minmax_element(ramp.samples.begin(), ramp.samples.end());
    ramp.v_lo = *lo;
    ramp.v_hi = *hi;
    if (ramp.dac_rate_hz > sim::kNativeSampleRate)
        return error_response(kErrBadArgument, "playback rate exceeds the 125 MS/s DAC");

    const double sample_rate = sim::kNativeSampleRate / acquisition_.decimation;
    const std::uint64_t seed = next_trigger_seed();

    sim::Capture capture;
    try {
        switch (routing_) {
            case Routing::Prescaler:
                capture = sim::capture_prescaler(ramp, front_end_, scene_.noise_std_v,
                                                 sample_rate, sim::kMaxBlockSamples, seed);
                break;
            case Routing::Iq:
            case Routing::DualReal:
                capture = sim::simulate_rx(ramp, front_end_, scene_, sample_rate,
                                           sim::kMaxBlockSamples, seed);
                break;
        }
    } catch (const std::exception& e) {
        return error_response(kErrInvalidState, e.what());
    }

    if (emulate_latency_) std::this_thread::sleep_for(std::chrono::milliseconds(450));

    acquisition_.buffer = std::move(capture);
    acquisition_.status = AcqStatus::Complete;
    return ok_response();
}

Response Instrument::cmd_acq_trig_stat_query(const scpi::Command& cmd) {
    if (!cmd.args.empty()) return error_response(kErrBadArgument, "query takes no arguments");
    return Response{acquisition_.status == AcqStatus::Complete ? "TD" : "WAIT", false};
}

Response Instrument::cmd_acq_data_query(const scpi::Command& cmd) {
    if (!cmd.args.empty()) return error_response(kErrBadArgument, "query takes no arguments");
    const auto& suffix = cmd.path[1].suffix;  // ACQ:SOUR<n>:DATA?
    if (!suffix || (*suffix != 1 && *suffix != 2))
        return error_response(kErrBadArgument, "unknown acquisition channel");
    if (acquisition_.status != AcqStatus::Complete || !acquisition_.buffer)
        return error_response(kErrInvalidState, "no completed acquisition to read");
    const auto channel = static_cast<std::size_t>(*suffix - 1);
    if (channel >= acquisition_.buffer->channels.size())
        return error_response(kErrInvalidState,
                              "channel " + std::to_string(*suffix) +
                                  " carries no data under routing " +
                                  std::string(to_string(routing_)));
    return Response{scpi::serialize_array(acquisition_.buffer->channels[channel]), false};
}

Response Instrument::cmd_sim_route(const scpi::Command& cmd) {
    if (cmd.args.size() != 1 || cmd.args[0].kind != scpi::ValueKind::Keyword)
        return error_response(kErrBadArgument, "expected PRESCALER, IQ or DUALREAL");
    const std::string name = upper(cmd.args[0].text);
    Routing requested;
    if (name == "PRESCALER")
        requested = Routing::Prescaler;
    else if (name == "IQ")
        requested = Routing::Iq;
    else if (name == "DUALREAL")
        requested = Routing::DualReal;
    else
        return error_response(kErrBadArgument, "expected PRESCALER, IQ or DUALREAL");

    if (requested == Routing::Iq && front_end_.kind != sim::FrontEndKind::IVS947)
        return error_response(kErrRouting, "routing IQ requires the IVS947 front end (configured: " +
                                               std::string(sim::to_string(front_end_.kind)) + ")");
    if (requested == Routing::DualReal && front_end_.kind != sim::FrontEndKind::IVS565)
        return error_response(
            kErrRouting, "routing DUALREAL requires the IVS565 front end (configured: " +
                             std::string(sim::to_string(front_end_.kind)) + ")");
    routing_ = requested;
    return ok_response();
}

Response Instrument::cmd_sim_scene_load(const scpi::Command& cmd) {
    if (cmd.args.size() != 1 || cmd.args[0].kind != scpi::ValueKind::Keyword)
        return error_response(kErrBadArgument, "expected a scene file path");
    sim::Scene scene;
    try {
        scene = sim::load_scene(cmd.args[0].text);
    } catch (const std::exception& e) {
        return error_response(kErrScene, e.what());
    }
    scene_ = std::move(scene);
    apply_front_end(scene_.front_end);
    acquisition_.status = AcqStatus::Idle;
    acquisition_.buffer.reset();
    return ok_response();
}

Response Instrument::cmd_sim_seed(const scpi::Command& cmd) {
    if (cmd.args.size() != 1) return error_response(kErrBadArgument, "expected a seed");
    long long seed = 0;
    try {
        seed = cmd.args[0].as_int();
    } catch (const std::exception&) {
        return error_response(kErrBadArgument, "seed must be an integer");
    }
    if (seed < 0) return error_response(kErrBadArgument, "seed must be non-negative");
    base_seed_ = static_cast<std::uint64_t>(seed);
    trigger_counter_ = 0;
    return ok_response();
}

}  // namespace radarkit::server
