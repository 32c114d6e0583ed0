#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "radarkit/client.hpp"
#include "radarkit/dsp.hpp"
#include "radarkit/instrument.hpp"
#include "radarkit/radar_sim.hpp"
#include "radarkit/scpi.hpp"

namespace py = pybind11;

using namespace radarkit;

namespace {

py::dict command_to_dict(const scpi::Command& cmd) {
    py::dict out;
    py::list path;
    for (const auto& tok : cmd.path) {
        py::dict t;
        t["name"] = tok.name;
        t["suffix"] = tok.suffix ? py::cast(*tok.suffix) : py::none();
        path.append(t);
    }
    out["path"] = path;
    out["is_query"] = cmd.is_query;
    py::list args;
    for (const auto& arg : cmd.args) {
        py::dict a;
        switch (arg.kind) {
            case scpi::ValueKind::Integer: a["kind"] = "integer"; break;
            case scpi::ValueKind::Decimal: a["kind"] = "decimal"; break;
            case scpi::ValueKind::Keyword: a["kind"] = "keyword"; break;
            case scpi::ValueKind::Array: a["kind"] = "array"; break;
        }
        if (arg.kind == scpi::ValueKind::Array)
            a["items"] = arg.items;
        else
            a["text"] = arg.text;
        args.append(a);
    }
    out["args"] = args;
    return out;
}

}  // namespace

PYBIND11_MODULE(_radarkit, m) {
    m.doc() = "Software STEMlab + 24 GHz FMCW radar kit: simulator, SCPI emulator and "
              "signal-processing chains";

    // ---- scpi ----
    m.def("parse_message", [](const std::string& line) {
        auto result = scpi::parse_message(line);
        if (!result.ok())
            throw py::value_error("parse error at byte " + std::to_string(result.error().offset) +
                                  ": " + result.error().message);
        return command_to_dict(result.value());
    });
    m.def("parse_buffer_response", [](const std::string& payload) {
        auto result = scpi::parse_buffer_response(payload);
        if (!result.ok())
            throw py::value_error("parse error at byte " + std::to_string(result.error().offset) +
                                  ": " + result.error().message);
        return std::move(result).value();
    });
    m.def("serialize_array",
          [](const std::vector<double>& values) { return scpi::serialize_array(values); });

    // ---- radar simulator ----
    py::enum_<sim::FrontEndKind>(m, "FrontEndKind")
        .value("IVS947", sim::FrontEndKind::IVS947)
        .value("IVS565", sim::FrontEndKind::IVS565);

    py::class_<sim::FrontEndModel>(m, "FrontEndModel")
        .def_static("ivs947", &sim::FrontEndModel::ivs947)
        .def_static("ivs565", &sim::FrontEndModel::ivs565)
        .def_readwrite("kind", &sim::FrontEndModel::kind)
        .def_readwrite("f_base_hz", &sim::FrontEndModel::f_base_hz)
        .def_readwrite("k_vco_hz_per_v", &sim::FrontEndModel::k_vco_hz_per_v)
        .def_readwrite("prescaler_ratio", &sim::FrontEndModel::prescaler_ratio)
        .def_readwrite("rx_spacing_m", &sim::FrontEndModel::rx_spacing_m);

    py::class_<sim::TuningRamp>(m, "TuningRamp")
        .def_static("linear", &sim::TuningRamp::linear, py::arg("v_lo"), py::arg("v_hi"),
                    py::arg("duration_s"), py::arg("n_samples"), py::arg("n_chirps") = 1)
        .def_readwrite("samples", &sim::TuningRamp::samples)
        .def_readwrite("dac_rate_hz", &sim::TuningRamp::dac_rate_hz)
        .def_readwrite("n_chirps", &sim::TuningRamp::n_chirps)
        .def_readwrite("v_lo", &sim::TuningRamp::v_lo)
        .def_readwrite("v_hi", &sim::TuningRamp::v_hi)
        .def_property_readonly("duration_s", &sim::TuningRamp::duration_s)
        .def_property_readonly("chirp_duration_s", &sim::TuningRamp::chirp_duration_s);

    py::class_<sim::PointTarget>(m, "PointTarget")
        .def(py::init([](double range_m, double velocity_mps, double amplitude,
                         double bearing_deg) {
                 return sim::PointTarget{range_m, velocity_mps, amplitude, bearing_deg};
             }),
             py::arg("range_m"), py::arg("velocity_mps") = 0.0, py::arg("amplitude") = 0.25,
             py::arg("bearing_deg") = 0.0)
        .def_readwrite("range_m", &sim::PointTarget::range_m)
        .def_readwrite("velocity_mps", &sim::PointTarget::velocity_mps)
        .def_readwrite("amplitude", &sim::PointTarget::amplitude_v)
        .def_readwrite("bearing_deg", &sim::PointTarget::bearing_deg);

    py::class_<sim::Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("targets", &sim::Scene::targets)
        .def_readwrite("noise_std", &sim::Scene::noise_std_v)
        .def_readwrite("coupling_amplitude", &sim::Scene::coupling_amplitude_v)
        .def_readwrite("front_end", &sim::Scene::front_end);
    m.def("parse_scene_json", [](const std::string& text) { return sim::parse_scene_json(text); });
    m.def("load_scene", &sim::load_scene);
    m.def("scene_to_json", &sim::scene_to_json);

    py::class_<sim::Capture>(m, "Capture")
        .def_readonly("channels", &sim::Capture::channels)
        .def_readonly("sample_rate_hz", &sim::Capture::sample_rate_hz)
        .def_readonly("decimation", &sim::Capture::decimation)
        .def_readonly("trigger_offset", &sim::Capture::trigger_offset);

    m.def("instantaneous_rf_frequency", &sim::instantaneous_rf_frequency);
    m.def("prescaler_output", &sim::prescaler_output, py::arg("ramp"), py::arg("front_end"),
          py::arg("sample_rate_hz"), py::arg("n"));
    m.def("simulate_rx", &sim::simulate_rx, py::arg("ramp"), py::arg("front_end"),
          py::arg("scene"), py::arg("sample_rate_hz"), py::arg("n"), py::arg("seed"));
    m.def("quantize_adc", &sim::quantize_adc);
    m.def("beat_frequency", &sim::beat_frequency);
    m.def("doppler_frequency", &sim::doppler_frequency);
    m.attr("SPEED_OF_LIGHT") = sim::kSpeedOfLight;
    m.attr("MAX_BLOCK_SAMPLES") = sim::kMaxBlockSamples;

    // ---- dsp ----
    py::class_<dsp::StftConfig>(m, "StftConfig")
        .def(py::init<>())
        .def_readwrite("window_length", &dsp::StftConfig::window_length)
        .def_readwrite("hop", &dsp::StftConfig::hop)
        .def_readwrite("fft_length", &dsp::StftConfig::fft_length);

    py::class_<dsp::Spectrogram>(m, "Spectrogram")
        .def_readonly("magnitudes", &dsp::Spectrogram::magnitudes)
        .def_readonly("frame_times_s", &dsp::Spectrogram::frame_times_s)
        .def_readonly("bin_frequencies_hz", &dsp::Spectrogram::bin_frequencies_hz);

    m.def("stft", [](const std::vector<double>& samples, double sample_rate_hz,
                     const dsp::StftConfig& cfg) { return dsp::stft(samples, sample_rate_hz, cfg); },
          py::arg("samples"), py::arg("sample_rate_hz"), py::arg("config") = dsp::StftConfig{});

    py::class_<dsp::PeakEstimate>(m, "PeakEstimate")
        .def_readonly("frequency_hz", &dsp::PeakEstimate::frequency_hz)
        .def_readonly("peak_bin", &dsp::PeakEstimate::peak_bin)
        .def_readonly("delta_bins", &dsp::PeakEstimate::delta_bins)
        .def_readonly("degenerate", &dsp::PeakEstimate::degenerate);
    m.def("interpolate_peak",
          [](const std::vector<double>& column, const std::vector<double>& bins) {
              return dsp::interpolate_peak(column, bins);
          });

    py::class_<dsp::LinearFit>(m, "LinearFit")
        .def_readonly("slope", &dsp::LinearFit::slope)
        .def_readonly("intercept", &dsp::LinearFit::intercept)
        .def_readonly("residuals", &dsp::LinearFit::residuals)
        .def("residual_rms", &dsp::LinearFit::residual_rms);
    m.def("fit_linear_ramp", [](const std::vector<double>& t, const std::vector<double>& f) {
        return dsp::fit_linear_ramp(t, f);
    });

    py::class_<dsp::RangeDopplerParams>(m, "RangeDopplerParams")
        .def(py::init<>())
        .def_readwrite("bandwidth_hz", &dsp::RangeDopplerParams::bandwidth_hz)
        .def_readwrite("chirp_duration_s", &dsp::RangeDopplerParams::chirp_duration_s)
        .def_readwrite("center_frequency_hz", &dsp::RangeDopplerParams::center_frequency_hz)
        .def_readwrite("sample_rate_hz", &dsp::RangeDopplerParams::sample_rate_hz);

    py::enum_<dsp::ChannelMode>(m, "ChannelMode")
        .value("IQ_PAIR", dsp::ChannelMode::IqPair)
        .value("REAL_CH1", dsp::ChannelMode::RealChannel1)
        .value("REAL_CH2", dsp::ChannelMode::RealChannel2);

    py::class_<dsp::RangeDopplerMap>(m, "RangeDopplerMap")
        .def_readonly("n_range", &dsp::RangeDopplerMap::n_range)
        .def_readonly("n_doppler", &dsp::RangeDopplerMap::n_doppler)
        .def_readonly("range_axis_m", &dsp::RangeDopplerMap::range_axis_m)
        .def_readonly("velocity_axis_mps", &dsp::RangeDopplerMap::velocity_axis_mps)
        .def("at", &dsp::RangeDopplerMap::at)
        .def("max_magnitude", &dsp::RangeDopplerMap::max_magnitude);

    m.def("range_doppler",
          [](const sim::Capture& capture, dsp::ChannelMode mode, std::size_t n_fast,
             std::size_t n_slow, std::size_t skip, const dsp::RangeDopplerParams& params) {
              return dsp::range_doppler(capture, mode, n_fast, n_slow, skip, params);
          },
          py::arg("capture"), py::arg("mode"), py::arg("n_fast"), py::arg("n_slow"),
          py::arg("skip"), py::arg("params"));

    py::class_<dsp::Detection>(m, "Detection")
        .def_readonly("range_m", &dsp::Detection::range_m)
        .def_readonly("velocity_mps", &dsp::Detection::velocity_mps)
        .def_readonly("magnitude_db", &dsp::Detection::magnitude_db)
        .def_readonly("range_bin", &dsp::Detection::range_bin)
        .def_readonly("doppler_bin", &dsp::Detection::doppler_bin);

    py::class_<dsp::PeakDetectConfig>(m, "PeakDetectConfig")
        .def(py::init<>())
        .def_readwrite("threshold_db", &dsp::PeakDetectConfig::threshold_db)
        .def_readwrite("max_peaks", &dsp::PeakDetectConfig::max_peaks)
        .def_readwrite("mask_zero_range", &dsp::PeakDetectConfig::mask_zero_range);

    m.def("detect_peaks", &dsp::detect_peaks, py::arg("map"),
          py::arg("config") = dsp::PeakDetectConfig{});
    m.def("doa_phase_comparison", &dsp::doa_phase_comparison, py::arg("peak_ch1"),
          py::arg("peak_ch2"), py::arg("spacing_m"), py::arg("wavelength_m"));

    // ---- instrument (in-process, no sockets) ----
    py::class_<server::Instrument>(m, "Instrument")
        .def(py::init([](const sim::Scene& scene, std::uint64_t seed) {
                 server::Instrument::Config config;
                 config.scene = scene;
                 config.seed = seed;
                 return std::make_unique<server::Instrument>(std::move(config));
             }),
             py::arg("scene"), py::arg("seed") = 1)
        .def("handle_line", [](server::Instrument& self, const std::string& line) {
            const auto resp = self.handle_line(line);
            return py::make_tuple(resp.payload, resp.is_error);
        })
        .def("reset_session", &server::Instrument::reset_session);

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
