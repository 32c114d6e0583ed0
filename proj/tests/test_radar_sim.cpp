#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "radarkit/radar_sim.hpp"
#include "support/oracles.hpp"

using namespace radarkit;
using sim::FrontEndModel;
using sim::PointTarget;
using sim::Scene;
using sim::TuningRamp;

namespace {

// Paper parameters: 0.7 -> 1.0 V single upsweep over 800 us.
TuningRamp ramp_a() { return TuningRamp::linear(0.7, 1.0, 800e-6, 16384, 1); }

// 128 chirps of T_c = 1.048576 ms each (16384 Rx samples at 122.07 kS/s).
TuningRamp ramp_b() { return TuningRamp::linear(0.7, 1.0, 128.0 / (125e6 / 1024), 16384, 128); }

constexpr double kFsChirpChar = 125e6 / 8;     // 15.625 MS/s
constexpr double kFsChirpSeq = 125e6 / 1024;   // 122070.3125 S/s
constexpr double kQuantStep = 2.0 / 16384;

}  // namespace

TEST_SUITE("radar_sim") {

TEST_CASE("instantaneous RF frequency along the characterization ramp") {
    const auto ramp = ramp_a();
    const auto fe = FrontEndModel::ivs947();

    // Ramp start: 24.0 GHz at v_tune = 0.7 V.
    CHECK(sim::instantaneous_rf_frequency(ramp, fe, 0.0) == doctest::Approx(24.0e9));

    // Ramp end: 24.0 GHz + 216 MHz with k_vco = 720 MHz/V.
    const double f_end = sim::instantaneous_rf_frequency(ramp, fe, 800e-6 - 1e-9);
    CHECK(f_end == doctest::Approx(24.0e9 + 216e6).epsilon(1e-6));

    // Mid-ramp, linear interpolation oracle.
    const double f_mid = sim::instantaneous_rf_frequency(ramp, fe, 400e-6);
    CHECK(f_mid == doctest::Approx(24.108e9).epsilon(1e-4));

    CHECK_THROWS_AS((void)sim::instantaneous_rf_frequency(ramp, fe, -1e-9), std::out_of_range);
    CHECK_THROWS_AS((void)sim::instantaneous_rf_frequency(ramp, fe, 800e-6), std::out_of_range);
}

TEST_CASE("prescaler output divides a constant carrier to 2.9296875 MHz") {
    TuningRamp flat;
    flat.samples.assign(1024, 0.7);
    flat.dac_rate_hz = 1024 / 1.2e-3;
    flat.v_lo = 0.7;
    flat.v_hi = 0.7;
    const auto fe = FrontEndModel::ivs947();
    const auto signal = sim::prescaler_output(flat, fe, kFsChirpChar, 16384);
    REQUIRE(signal.size() == 16384);

    // 24.0e9 / 8192: exact division oracle.
    const double expected = 24.0e9 / 8192.0;
    const double measured = oracles::zero_crossing_frequency(
        signal, kFsChirpChar, 8192, 5e-6);
    CHECK(measured == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("prescaler sweep spans 216 MHz / 8192 over the ramp") {
    const auto ramp = ramp_a();
    const auto fe = FrontEndModel::ivs947();
    const auto signal = sim::prescaler_output(ramp, fe, kFsChirpChar, 16384);

    const auto near_start = oracles::zero_crossing_frequency(
        signal, kFsChirpChar, static_cast<std::size_t>(10e-6 * kFsChirpChar), 5e-6);
    const auto near_end = oracles::zero_crossing_frequency(
        signal, kFsChirpChar, static_cast<std::size_t>(790e-6 * kFsChirpChar), 5e-6);
    const double span = (near_end - near_start) / (780e-6 / 800e-6);
    CHECK(span == doctest::Approx(216e6 / 8192.0).epsilon(5e-3));
}

TEST_CASE("prescaler output of a zero-length request is empty") {
    const auto signal = sim::prescaler_output(ramp_a(), FrontEndModel::ivs947(), kFsChirpChar, 0);
    CHECK(signal.empty());
}

TEST_CASE("prescaler instantaneous frequency tracks f_rf/8192 within 0.1% everywhere") {
    const auto ramp = ramp_a();
    const auto fe = FrontEndModel::ivs947();
    const auto capture = sim::capture_prescaler(ramp, fe, 0.0, kFsChirpChar, 16384, 1);
    const auto& signal = capture.channels[0];

    for (int k = 1; k < 80; ++k) {
        const double t = k * 10e-6;
        const auto center = static_cast<std::size_t>(std::llround(t * kFsChirpChar));
        const double measured =
            oracles::zero_crossing_frequency(signal, kFsChirpChar, center, 5e-6);
        const double expected = sim::instantaneous_rf_frequency(ramp, fe, t) / 8192.0;
        CHECK(std::abs(measured - expected) / expected < 1e-3);
    }
}

TEST_CASE("empty scene with zero noise produces an all-zero capture") {
    Scene scene;
    const auto capture =
        sim::simulate_rx(ramp_b(), FrontEndModel::ivs947(), scene, kFsChirpSeq, 16384, 3);
    REQUIRE(capture.channels.size() == 2);
    for (const auto& ch : capture.channels) {
        REQUIRE(ch.size() == 16384);
        CHECK(std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.0; }));
    }
    CHECK(capture.decimation == 1024);
    CHECK(capture.trigger_offset == 0);
}

TEST_CASE("static target beat frequency matches the closed form (10 kHz at 7.277 m)") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs947();
    PointTarget target;
    target.range_m = 7.277;
    target.amplitude_v = 0.25;

    const double t_c = ramp.chirp_duration_s();
    const double f_b_closed = 2.0 * 216e6 * 7.277 / (sim::kSpeedOfLight * t_c);
    CHECK(f_b_closed == doctest::Approx(10e3).epsilon(1e-3));
    CHECK(sim::beat_frequency(ramp, fe, target) == doctest::Approx(f_b_closed).epsilon(1e-9));

    // One chirp of the simulated IQ signal peaks within one DFT bin.
    Scene scene;
    scene.targets.push_back(target);
    const auto capture = sim::simulate_rx(ramp, fe, scene, kFsChirpSeq, 16384, 5);
    std::vector<std::complex<double>> chirp(128);
    for (std::size_t i = 0; i < 128; ++i)
        chirp[i] = {capture.channels[0][i], capture.channels[1][i]};
    const auto spectrum = oracles::direct_dft(chirp);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < spectrum.size(); ++k)
        if (std::abs(spectrum[k]) > std::abs(spectrum[peak])) peak = k;
    const double bin_hz = kFsChirpSeq / 128.0;
    CHECK(std::abs(static_cast<double>(peak) * bin_hz - f_b_closed) <= bin_hz);
}

TEST_CASE("approaching target Doppler: -321.7 Hz and -0.337 turns per chirp") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs947();
    const double f_d = sim::doppler_frequency(ramp, fe, -2.0);
    // 2 * v * f_c / c with f_c = 24.108 GHz, c = 2.998e8 m/s.
    CHECK(f_d == doctest::Approx(2.0 * -2.0 * 24.108e9 / 2.998e8).epsilon(1e-12));
    CHECK(f_d == doctest::Approx(-321.65).epsilon(1e-3));

    const double phase_step_turns = f_d * ramp.chirp_duration_s();
    CHECK(phase_step_turns == doctest::Approx(-0.337).epsilon(2e-3));

    // Measure the per-chirp phase progression at a fixed fast-time index.
    Scene scene;
    scene.targets.push_back(PointTarget{15.0, -2.0, 0.25, 0.0});
    const auto channels = sim::simulate_rx_analog(ramp, fe, scene, kFsChirpSeq, 16384);
    double worst = 0.0;
    for (std::size_t m = 0; m + 1 < 128; ++m) {
        const std::size_t i0 = m * 128 + 40;
        const std::size_t i1 = (m + 1) * 128 + 40;
        const std::complex<double> s0{channels[0][i0], channels[1][i0]};
        const std::complex<double> s1{channels[0][i1], channels[1][i1]};
        const double step = std::arg(s1 * std::conj(s0)) / (2.0 * std::numbers::pi);
        // Wrapped comparison against the expected fractional turn.
        double diff = step - (phase_step_turns - std::round(phase_step_turns));
        diff -= std::round(diff);
        worst = std::max(worst, std::abs(diff));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("quantizer clips, rounds half away from zero and stays on-grid") {
    CHECK(sim::quantize_adc(0.0) == 0.0);
    CHECK(sim::quantize_adc(2.5) == 1.0);
    CHECK(sim::quantize_adc(-2.5) == -1.0);
    CHECK(sim::quantize_adc(1.0) == 1.0);

    // Half-step values round away from zero.
    CHECK(sim::quantize_adc(0.5 * kQuantStep) == doctest::Approx(kQuantStep));
    CHECK(sim::quantize_adc(-0.5 * kQuantStep) == doctest::Approx(-kQuantStep));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = uni(rng);
        const double q = sim::quantize_adc(v);
        CHECK(std::abs(q - v) <= kQuantStep / 2 + 1e-15);
        // On-grid: an integer number of steps.
        const double steps = q * 8192.0;
        CHECK(steps == std::round(steps));
        // Idempotent.
        CHECK(sim::quantize_adc(q) == q);
    }
}

TEST_CASE("IQ magnitude of a single static target is constant") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs947();
    Scene scene;
    scene.targets.push_back(PointTarget{12.0, 0.0, 0.25, 0.0});
    const auto capture = sim::simulate_rx(ramp, fe, scene, kFsChirpSeq, 16384, 7);
    const double a2 = 0.25 * 0.25;
    for (std::size_t i = 0; i < 16384; ++i) {
        const double m2 = capture.channels[0][i] * capture.channels[0][i] +
                          capture.channels[1][i] * capture.channels[1][i];
        CHECK(std::abs(m2 - a2) < 4.0 * 0.25 * kQuantStep);
    }
}

TEST_CASE("superposition: two targets equal the sum of singles pre-quantization") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs947();
    PointTarget t1{9.0, -1.0, 0.2, 0.0};
    PointTarget t2{22.0, 1.5, 0.15, 0.0};

    Scene both;
    both.targets = {t1, t2};
    Scene only1;
    only1.targets = {t1};
    Scene only2;
    only2.targets = {t2};

    const auto combined = sim::simulate_rx_analog(ramp, fe, both, kFsChirpSeq, 4096);
    const auto first = sim::simulate_rx_analog(ramp, fe, only1, kFsChirpSeq, 4096);
    const auto second = sim::simulate_rx_analog(ramp, fe, only2, kFsChirpSeq, 4096);
    for (std::size_t ch = 0; ch < 2; ++ch) {
        for (std::size_t i = 0; i < 4096; ++i) {
            CHECK(combined[ch][i] == first[ch][i] + second[ch][i]);
        }
    }
}

TEST_CASE("identical seeds give bit-identical captures") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs947();
    Scene scene;
    scene.targets.push_back(PointTarget{15.0, -2.0, 0.25, 0.0});
    scene.noise_std_v = 0.02;
    const auto a = sim::simulate_rx(ramp, fe, scene, kFsChirpSeq, 16384, 99);
    const auto b = sim::simulate_rx(ramp, fe, scene, kFsChirpSeq, 16384, 99);
    CHECK(a.channels == b.channels);

    const auto c = sim::simulate_rx(ramp, fe, scene, kFsChirpSeq, 16384, 100);
    CHECK(a.channels != c.channels);
}

TEST_CASE("IVS565 boresight target drives both channels identically") {
    const auto ramp = ramp_b();
    auto fe = FrontEndModel::ivs565();
    fe.rx_spacing_m = sim::kSpeedOfLight / sim::center_rf_frequency(ramp, fe) / 2.0;
    Scene scene;
    scene.front_end = sim::FrontEndKind::IVS565;
    scene.targets.push_back(PointTarget{10.0, 0.0, 0.25, 0.0});
    const auto channels = sim::simulate_rx_analog(ramp, fe, scene, kFsChirpSeq, 4096);
    CHECK(channels[0] == channels[1]);
}

TEST_CASE("IVS565 inter-channel phase follows 2*pi*(d/lambda)*sin(bearing)") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs565();
    const double lambda = sim::kSpeedOfLight / sim::center_rf_frequency(ramp, fe);
    const double bearing = 20.0;
    Scene scene;
    scene.front_end = sim::FrontEndKind::IVS565;
    scene.targets.push_back(PointTarget{10.0, 0.0, 0.25, bearing});
    const auto channels = sim::simulate_rx_analog(ramp, fe, scene, kFsChirpSeq, 2048);

    // Phase of each channel's beat line from a direct DFT of one chirp.
    std::vector<std::complex<double>> c0(128);
    std::vector<std::complex<double>> c1(128);
    for (std::size_t i = 0; i < 128; ++i) {
        c0[i] = {channels[0][i], 0.0};
        c1[i] = {channels[1][i], 0.0};
    }
    const auto s0 = oracles::direct_dft(c0);
    const auto s1 = oracles::direct_dft(c1);
    std::size_t peak = 1;
    for (std::size_t k = 1; k < 64; ++k)
        if (std::abs(s0[k]) > std::abs(s0[peak])) peak = k;
    const double dphi = std::arg(s1[peak] * std::conj(s0[peak]));
    const double expected = 2.0 * std::numbers::pi * (fe.rx_spacing_m / lambda) *
                            std::sin(bearing * std::numbers::pi / 180.0);
    CHECK(dphi == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("targets beyond the decimated Nyquist are removed by the anti-alias model") {
    const auto ramp = ramp_b();
    const auto fe = FrontEndModel::ivs947();
    Scene scene;
    // Beat frequency ~68.7 kHz > 61.035 kHz Nyquist at decimation 1024.
    scene.targets.push_back(PointTarget{50.0, 0.0, 0.25, 0.0});
    const auto channels = sim::simulate_rx_analog(ramp, fe, scene, kFsChirpSeq, 2048);
    for (const auto& ch : channels)
        CHECK(std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("buffer and argument validation") {
    const auto fe = FrontEndModel::ivs947();
    Scene scene;

    CHECK_THROWS_AS((void)TuningRamp::linear(0.7, 1.0, 1e-3, 16385, 1), std::invalid_argument);

    TuningRamp bad = ramp_a();
    bad.samples[10] = 1.5;  // outside [v_lo, v_hi]
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    TuningRamp negative = ramp_a();
    negative.v_lo = -0.1;
    CHECK_THROWS_AS(negative.validate(), std::invalid_argument);

    CHECK_THROWS_AS((void)sim::simulate_rx(ramp_b(), fe, scene, kFsChirpSeq, 16385, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sim::simulate_rx(ramp_b(), fe, scene, 1e6, 1024, 1),
                    std::invalid_argument);  // 1 MS/s is not 125e6 / allowed decimation

    PointTarget bad_target{-1.0, 0.0, 0.1, 0.0};
    CHECK_THROWS_AS(bad_target.validate(), std::invalid_argument);

    auto fe947 = FrontEndModel::ivs947();
    fe947.prescaler_ratio = 4096;
    CHECK_THROWS_AS(fe947.validate(), std::invalid_argument);
}

TEST_CASE("scene JSON round trip and strictness") {
    const char* text = R"({
        "targets": [{"range_m": 15.0, "velocity_mps": -2.0, "amplitude": 0.25, "bearing_deg": 0.0}],
        "noise_std": 0.01,
        "front_end": "IVS947"
    })";
    const auto scene = sim::parse_scene_json(text);
    REQUIRE(scene.targets.size() == 1);
    CHECK(scene.targets[0].range_m == 15.0);
    CHECK(scene.targets[0].velocity_mps == -2.0);
    CHECK(scene.noise_std_v == 0.01);
    CHECK(scene.front_end == sim::FrontEndKind::IVS947);

    const auto reparsed = sim::parse_scene_json(sim::scene_to_json(scene));
    CHECK(reparsed.targets[0].range_m == scene.targets[0].range_m);
    CHECK(reparsed.noise_std_v == scene.noise_std_v);

    CHECK_THROWS_AS((void)sim::parse_scene_json(R"({"targets": [], "front_end": "IVS947",
                        "extra": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sim::parse_scene_json(R"({"targets": [], "front_end": "XYZ"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sim::parse_scene_json(R"({"targets": [{"amplitude": 1}],
                        "front_end": "IVS947"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sim::parse_scene_json("not json"), std::invalid_argument);
}

}  // TEST_SUITE
