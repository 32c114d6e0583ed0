#include "radarkit/fft.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace radarkit::dsp {

namespace {

// The FFTW planner is not thread-safe; plan creation/destruction is
// serialized. Executing distinct plans concurrently is fine.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanGuard {
    fftw_plan plan = nullptr;
    ~PlanGuard() {
        if (plan) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input) {
    if (input.empty()) throw std::invalid_argument("fft of empty input");
    std::vector<std::complex<double>> in(input.begin(), input.end());
    std::vector<std::complex<double>> out(input.size());
    PlanGuard guard;
    {
        std::lock_guard lock(planner_mutex());
        guard.plan = fftw_plan_dft_1d(static_cast<int>(input.size()),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(guard.plan);
    return out;
}

std::vector<std::complex<double>> rfft(std::span<const double> input, std::size_t fft_length) {
    if (fft_length == 0 || fft_length % 2 != 0)
        throw std::invalid_argument("rfft length must be positive and even");
    if (input.size() > fft_length)
        throw std::invalid_argument("rfft input longer than transform length");
    std::vector<double> in(fft_length, 0.0);
    std::copy(input.begin(), input.end(), in.begin());
    std::vector<std::complex<double>> out(fft_length / 2 + 1);
    PlanGuard guard;
    {
        std::lock_guard lock(planner_mutex());
        guard.plan = fftw_plan_dft_r2c_1d(static_cast<int>(fft_length), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);
    }
    fftw_execute(guard.plan);
    return out;
}

void fft2_inplace(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1) {
    if (n0 == 0 || n1 == 0 || data.size() != n0 * n1)
        throw std::invalid_argument("fft2 shape mismatch");
    PlanGuard guard;
    {
        std::lock_guard lock(planner_mutex());
        guard.plan = fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()), FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    }
    fftw_execute(guard.plan);
}

}  // namespace radarkit::dsp
