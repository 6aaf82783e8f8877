#include "ajscc/fft.hpp"

#include "ajscc/error.hpp"

#include <algorithm>
#include <fftw3.h>
#include <mutex>
#include <utility>

namespace ajscc {
namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
    if (n == 0) {
        throw ConfigError("FFT size must be positive");
    }
    in_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    out_ = reinterpret_cast<Complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in_),
                             reinterpret_cast<fftw_complex*>(out_), FFTW_FORWARD, FFTW_ESTIMATE);
}

ComplexFft::~ComplexFft() { release(); }

ComplexFft::ComplexFft(ComplexFft&& other) noexcept
    : n_(other.n_), in_(other.in_), out_(other.out_), plan_(other.plan_) {
    other.in_ = nullptr;
    other.out_ = nullptr;
    other.plan_ = nullptr;
}

ComplexFft& ComplexFft::operator=(ComplexFft&& other) noexcept {
    if (this != &other) {
        release();
        n_ = other.n_;
        in_ = std::exchange(other.in_, nullptr);
        out_ = std::exchange(other.out_, nullptr);
        plan_ = std::exchange(other.plan_, nullptr);
    }
    return *this;
}

void ComplexFft::release() noexcept {
    if (plan_ != nullptr) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
    fftw_free(in_);
    fftw_free(out_);
    plan_ = nullptr;
    in_ = nullptr;
    out_ = nullptr;
}

std::span<const Complex> ComplexFft::forward(std::span<const Complex> input) {
    if (input.size() != n_) {
        throw PreconditionError("FFT input length does not match plan size");
    }
    std::copy(input.begin(), input.end(), in_);
    fftw_execute(static_cast<fftw_plan>(plan_));
    return {out_, n_};
}

std::vector<Complex> real_forward(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> in(x.begin(), x.end());
    std::vector<Complex> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> real_inverse(std::span<const Complex> spectrum, std::size_t n) {
    if (spectrum.size() != n / 2 + 1) {
        throw PreconditionError("spectrum length does not match signal length");
    }
    // c2r destroys its input.
    std::vector<Complex> in(spectrum.begin(), spectrum.end());
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

} // namespace ajscc
