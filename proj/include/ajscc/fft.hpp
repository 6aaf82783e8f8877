#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ajscc {

using Complex = std::complex<double>;

// Forward complex DFT of fixed length, X[k] = sum_n x[n] e^{-j2pi kn/N}.
// Plans are created with FFTW_ESTIMATE so repeated runs are bit-identical.
class ComplexFft {
public:
    explicit ComplexFft(std::size_t n);
    ~ComplexFft();
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;
    ComplexFft(ComplexFft&& other) noexcept;
    ComplexFft& operator=(ComplexFft&& other) noexcept;

    std::size_t size() const noexcept { return n_; }

    // Result stays valid until the next call.
    std::span<const Complex> forward(std::span<const Complex> input);

private:
    void release() noexcept;

    std::size_t n_ = 0;
    Complex* in_ = nullptr;
    Complex* out_ = nullptr;
    void* plan_ = nullptr;
};

// Real-input DFT helpers for whole-signal filtering and periodograms.
std::vector<Complex> real_forward(std::span<const double> x);
// Inverse of real_forward for a signal of length n (normalised by 1/n).
std::vector<double> real_inverse(std::span<const Complex> spectrum, std::size_t n);

} // namespace ajscc
