#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace geoxray::detail {

/// Unnormalised forward/backward DFT of a fixed length over batches of
/// contiguous rows. Plans are created once; execution uses the new-array
/// interface so one object serves any buffer.
class FftPlan {
public:
    FftPlan(std::size_t length, std::size_t batch);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t length() const { return length_; }
    std::size_t batch() const { return batch_; }

    void forward(std::span<std::complex<double>> data) const;
    void backward(std::span<std::complex<double>> data) const;

private:
    std::size_t length_;
    std::size_t batch_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Signed mode index of FFT bin b for a length-N transform.
inline long signed_mode(std::size_t bin, std::size_t length) {
    const auto b = static_cast<long>(bin);
    const auto n = static_cast<long>(length);
    return b < n / 2 ? b : b - n;
}

}  // namespace geoxray::detail
