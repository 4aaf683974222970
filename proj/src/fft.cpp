#include "fft.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

namespace geoxray::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t length, std::size_t batch) : length_(length), batch_(batch) {
    if (length == 0 || batch == 0) {
        throw std::invalid_argument("FftPlan: empty transform");
    }
    std::vector<std::complex<double>> scratch(length * batch);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int n = static_cast<int>(length);
    const int howmany = static_cast<int>(batch);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                  FFTW_FORWARD, flags);
    backward_ = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                   FFTW_BACKWARD, flags);
    if (forward_ == nullptr || backward_ == nullptr) {
        throw std::runtime_error("FftPlan: FFTW planning failed");
    }
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
    if (data.size() != length_ * batch_) {
        throw std::invalid_argument("FftPlan: buffer size mismatch");
    }
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(forward_, buf, buf);
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
    if (data.size() != length_ * batch_) {
        throw std::invalid_argument("FftPlan: buffer size mismatch");
    }
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(backward_, buf, buf);
}

}  // namespace geoxray::detail
