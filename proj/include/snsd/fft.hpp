#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace snsd {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Complex-to-complex 3D FFT plans for an n^3 cube.
/// Plans are created once (FFTW_ESTIMATE, so planning is deterministic) and
/// executed on caller buffers; fftw_execute_dft is safe to call concurrently.
class Fft3d {
public:
    explicit Fft3d(int n) : n_(n) {
        std::vector<std::complex<double>> tmp(std::size_t(n) * n * n);
        auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    ~Fft3d() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    Fft3d(const Fft3d&) = delete;
    Fft3d& operator=(const Fft3d&) = delete;

    /// In-place unnormalized forward DFT (sign -1).
    void forward(std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(fwd_, p, p);
    }

    /// In-place unnormalized backward DFT (sign +1).
    void backward(std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(bwd_, p, p);
    }

    int n() const { return n_; }

private:
    int n_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

} // namespace snsd
