#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

namespace macrodim::detail {

// FFTW planning is not thread-safe; execution on fresh arrays is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t n)
    {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p)
            throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { fftw_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
};

using RealBuf = std::vector<double, FftwAllocator<double>>;
using ComplexBuf = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

inline fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

// Real <-> half-complex transforms on a 1-D or 2-D row-major grid, unnormalized.
class RealFft {
public:
    RealFft(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny), real_(nx * ny), spec_(nx * (ny / 2 + 1))
    {
        std::lock_guard lk(fftw_planner_mutex());
        if (ny == 1) {
            spec_.resize(nx / 2 + 1);
            fwd_ = fftw_plan_dft_r2c_1d(int(nx), real_.data(), as_fftw(spec_.data()), FFTW_ESTIMATE);
            inv_ = fftw_plan_dft_c2r_1d(int(nx), as_fftw(spec_.data()), real_.data(), FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_r2c_2d(int(nx), int(ny), real_.data(), as_fftw(spec_.data()),
                                        FFTW_ESTIMATE);
            inv_ = fftw_plan_dft_c2r_2d(int(nx), int(ny), as_fftw(spec_.data()), real_.data(),
                                        FFTW_ESTIMATE);
        }
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft()
    {
        std::lock_guard lk(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }

    std::span<double> real() { return real_; }
    std::span<std::complex<double>> spectrum() { return spec_; }
    void forward() { fftw_execute(fwd_); }
    // c2r destroys its input
    void inverse() { fftw_execute(inv_); }
    std::size_t size() const { return nx_ * ny_; }

private:
    std::size_t nx_, ny_;
    RealBuf real_;
    ComplexBuf spec_;
    fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

class ComplexFft {
public:
    explicit ComplexFft(std::size_t n) : n_(n), buf_(n)
    {
        std::lock_guard lk(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(int(n), as_fftw(buf_.data()), as_fftw(buf_.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    }
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;
    ~ComplexFft()
    {
        std::lock_guard lk(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    std::span<std::complex<double>> data() { return buf_; }
    void forward() { fftw_execute(plan_); }

private:
    std::size_t n_;
    ComplexBuf buf_;
    fftw_plan plan_ = nullptr;
};

}  // namespace macrodim::detail
