// fft.hpp - thin FFTW wrappers; planning is serialized, execution is not

#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace vibroqfi::detail {

std::mutex& fftw_planner_mutex();

// Owns a plan built on scratch buffers; execute() runs it on caller arrays
// with the same layout and placement (new-array execute).
class FftPlan {
public:
    FftPlan() = default;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& o) noexcept : plan_(o.plan_), in_place_(o.in_place_) { o.plan_ = nullptr; }
    FftPlan& operator=(FftPlan&& o) noexcept {
        std::swap(plan_, o.plan_);
        std::swap(in_place_, o.in_place_);
        return *this;
    }
    ~FftPlan();

    static FftPlan dft_1d(int n, int sign, bool in_place = true);
    static FftPlan dft_2d(int n0, int n1, int sign, bool in_place = true);
    static FftPlan dft_3d(int n0, int n1, int n2, int sign, bool in_place = true);
    // howmany transforms of length n with given stride/dist (in-place capable)
    static FftPlan many(int n, int howmany, int stride, int dist, int sign, bool in_place = true);

    void execute(std::complex<double>* in, std::complex<double>* out) const;

private:
    fftw_plan plan_{nullptr};
    bool in_place_{true};
};

} // namespace vibroqfi::detail
