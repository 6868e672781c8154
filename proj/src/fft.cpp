#include "fft.hpp"

#include <stdexcept>

namespace vibroqfi::detail {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

namespace {

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

template <class F>
fftw_plan make_plan(std::size_t total, bool in_place, F&& build) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* a = static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * total));
    auto* b = in_place ? a : static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * total));
    fftw_plan p = build(as_fftw(a), as_fftw(b));
    fftw_free(a);
    if (!in_place) fftw_free(b);
    if (!p) throw std::runtime_error("fftw planning failed");
    return p;
}

} // namespace

FftPlan::~FftPlan() {
    if (plan_) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
}

FftPlan FftPlan::dft_1d(int n, int sign, bool in_place) {
    FftPlan p;
    p.in_place_ = in_place;
    p.plan_ = make_plan(static_cast<std::size_t>(n), in_place, [&](fftw_complex* a, fftw_complex* b) {
        return fftw_plan_dft_1d(n, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    });
    return p;
}

FftPlan FftPlan::dft_2d(int n0, int n1, int sign, bool in_place) {
    FftPlan p;
    p.in_place_ = in_place;
    p.plan_ = make_plan(static_cast<std::size_t>(n0) * n1, in_place, [&](fftw_complex* a, fftw_complex* b) {
        return fftw_plan_dft_2d(n0, n1, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    });
    return p;
}

FftPlan FftPlan::dft_3d(int n0, int n1, int n2, int sign, bool in_place) {
    FftPlan p;
    p.in_place_ = in_place;
    p.plan_ = make_plan(static_cast<std::size_t>(n0) * n1 * n2, in_place, [&](fftw_complex* a, fftw_complex* b) {
        return fftw_plan_dft_3d(n0, n1, n2, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    });
    return p;
}

FftPlan FftPlan::many(int n, int howmany, int stride, int dist, int sign, bool in_place) {
    FftPlan p;
    std::size_t total = static_cast<std::size_t>(n - 1) * stride + static_cast<std::size_t>(howmany - 1) * dist + 1;
    p.in_place_ = in_place;
    p.plan_ = make_plan(total, in_place, [&](fftw_complex* a, fftw_complex* b) {
        return fftw_plan_many_dft(1, &n, howmany, a, nullptr, stride, dist, b, nullptr, stride, dist, sign,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    });
    return p;
}

void FftPlan::execute(std::complex<double>* in, std::complex<double>* out) const {
    if ((in == out) != in_place_) throw std::logic_error("fft plan executed with the wrong placement");
    fftw_execute_dft(plan_, as_fftw(in), as_fftw(out));
}

} // namespace vibroqfi::detail
