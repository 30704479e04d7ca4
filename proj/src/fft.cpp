#include "hsg/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace hsg::fft {

namespace {

// FFTW planning is not thread-safe; executing distinct buffers is.
std::mutex plan_mutex;

fftw_plan plan_2d(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(n, n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

fftw_plan plan_1d(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

} // namespace

void dft2d(std::complex<double>* data, int n, int sign) {
    fftw_plan plan = plan_2d(n, sign == -1 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

void dft1d(std::complex<double>* data, int n, int sign) {
    fftw_plan plan = plan_1d(n, sign == -1 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

} // namespace hsg::fft
