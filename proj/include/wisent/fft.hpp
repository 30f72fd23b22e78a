#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "wisent/types.hpp"

namespace wisent {
namespace detail {

// FFTW plan creation is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

/**
 * Out-of-place complex DFT of arbitrary length. Plans are created with
 * FFTW_ESTIMATE so the chosen algorithm, and therefore the rounding, is
 * identical from run to run.
 *
 * sign: FFTW_FORWARD (-1) or FFTW_BACKWARD (+1). The backward transform is
 * unscaled, matching FFTW convention.
 */
inline std::vector<cdouble> dft(const std::vector<cdouble>& in, int sign) {
    std::vector<cdouble> out(in.size());
    if (in.empty()) return out;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(in.size()),
                                reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

inline std::vector<cdouble> fft_forward(const std::vector<cdouble>& in) {
    return dft(in, FFTW_FORWARD);
}

/// Inverse DFT including the 1/N scaling.
inline std::vector<cdouble> fft_inverse(const std::vector<cdouble>& in) {
    std::vector<cdouble> out = dft(in, FFTW_BACKWARD);
    const double scale = in.empty() ? 1.0 : 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= scale;
    return out;
}

/// Magnitude-squared spectrum of a real series (rectangular window).
inline std::vector<double> power_spectrum(const std::vector<double>& x) {
    std::vector<cdouble> in(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) in[i] = cdouble(x[i], 0.0);
    std::vector<cdouble> X = fft_forward(in);
    std::vector<double> p(x.size() / 2 + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(X[k]);
    return p;
}

}  // namespace wisent
