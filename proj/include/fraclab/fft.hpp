#pragma once

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "errors.hpp"

namespace fraclab {

using cplx = std::complex<double>;

/// Unnormalized complex DFT on an N^d cube (row-major, axis 0 slowest) via FFTW.
/// Plans are created once per (d, N, direction) and executed on per-call buffers.
class CubeFft {
public:
    static void forward(std::vector<cplx>& data, int dim, int n) { run(data, dim, n, FFTW_FORWARD); }

    /// Inverse transform including the 1/N^d normalization.
    static void inverse(std::vector<cplx>& data, int dim, int n) {
        run(data, dim, n, FFTW_BACKWARD);
        const double s = 1.0 / static_cast<double>(data.size());
        for (auto& v : data) v *= s;
    }

private:
    struct Plan {
        fftw_plan plan = nullptr;
        fftw_complex* in = nullptr;
        fftw_complex* out = nullptr;
        std::size_t size = 0;
        std::mutex run_mutex;
    };

    static Plan& plan_for(int dim, int n, int sign) {
        static std::mutex registry_mutex;
        static std::map<std::tuple<int, int, int>, Plan> plans;
        std::lock_guard lock(registry_mutex);
        auto& p = plans[{dim, n, sign}];
        if (!p.plan) {
            int dims[3] = {n, n, n};
            p.size = 1;
            for (int i = 0; i < dim; ++i) p.size *= static_cast<std::size_t>(n);
            p.in = fftw_alloc_complex(p.size);
            p.out = fftw_alloc_complex(p.size);
            p.plan = fftw_plan_dft(dim, dims, p.in, p.out, sign, FFTW_ESTIMATE);
            if (!p.plan) throw NumericError("FFTW could not create a plan");
        }
        return p;
    }

    static void run(std::vector<cplx>& data, int dim, int n, int sign) {
        auto& p = plan_for(dim, n, sign);
        if (data.size() != p.size) throw ConfigError("FFT buffer size does not match the grid");
        std::lock_guard lock(p.run_mutex);
        std::memcpy(p.in, data.data(), p.size * sizeof(cplx));
        fftw_execute(p.plan);
        std::memcpy(data.data(), p.out, p.size * sizeof(cplx));
    }
};

}  // namespace fraclab
