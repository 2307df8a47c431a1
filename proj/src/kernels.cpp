#include "quadcurl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

namespace quadcurl::kernels {

namespace scalar {

void weighted_gram(const double* phi, int npts, int n, const double* w, double* G) {
    std::vector<double> wphi(static_cast<std::size_t>(npts));
    for (int i = 0; i < n; ++i) {
        const double* pi = phi + static_cast<std::size_t>(npts) * i;
        for (int p = 0; p < npts; ++p) wphi[p] = w[p] * pi[p];
        for (int j = i; j < n; ++j) {
            const double* pj = phi + static_cast<std::size_t>(npts) * j;
            double s = 0.0;
            for (int p = 0; p < npts; ++p) s += wphi[p] * pj[p];
            G[i + n * j] += s;
            if (j != i) G[j + n * i] += s;
        }
    }
}

double weighted_sq_diff(const double* a, const double* b, const double* w, int npts) {
    double s = 0.0;
    for (int p = 0; p < npts; ++p) {
        const double d = a[p] - b[p];
        s += w[p] * d * d;
    }
    return s;
}

}  // namespace scalar

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa detect() {
    if (const char* env = std::getenv("QUADCURL_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& current() {
    static std::atomic<int> isa{static_cast<int>(detect())};
    return isa;
}

}  // namespace

Isa active_isa() { return static_cast<Isa>(current().load(std::memory_order_relaxed)); }

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !cpu_has_avx2()) isa = Isa::Scalar;
    current().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void weighted_gram(const double* phi, int npts, int n, const double* w, double* G) {
    if (active_isa() == Isa::Avx2)
        avx2::weighted_gram(phi, npts, n, w, G);
    else
        scalar::weighted_gram(phi, npts, n, w, G);
}

double weighted_sq_diff(const double* a, const double* b, const double* w, int npts) {
    if (active_isa() == Isa::Avx2) return avx2::weighted_sq_diff(a, b, w, npts);
    return scalar::weighted_sq_diff(a, b, w, npts);
}

}  // namespace quadcurl::kernels
