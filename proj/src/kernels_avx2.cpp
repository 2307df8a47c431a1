#include "quadcurl/kernels.hpp"

#include <immintrin.h>

#include <vector>

namespace quadcurl::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double dot(const double* a, const double* b, int n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    int p = 0;
    for (; p + 8 <= n; p += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p + 4), _mm256_loadu_pd(b + p + 4), acc1);
    }
    for (; p + 4 <= n; p += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; p < n; ++p) s += a[p] * b[p];
    return s;
}

}  // namespace

void weighted_gram(const double* phi, int npts, int n, const double* w, double* G) {
    std::vector<double> wphi(static_cast<std::size_t>(npts));
    for (int i = 0; i < n; ++i) {
        const double* pi = phi + static_cast<std::size_t>(npts) * i;
        int p = 0;
        for (; p + 4 <= npts; p += 4)
            _mm256_storeu_pd(wphi.data() + p, _mm256_mul_pd(_mm256_loadu_pd(w + p), _mm256_loadu_pd(pi + p)));
        for (; p < npts; ++p) wphi[p] = w[p] * pi[p];
        for (int j = i; j < n; ++j) {
            const double s = dot(wphi.data(), phi + static_cast<std::size_t>(npts) * j, npts);
            G[i + n * j] += s;
            if (j != i) G[j + n * i] += s;
        }
    }
}

double weighted_sq_diff(const double* a, const double* b, const double* w, int npts) {
    __m256d acc = _mm256_setzero_pd();
    int p = 0;
    for (; p + 4 <= npts; p += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + p), d), d, acc);
    }
    double s = hsum(acc);
    for (; p < npts; ++p) {
        const double d = a[p] - b[p];
        s += w[p] * d * d;
    }
    return s;
}

}  // namespace quadcurl::kernels::avx2
