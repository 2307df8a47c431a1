#pragma once

// Hot inner loops of element assembly and error integration. Each kernel
// has a portable scalar reference and an AVX2/FMA variant; the variant is
// picked once at runtime from the CPU flags. QUADCURL_KERNELS=scalar forces
// the reference path.

namespace quadcurl::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
/// Overrides the dispatch (tests); Avx2 is ignored on CPUs without it.
void force_isa(Isa isa);
bool cpu_has_avx2();
const char* isa_name(Isa isa);

/// G[i + n*j] += sum_p w[p] phi[p + npts*i] phi[p + npts*j] for an npts x n
/// column-major phi. Only the full square is written.
void weighted_gram(const double* phi, int npts, int n, const double* w, double* G);

/// sum_p w[p] (a[p] - b[p])^2 over contiguous arrays of length npts.
double weighted_sq_diff(const double* a, const double* b, const double* w, int npts);

namespace scalar {
void weighted_gram(const double* phi, int npts, int n, const double* w, double* G);
double weighted_sq_diff(const double* a, const double* b, const double* w, int npts);
}  // namespace scalar

namespace avx2 {
void weighted_gram(const double* phi, int npts, int n, const double* w, double* G);
double weighted_sq_diff(const double* a, const double* b, const double* w, int npts);
}  // namespace avx2

}  // namespace quadcurl::kernels
