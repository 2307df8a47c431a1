#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "quadcurl/assembly.hpp"
#include "quadcurl/kernels.hpp"
#include "quadcurl/mesh.hpp"

#include <cmath>
#include <vector>

using namespace quadcurl;
namespace kn = quadcurl::kernels;

namespace {

std::vector<double> random_vector(SplitMix64& rng, int n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("isa names and dispatch") {
    CHECK(std::string(kn::isa_name(kn::Isa::Scalar)) == "scalar");
    CHECK(std::string(kn::isa_name(kn::Isa::Avx2)) == "avx2");
    kn::force_isa(kn::Isa::Scalar);
    CHECK(kn::active_isa() == kn::Isa::Scalar);
    kn::force_isa(kn::Isa::Avx2);
    CHECK(kn::active_isa() == (kn::cpu_has_avx2() ? kn::Isa::Avx2 : kn::Isa::Scalar));
}

TEST_CASE("weighted gram: avx2 matches scalar") {
    if (!kn::cpu_has_avx2()) {
        MESSAGE("no AVX2 on this CPU; equivalence not exercised");
        return;
    }
    SplitMix64 rng(11);
    for (int npts : {1, 3, 4, 7, 16, 33, 125}) {
        for (int n : {1, 2, 5, 12, 30}) {
            const auto phi = random_vector(rng, npts * n);
            const auto w = random_vector(rng, npts, 0.0, 1.0);
            std::vector<double> a(n * n, 0.5), b(n * n, 0.5);
            kn::scalar::weighted_gram(phi.data(), npts, n, w.data(), a.data());
            kn::avx2::weighted_gram(phi.data(), npts, n, w.data(), b.data());
            double err = 0.0, scale = 0.0;
            for (int i = 0; i < n * n; ++i) {
                err = std::max(err, std::abs(a[i] - b[i]));
                scale = std::max(scale, std::abs(a[i]));
            }
            CHECK(err <= 1e-14 * std::max(1.0, scale) * npts);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) CHECK(a[i + n * j] == a[j + n * i]);
        }
    }
}

TEST_CASE("weighted squared difference: avx2 matches scalar") {
    if (!kn::cpu_has_avx2()) {
        MESSAGE("no AVX2 on this CPU; equivalence not exercised");
        return;
    }
    SplitMix64 rng(12);
    for (int npts : {0, 1, 3, 4, 5, 8, 17, 1000}) {
        const auto a = random_vector(rng, npts), b = random_vector(rng, npts), w = random_vector(rng, npts, 0.0, 1.0);
        const double s = kn::scalar::weighted_sq_diff(a.data(), b.data(), w.data(), npts);
        const double v = kn::avx2::weighted_sq_diff(a.data(), b.data(), w.data(), npts);
        CHECK(std::abs(s - v) <= 1e-14 * std::max(1.0, s));
    }
}

TEST_CASE("assembled operators agree between kernel paths") {
    const TetMesh m = perturb(build_cube_mesh(2), 0.2, 42);
    const FESpace V(m, Family::Nedelec, 2, 1, true);
    const FESpace S(m, Family::SigmaTn, 1, 1, false);
    kn::force_isa(kn::Isa::Scalar);
    const SpMat Ms = assemble_mass(V), Ss = assemble_mass(S);
    kn::force_isa(kn::Isa::Avx2);
    const SpMat Mv = assemble_mass(V), Sv = assemble_mass(S);
    CHECK((Ms - Mv).norm() <= 1e-13 * Ms.norm());
    CHECK((Ss - Sv).norm() <= 1e-13 * Ss.norm());
}
