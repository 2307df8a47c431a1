// Exits 0 when dgemm agrees with a naive product.
#include <cmath>
#include <cstdlib>
#include <vector>

extern "C" void dgemm_(const char*, const char*, const int*, const int*, const int*, const double*, const double*,
                       const int*, const double*, const int*, const double*, double*, const int*);

int main() {
    const int n = 300;
    std::vector<double> a(n * n), b(n * n), c(n * n, 0.0);
    unsigned s = 12345;
    auto rnd = [&s] {
        s = s * 1103515245u + 12345u;
        return static_cast<double>((s >> 8) & 0xffff) / 65536.0 - 0.5;
    };
    for (auto& v : a) v = rnd();
    for (auto& v : b) v = rnd();
    const double one = 1.0, zero = 0.0;
    dgemm_("N", "N", &n, &n, &n, &one, a.data(), &n, b.data(), &n, &zero, c.data(), &n);
    double err = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double r = 0.0;
            for (int k = 0; k < n; ++k) r += a[k * n + i] * b[j * n + k];
            err = std::fmax(err, std::fabs(r - c[j * n + i]));
        }
    return err < 1e-10 ? EXIT_SUCCESS : EXIT_FAILURE;
}
