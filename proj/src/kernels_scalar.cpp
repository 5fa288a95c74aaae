#include <algorithm>

#include "kernels_impl.hpp"

// Reference kernels.  Plain loops, explicit re/im arithmetic (no NaN fixup
// branches), accumulation order identical to the vector variants so that the
// backends differ only in rounding of fused operations.

namespace chanstat::kernels {
namespace {

void cgemm_scalar(const cplx* a, const cplx* b, cplx* c,
                  std::size_t n, std::size_t k, std::size_t m) {
    std::fill(c, c + n * m, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* arow = a + i * k;
        cplx* crow = c + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double ar = arow[p].real();
            const double ai = arow[p].imag();
            const cplx* brow = b + p * m;
            for (std::size_t j = 0; j < m; ++j) {
                const double br = brow[j].real();
                const double bi = brow[j].imag();
                crow[j] += cplx{ar * br - ai * bi, ar * bi + ai * br};
            }
        }
    }
}

void accumulate_mag2_scalar(const cplx* s, double* acc, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        const double re = s[i].real();
        const double im = s[i].imag();
        acc[i] += re * re + im * im;
    }
}

double dot_scalar(const double* a, const double* b, std::size_t len) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* a, std::size_t len) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += a[i];
    return acc;
}

void scale_scalar(double* a, std::size_t len, double factor) {
    for (std::size_t i = 0; i < len; ++i) a[i] *= factor;
}

const Kernels table = {
    "scalar",
    cgemm_scalar,
    accumulate_mag2_scalar,
    dot_scalar,
    sum_scalar,
    scale_scalar,
};

}  // namespace

const Kernels* scalar_table() { return &table; }

}  // namespace chanstat::kernels
