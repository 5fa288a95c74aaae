#include "kernels_impl.hpp"

// AVX2/FMA variants.  This file is compiled with -mavx2 -mfma on x86 builds;
// the dispatcher only hands the table out after a CPUID check.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace chanstat::kernels {
namespace {

// One __m256d holds two complex doubles [re0 im0 re1 im1].  For c += a*b with
// a broadcast as (ar, ai):
//   t   = ai * [im0 re0 im1 re1]
//   c  += fmaddsub(ar, b, t)   -> even lanes ar*re - ai*im, odd ar*im + ai*re
inline __m256d cmul_acc(__m256d acc, __m256d ar, __m256d ai, __m256d b) {
    const __m256d swapped = _mm256_permute_pd(b, 0x5);
    return _mm256_add_pd(acc, _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, swapped)));
}

void cgemm_avx2(const cplx* a, const cplx* b, cplx* c,
                std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx* arow = a + i * k;
        double* crow = reinterpret_cast<double*>(c + i * m);

        std::size_t j = 0;
        for (; j + 8 <= m; j += 8) {
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            __m256d acc2 = _mm256_setzero_pd();
            __m256d acc3 = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d ar = _mm256_set1_pd(arow[p].real());
                const __m256d ai = _mm256_set1_pd(arow[p].imag());
                const double* bp = reinterpret_cast<const double*>(b + p * m + j);
                acc0 = cmul_acc(acc0, ar, ai, _mm256_loadu_pd(bp));
                acc1 = cmul_acc(acc1, ar, ai, _mm256_loadu_pd(bp + 4));
                acc2 = cmul_acc(acc2, ar, ai, _mm256_loadu_pd(bp + 8));
                acc3 = cmul_acc(acc3, ar, ai, _mm256_loadu_pd(bp + 12));
            }
            _mm256_storeu_pd(crow + 2 * j, acc0);
            _mm256_storeu_pd(crow + 2 * j + 4, acc1);
            _mm256_storeu_pd(crow + 2 * j + 8, acc2);
            _mm256_storeu_pd(crow + 2 * j + 12, acc3);
        }
        for (; j + 2 <= m; j += 2) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d ar = _mm256_set1_pd(arow[p].real());
                const __m256d ai = _mm256_set1_pd(arow[p].imag());
                acc = cmul_acc(acc, ar, ai,
                               _mm256_loadu_pd(reinterpret_cast<const double*>(b + p * m + j)));
            }
            _mm256_storeu_pd(crow + 2 * j, acc);
        }
        if (j < m) {
            double cr = 0.0, ci = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                const double ar = arow[p].real();
                const double ai = arow[p].imag();
                const double br = b[p * m + j].real();
                const double bi = b[p * m + j].imag();
                cr += ar * br - ai * bi;
                ci += ar * bi + ai * br;
            }
            crow[2 * j] = cr;
            crow[2 * j + 1] = ci;
        }
    }
}

void accumulate_mag2_avx2(const cplx* s, double* acc, std::size_t len) {
    const double* sp = reinterpret_cast<const double*>(s);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(sp + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(sp + 2 * i + 4);
        // hadd gives [|z0|^2 |z2|^2 |z1|^2 |z3|^2]; permute restores order.
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
        const __m256d mags = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), mags));
    }
    for (; i < len; ++i) {
        const double re = s[i].real();
        const double im = s[i].imag();
        acc[i] += re * re + im * im;
    }
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < len; ++i) out += a[i] * b[i];
    return out;
}

double sum_avx2(const double* a, std::size_t len) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < len; ++i) out += a[i];
    return out;
}

void scale_avx2(double* a, std::size_t len, double factor) {
    const __m256d f = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), f));
    }
    for (; i < len; ++i) a[i] *= factor;
}

const Kernels table = {
    "avx2",
    cgemm_avx2,
    accumulate_mag2_avx2,
    dot_avx2,
    sum_avx2,
    scale_avx2,
};

}  // namespace

const Kernels* avx2_table() { return &table; }

}  // namespace chanstat::kernels

#else

namespace chanstat::kernels {

const Kernels* avx2_table() { return nullptr; }

}  // namespace chanstat::kernels

#endif
