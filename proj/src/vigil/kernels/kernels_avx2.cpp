// AVX2/FMA variants of the dense-algebra kernels. Compiled with
// -mavx2 -mfma; only reached after a runtime cpuid check.

#include <cstddef>
#include <immintrin.h>

#if defined(_MSC_VER)
#include <intrin.h>
#endif

namespace vigil::kern::avx2 {

bool cpu_has_avx2_fma() {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}
} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y) {
    std::size_t r = 0;
    // two rows at a time keeps x loads shared
    for (; r + 2 <= rows; r += 2) {
        const double* w0 = w + r * cols;
        const double* w1 = w0 + cols;
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            const __m256d vx = _mm256_loadu_pd(x + c);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), vx, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), vx, a1);
        }
        double s0 = hsum(a0), s1 = hsum(a1);
        for (; c < cols; ++c) {
            s0 += w0[c] * x[c];
            s1 += w1[c] * x[c];
        }
        y[r] = s0 + (b ? b[r] : 0.0);
        y[r + 1] = s1 + (b ? b[r + 1] : 0.0);
    }
    for (; r < rows; ++r) {
        const double* wr = w + r * cols;
        double s = dot(wr, x, cols);
        y[r] = s + (b ? b[r] : 0.0);
    }
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        axpy(xr, w + r * cols, y, cols);
    }
}

void ger_acc(double* a, const double* x, std::size_t rows,
             const double* y, std::size_t cols, double alpha) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double xr = alpha * x[r];
        if (xr == 0.0) continue;
        axpy(xr, y, a + r * cols, cols);
    }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

} // namespace vigil::kern::avx2
