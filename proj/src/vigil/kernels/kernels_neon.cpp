// NEON variants for arm64 builds.

#include <cstddef>

#if defined(__aarch64__) || defined(_M_ARM64)
#include <arm_neon.h>

namespace vigil::kern::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = dot(w + r * cols, x, cols);
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
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

} // namespace vigil::kern::neon

#endif // arm64
