#include "vigil/kernels/kernels.hpp"

#include <atomic>

namespace vigil::kern {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        double acc = b ? b[r] : 0.0;
        acc += dot(wr, x, cols);
        y[r] = acc;
    }
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        const double xr = x[r];
        if (xr == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) y[c] += xr * wr[c];
    }
}

void ger_acc(double* a, const double* x, std::size_t rows,
             const double* y, std::size_t cols, double alpha) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* ar = a + r * cols;
        const double xr = alpha * x[r];
        if (xr == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) ar[c] += xr * y[c];
    }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

} // namespace scalar

#if defined(VIGIL_BUILD_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y);
void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* x, double* y);
void ger_acc(double* a, const double* x, std::size_t rows,
             const double* y, std::size_t cols, double alpha);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
bool cpu_has_avx2_fma();
} // namespace avx2
#endif

#if defined(VIGIL_BUILD_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y);
void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* x, double* y);
void ger_acc(double* a, const double* x, std::size_t rows,
             const double* y, std::size_t cols, double alpha);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
} // namespace neon
#endif

namespace {

Isa detect_isa() {
#if defined(VIGIL_BUILD_AVX2)
    if (avx2::cpu_has_avx2_fma()) return Isa::Avx2;
#endif
#if defined(VIGIL_BUILD_NEON)
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

std::atomic<Isa> g_isa{detect_isa()};

} // namespace

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
#if defined(VIGIL_BUILD_AVX2)
        case Isa::Avx2: return avx2::cpu_has_avx2_fma();
#endif
#if defined(VIGIL_BUILD_NEON)
        case Isa::Neon: return true;
#endif
        default: return false;
    }
}

void force_isa(Isa isa) {
    if (isa_supported(isa)) g_isa.store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
        default: return "scalar";
    }
}

#if defined(VIGIL_BUILD_AVX2)
#define VIGIL_DISPATCH(fn, ...)                                   \
    do {                                                          \
        if (g_isa.load(std::memory_order_relaxed) == Isa::Avx2)   \
            return avx2::fn(__VA_ARGS__);                         \
        return scalar::fn(__VA_ARGS__);                           \
    } while (0)
#elif defined(VIGIL_BUILD_NEON)
#define VIGIL_DISPATCH(fn, ...)                                   \
    do {                                                          \
        if (g_isa.load(std::memory_order_relaxed) == Isa::Neon)   \
            return neon::fn(__VA_ARGS__);                         \
        return scalar::fn(__VA_ARGS__);                           \
    } while (0)
#else
#define VIGIL_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) {
    VIGIL_DISPATCH(dot, a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    VIGIL_DISPATCH(axpy, alpha, x, y, n);
}

void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y) {
    VIGIL_DISPATCH(gemv, w, rows, cols, x, b, y);
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    VIGIL_DISPATCH(gemv_t_acc, w, rows, cols, x, y);
}

void ger_acc(double* a, const double* x, std::size_t rows,
             const double* y, std::size_t cols, double alpha) {
    VIGIL_DISPATCH(ger_acc, a, x, rows, y, cols, alpha);
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    VIGIL_DISPATCH(hadamard, a, b, out, n);
}

#undef VIGIL_DISPATCH

} // namespace vigil::kern
