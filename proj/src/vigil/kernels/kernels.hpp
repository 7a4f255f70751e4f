#pragma once
// Dense-algebra kernels behind the neural network engine.
//
// Every kernel has a scalar reference implementation and, where the build
// target supports it, a SIMD variant (AVX2/FMA on x86-64, NEON on arm64).
// The active variant is chosen once at startup from CPU features and can be
// overridden with force_isa() so tests can compare implementations.

#include <cstddef>

namespace vigil::kern {

enum class Isa { Scalar, Avx2, Neon };

Isa active_isa();
void force_isa(Isa isa);   // Scalar is always accepted; others require support
bool isa_supported(Isa isa);
const char* isa_name(Isa isa);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// y = W x + b, W row-major [rows x cols]; b may be null
void gemv(const double* w, std::size_t rows, std::size_t cols,
          const double* x, const double* b, double* y);

// y += W^T x, W row-major [rows x cols], x has rows elems, y has cols elems
void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols,
                const double* x, double* y);

// A += alpha * x y^T, A row-major [rows x cols]
void ger_acc(double* a, const double* x, std::size_t rows,
             const double* y, std::size_t cols, double alpha);

// out[i] = a[i] * b[i]
void hadamard(const double* a, const double* b, double* out, std::size_t n);

} // namespace vigil::kern
