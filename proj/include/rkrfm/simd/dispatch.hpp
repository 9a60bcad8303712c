#pragma once

#include <cstddef>

namespace rkrfm::simd {

enum class Isa { Scalar, Avx2 };

/// Function table for the data-parallel inner loops. Every entry has a scalar
/// reference implementation; the AVX2 table is equivalence-tested against it.
struct Kernels {
    /// u[i] = wx*x[i] + wy*y[i] + b
    void (*affine)(std::size_t n, double wx, double wy, double b, const double* x, const double* y, double* u);
    /// out[k*n + i] = tanh^{(k)}(u[i]) for k = 0..r
    void (*tanh_derivs)(std::size_t n, int r, const double* u, double* out);
    /// out[k*n + i] = cos^{(k)}(u[i]) for k = 0..r
    void (*cos_derivs)(std::size_t n, int r, const double* u, double* out);
    /// y[i] += a*x[i]
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    /// out[i] += c*x[i]*y[i]
    void (*mul_acc)(std::size_t n, double c, const double* x, const double* y, double* out);
};

const Kernels& kernels(Isa isa);
/// The table selected at startup: AVX2 when the CPU reports AVX2 and FMA,
/// unless the environment variable RKRFM_SIMD=scalar is set.
const Kernels& kernels();
Isa active_isa();
bool isa_available(Isa isa);
const char* isa_name(Isa isa);
/// Override the startup selection (tests and benchmarking). Throws if unavailable.
void set_active_isa(Isa isa);

namespace detail {
const Kernels& scalar_kernels();
const Kernels& avx2_kernels();
}  // namespace detail

}  // namespace rkrfm::simd
