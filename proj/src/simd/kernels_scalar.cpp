#include <cmath>

#include "rkrfm/simd/dispatch.hpp"

namespace rkrfm::simd {

namespace {

void affine(std::size_t n, double wx, double wy, double b, const double* x, const double* y, double* u) {
    for (std::size_t i = 0; i < n; ++i) u[i] = wx * x[i] + wy * y[i] + b;
}

// Derivatives of tanh as polynomials in t = tanh(u):
//   t' = 1 - t^2, t'' = -2t + 2t^3, t''' = -2 + 8t^2 - 6t^4, t'''' = 16t - 40t^3 + 24t^5
void tanh_derivs(std::size_t n, int r, const double* u, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::tanh(u[i]);
        const double t2 = t * t;
        out[i] = t;
        if (r >= 1) out[n + i] = 1.0 - t2;
        if (r >= 2) out[2 * n + i] = t * (-2.0 + 2.0 * t2);
        if (r >= 3) out[3 * n + i] = -2.0 + t2 * (8.0 - 6.0 * t2);
        if (r >= 4) out[4 * n + i] = t * (16.0 + t2 * (-40.0 + 24.0 * t2));
    }
}

void cos_derivs(std::size_t n, int r, const double* u, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(u[i]);
        const double s = std::sin(u[i]);
        const double cyc[4] = {c, -s, -c, s};
        for (int k = 0; k <= r; ++k) out[k * n + i] = cyc[k & 3];
    }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void mul_acc(std::size_t n, double c, const double* x, const double* y, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] += c * x[i] * y[i];
}

}  // namespace

namespace detail {
const Kernels& scalar_kernels() {
    static const Kernels table{affine, tanh_derivs, cos_derivs, axpy, mul_acc};
    return table;
}
}  // namespace detail

}  // namespace rkrfm::simd
