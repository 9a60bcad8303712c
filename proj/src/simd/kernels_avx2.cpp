#include "rkrfm/simd/dispatch.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>

namespace rkrfm::simd {

namespace {

inline __m256d poly(__m256d x, std::initializer_list<double> c) {
    auto it = c.begin();
    __m256d acc = _mm256_set1_pd(*it++);
    for (; it != c.end(); ++it) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(*it));
    return acc;
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

// Cephes exp: x = n ln2 + r, Pade form for e^r, then scale by 2^n. Valid for |x| < 700.
inline __m256d exp_pd(__m256d x) {
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125E-1), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212E-6), r);
    const __m256d rr = _mm256_mul_pd(r, r);
    const __m256d px = _mm256_mul_pd(
        r, poly(rr, {1.26177193074810590878E-4, 3.02994407707441961300E-2, 9.99999999999999999910E-1}));
    const __m256d qx = poly(rr, {3.00198505138664455042E-6, 2.52448340349684104192E-3, 2.27265548208155028766E-1,
                                 2.00000000000000000009E0});
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));
    // 2^n by building the exponent field directly.
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);
    __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, magic));
    bits = _mm256_sub_epi64(bits, _mm256_castpd_si256(magic));
    bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

// tanh: odd rational approximation for |x| < 0.625, 1 - 2/(e^{2|x|}+1) above,
// saturated beyond |x| = 20 where tanh rounds to +-1.
inline __m256d tanh_pd(__m256d x) {
    const __m256d sign = _mm256_and_pd(x, _mm256_set1_pd(-0.0));
    const __m256d a = _mm256_min_pd(abs_pd(x), _mm256_set1_pd(20.0));
    const __m256d z = _mm256_mul_pd(x, x);
    const __m256d p = poly(z, {-9.64399179425052238628E-1, -9.92877231001918586564E1, -1.61468768441708447952E3});
    const __m256d qq = poly(z, {1.0, 1.12811678491632931402E2, 2.23548839060100448583E3, 4.84406305325125486048E3});
    const __m256d small = _mm256_fmadd_pd(_mm256_mul_pd(x, z), _mm256_div_pd(p, qq), x);
    const __m256d e = exp_pd(_mm256_add_pd(a, a));
    __m256d large = _mm256_sub_pd(_mm256_set1_pd(1.0),
                                  _mm256_div_pd(_mm256_set1_pd(2.0), _mm256_add_pd(e, _mm256_set1_pd(1.0))));
    large = _mm256_or_pd(large, sign);
    const __m256d use_small = _mm256_cmp_pd(abs_pd(x), _mm256_set1_pd(0.625), _CMP_LT_OQ);
    return _mm256_blendv_pd(large, small, use_small);
}

// sin and cos together: reduce by multiples of pi/2 in three parts, evaluate the
// Cephes polynomials on |r| <= pi/4 and rotate by the quadrant.
inline void sincos_pd(__m256d x, __m256d& s, __m256d& c) {
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(0.63661977236758134308)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.57079632673412561417e+00), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.07710050630396597660e-11), r);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(2.02226624879595063154e-21), r);
    const __m256d z = _mm256_mul_pd(r, r);
    const __m256d sp = poly(z, {1.58962301576546568060E-10, -2.50507477628578072866E-8, 2.75573136213857245213E-6,
                                -1.98412698295895385996E-4, 8.33333333332211858878E-3, -1.66666666666666307295E-1});
    const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(r, z), sp, r);
    const __m256d cp = poly(z, {-1.13585365213876817300E-11, 2.08757008419747316778E-9, -2.75573141792967388112E-7,
                                2.48015872888517045348E-5, -1.38888888888730564116E-3, 4.16666666666665929218E-2});
    const __m256d cr = _mm256_fmadd_pd(_mm256_mul_pd(z, z), cp, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

    // Quadrant q = n mod 4 from the integer part of n.
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);
    const __m256i qi = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
    const __m256i q1 = _mm256_and_si256(qi, _mm256_set1_epi64x(1));
    const __m256i q2 = _mm256_and_si256(qi, _mm256_set1_epi64x(2));
    const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(q1, _mm256_set1_epi64x(1)));
    // q in {1,2} negates cos, q in {2,3} negates sin.
    const __m256i q_plus1_and2 = _mm256_and_si256(_mm256_add_epi64(qi, _mm256_set1_epi64x(1)), _mm256_set1_epi64x(2));
    const __m256d neg_s = _mm256_castsi256_pd(_mm256_slli_epi64(q2, 62));
    const __m256d neg_c = _mm256_castsi256_pd(_mm256_slli_epi64(q_plus1_and2, 62));
    s = _mm256_xor_pd(_mm256_blendv_pd(sr, cr, swap), neg_s);
    c = _mm256_xor_pd(_mm256_blendv_pd(cr, sr, swap), neg_c);
}

template <class Body>
inline void for_each_block(std::size_t n, Body body) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) body(i, 4);
    if (i < n) body(i, n - i);
}

inline __m256d load_part(const double* p, std::size_t m) {
    if (m == 4) return _mm256_loadu_pd(p);
    alignas(32) double tmp[4] = {0.0, 0.0, 0.0, 0.0};
    std::copy(p, p + m, tmp);
    return _mm256_load_pd(tmp);
}

inline void store_part(double* p, std::size_t m, __m256d v) {
    if (m == 4) {
        _mm256_storeu_pd(p, v);
        return;
    }
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, v);
    std::copy(tmp, tmp + m, p);
}

void affine(std::size_t n, double wx, double wy, double b, const double* x, const double* y, double* u) {
    const __m256d vwx = _mm256_set1_pd(wx), vwy = _mm256_set1_pd(wy), vb = _mm256_set1_pd(b);
    for_each_block(n, [&](std::size_t i, std::size_t m) {
        const __m256d v = _mm256_fmadd_pd(vwx, load_part(x + i, m), _mm256_fmadd_pd(vwy, load_part(y + i, m), vb));
        store_part(u + i, m, v);
    });
}

void tanh_derivs(std::size_t n, int r, const double* u, double* out) {
    for_each_block(n, [&](std::size_t i, std::size_t m) {
        const __m256d t = tanh_pd(load_part(u + i, m));
        const __m256d t2 = _mm256_mul_pd(t, t);
        store_part(out + i, m, t);
        if (r >= 1) store_part(out + n + i, m, _mm256_sub_pd(_mm256_set1_pd(1.0), t2));
        if (r >= 2) store_part(out + 2 * n + i, m, _mm256_mul_pd(t, poly(t2, {2.0, -2.0})));
        if (r >= 3) store_part(out + 3 * n + i, m, poly(t2, {-6.0, 8.0, -2.0}));
        if (r >= 4) store_part(out + 4 * n + i, m, _mm256_mul_pd(t, poly(t2, {24.0, -40.0, 16.0})));
    });
}

void cos_derivs(std::size_t n, int r, const double* u, double* out) {
    const __m256d negzero = _mm256_set1_pd(-0.0);
    for_each_block(n, [&](std::size_t i, std::size_t m) {
        __m256d s, c;
        sincos_pd(load_part(u + i, m), s, c);
        const __m256d cyc[4] = {c, _mm256_xor_pd(s, negzero), _mm256_xor_pd(c, negzero), s};
        for (int k = 0; k <= r; ++k) store_part(out + k * n + i, m, cyc[k & 3]);
    });
}

void axpy(std::size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    for_each_block(n, [&](std::size_t i, std::size_t m) {
        store_part(y + i, m, _mm256_fmadd_pd(va, load_part(x + i, m), load_part(y + i, m)));
    });
}

void mul_acc(std::size_t n, double c, const double* x, const double* y, double* out) {
    const __m256d vc = _mm256_set1_pd(c);
    for_each_block(n, [&](std::size_t i, std::size_t m) {
        const __m256d xy = _mm256_mul_pd(load_part(x + i, m), load_part(y + i, m));
        store_part(out + i, m, _mm256_fmadd_pd(vc, xy, load_part(out + i, m)));
    });
}

}  // namespace

namespace detail {
const Kernels& avx2_kernels() {
    static const Kernels table{affine, tanh_derivs, cos_derivs, axpy, mul_acc};
    return table;
}
}  // namespace detail

}  // namespace rkrfm::simd

#else

namespace rkrfm::simd::detail {
// Without AVX2 code generation the table aliases the scalar kernels.
const Kernels& avx2_kernels() { return scalar_kernels(); }
}  // namespace rkrfm::simd::detail

#endif
