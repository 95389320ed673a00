#include "pdham/numsim/kernel.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define PDHAM_X86 1
#include <immintrin.h>
#else
#define PDHAM_X86 0
#endif

namespace pdham::numsim {

namespace {

inline double point(double p, double um, double u, double up, double r2, double c) {
    const double lap = (up + um) - 2.0 * u;
    return (2.0 * u - p) + (r2 * lap + c * u);
}

}  // namespace

void leapfrog_step_scalar(const double* prev, const double* cur, double* next, std::size_t n, double r2, double c) {
    next[0] = point(prev[0], cur[n - 1], cur[0], cur[1], r2, c);
    for (std::size_t j = 1; j + 1 < n; ++j) next[j] = point(prev[j], cur[j - 1], cur[j], cur[j + 1], r2, c);
    next[n - 1] = point(prev[n - 1], cur[n - 2], cur[n - 1], cur[0], r2, c);
}

#if PDHAM_X86

__attribute__((target("avx2"))) void leapfrog_step_avx2(const double* prev, const double* cur, double* next,
                                                        std::size_t n, double r2, double c) {
    next[0] = point(prev[0], cur[n - 1], cur[0], cur[1], r2, c);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d vr2 = _mm256_set1_pd(r2);
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t j = 1;
    for (; j + 4 < n; j += 4) {
        const __m256d u = _mm256_loadu_pd(cur + j);
        const __m256d um = _mm256_loadu_pd(cur + j - 1);
        const __m256d up = _mm256_loadu_pd(cur + j + 1);
        const __m256d p = _mm256_loadu_pd(prev + j);
        const __m256d lap = _mm256_sub_pd(_mm256_add_pd(up, um), _mm256_mul_pd(two, u));
        const __m256d lhs = _mm256_sub_pd(_mm256_mul_pd(two, u), p);
        const __m256d rhs = _mm256_add_pd(_mm256_mul_pd(vr2, lap), _mm256_mul_pd(vc, u));
        _mm256_storeu_pd(next + j, _mm256_add_pd(lhs, rhs));
    }
    for (; j + 1 < n; ++j) next[j] = point(prev[j], cur[j - 1], cur[j], cur[j + 1], r2, c);
    next[n - 1] = point(prev[n - 1], cur[n - 2], cur[n - 1], cur[0], r2, c);
}

bool avx2_available() { return __builtin_cpu_supports("avx2") != 0; }

#else

void leapfrog_step_avx2(const double* prev, const double* cur, double* next, std::size_t n, double r2, double c) {
    leapfrog_step_scalar(prev, cur, next, n, r2, c);
}

bool avx2_available() { return false; }

#endif

KernelKind resolve(KernelKind k) {
    if (k == KernelKind::Auto) return avx2_available() ? KernelKind::Avx2 : KernelKind::Scalar;
    if (k == KernelKind::Avx2 && !avx2_available()) return KernelKind::Scalar;
    return k;
}

void leapfrog_step(KernelKind k, const double* prev, const double* cur, double* next, std::size_t n, double r2,
                   double c) {
    if (resolve(k) == KernelKind::Avx2)
        leapfrog_step_avx2(prev, cur, next, n, r2, c);
    else
        leapfrog_step_scalar(prev, cur, next, n, r2, c);
}

}  // namespace pdham::numsim
