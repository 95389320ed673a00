#pragma once

// One leapfrog step of u_tt = u_xx + mu u on a periodic grid:
//   next = (2 cur - prev) + (r2 (cur[j+1] + cur[j-1] - 2 cur[j]) + c cur[j])
// with r2 = (dt/dx)^2 and c = dt^2 mu. Both kernels evaluate the same
// operation sequence without contraction, so their results agree bitwise.

#include <cstddef>

namespace pdham::numsim {

enum class KernelKind { Auto, Scalar, Avx2 };

void leapfrog_step_scalar(const double* prev, const double* cur, double* next, std::size_t n, double r2, double c);
void leapfrog_step_avx2(const double* prev, const double* cur, double* next, std::size_t n, double r2, double c);

bool avx2_available();
/// Auto resolves to Avx2 when the CPU has it.
KernelKind resolve(KernelKind k);
void leapfrog_step(KernelKind k, const double* prev, const double* cur, double* next, std::size_t n, double r2,
                   double c);

}  // namespace pdham::numsim
