#pragma once

#include <cstddef>

// Data-parallel inner loops used by the trajectory and stability code.
// Scalar reference implementations always exist; an AVX2 variant is picked
// at load time when the CPU supports it. Both variants are exported so the
// equivalence tests can compare them directly.

namespace clockwatch::kernels {

namespace scalar {
// Sum of squared overlapped second differences: sum over i of
// (x[i+2m] - 2*x[i+m] + x[i])^2, i in [0, n-2m).
double sum_sq_second_diff(const double* x, std::size_t n, std::size_t m);
// out[i] = a[i] - b[i]
void subtract(const double* a, const double* b, double* out, std::size_t n);
// x[i] += y[i]
void add_inplace(double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum_sq_second_diff(const double* x, std::size_t n, std::size_t m);
void subtract(const double* a, const double* b, double* out, std::size_t n);
void add_inplace(double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

// Dispatched entry points.
double sum_sq_second_diff(const double* x, std::size_t n, std::size_t m);
void subtract(const double* a, const double* b, double* out, std::size_t n);
void add_inplace(double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// Name of the active backend ("scalar" or "avx2").
const char* backend();
// Force the scalar backend (used by tests and the CLOCKWATCH_FORCE_SCALAR
// env var); returns the previous backend name.
void force_scalar(bool on);

}  // namespace clockwatch::kernels
