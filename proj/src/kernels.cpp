#include "clockwatch/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace clockwatch::kernels {

namespace scalar {

double sum_sq_second_diff(const double* x, std::size_t n, std::size_t m) {
    if (n < 2 * m + 1) return 0.0;
    double acc = 0.0;
    const std::size_t count = n - 2 * m;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = x[i + 2 * m] - 2.0 * x[i + m] + x[i];
        acc += d * d;
    }
    return acc;
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void add_inplace(double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] += y[i];
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sum_sq(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace scalar

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

std::atomic<bool> g_force_scalar{false};

bool use_avx2() {
    static const bool has = cpu_has_avx2() &&
        std::getenv("CLOCKWATCH_FORCE_SCALAR") == nullptr;
    return has && !g_force_scalar.load(std::memory_order_relaxed);
}

}  // namespace

void force_scalar(bool on) {
    g_force_scalar.store(on, std::memory_order_relaxed);
}

const char* backend() { return use_avx2() ? "avx2" : "scalar"; }

#if defined(__x86_64__) || defined(_M_X64)
#define CW_DISPATCH(fn, ...) \
    return use_avx2() ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#define CW_DISPATCH_VOID(fn, ...)                 \
    do {                                          \
        if (use_avx2()) avx2::fn(__VA_ARGS__);    \
        else scalar::fn(__VA_ARGS__);             \
    } while (0)
#else
#define CW_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#define CW_DISPATCH_VOID(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double sum_sq_second_diff(const double* x, std::size_t n, std::size_t m) {
    CW_DISPATCH(sum_sq_second_diff, x, n, m);
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
    CW_DISPATCH_VOID(subtract, a, b, out, n);
}

void add_inplace(double* x, const double* y, std::size_t n) {
    CW_DISPATCH_VOID(add_inplace, x, y, n);
}

double sum(const double* x, std::size_t n) { CW_DISPATCH(sum, x, n); }

double sum_sq(const double* x, std::size_t n) { CW_DISPATCH(sum_sq, x, n); }

double dot(const double* a, const double* b, std::size_t n) {
    CW_DISPATCH(dot, a, b, n);
}

}  // namespace clockwatch::kernels
