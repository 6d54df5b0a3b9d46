#pragma once

// Dense double-precision kernels used by the MLP forward pass and the
// Levenberg-Marquardt normal equations. A scalar reference implementation is
// always present; an AVX2+FMA variant is selected at runtime when the CPU
// supports it. Set VARSEL_SIMD=scalar to force the reference path.
//
// Results of the two backends agree to rounding, not bit-for-bit (lane-wise
// accumulation and fused multiply-add change the rounding sequence). Within
// one process the backend is fixed, so runs stay reproducible.

#include <cstddef>
#include <span>
#include <string_view>

namespace varsel::simd {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*sum_squares)(const double* x, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace scalar

#if defined(VARSEL_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace avx2
#endif

bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
/// Throws ConfigError if the backend is not available on this CPU.
void set_backend(Backend b);
std::string_view backend_name(Backend b) noexcept;
const KernelTable& kernels(Backend b);

/// sum a[i]*b[i]
double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// sum x[i]^2
double sum_squares(std::span<const double> x);

}  // namespace varsel::simd
