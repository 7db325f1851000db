#pragma once

// Data-parallel inner loops used by the linalg kernel and the feasibility
// engine. Every kernel has a portable scalar reference and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at runtime from CPUID and
// can be overridden with CONE_LPV_SIMD=scalar|avx2 or set_backend().

#include <cstddef>
#include <span>
#include <string_view>

namespace cone_lpv::kernels {

enum class Backend { scalar, avx2 };

/// Backend used by the dispatching entry points below.
Backend active_backend();
/// Forces a backend; returns false (and changes nothing) if unsupported.
bool set_backend(Backend b);
bool backend_supported(Backend b);
std::string_view backend_name(Backend b);

double dot(std::span<const double> x, std::span<const double> y);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = A x with A row-major rows x cols.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar

#ifdef CONE_LPV_HAVE_AVX2
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

}  // namespace cone_lpv::kernels
