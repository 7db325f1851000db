#include "cone_lpv/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "cone_lpv/errors.hpp"

namespace cone_lpv::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(CONE_LPV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("CONE_LPV_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

void check_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ContractError(std::string(what) + ": length mismatch");
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool backend_supported(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> x, std::span<const double> y) {
  check_same(x.size(), y.size(), "dot");
#ifdef CONE_LPV_HAVE_AVX2
  if (active_backend() == Backend::avx2) return avx2::dot(x.data(), y.data(), x.size());
#endif
  return scalar::dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size(), "axpy");
#ifdef CONE_LPV_HAVE_AVX2
  if (active_backend() == Backend::avx2) return avx2::axpy(a, x.data(), y.data(), x.size());
#endif
  scalar::axpy(a, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  check_same(a.size(), rows * cols, "gemv");
  check_same(x.size(), cols, "gemv");
  check_same(y.size(), rows, "gemv");
#ifdef CONE_LPV_HAVE_AVX2
  if (active_backend() == Backend::avx2) return avx2::gemv(a.data(), rows, cols, x.data(), y.data());
#endif
  scalar::gemv(a.data(), rows, cols, x.data(), y.data());
}

}  // namespace cone_lpv::kernels
