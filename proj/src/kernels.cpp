#include "driftlab/kernels.hpp"

#include <cassert>
#include <cstdlib>
#include <cstring>

namespace driftlab::kernels {

namespace scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = a * x[i];
    y[i] = y[i] + prod;
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace scalar

bool avx2_available() {
#if defined(DRIFTLAB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

struct Dispatch {
  Backend backend;
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
};

Dispatch select() {
  const char* forced = std::getenv("DRIFTLAB_SIMD");
  const bool force_scalar = forced != nullptr && std::strcmp(forced, "scalar") == 0;
#if defined(DRIFTLAB_HAVE_AVX2)
  if (!force_scalar && avx2_available()) return {Backend::avx2, &avx2::axpy, &avx2::dot};
#else
  (void)force_scalar;
#endif
  return {Backend::scalar, &scalar::axpy, &scalar::dot};
}

const Dispatch& dispatch() {
  static const Dispatch table = select();
  return table;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

std::string_view backend_name(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  dispatch().axpy(a, x.data(), y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return dispatch().dot(x.data(), y.data(), x.size());
}

}  // namespace driftlab::kernels
