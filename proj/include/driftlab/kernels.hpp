#pragma once

// Float-mode dense kernels used by the elimination and residual loops.
//
// Each kernel has a portable scalar reference and an AVX2 variant; the variant
// is chosen once at first use from the CPU feature flags. Setting the
// environment variable DRIFTLAB_SIMD=scalar forces the reference path.
//
// axpy is elementwise and bit-identical across backends (no FMA contraction).
// dot reorders the summation, so backends agree only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace driftlab::kernels {

enum class Backend { scalar, avx2 };

/// Backend selected for this process.
Backend active_backend();
std::string_view backend_name(Backend backend);

/// True when the AVX2 variant is compiled in and supported by this CPU.
bool avx2_available();

/// y[i] += a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

/// sum_i x[i] * y[i]
double dot(std::span<const double> x, std::span<const double> y);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2

}  // namespace driftlab::kernels
